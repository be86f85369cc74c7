//! Brute-force mixed identities on small matrix groups. Groups are stored as
//! multiplication tables over a canonical element list, so evaluating a word
//! is a sequence of table lookups.

pub mod search;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::LinearGroup;
use crate::linalg::{Field, Matrix};
use crate::words::{free_reduce, Letter, Word};

pub use search::{shortest_identity_search, FoundIdentity, PruneCounts, SearchConfig, SearchMode, SearchReport};

pub const DEFAULT_ORDER_CAP: u64 = 500;
/// Largest number of n x n matrices scanned while enumerating a group.
pub const ENUMERATION_CAP: u64 = 1 << 22;

/// `q = p^e` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Order of GL, SL or PSL of degree `n` over `F_q`.
pub fn classical_order(kind: LinearGroup, n: u32, q: u64) -> u128 {
    let q = q as u128;
    let qn = q.pow(n);
    let gl: u128 = (0..n).map(|i| qn - q.pow(i)).product();
    match kind {
        LinearGroup::Gl => gl,
        LinearGroup::Sl => gl / (q - 1),
        LinearGroup::Psl => gl / (q - 1) / gcd(n as u128, q - 1),
    }
}

/// A finite matrix group with precomputed tables. For PSL each element is the
/// representative whose first nonzero entry (row-major) is 1.
#[derive(Clone, Debug)]
pub struct SmallGroup {
    kind: LinearGroup,
    n: usize,
    field: Field,
    elements: Vec<Matrix>,
    index: HashMap<Vec<u32>, u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: u32,
    central: Vec<bool>,
    class_min: Vec<u32>,
    exponent: u64,
}

fn key(m: &Matrix) -> Vec<u32> {
    m.entries().iter().map(|a| a.packed()).collect()
}

fn canonical(kind: LinearGroup, m: Matrix) -> Matrix {
    if kind == LinearGroup::Psl {
        m.projective_normal_form().1
    } else {
        m
    }
}

pub fn enumerate_group(kind: LinearGroup, n: usize, q: u64) -> Result<SmallGroup> {
    enumerate_group_capped(kind, n, q, DEFAULT_ORDER_CAP)
}

/// All elements in increasing order of their row-major packed entries.
pub fn enumerate_group_capped(kind: LinearGroup, n: usize, q: u64, cap: u64) -> Result<SmallGroup> {
    let (p, e) = prime_power(q).ok_or_else(|| Error::Validation(format!("{q} is not a prime power")))?;
    if n == 0 {
        return Err(Error::DegenerateDimension(n));
    }
    let order = classical_order(kind, n as u32, q);
    if order > cap as u128 {
        return Err(Error::GroupTooLarge(format!("{}_{n}({q}) has order {order} above the cap {cap}", kind_name(kind))));
    }
    let cells = (n * n) as u32;
    let total = (q as u128).checked_pow(cells).filter(|&t| t <= ENUMERATION_CAP as u128).ok_or_else(|| {
        Error::GroupTooLarge(format!("{q}^{cells} matrices exceed the enumeration cap {ENUMERATION_CAP}"))
    })? as u64;
    let field = Field::new(p, e)?;
    let mut keys = BTreeSet::new();
    for idx in 0..total {
        let mut m = Matrix::zeros(&field, n, n);
        let mut rest = idx;
        for cell in 0..n * n {
            m.set(cell / n, cell % n, field.element((rest % q) as u32)?);
            rest /= q;
        }
        let det = m.determinant();
        let keep = match kind {
            LinearGroup::Gl => !det.is_zero(),
            _ => det == field.one(),
        };
        if keep {
            keys.insert(key(&canonical(kind, m)));
        }
    }
    let elements: Vec<Matrix> = keys
        .iter()
        .map(|k| {
            let rows: Vec<Vec<u32>> = k.chunks(n).map(|c| c.to_vec()).collect();
            Matrix::from_packed(&field, &rows)
        })
        .collect::<Result<_>>()?;
    debug_assert_eq!(elements.len() as u128, order);
    let index: HashMap<Vec<u32>, u32> = keys.into_iter().enumerate().map(|(i, k)| (k, i as u32)).collect();
    let size = elements.len();
    let lookup = |m: Matrix| -> u32 { index[&key(&canonical(kind, m))] };
    let mut mul = vec![0u32; size * size];
    for a in 0..size {
        for b in 0..size {
            mul[a * size + b] = lookup(elements[a].mul(&elements[b]));
        }
    }
    let identity = lookup(Matrix::identity(&field, n));
    let mut inv = vec![0u32; size];
    for a in 0..size {
        inv[a] = (0..size as u32).find(|&b| mul[a * size + b as usize] == identity).expect("group element");
    }
    let central = (0..size).map(|a| (0..size).all(|b| mul[a * size + b] == mul[b * size + a])).collect();
    let class_min = (0..size)
        .map(|g| {
            (0..size)
                .map(|h| mul[mul[h * size + g] as usize * size + inv[h] as usize])
                .min()
                .expect("nonempty")
        })
        .collect();
    let mut exponent = 1u64;
    for a in 0..size as u32 {
        let (mut x, mut ord) = (a, 1u64);
        while x != identity {
            x = mul[x as usize * size + a as usize];
            ord += 1;
        }
        exponent = exponent / gcd(exponent as u128, ord as u128) as u64 * ord;
    }
    Ok(SmallGroup { kind, n, field, elements, index, mul, inv, identity, central, class_min, exponent })
}

fn kind_name(kind: LinearGroup) -> &'static str {
    match kind {
        LinearGroup::Gl => "GL",
        LinearGroup::Sl => "SL",
        LinearGroup::Psl => "PSL",
    }
}

impl fmt::Display for SmallGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}({})", kind_name(self.kind), self.n, self.field.q())
    }
}

impl SmallGroup {
    pub fn kind(&self) -> LinearGroup {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Matrix {
        &self.elements[i as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.elements.len() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn is_central(&self, a: u32) -> bool {
        self.central[a as usize]
    }

    pub fn center(&self) -> Vec<u32> {
        (0..self.order() as u32).filter(|&a| self.is_central(a)).collect()
    }

    /// Smallest index in the conjugacy class of `a`.
    pub fn class_min(&self, a: u32) -> u32 {
        self.class_min[a as usize]
    }

    /// Index of a matrix (after canonical scaling for PSL).
    pub fn index_of(&self, m: &Matrix) -> Option<u32> {
        if m.field() != &self.field || m.rows() != self.n || m.cols() != self.n {
            return None;
        }
        self.index.get(&key(&canonical(self.kind, m.clone()))).copied()
    }
}

/// A word with constants from a [`SmallGroup`], constants given by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupWord {
    pub r: usize,
    pub letters: Vec<Letter>,
    pub constants: Vec<u32>,
}

impl GroupWord {
    pub fn new(r: usize, letters: Vec<Letter>, constants: Vec<u32>, g: &SmallGroup) -> Result<GroupWord> {
        if constants.len() != letters.len() + 1 {
            return Err(Error::DimensionMismatch("a word needs one more constant than letters".into()));
        }
        if let Some(l) = letters.iter().find(|l| l.var == 0 || l.var > r) {
            return Err(Error::DimensionMismatch(format!("letter x{} with r = {r}", l.var)));
        }
        if constants.iter().any(|&c| c as usize >= g.order()) {
            return Err(Error::ConstantNotInGroup(constants.iter().position(|&c| c as usize >= g.order()).unwrap()));
        }
        Ok(GroupWord { r, letters, constants })
    }

    /// Word without constants.
    pub fn free(r: usize, letters: Vec<Letter>, g: &SmallGroup) -> GroupWord {
        let constants = vec![g.identity(); letters.len() + 1];
        GroupWord { r, letters, constants }
    }

    /// Looks every constant of a matrix word up in `g`.
    pub fn from_word(w: &Word, g: &SmallGroup) -> Result<GroupWord> {
        let constants = w
            .constants()
            .iter()
            .enumerate()
            .map(|(j, c)| g.index_of(c).ok_or(Error::ConstantNotInGroup(j)))
            .collect::<Result<_>>()?;
        GroupWord::new(w.r(), w.letters().to_vec(), constants, g)
    }

    /// The matrix word with the stored representatives as constants.
    pub fn to_word(&self, g: &SmallGroup) -> Result<Word> {
        let cs = self.constants.iter().map(|&c| g.element(c).clone()).collect();
        Word::new(g.field(), g.n(), self.r, self.letters.clone(), cs)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_singular(&self) -> bool {
        free_reduce(&self.letters).is_empty()
    }

    /// Value at the tuple `h` (indices into the group).
    pub fn evaluate(&self, g: &SmallGroup, h: &[u32]) -> u32 {
        let mut acc = self.constants[0];
        for (j, l) in self.letters.iter().enumerate() {
            let x = h[l.var - 1];
            acc = g.mul(acc, if l.exp == 1 { x } else { g.inv(x) });
            acc = g.mul(acc, self.constants[j + 1]);
        }
        acc
    }

    /// Whether the word is the identity of `G * F_r`: only `x^e 1 x^-e`
    /// cancels.
    pub fn is_trivial(&self, g: &SmallGroup) -> bool {
        let mut letters: Vec<Letter> = Vec::new();
        let mut consts = vec![self.constants[0]];
        for (j, &l) in self.letters.iter().enumerate() {
            let c = self.constants[j + 1];
            if letters.last() == Some(&l.inverse()) && *consts.last().unwrap() == g.identity() {
                letters.pop();
                consts.pop();
                let prev = consts.pop().unwrap();
                consts.push(g.mul(prev, c));
            } else {
                letters.push(l);
                consts.push(c);
            }
        }
        letters.is_empty() && consts[0] == g.identity()
    }

    /// Reduced relative to the center: critical constants are non-central and
    /// other inner constants are trivial or non-central.
    pub fn is_reduced(&self, g: &SmallGroup) -> bool {
        (1..self.letters.len()).all(|j| {
            let c = self.constants[j];
            let (a, b) = (self.letters[j - 1], self.letters[j]);
            if a.var == b.var && a.exp == -b.exp {
                !g.is_central(c)
            } else {
                c == g.identity() || !g.is_central(c)
            }
        })
    }

    /// Text form with constants named `g<index>`; identities omitted.
    pub fn text(&self, g: &SmallGroup) -> String {
        let mut parts = Vec::new();
        for (j, &c) in self.constants.iter().enumerate() {
            if c != g.identity() {
                parts.push(format!("g{c}"));
            }
            if j < self.letters.len() {
                parts.push(self.letters[j].to_string());
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Outcome of an exhaustive identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    /// First tuple (in enumeration order) where the word is not 1.
    pub counterexample: Option<Vec<u32>>,
    pub evaluations: u64,
}

/// Evaluates on tuples in lexicographic index order until one is not 1.
pub(crate) fn check_all_tuples(w: &GroupWord, g: &SmallGroup) -> IdentityCheck {
    let order = g.order() as u32;
    let mut tuple = vec![0u32; w.r];
    let mut evaluations = 0u64;
    loop {
        evaluations += 1;
        if w.evaluate(g, &tuple) != g.identity() {
            return IdentityCheck { holds: false, counterexample: Some(tuple), evaluations };
        }
        let mut k = 0;
        loop {
            if k == w.r {
                return IdentityCheck { holds: true, counterexample: None, evaluations };
            }
            tuple[k] += 1;
            if tuple[k] < order {
                break;
            }
            tuple[k] = 0;
            k += 1;
        }
    }
}

/// Whether `w(h) = 1` for every `h` in `G^r`.
pub fn is_mixed_identity(w: &GroupWord, g: &SmallGroup) -> Result<IdentityCheck> {
    if w.is_trivial(g) {
        return Err(Error::TrivialWord);
    }
    Ok(check_all_tuples(w, g))
}

/// Whether a constant-free word vanishes on all of `G^r`.
pub fn is_law(letters: &[Letter], g: &SmallGroup) -> Result<bool> {
    if letters.is_empty() {
        return Err(Error::EmptyWord);
    }
    if free_reduce(letters).len() != letters.len() {
        return Err(Error::Validation("law candidates must be freely reduced".into()));
    }
    let r = letters.iter().map(|l| l.var).max().unwrap_or(0);
    Ok(check_all_tuples(&GroupWord::free(r, letters.to_vec(), g), g).holds)
}

/// Independent check through matrix arithmetic: every tuple evaluates to a
/// scalar matrix (PSL) or the identity matrix (GL, SL).
pub fn verify_with_matrices(w: &GroupWord, g: &SmallGroup) -> Result<bool> {
    let word = w.to_word(g)?;
    let order = g.order();
    let mut tuple = vec![0usize; w.r];
    loop {
        let h: Vec<Matrix> = tuple.iter().map(|&i| g.elements()[i].clone()).collect();
        let v = crate::words::evaluate(&word, &h)?;
        let ok = match g.kind() {
            LinearGroup::Psl => v.is_scalar(),
            _ => v.is_identity(),
        };
        if !ok {
            return Ok(false);
        }
        let mut k = 0;
        loop {
            if k == w.r {
                return Ok(true);
            }
            tuple[k] += 1;
            if tuple[k] < order {
                break;
            }
            tuple[k] = 0;
            k += 1;
        }
    }
}
