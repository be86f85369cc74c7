//! Words with constants `c_0 x_{ι(1)}^{ε(1)} c_1 ⋯ x_{ι(l)}^{ε(l)} c_l` in
//! GL_n(q) ∗ F_r: classification of indices, reduction modulo central
//! scalars, content, evaluation and the strong-reduction chain.

pub mod dsl;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::seminorm::projective_norm;

/// The letter `x_var^exp`, with `var` 1-based and `exp` ±1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Letter {
    pub var: usize,
    pub exp: i8,
}

impl Letter {
    pub fn new(var: usize, exp: i8) -> Letter {
        assert!(var >= 1 && (exp == 1 || exp == -1), "invalid letter x{var}^{exp}");
        Letter { var, exp }
    }

    pub fn pos(var: usize) -> Letter {
        Letter::new(var, 1)
    }

    pub fn neg(var: usize) -> Letter {
        Letter::new(var, -1)
    }

    pub fn inverse(self) -> Letter {
        Letter { var: self.var, exp: -self.exp }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "x{}^-1", self.var)
        }
    }
}

/// A word with constants in GL_n(q). Invariant: `constants.len() == letters.len() + 1`
/// and every constant is an invertible n x n matrix over `field`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Word {
    field: Field,
    n: usize,
    r: usize,
    letters: Vec<Letter>,
    constants: Vec<Matrix>,
}

impl Word {
    pub fn new(field: &Field, n: usize, r: usize, letters: Vec<Letter>, constants: Vec<Matrix>) -> Result<Word> {
        if n < 2 {
            return Err(Error::DegenerateDimension(n));
        }
        if constants.len() != letters.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} letters need {} constants, got {}",
                letters.len(),
                letters.len() + 1,
                constants.len()
            )));
        }
        if let Some(l) = letters.iter().find(|l| l.var == 0 || l.var > r || (l.exp != 1 && l.exp != -1)) {
            return Err(Error::DimensionMismatch(format!("letter x{}^{} with r = {r}", l.var, l.exp)));
        }
        for c in &constants {
            if c.field() != field || c.rows() != n || c.cols() != n {
                return Err(Error::DimensionMismatch(format!("constant is not {n}x{n} over {field:?}")));
            }
            if !c.is_invertible() {
                return Err(Error::NotInvertible);
            }
        }
        Ok(Word { field: field.clone(), n, r, letters, constants })
    }

    /// Word with identity constants everywhere.
    pub fn free(field: &Field, n: usize, r: usize, letters: Vec<Letter>) -> Result<Word> {
        let constants = vec![Matrix::identity(field, n); letters.len() + 1];
        Word::new(field, n, r, letters, constants)
    }

    pub fn constant_word(c: Matrix) -> Result<Word> {
        let field = c.field().clone();
        let n = c.rows();
        Word::new(&field, n, 0, Vec::new(), vec![c])
    }

    /// Skips validation; used internally where constants are known good.
    pub(crate) fn from_parts_unchecked(field: &Field, n: usize, r: usize, letters: Vec<Letter>, constants: Vec<Matrix>) -> Word {
        debug_assert_eq!(constants.len(), letters.len() + 1);
        Word { field: field.clone(), n, r, letters, constants }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of variables.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Word length l = number of letters.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn constants(&self) -> &[Matrix] {
        &self.constants
    }

    /// Constant c_j, j in 0..=l.
    pub fn constant(&self, j: usize) -> &Matrix {
        &self.constants[j]
    }

    /// Letter at 1-based position j.
    pub fn letter(&self, j: usize) -> Letter {
        self.letters[j - 1]
    }

    pub fn with_r(mut self, r: usize) -> Result<Word> {
        if self.letters.iter().any(|l| l.var > r) {
            return Err(Error::DimensionMismatch(format!("word uses more than {r} variables")));
        }
        self.r = r;
        Ok(self)
    }

    pub fn with_constant(&self, j: usize, c: Matrix) -> Result<Word> {
        let mut constants = self.constants.clone();
        constants[j] = c;
        Word::new(&self.field, self.n, self.r, self.letters.clone(), constants)
    }

    /// Product `self · other`, merging `c_l` of self with `c_0` of other.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.field != other.field || self.n != other.n {
            return Err(Error::DimensionMismatch("words over different groups".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        let mut constants = self.constants[..self.constants.len() - 1].to_vec();
        constants.push(self.constants.last().unwrap().mul(&other.constants[0]));
        constants.extend_from_slice(&other.constants[1..]);
        Ok(Word::from_parts_unchecked(&self.field, self.n, self.r.max(other.r), letters, constants))
    }

    /// Formal inverse `c_l^{-1} x^{-ε(l)} ⋯ c_0^{-1}`.
    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        let constants = self.constants.iter().rev().map(|c| c.inverse().expect("invertible constant")).collect();
        Word::from_parts_unchecked(&self.field, self.n, self.r, letters, constants)
    }

    /// `k`-fold product of the word with itself.
    pub fn power(&self, k: usize) -> Word {
        let mut w = Word::constant_word(Matrix::identity(&self.field, self.n)).unwrap().with_r(self.r).unwrap();
        for _ in 0..k {
            w = w.concat(self).unwrap();
        }
        w
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.constants.iter().enumerate() {
            if !c.is_identity() {
                parts.push(format!("c{j}"));
            }
            if j < self.letters.len() {
                parts.push(self.letters[j].to_string());
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Partition of the inner indices {1..l-1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexClassification {
    pub j0: Vec<usize>,
    pub jplus: Vec<usize>,
    pub jminus: Vec<usize>,
}

impl IndexClassification {
    pub fn critical_constants<'a>(&self, w: &'a Word) -> Vec<&'a Matrix> {
        self.jminus.iter().map(|&j| w.constant(j)).collect()
    }
}

pub fn classify_indices(w: &Word) -> IndexClassification {
    let mut out = IndexClassification { j0: Vec::new(), jplus: Vec::new(), jminus: Vec::new() };
    for j in 1..w.len() {
        let (a, b) = (w.letter(j), w.letter(j + 1));
        if a.var != b.var {
            out.j0.push(j);
        } else if a.exp == b.exp {
            out.jplus.push(j);
        } else {
            out.jminus.push(j);
        }
    }
    out
}

/// Why a word fails to be reduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducednessReport {
    pub reduced: bool,
    /// (index j, reason) for each offending constant.
    pub offending: Vec<(usize, String)>,
}

/// Reducedness relative to H ∈ {GL_n(q), SL_n(q)}, whose centralizer in
/// GL_n(q) is the scalar matrices.
pub fn is_reduced(w: &Word) -> ReducednessReport {
    let cls = classify_indices(w);
    let mut offending = Vec::new();
    for j in 1..w.len() {
        let c = w.constant(j);
        if cls.jminus.contains(&j) {
            if c.is_scalar() {
                offending.push((j, "critical constant is central".to_string()));
            }
        } else if c.is_scalar() && !c.is_identity() {
            offending.push((j, "non-identity central constant".to_string()));
        }
    }
    ReducednessReport { reduced: offending.is_empty(), offending }
}

pub fn require_reduced(w: &Word) -> Result<()> {
    match is_reduced(w).offending.into_iter().next() {
        None => Ok(()),
        Some((index, reason)) => Err(Error::NotReduced { index, reason }),
    }
}

/// Cancels `x^{ε} c_j x^{-ε}` at critical index j, merging c_{j-1} c_j c_{j+1}.
fn cancel_at(w: &Word, j: usize) -> Word {
    let mut letters = w.letters.clone();
    letters.drain(j - 1..j + 1);
    let merged = w.constants[j - 1].mul(&w.constants[j]).mul(&w.constants[j + 1]);
    let mut constants = w.constants.clone();
    constants.splice(j - 1..j + 2, std::iter::once(merged));
    Word::from_parts_unchecked(&w.field, w.n, w.r, letters, constants)
}

/// Normal form modulo central scalars: cancels letter pairs around scalar
/// critical constants and moves non-identity scalar constants at J_0 ∪ J_+
/// into c_0. Evaluation is unchanged.
pub fn reduce(w: &Word) -> Word {
    let mut w = w.clone();
    loop {
        let cls = classify_indices(&w);
        if let Some(&j) = cls.jminus.iter().find(|&&j| w.constants[j].is_scalar()) {
            w = cancel_at(&w, j);
            continue;
        }
        let pull = (1..w.len()).find(|&j| {
            !cls.jminus.contains(&j) && w.constants[j].is_scalar() && !w.constants[j].is_identity()
        });
        if let Some(j) = pull {
            let lambda = w.constants[j].as_scalar().unwrap();
            w.constants[0] = w.constants[0].scale(lambda);
            w.constants[j] = Matrix::identity(&w.field, w.n);
            continue;
        }
        return w;
    }
}

/// Image under the augmentation map (constants ↦ 1), freely reduced.
pub fn content(w: &Word) -> Vec<Letter> {
    free_reduce(w.letters())
}

pub fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn is_singular(w: &Word) -> bool {
    content(w).is_empty()
}

/// `c_0 h_{ι(1)}^{ε(1)} c_1 ⋯ h_{ι(l)}^{ε(l)} c_l`.
pub fn evaluate(w: &Word, h: &[Matrix]) -> Result<Matrix> {
    if h.len() < w.r() {
        return Err(Error::DimensionMismatch(format!("{} variables need {} elements, got {}", w.r(), w.r(), h.len())));
    }
    for g in h {
        if g.field() != w.field() || g.rows() != w.n() || g.cols() != w.n() {
            return Err(Error::DimensionMismatch(format!("substituted element is not {0}x{0} over {1:?}", w.n(), w.field())));
        }
    }
    let mut inverses: Vec<Option<Matrix>> = vec![None; h.len()];
    for l in w.letters() {
        if l.exp == -1 && inverses[l.var - 1].is_none() {
            inverses[l.var - 1] = Some(h[l.var - 1].inverse().map_err(|_| Error::SingularInput(l.var))?);
        }
    }
    for l in w.letters() {
        if l.exp == 1 && !h[l.var - 1].is_invertible() {
            return Err(Error::SingularInput(l.var));
        }
    }
    let mut acc = w.constants[0].clone();
    for (j, l) in w.letters().iter().enumerate() {
        let g = if l.exp == 1 { &h[l.var - 1] } else { inverses[l.var - 1].as_ref().unwrap() };
        acc = acc.mul(g).mul(&w.constants[j + 1]);
    }
    Ok(acc)
}

/// Removes the critical constant of smallest projective norm (smallest index
/// on ties), cancels the adjacent letter pair and re-reduces.
pub fn strong_reduction_step(w: &Word) -> Result<Word> {
    require_reduced(w)?;
    let cls = classify_indices(w);
    let mut best: Option<(usize, usize)> = None;
    for &j in &cls.jminus {
        let norm = projective_norm(w.constant(j))?;
        if best.is_none_or(|(_, b)| norm < b) {
            best = Some((j, norm));
        }
    }
    let (j, _) = best.ok_or(Error::AlreadyStrong)?;
    let mut stripped = w.clone();
    stripped.constants[j] = Matrix::identity(&w.field, w.n);
    Ok(reduce(&stripped))
}

/// `[w_0 = w, w_1, .., w_m]` with `w_m` strong.
pub fn strong_reduction_chain(w: &Word) -> Result<Vec<Word>> {
    require_reduced(w)?;
    let mut chain = vec![w.clone()];
    loop {
        match strong_reduction_step(chain.last().unwrap()) {
            Ok(next) => chain.push(next),
            Err(Error::AlreadyStrong) => return Ok(chain),
            Err(e) => return Err(e),
        }
    }
}

pub fn is_strong(w: &Word) -> bool {
    classify_indices(w).jminus.is_empty()
}
