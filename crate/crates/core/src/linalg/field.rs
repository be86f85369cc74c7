//! Finite fields F_q, q = p^e, with q bounded so that all tables fit in memory.
//!
//! Elements are stored packed: the coefficient vector (a_0, .., a_{e-1}) of the
//! canonical representative a_0 + a_1 t + .. in F_p[t]/(modulus) is encoded as
//! the base-p integer a_0 + a_1 p + .. + a_{e-1} p^{e-1}. For prime fields this
//! is just the residue.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Default bound on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 16;

/// A field element in packed form. Only meaningful together with its [`Field`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The packed base-p encoding.
    pub fn packed(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

struct FieldData {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    inv: Vec<u32>,
    ext: Option<ExtTables>,
}

struct ExtTables {
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u16>>,
}

/// The finite field F_q. Cheap to clone; equality compares (p, e), which
/// determines the modulus uniquely.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.e == other.0.e)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)?;
        if self.0.e > 1 {
            write!(f, " (p={}, e={}, modulus={:?})", self.0.p, self.0.e, self.0.modulus)?;
        }
        Ok(())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds F_{p^e} with the default order bound.
pub fn field_make(p: u64, e: u32) -> Result<Field> {
    Field::with_bound(p, e, DEFAULT_MAX_ORDER)
}

impl Field {
    pub fn new(p: u64, e: u32) -> Result<Field> {
        field_make(p, e)
    }

    /// Builds F_{p^e}; the modulus is the lexicographically smallest monic
    /// irreducible polynomial of degree e, comparing coefficient lists
    /// low-to-high (constant term first).
    pub fn with_bound(p: u64, e: u32, max_order: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if e == 0 {
            return Err(Error::DegreeZero);
        }
        let too_large = Error::FieldTooLarge { p, e, bound: max_order };
        let q = p.checked_pow(e).ok_or(too_large.clone())?;
        if q > max_order || q > u32::MAX as u64 {
            return Err(too_large);
        }
        let p = p as u32;
        let q = q as u32;
        let modulus = smallest_irreducible(p, e);

        let ext = if e > 1 {
            let exp = primitive_powers(p, &modulus, q);
            let mut log = vec![0u32; q as usize];
            for (k, &v) in exp.iter().enumerate() {
                log[v as usize] = k as u32;
            }
            let add = (q <= 256).then(|| {
                let mut t = vec![0u16; (q * q) as usize];
                for a in 0..q {
                    for b in 0..q {
                        t[(a * q + b) as usize] = digit_add(p, e, a, b) as u16;
                    }
                }
                t
            });
            Some(ExtTables { exp, log, add })
        } else {
            None
        };

        let mut field = Field(Arc::new(FieldData { p, e, q, modulus, inv: Vec::new(), ext }));
        // pow only needs multiplication, so the inverse table can be filled in place.
        let inv: Vec<u32> = (0..q)
            .map(|a| if a == 0 { 0 } else { field.pow(FieldElement(a), (q - 2) as u64).0 })
            .collect();
        Arc::get_mut(&mut field.0).expect("unshared during construction").inv = inv;
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Monic modulus, coefficients low-to-high (length e + 1).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// Element from its packed encoding.
    pub fn element(&self, packed: u32) -> Result<FieldElement> {
        if packed < self.0.q {
            Ok(FieldElement(packed))
        } else {
            Err(Error::InvalidElement(format!("{packed} is not below q = {}", self.0.q)))
        }
    }

    /// Element from a coefficient list (low-to-high). Shorter lists are padded
    /// with zeros; entries must lie in [0, p).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.e as usize {
            return Err(Error::InvalidElement(format!(
                "{} coefficients for degree {}",
                coeffs.len(),
                self.0.e
            )));
        }
        let mut packed = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.0.p {
                return Err(Error::InvalidElement(format!("coefficient {c} not below p = {}", self.0.p)));
            }
            packed = packed * self.0.p + c;
        }
        Ok(FieldElement(packed))
    }

    /// Coefficient list of length e, low-to-high.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut v = a.0;
        (0..self.0.e)
            .map(|_| {
                let d = v % self.0.p;
                v /= self.0.p;
                d
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let d = &*self.0;
        match &d.ext {
            None => {
                let s = a.0 + b.0;
                FieldElement(if s >= d.p { s - d.p } else { s })
            }
            Some(t) => {
                if d.p == 2 {
                    FieldElement(a.0 ^ b.0)
                } else if let Some(add) = &t.add {
                    FieldElement(add[(a.0 * d.q + b.0) as usize] as u32)
                } else {
                    FieldElement(digit_add(d.p, d.e, a.0, b.0))
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let d = &*self.0;
        match d.ext {
            None => FieldElement(if a.0 == 0 { 0 } else { d.p - a.0 }),
            Some(_) if d.p == 2 => a,
            Some(_) => {
                let mut v = a.0;
                let mut out = 0;
                let mut place = 1;
                for _ in 0..d.e {
                    let dig = v % d.p;
                    v /= d.p;
                    out += ((d.p - dig) % d.p) * place;
                    place *= d.p;
                }
                FieldElement(out)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let d = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &d.ext {
            None => FieldElement(((a.0 as u64 * b.0 as u64) % d.p as u64) as u32),
            Some(t) => {
                let k = t.log[a.0 as usize] + t.log[b.0 as usize];
                let m = d.q - 1;
                FieldElement(t.exp[(if k >= m { k - m } else { k }) as usize])
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        (a.0 != 0).then(|| FieldElement(self.0.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElement, mut k: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// All q elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    /// The q - 1 nonzero elements in packed order.
    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.0.q).map(FieldElement)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.0.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.0.q))
    }

    /// Human-readable form: the residue for prime fields, a polynomial in t otherwise.
    pub fn display(&self, a: FieldElement) -> String {
        if self.0.e == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

fn digit_add(p: u32, e: u32, mut a: u32, mut b: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..e {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

// Dense polynomials over F_p, coefficients low-to-high, no trailing zeros.

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        k >>= 1;
    }
    r as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p) as u64;
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (*r.last().unwrap() as u64 * lead_inv % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let t = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
    poly_rem(&out, m, p)
}

fn poly_powmod(base: &[u32], mut k: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = poly_rem(base, m, p);
    while k > 0 {
        if k & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        k >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or test: monic f of degree e is irreducible iff gcd(f, t^{p^i} - t) = 1
/// for all 1 <= i <= e/2.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let e = f.len() - 1;
    if e == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let t = vec![0u32, 1];
    let mut tp = t.clone();
    for _ in 0..e / 2 {
        tp = poly_powmod(&tp, p as u64, f, p);
        let mut diff = tp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for idx in 0..count {
        // a_0 is the most significant digit so idx order is lexicographic.
        let mut f = vec![0u32; e as usize + 1];
        let mut v = idx;
        for i in (0..e as usize).rev() {
            f[i] = (v % p as u64) as u32;
            v /= p as u64;
        }
        f[e as usize] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pack(poly: &[u32], p: u32) -> u32 {
    poly.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Powers g^0, .., g^{q-2} of the smallest primitive element g, packed.
fn primitive_powers(p: u32, modulus: &[u32], q: u32) -> Vec<u32> {
    let order = (q - 1) as u64;
    let factors = prime_factors(order);
    let unpack = |mut v: u32| {
        let mut poly = Vec::new();
        while v > 0 {
            poly.push(v % p);
            v /= p;
        }
        poly
    };
    for cand in 2..q {
        let g = unpack(cand);
        if factors
            .iter()
            .all(|r| poly_powmod(&g, order / r, modulus, p) != vec![1])
        {
            let mut out = Vec::with_capacity(order as usize);
            let mut cur = vec![1u32];
            for _ in 0..order {
                out.push(pack(&cur, p));
                cur = poly_mulmod(&cur, &g, modulus, p);
            }
            return out;
        }
    }
    unreachable!("multiplicative group of a finite field is cyclic")
}
