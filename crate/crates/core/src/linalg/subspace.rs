//! Subspaces of F_q^n kept in reduced row echelon form, so equal subspaces
//! have identical bases.

use rand::Rng;

use super::field::{Field, FieldElement};
use super::matrix::{is_zero_vector, Matrix, Vector};
use crate::error::{Error, Result};

/// Random candidates tried by [`avoid_union`] before it falls back to enumeration.
pub const AVOID_RANDOM_TRIES: usize = 64;
/// Spaces up to this many vectors are enumerated exhaustively as a fallback.
pub const AVOID_ENUMERATION_LIMIT: u64 = 1 << 22;
/// Random budget for spaces too large to enumerate.
pub const AVOID_LARGE_SPACE_TRIES: usize = 1 << 16;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace { basis: Matrix::zeros(field, 0, n), pivots: Vec::new() }
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        Subspace { basis: Matrix::identity(field, n), pivots: (0..n).collect() }
    }

    /// Span of the given vectors (each of length `n`).
    pub fn from_vectors(field: &Field, n: usize, vectors: &[Vector]) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(field, n);
        }
        assert!(vectors.iter().all(|v| v.len() == n), "vector length must equal ambient dimension");
        Subspace::from_matrix_rows(&Matrix::from_rows(field, vectors).expect("equal lengths"))
    }

    /// Row space of a matrix.
    pub fn from_matrix_rows(m: &Matrix) -> Subspace {
        let (r, pivots) = m.rref();
        let rows: Vec<Vector> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        let basis = if rows.is_empty() {
            Matrix::zeros(m.field(), 0, m.cols())
        } else {
            Matrix::from_rows(m.field(), &rows).unwrap()
        };
        Subspace { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    /// RREF basis, one row per basis vector.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() || self.ambient_dim() != other.ambient_dim() {
            return Err(Error::AmbientMismatch(format!(
                "{:?}^{} vs {:?}^{}",
                self.field(),
                self.ambient_dim(),
                other.field(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Remainder of `v` after elimination against the RREF basis; zero iff `v` lies in the span.
    pub fn reduce_vector(&self, v: &[FieldElement]) -> Vector {
        let f = self.field();
        let mut v = v.to_vec();
        for (k, &c) in self.pivots.iter().enumerate() {
            let coef = v[c];
            if coef.is_zero() {
                continue;
            }
            for (x, &b) in v.iter_mut().zip(self.basis.row(k)).skip(c) {
                *x = f.sub(*x, f.mul(coef, b));
            }
        }
        v
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        assert_eq!(v.len(), self.ambient_dim(), "vector length");
        is_zero_vector(&self.reduce_vector(v))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let mut vs = self.basis_vectors();
        vs.extend(other.basis_vectors());
        Ok(Subspace::from_vectors(self.field(), self.ambient_dim(), &vs))
    }

    /// Span of `self` together with one more vector.
    pub fn with_vector(&self, v: &[FieldElement]) -> Subspace {
        let mut vs = self.basis_vectors();
        vs.push(v.to_vec());
        Subspace::from_vectors(self.field(), self.ambient_dim(), &vs)
    }

    /// Zassenhaus: row-reduce [[A, A], [B, 0]]; rows with zero left half span A ∩ B.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let n = self.ambient_dim();
        let f = self.field();
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(f, n));
        }
        let mut rows = Vec::with_capacity(self.dim() + other.dim());
        for a in self.basis_vectors() {
            let mut r = a.clone();
            r.extend(a);
            rows.push(r);
        }
        for b in other.basis_vectors() {
            let mut r = b;
            r.extend(std::iter::repeat_n(FieldElement::ZERO, n));
            rows.push(r);
        }
        let (m, pivots) = Matrix::from_rows(f, &rows).unwrap().rref();
        let inter: Vec<Vector> = pivots
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= n)
            .map(|(i, _)| m.row(i)[n..].to_vec())
            .collect();
        Ok(Subspace::from_vectors(f, n, &inter))
    }

    /// Image `self.g` under right multiplication.
    pub fn image(&self, g: &Matrix) -> Result<Subspace> {
        if g.rows() != self.ambient_dim() || g.field() != self.field() {
            return Err(Error::AmbientMismatch("matrix does not act on this space".into()));
        }
        let vs: Vec<Vector> = (0..self.dim()).map(|i| g.apply(self.basis.row(i))).collect();
        Ok(Subspace::from_vectors(self.field(), g.cols(), &vs))
    }

    /// n x (n - dim) matrix A with `v ∈ self` iff `v.A = 0`.
    pub fn annihilator(&self) -> Matrix {
        let n = self.ambient_dim();
        let f = self.field();
        if self.dim() == 0 {
            return Matrix::identity(f, n);
        }
        let cols = self.basis.right_kernel();
        if cols.is_empty() {
            return Matrix::zeros(f, n, 0);
        }
        Matrix::from_rows(f, &cols).unwrap().transpose()
    }

    /// A complement of `self` inside `within`, chosen greedily from the RREF
    /// basis of `within`. Requires `self ⊆ within`.
    pub fn complement_in(&self, within: &Subspace) -> Result<Subspace> {
        self.check_compatible(within)?;
        let mut acc = self.clone();
        let mut chosen = Vec::new();
        for v in within.basis_vectors() {
            if !acc.contains(&v) {
                acc = acc.with_vector(&v);
                chosen.push(v);
            }
        }
        Ok(Subspace::from_vectors(self.field(), self.ambient_dim(), &chosen))
    }
}

/// `{v : v.c ∈ s}` for a square, possibly singular `c`.
pub fn subspace_preimage(c: &Matrix, s: &Subspace) -> Result<Subspace> {
    let n = s.ambient_dim();
    if !c.is_square() || c.rows() != n || c.field() != s.field() {
        return Err(Error::AmbientMismatch(format!(
            "{}x{} matrix against ambient dimension {n}",
            c.rows(),
            c.cols()
        )));
    }
    if s.is_full() {
        return Ok(Subspace::full(s.field(), n));
    }
    let m = c.mul(&s.annihilator());
    Ok(Subspace::from_vectors(s.field(), n, &m.left_kernel()))
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.sum(b)
}

pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

pub fn subspace_contains(s: &Subspace, v: &[FieldElement]) -> bool {
    s.contains(v)
}

fn vector_from_index(field: &Field, n: usize, mut idx: u64) -> Vector {
    let q = field.q() as u64;
    (0..n)
        .map(|_| {
            let d = (idx % q) as u32;
            idx /= q;
            field.element(d).unwrap()
        })
        .collect()
}

fn random_nonzero_vector<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Vector {
    loop {
        let v: Vector = (0..n).map(|_| field.random(rng)).collect();
        if !is_zero_vector(&v) {
            return v;
        }
    }
}

/// A nonzero vector outside every subspace in `subs`.
///
/// Draws seeded random candidates first; after [`AVOID_RANDOM_TRIES`] misses it
/// enumerates the whole space in index order when that space has at most
/// [`AVOID_ENUMERATION_LIMIT`] vectors, and otherwise keeps sampling up to
/// [`AVOID_LARGE_SPACE_TRIES`] more candidates.
pub fn avoid_union<R: Rng + ?Sized>(field: &Field, n: usize, subs: &[Subspace], rng: &mut R) -> Result<Vector> {
    for s in subs {
        if s.ambient_dim() != n || s.field() != field {
            return Err(Error::AmbientMismatch("subspace in a different space".into()));
        }
        if s.is_full() {
            return Err(Error::UnionCoversSpace);
        }
    }
    if n == 0 {
        return Err(Error::UnionCoversSpace);
    }
    let outside = |v: &Vector| subs.iter().all(|s| !s.contains(v));
    for _ in 0..AVOID_RANDOM_TRIES {
        let v = random_nonzero_vector(field, n, rng);
        if outside(&v) {
            return Ok(v);
        }
    }
    let size = (field.q() as u64).checked_pow(n as u32);
    match size {
        Some(size) if size <= AVOID_ENUMERATION_LIMIT => {
            (1..size).map(|i| vector_from_index(field, n, i)).find(outside).ok_or(Error::UnionCoversSpace)
        }
        _ => (0..AVOID_LARGE_SPACE_TRIES)
            .map(|_| random_nonzero_vector(field, n, rng))
            .find(outside)
            .ok_or(Error::UnionCoversSpace),
    }
}

/// Extends independent row vectors to a basis of F_q^n by appending standard
/// basis vectors in index order. The first rows of the result are the inputs.
pub fn basis_extend(field: &Field, n: usize, vectors: &[Vector]) -> Result<Matrix> {
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::AmbientMismatch("vector length differs from n".into()));
    }
    let mut span = Subspace::zero(field, n);
    let mut rows = Vec::with_capacity(n);
    for v in vectors {
        if span.contains(v) {
            return Err(Error::DependentInput);
        }
        span = span.with_vector(v);
        rows.push(v.clone());
    }
    for i in 0..n {
        if rows.len() == n {
            break;
        }
        let e = super::matrix::unit_vector(n, i);
        if !span.contains(&e) {
            span = span.with_vector(&e);
            rows.push(e);
        }
    }
    Matrix::from_rows(field, &rows)
}

/// For `g` acting as the scalar `lambda` on `w_space`, with `u_space ⊕ w_space`
/// the whole space: returns `(U', W')` with `U' = U + U.g` g-invariant and
/// `W' ≤ W` a complement of `U'`.
pub fn invariant_complement(
    g: &Matrix,
    lambda: FieldElement,
    w_space: &Subspace,
    u_space: &Subspace,
) -> Result<(Subspace, Subspace)> {
    w_space.check_compatible(u_space)?;
    let n = w_space.ambient_dim();
    if !g.is_square() || g.rows() != n || g.field() != w_space.field() {
        return Err(Error::AmbientMismatch("g does not act on the ambient space".into()));
    }
    let f = g.field();
    for w in w_space.basis_vectors() {
        let expect: Vector = w.iter().map(|&x| f.mul(x, lambda)).collect();
        if g.apply(&w) != expect {
            return Err(Error::NotScalarOnW);
        }
    }
    if u_space.dim() + w_space.dim() != n || u_space.intersect(w_space)?.dim() != 0 {
        return Err(Error::NotComplement);
    }
    let u_prime = u_space.sum(&u_space.image(g)?)?;
    let w_prime = u_prime.intersect(w_space)?.complement_in(w_space)?;
    Ok((u_prime, w_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::field_make;
    use crate::linalg::matrix::unit_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Field {
        field_make(2, 1).unwrap()
    }

    fn span(f: &Field, n: usize, idx: &[usize]) -> Subspace {
        let vs: Vec<Vector> = idx.iter().map(|&i| unit_vector(n, i)).collect();
        Subspace::from_vectors(f, n, &vs)
    }

    #[test]
    fn sum_and_intersection_examples() {
        let f = f2();
        let a = span(&f, 3, &[0]);
        let b = span(&f, 3, &[1]);
        assert_eq!(a.sum(&b).unwrap().dim(), 2);
        assert_eq!(a.intersect(&b).unwrap().dim(), 0);
        assert_eq!(a.sum(&a).unwrap(), a);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let a = span(&f, 3, &[0, 1]);
        let b = span(&f, 3, &[1, 2]);
        assert_eq!(a.intersect(&b).unwrap(), span(&f, 3, &[1]));
        assert!(matches!(a.sum(&span(&f, 4, &[0])), Err(Error::AmbientMismatch(_))));
    }

    #[test]
    fn preimage_examples() {
        let f = f2();
        let s = span(&f, 2, &[0]);
        assert_eq!(subspace_preimage(&Matrix::identity(&f, 2), &s).unwrap(), s);
        assert!(subspace_preimage(&Matrix::zeros(&f, 2, 2), &s).unwrap().is_full());
        let c = Matrix::from_ints(&f, &[&[1, 1], &[0, 1]]);
        // e1.c = e1 + e2 ∉ s, e2.c = e2 ∉ s, (e1+e2).c = e1 ∈ s.
        let expect = Subspace::from_vectors(&f, 2, &[vec![f.one(), f.one()]]);
        assert_eq!(subspace_preimage(&c, &s).unwrap(), expect);
    }

    #[test]
    fn avoid_union_examples() {
        let f = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let subs = vec![span(&f, 3, &[0, 1]), span(&f, 3, &[2])];
        for _ in 0..20 {
            let v = avoid_union(&f, 3, &subs, &mut rng).unwrap();
            assert!(subs.iter().all(|s| !s.contains(&v)));
        }
        let v = avoid_union(&f, 3, &[], &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!(!is_zero_vector(&v));
        assert_eq!(v, avoid_union(&f, 3, &[], &mut ChaCha8Rng::seed_from_u64(5)).unwrap());
        assert_eq!(avoid_union(&f, 3, &[Subspace::full(&f, 3)], &mut rng), Err(Error::UnionCoversSpace));
        // three hyperplanes cover F_2^2
        let cover = vec![span(&f, 2, &[0]), span(&f, 2, &[1]), Subspace::from_vectors(&f, 2, &[vec![f.one(), f.one()]])];
        assert_eq!(avoid_union(&f, 2, &cover, &mut rng), Err(Error::UnionCoversSpace));
    }

    #[test]
    fn basis_extend_examples() {
        let f = f2();
        let std: Vec<Vector> = (0..3).map(|i| unit_vector(3, i)).collect();
        assert!(basis_extend(&f, 3, &std).unwrap().is_identity());
        let m = basis_extend(&f, 2, &[unit_vector(2, 1)]).unwrap();
        assert_eq!(m, Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]));
        assert!(!m.determinant().is_zero());
        assert_eq!(basis_extend(&f, 3, &[unit_vector(3, 0), unit_vector(3, 0)]), Err(Error::DependentInput));
    }

    #[test]
    fn invariant_complement_examples() {
        let f4 = field_make(2, 2).unwrap();
        let a = f4.element(2).unwrap();
        let mut g = Matrix::identity(&f4, 3);
        g.set(0, 0, a);
        let w = span(&f4, 3, &[1, 2]);
        let u = span(&f4, 3, &[0]);
        let (up, wp) = invariant_complement(&g, f4.one(), &w, &u).unwrap();
        assert_eq!(up, u);
        assert_eq!(wp, w);

        let f = f2();
        let g = Matrix::from_ints(&f, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let w = span(&f, 3, &[1, 2]);
        let u = span(&f, 3, &[0]);
        let (up, wp) = invariant_complement(&g, f.one(), &w, &u).unwrap();
        assert_eq!(up, span(&f, 3, &[0, 1]));
        assert_eq!(wp, span(&f, 3, &[2]));

        let g = Matrix::from_ints(&f, &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(invariant_complement(&g, f.one(), &w, &u), Err(Error::NotScalarOnW));
        assert_eq!(
            invariant_complement(&Matrix::identity(&f, 3), f.one(), &w, &span(&f, 3, &[1])),
            Err(Error::NotComplement)
        );
    }

    #[test]
    fn rref_is_canonical_under_shuffling() {
        let f = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = Matrix::random(&f, 4, 6, &mut rng);
            let mut vs = m.row_vectors();
            let a = Subspace::from_vectors(&f, 6, &vs);
            vs.reverse();
            let extra = crate::linalg::matrix::vec_add(&f, &vs[0], &vs[1]);
            vs.push(extra);
            assert_eq!(Subspace::from_vectors(&f, 6, &vs), a);
        }
    }
}
