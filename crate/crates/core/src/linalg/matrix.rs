//! Dense matrices over F_q. Vectors are rows and the group acts on the right,
//! so `v.g` is [`Matrix::apply`].

use std::fmt;

use rand::Rng;

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// A row vector.
pub type Vector = Vec<FieldElement>;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
    field: Field,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|&a| self.field.display(a)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols], field: field.clone() }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        Matrix::scalar(field, n, FieldElement::ONE)
    }

    pub fn scalar(field: &Field, n: usize, lambda: FieldElement) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = lambda;
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must share one length.
    pub fn from_rows(field: &Field, rows: &[Vector]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat(), field: field.clone() })
    }

    /// Builds a matrix from packed element encodings (residues for prime fields).
    pub fn from_packed(field: &Field, rows: &[Vec<u32>]) -> Result<Matrix> {
        let rows: Vec<Vector> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.element(v)).collect::<Result<Vector>>())
            .collect::<Result<_>>()?;
        Matrix::from_rows(field, &rows)
    }

    /// Builds a matrix of prime-subfield elements; handy for literals.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        let rows: Vec<Vector> = rows.iter().map(|r| r.iter().map(|&v| field.from_int(v)).collect()).collect();
        Matrix::from_rows(field, &rows).expect("rectangular literal")
    }

    /// Companion matrix of the monic polynomial with the given low-to-high
    /// coefficients (leading 1 omitted). Acting on rows, e_i -> e_{i+1}.
    pub fn companion(field: &Field, coeffs: &[FieldElement]) -> Matrix {
        let n = coeffs.len();
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n.saturating_sub(1) {
            m.set(i, i + 1, FieldElement::ONE);
        }
        for (j, &c) in coeffs.iter().enumerate() {
            m.set(n - 1, j, field.neg(c));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn to_packed(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|a| a.packed()).collect()).collect()
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.field, other.field)));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Matrix product; panics on shape or field mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix product shape")
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field || self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = f.add(*o, f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Right action on a row vector: `v.self`.
    pub fn apply(&self, v: &[FieldElement]) -> Vector {
        assert_eq!(v.len(), self.rows, "vector length");
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(k)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn scale(&self, lambda: FieldElement) -> Matrix {
        let f = &self.field;
        Matrix { data: self.data.iter().map(|&a| f.mul(a, lambda)).collect(), ..self.clone() }
    }

    /// `self - lambda * I` for square matrices.
    pub fn minus_scalar(&self, lambda: FieldElement) -> Matrix {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i);
            m.set(i, i, self.field.sub(v, lambda));
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            for j in c..cols {
                let v = self.get(r, j);
                self.set(r, j, f.mul(v, inv));
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, FieldElement::ONE);
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> FieldElement {
        assert!(self.is_square());
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = FieldElement::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return FieldElement::ZERO;
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = m.get(c, c);
            det = f.mul(det, pv);
            let inv = f.inv(pv).unwrap();
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Basis of {x : self * x^T = 0}, each written as a row vector.
    pub fn right_kernel(&self) -> Vec<Vector> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![FieldElement::ZERO; self.cols];
                x[fc] = FieldElement::ONE;
                for (ri, &pc) in pivots.iter().enumerate() {
                    x[pc] = f.neg(r.get(ri, fc));
                }
                x
            })
            .collect()
    }

    /// Basis of {v : v.self = 0}.
    pub fn left_kernel(&self) -> Vec<Vector> {
        self.transpose().right_kernel()
    }

    /// `Some(lambda)` when the matrix is `lambda * I`.
    pub fn as_scalar(&self) -> Option<FieldElement> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let lambda = self.get(0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { lambda } else { FieldElement::ZERO };
                if self.get(i, j) != expect {
                    return None;
                }
            }
        }
        Some(lambda)
    }

    pub fn is_scalar(&self) -> bool {
        self.as_scalar().is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.as_scalar() == Some(FieldElement::ONE)
    }

    /// First nonzero entry in row-major order.
    pub fn leading_entry(&self) -> Option<FieldElement> {
        self.data.iter().copied().find(|a| !a.is_zero())
    }

    /// Splits `self = mu * normalized` where the first nonzero entry of
    /// `normalized` is 1. Returns `(mu, normalized)`; the zero matrix maps to `(1, 0)`.
    pub fn projective_normal_form(&self) -> (FieldElement, Matrix) {
        match self.leading_entry() {
            None => (FieldElement::ONE, self.clone()),
            Some(mu) => (mu, self.scale(self.field.inv(mu).unwrap())),
        }
    }

    /// Block diagonal matrix with `copies` copies of `self` on the diagonal.
    pub fn block_diagonal_repeat(&self, copies: usize) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        let mut out = Matrix::zeros(&self.field, r * copies, c * copies);
        for b in 0..copies {
            for i in 0..r {
                for j in 0..c {
                    out.set(b * r + i, b * c + j, self.get(i, j));
                }
            }
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Matrix { rows, cols, data, field: field.clone() }
    }

    /// Uniform element of GL_n(q) by rejection sampling.
    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(field, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Uniform element of SL_n(q): a uniform GL element with its first row
    /// rescaled by det^{-1}.
    pub fn random_special<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
        let mut m = Matrix::random_invertible(field, n, rng);
        let dinv = field.inv(m.determinant()).unwrap();
        for j in 0..n {
            let v = field.mul(m.get(0, j), dinv);
            m.set(0, j, v);
        }
        m
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![FieldElement::ZERO; n];
    v[i] = FieldElement::ONE;
    v
}

pub fn vec_add(field: &Field, a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

pub fn vec_sub(field: &Field, a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| field.sub(x, y)).collect()
}

pub fn vec_scale(field: &Field, a: &[FieldElement], lambda: FieldElement) -> Vector {
    a.iter().map(|&x| field.mul(x, lambda)).collect()
}

pub fn is_zero_vector(v: &[FieldElement]) -> bool {
    v.iter().all(|a| a.is_zero())
}

/// Rank of a list of row vectors of length `n`.
pub fn rank_of(field: &Field, vectors: &[Vector], n: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    debug_assert!(vectors.iter().all(|v| v.len() == n));
    Matrix::from_rows(field, vectors).expect("equal lengths").rank()
}
