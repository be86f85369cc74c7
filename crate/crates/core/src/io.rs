//! JSON schemas shared by every module:
//!
//! ```json
//! {"field": {"p": 2, "e": 1}, "n": 4, "matrix": [[1, 0, 0, 0], ...]}
//! {"field": {"p": 2, "e": 2}, "n": 2, "constants": {"c": [[[0, 1], [1, 0]], ...]}}
//! ```
//!
//! Prime-field entries are integers; extension-field entries are coefficient
//! lists, low-to-high (an integer is accepted as a length-1 list).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Field, FieldElement, Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpecJson {
    pub p: u64,
    pub e: u32,
}

impl FieldSpecJson {
    pub fn of(field: &Field) -> FieldSpecJson {
        FieldSpecJson { p: field.p() as u64, e: field.e() }
    }

    pub fn build(&self) -> Result<Field> {
        Field::new(self.p, self.e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Int(u32),
    Coeffs(Vec<u32>),
}

pub type MatrixJson = Vec<Vec<EntryJson>>;
pub type VectorJson = Vec<EntryJson>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub field: FieldSpecJson,
    pub n: usize,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsFile {
    pub field: FieldSpecJson,
    pub n: usize,
    pub constants: BTreeMap<String, MatrixJson>,
}

/// A tuple of group elements substituted for x_1..x_r.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleFile {
    pub field: FieldSpecJson,
    pub n: usize,
    pub matrices: Vec<MatrixJson>,
}

/// Source and target vectors for a witness instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorsFile {
    pub field: FieldSpecJson,
    pub n: usize,
    pub sources: Vec<VectorJson>,
    pub targets: Vec<VectorJson>,
}

pub fn element_to_json(field: &Field, a: FieldElement) -> EntryJson {
    if field.e() == 1 {
        EntryJson::Int(a.packed())
    } else {
        EntryJson::Coeffs(field.coeffs(a))
    }
}

pub fn element_from_json(field: &Field, entry: &EntryJson) -> Result<FieldElement> {
    match entry {
        EntryJson::Int(v) if field.e() == 1 => field.from_coeffs(&[*v]),
        EntryJson::Int(v) => field.from_coeffs(&[*v]),
        EntryJson::Coeffs(c) => field.from_coeffs(c),
    }
    .map_err(|e| Error::Parse(e.to_string()))
}

pub fn vector_to_json(field: &Field, v: &[FieldElement]) -> VectorJson {
    v.iter().map(|&a| element_to_json(field, a)).collect()
}

pub fn vector_from_json(field: &Field, n: usize, v: &VectorJson) -> Result<Vector> {
    if v.len() != n {
        return Err(Error::Validation(format!("vector of length {} in dimension {n}", v.len())));
    }
    v.iter().map(|e| element_from_json(field, e)).collect()
}

pub fn matrix_to_json(m: &Matrix) -> MatrixJson {
    (0..m.rows()).map(|i| vector_to_json(m.field(), m.row(i))).collect()
}

pub fn matrix_from_json(field: &Field, n: usize, m: &MatrixJson) -> Result<Matrix> {
    if m.len() != n {
        return Err(Error::Validation(format!("matrix with {} rows, expected {n}", m.len())));
    }
    let rows: Vec<Vector> = m.iter().map(|r| vector_from_json(field, n, r)).collect::<Result<_>>()?;
    Matrix::from_rows(field, &rows)
}

impl MatrixFile {
    pub fn from_matrix(m: &Matrix) -> MatrixFile {
        MatrixFile { field: FieldSpecJson::of(m.field()), n: m.rows(), matrix: matrix_to_json(m) }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        matrix_from_json(&self.field.build()?, self.n, &self.matrix)
    }
}

/// Named constants over one GL_n(q).
#[derive(Clone, Debug)]
pub struct ConstantTable {
    pub field: Field,
    pub n: usize,
    pub constants: BTreeMap<String, Matrix>,
}

impl ConstantTable {
    pub fn empty(field: &Field, n: usize) -> ConstantTable {
        ConstantTable { field: field.clone(), n, constants: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: &str, m: Matrix) {
        self.constants.insert(name.to_string(), m);
    }

    pub fn to_file(&self) -> ConstantsFile {
        ConstantsFile {
            field: FieldSpecJson::of(&self.field),
            n: self.n,
            constants: self.constants.iter().map(|(k, m)| (k.clone(), matrix_to_json(m))).collect(),
        }
    }
}

impl ConstantsFile {
    pub fn to_table(&self) -> Result<ConstantTable> {
        let field = self.field.build()?;
        let constants = self
            .constants
            .iter()
            .map(|(k, m)| Ok((k.clone(), matrix_from_json(&field, self.n, m)?)))
            .collect::<Result<_>>()?;
        Ok(ConstantTable { field, n: self.n, constants })
    }
}

impl TupleFile {
    pub fn to_matrices(&self) -> Result<(Field, Vec<Matrix>)> {
        let field = self.field.build()?;
        let ms = self.matrices.iter().map(|m| matrix_from_json(&field, self.n, m)).collect::<Result<_>>()?;
        Ok((field, ms))
    }
}

impl VectorsFile {
    pub fn to_vectors(&self) -> Result<(Field, Vec<Vector>, Vec<Vector>)> {
        let field = self.field.build()?;
        let s = self.sources.iter().map(|v| vector_from_json(&field, self.n, v)).collect::<Result<_>>()?;
        let t = self.targets.iter().map(|v| vector_from_json(&field, self.n, v)).collect::<Result<_>>()?;
        Ok((field, s, t))
    }
}

/// Exact rational as `"a/b"` (always with a denominator).
pub fn rational_to_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"a/b"` or an integer `"a"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    let (num, den) = match text.trim().split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}
