//! The projective rank seminorm ‖g‖ = min_{λ ≠ 0} rk(g − λI), its
//! bi-invariant distance, and the critical length of a word.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::words::{classify_indices, require_reduced, Word};

/// ‖g‖, enumerating every nonzero scalar.
pub fn projective_norm(g: &Matrix) -> Result<usize> {
    if !g.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let mut best = g.rows();
    for lambda in g.field().nonzero() {
        best = best.min(g.minus_scalar(lambda).rank());
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// dist(g, h) = ‖g^{-1} h‖.
pub fn projective_dist(g: &Matrix, h: &Matrix) -> Result<usize> {
    if g.field() != h.field() || g.rows() != h.rows() || !g.is_square() || !h.is_square() {
        return Err(Error::DimensionMismatch("elements of different groups".into()));
    }
    let gi = g.inverse().map_err(|_| Error::NotInvertible)?;
    projective_norm(&gi.mul(h))
}

/// Diameter of GL_n(q) (and SL_n(q)) in the projective rank metric.
pub fn group_diameter(n: usize) -> usize {
    n
}

/// ‖w‖_crit = min(diam, ‖c_j‖ for critical j).
pub fn critical_length(w: &Word) -> Result<usize> {
    require_reduced(w)?;
    let cls = classify_indices(w);
    let mut crit = group_diameter(w.n());
    for &j in &cls.jminus {
        crit = crit.min(projective_norm(w.constant(j))?);
    }
    Ok(crit)
}

/// ‖g‖ / n as an exact rational.
pub fn normalized_norm(g: &Matrix) -> Result<BigRational> {
    let norm = projective_norm(g)?;
    Ok(BigRational::new(BigInt::from(norm), BigInt::from(g.rows())))
}
