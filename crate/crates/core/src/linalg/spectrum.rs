use super::field::FieldElement;
use super::matrix::Matrix;

/// Eigenvalues in F_q (including 0) with geometric multiplicity
/// `n - rank(g - λI)`, listing only λ with positive multiplicity.
pub fn eigen_spectrum(g: &Matrix) -> Vec<(FieldElement, usize)> {
    assert!(g.is_square(), "eigen_spectrum needs a square matrix");
    let n = g.rows();
    g.field()
        .elements()
        .filter_map(|lambda| {
            let d = n - g.minus_scalar(lambda).rank();
            (d > 0).then_some((lambda, d))
        })
        .collect()
}
