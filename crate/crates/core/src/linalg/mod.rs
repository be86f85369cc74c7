//! Exact linear algebra over finite fields.

pub mod field;
pub mod matrix;
pub mod spectrum;
pub mod subspace;

pub use field::{field_make, Field, FieldElement};
pub use matrix::{is_zero_vector, rank_of, unit_vector, vec_add, vec_scale, vec_sub, Matrix, Vector};
pub use spectrum::eigen_spectrum;
pub use subspace::{
    avoid_union, basis_extend, invariant_complement, subspace_contains, subspace_intersect, subspace_preimage,
    subspace_sum, Subspace,
};
