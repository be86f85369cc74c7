//! Word maps with constants over GL_n(q): exact witnesses for linear
//! transitivity of word images, projective rank seminorms, diameter bounds,
//! brute-force mixed-identity search on small groups and the diagonal
//! 2^n-tower with its normalized rank metric.

pub mod error;
pub mod group;
pub mod identity;
pub mod image;
pub mod io;
pub mod linalg;
pub mod selftest;
pub mod seminorm;
pub mod tower;
pub mod witness;
pub mod words;

pub use error::{Error, Result};
pub use group::LinearGroup;
