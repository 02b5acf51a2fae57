//! Finite fields, q-combinatorics, and the canonical enumeration of all
//! subspaces of GF(q)^N.

mod field;
mod qnum;
mod subspace;

pub use field::{FieldElement, FieldSpec, GaloisField};
pub use qnum::{gaussian_binomial, q_factorial, q_integer, subspace_count};
pub use subspace::{contains, covers, enumerate_subspaces, Subspace, DEFAULT_SIZE_LIMIT};
