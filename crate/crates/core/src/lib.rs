//! Exact verification of the Q-polynomial structure of the projective
//! geometry L_N(q).
//!
//! The lattice of subspaces of GF(q)^N is enumerated, its Hasse diagram is
//! equipped with a weighted adjacency matrix `A` and a diagonal dual adjacency
//! matrix `A*`, and every finite matrix identity relating them is checked in
//! exact rational arithmetic: the spectrum and primitive idempotents of `A`,
//! the four split bases and split decompositions, block tridiagonality of
//! `A*` on the eigenspaces of `A`, the tridiagonal relations, and the
//! decomposition of the standard module into irreducible modules for the
//! subconstituent algebra.

#![allow(clippy::result_large_err)]

pub mod error;
pub mod exactmat;
pub mod gfspace;
pub mod operators;
pub mod pipeline;
pub mod poset;
pub mod qpolyverify;
pub mod report;
pub mod splitbasis;
pub mod tmodule;

pub use error::{Error, Result};
