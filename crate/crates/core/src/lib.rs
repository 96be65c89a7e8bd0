//! Aligned precoded compute-and-forward (PCoF) for the two-hop 2x2x2 MIMO
//! interference channel.
//!
//! The crate has two halves that share the same algebra:
//!
//! * an exact half — Gaussian-integer matrices, GF(p^2) arithmetic, a
//!   construction-A nested lattice codec, and the finite-field network
//!   diagonalization — verified with zero tolerance;
//! * a numeric half — complex LLL reduction with enumeration refinement,
//!   compute-and-forward rate formulas, alignment precoding, and a Monte
//!   Carlo sweep over Rayleigh fading that reproduces the achievable
//!   symmetric sum rates of aligned PCoF against a time-sharing baseline.

pub mod align;
pub mod codec;
pub mod cof;
pub mod error;
pub mod ffnet;
pub mod gaussian;
pub mod gfq;
pub mod linalg;
pub mod reduce;
pub mod selftest;
pub mod sim;

pub use error::Error;
pub use gaussian::{GaussInt, GaussianIntMatrix};
pub use gfq::{FieldCtx, GfqElem, GfqMatrix};
pub use linalg::{CMat, CVec, C64};
