//! Finite-point noncommutative kernel calculus.
//!
//! Points are d-tuples of square complex matrices; kernels on a finite point
//! set carry matrix-algebra coefficients and are encoded as bimodule maps via
//! Choi matrices. On top of that encoding the crate certifies complete
//! positivity (Kolmogorov/Stinespring data), decomposes Hermitian kernels
//! into cp parts, extends cp kernels from operator systems, and produces
//! kernel-dominance certificates — all as machine-checkable numerical
//! certificates backed by a PSD feasibility solver.

pub mod arveson;
pub mod config;
pub mod cp;
pub mod dominance;
pub mod encoding;
pub mod error;
pub mod fixtures;
pub mod jordan;
pub mod json;
pub mod kernel;
pub mod linalg;
pub mod ncpoints;
pub mod sdpfeas;

pub use error::{Error, Result};
