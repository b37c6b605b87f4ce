//! Noise-free Gaussian-process bandits on a finite grid.
//!
//! The library covers kernels, an incrementally factored noise-free
//! posterior, RKHS test objectives, GP-UCB with EI/MVR/PE/uniform
//! baselines, empirical certificates for posterior standard deviation
//! bounds, and a seeded experiment harness.

pub mod algorithms;
mod error;
pub mod gp;
pub mod harness;
pub mod kernels;
pub mod linalg;
pub mod points;
pub mod rkhs;
pub mod rng;
pub mod theory_checks;

pub use error::{Error, Result};
pub use kernels::KernelSpec;
pub use points::Points;
