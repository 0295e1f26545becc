//! Permutation chains encoded as sparse linear systems.
//!
//! The crate builds the 2-sparse symmetric matrix whose solution state
//! against `|0̄⟩` reveals `Π_q(0) = π_q ∘ ⋯ ∘ π_1 (0)` when measured. It
//! simulates the permutation oracle and the sparse-access oracles built from
//! it with full query and depth accounting, solves the system with a dense
//! reference solver and an oracle-driven truncated Neumann series, and checks
//! the closed-form spectral, probabilistic and perturbation facts about the
//! construction numerically.
//!
//! Module map:
//!
//! - [`permchain`] / [`ledger`]: chains, `O_pi`, query ledger.
//! - [`encoding`]: index space, `P`, the matrix, `O_s` and `O_A`.
//! - [`analysis`]: closed-form solution, success probability, spectra.
//! - [`solver`]: direct and Neumann solvers, sampling, answer extraction.
//! - [`blockenc`]: unitary dilation and perturbation bounds.
//! - [`pipeline`]: reduction runs, chain files, the verification sweep.

pub mod analysis;
pub mod blockenc;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod json;
pub mod ledger;
pub mod linalg;
pub mod mtx;
pub mod permchain;
pub mod pipeline;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
