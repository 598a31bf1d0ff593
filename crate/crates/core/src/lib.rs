//! Empirical Bayes control of the false discovery rate for a Gaussian time
//! series with stationary, short-range dependent noise.
//!
//! Hypothesis `i` is scored by its posterior null probability given the
//! observations within `k` steps of `i` ([`posterior`]), under nuisance
//! parameters estimated from the series ([`estimation`]). The `k̂` smallest
//! scores are rejected, where `k̂` is the longest prefix whose average score
//! stays at or below `α` ([`procedures`]). [`bench`] replays the whole
//! pipeline on simulated data ([`model`]) and tabulates the outcomes.

pub mod bench;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod model;
mod output;
pub mod posterior;
pub mod procedures;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use output::write_atomic;
