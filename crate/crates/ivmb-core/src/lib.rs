//! Core library for Markov-blanket-centered causal analysis on tabular data.
//!
//! The crate bundles seven cooperating areas:
//!
//! * [`data`] — named numeric columns, CSV ingestion, transforms, and
//!   correlation / partial-correlation utilities.
//! * [`graph`] — DAG/PDAG representation, trails, d-separation, Markov
//!   blankets, Markov-equivalence enumeration, timestamp orientation, and
//!   graphical instrument validation.
//! * [`sem`] — linear-Gaussian structural equation models: analytic
//!   population covariance, reproducible sampling, and canned scenarios
//!   that provide ground-truth oracles.
//! * [`regress`] — OLS, two-stage least squares, and the classical
//!   endogeneity test battery.
//! * [`select`] — variable selection (LARS, lasso/elastic-net coordinate
//!   descent, cross-validated selection, bootstrap ISIS, solar) plus
//!   collinearity diagnostics.
//! * [`score`] — Gaussian DAG scoring (AIC/BIC/BGe) and backdoor-edge
//!   model comparison.
//! * [`num`] / [`rng`] — special functions for p-values and a
//!   counter-based normal generator for bit-reproducible parallel sampling.
//!
//! All randomized routines take explicit seeds and derive per-iteration
//! substreams deterministically, so results are identical at any
//! parallelism degree.

pub mod data;
pub mod error;
pub mod graph;
pub mod num;
pub mod regress;
pub mod rng;
pub mod score;
pub mod select;
pub mod sem;

pub use error::{CoreError, Result};
