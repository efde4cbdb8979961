//! Correlation detection and (partial) alignment recovery between two
//! Gaussian databases.
//!
//! A database is an `n x d` matrix whose rows are feature vectors. Under
//! the null hypothesis the two databases are independent; under the
//! alternate hypothesis the rows of one are correlated with a permuted
//! copy of the other. This crate provides:
//!
//! * sampling of database pairs under either hypothesis ([`model`]),
//! * both hypothesis tests: the sum-of-inner-products test and the
//!   threshold-count test ([`detect`]),
//! * alignment estimators: threshold-and-clean, optimal assignment,
//!   maximum-path partial recovery and two-stage full recovery
//!   ([`recover`]),
//! * numerical evaluation of every error-probability bound, including
//!   the local probabilities `P(d, rho, theta)` and `Q(d, theta)`
//!   ([`bounds`], [`probs`]),
//! * a seeded Monte Carlo engine for estimating the error rates and
//!   sweeping parameters ([`mc`]).

pub mod bounds;
pub mod combinat;
pub mod detect;
pub mod error;
pub mod io;
pub mod mc;
pub mod model;
pub mod moments;
pub mod probs;
pub mod quad;
pub mod recover;
pub mod special;

pub use error::Error;
