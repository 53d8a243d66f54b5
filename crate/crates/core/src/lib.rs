//! Likelihood-free particle filtering for α-stable stochastic volatility models.
//!
//! The crate is organised bottom-up:
//!
//! - [`stable`]: sampling and numerical evaluation of α-stable laws.
//! - [`svm`]: the stochastic volatility state-space model.
//! - [`kernels`]: ABC smoothing kernels.
//! - [`proposals`]: Student-t lookahead densities for the auxiliary filter.
//! - [`filters`]: weights, resampling, the ABC auxiliary particle filter,
//!   the ABC-SMC baseline and a Kalman filter used as an exact reference.
//! - [`experiment`]: seeding, metrics, replicated studies and CSV I/O.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod filters;
pub mod kernels;
pub mod proposals;
pub mod quadrature;
pub mod stable;
pub mod stats;
pub mod svm;

pub use error::{Error, Result};
