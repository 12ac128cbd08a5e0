//! Estimation of the Weibull shape, rate and coefficients of variation
//! from progressively type-I interval-censored samples.
//!
//! The crate is `no_std` and needs only `alloc`. All randomness comes
//! from caller-supplied generators; see [`rng`] for seeded streams.

#![no_std]
#![allow(clippy::excessive_precision, clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bayes;
pub mod censoring;
pub mod dataset;
pub mod distribution;
pub mod error;
pub mod estimate;
pub mod least_squares;
pub mod mle;
pub mod montecarlo;
pub mod optimize;
pub mod rng;
pub mod special;

pub use censoring::{CensoredSample, CensoringScheme, WithdrawalRounding};
pub use distribution::{cv_k, cv_p, WeibullParams, MIN_SHAPE};
pub use error::{Error, Result};
pub use estimate::{ByParameter, EstimateSet, IntervalEstimate, IntervalSet, Parameter};
pub use mle::FitResult;
