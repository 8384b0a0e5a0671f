//! Moment and tail estimates for sums of independent symmetric or
//! nonnegative random variables, driven by the Latała Orlicz norm
//!
//! ```text
//! |||(X_k)|||_p = inf { λ > 0 : ∏ E|1 + X_k/λ|^p ≤ e^p }
//! ```
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; Monte Carlo drivers, file formats and the
//! command line live in the companion `latala-cli` crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod convolution;
pub mod distributions;
mod error;
pub mod latala;
mod math;
pub mod quad;
pub mod tails;

pub use convolution::{exact_sum_distribution, ExactNormOracle};
pub use distributions::{Entry, Kind, Marginal, Regime, Sampler, SummandSequence};
pub use error::{Error, Result};
pub use latala::{
    f_series, kappa, latala_norm, moment_bounds, MomentBounds, NormResult, DEFAULT_REL_TOL,
    LATALA_LOWER_CONSTANT,
};
pub use tails::{
    max_tail_bounds, p_t, paley_zygmund, tail_bounds, truncated_l2_norm, BoundComponents,
    BoundConstants, MarginalNormOracle, MaxTailBounds, NormOracle, TailConfig, TailReport,
};
