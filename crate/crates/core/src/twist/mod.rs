//! `E`-twisted data: Bernoulli and Todd series, the `b`-series of the
//! Gamma asymptotics, hypergeometric I-functions and their Serre duals.

mod bernoulli;
mod bseries;
mod gamma;
mod hypergeometric;
mod stirling;

use thiserror::Error;

use crate::ring::RingError;
use crate::series::SeriesError;

pub use bernoulli::{bernoulli, bernoulli_table, stirling_weight, todd_series};
pub use bseries::{b_series, BSeriesExponent};
pub use gamma::{cone_multiplier, cone_transform, gamma_identity_check, GammaDegreeReport, GammaReport};
pub use hypergeometric::{i_function, lambda_limit_mismatch, serre_dual_i, SerreReport};
pub use stirling::{stirling_check, stirling_remainder, StirlingReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwistError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("λ-floor {got} is too shallow, need at least {needed}")]
    InsufficientTruncation { needed: i64, got: i64 },
    #[error("z-cap must be odd and positive, got {0}")]
    InvalidZCap(i64),
    #[error("sign must be ±1, got {0}")]
    InvalidSign(i64),
    #[error("the b-series needs an equivariant bundle")]
    NotEquivariant,
}
