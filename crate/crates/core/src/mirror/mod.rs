//! Birkhoff factorization of I-functions, the small-parameter mirror map and
//! its inversion, and quintic instanton numbers.

mod birkhoff;
mod instantons;
mod qseries;

use thiserror::Error;

use crate::ring::RingError;
use crate::series::SeriesError;

pub use birkhoff::{birkhoff, recompose, small_mirror, MirrorResult};
pub use instantons::{extract_instantons, InstantonReport};
pub use qseries::{invert_series, inversion_residual, scale_by_qseries, substitute, QSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MirrorError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("transversality failure: {0}")]
    Transversality(String),
    #[error("F is not a unit (hypersurface degree exceeds n?)")]
    NotAUnit,
    #[error("series has a nonzero constant term where nilpotence is required")]
    NotNilpotent,
    #[error("small_mirror needs a λ-free series")]
    NotNonEquivariant,
    #[error("slice {degree} has positive z-powers; use birkhoff")]
    PositiveZPower { degree: usize },
    #[error("chart change failed: {0}")]
    Chart(String),
    #[error("no factored series in the τ chart (τ leaves span(1, P))")]
    MissingChart,
    #[error("instanton extraction needs the quintic (n = 5, E = O(5))")]
    NotQuintic,
    #[error("n_{degree} = {value} is not an integer")]
    NonIntegral { degree: usize, value: String },
    #[error("P³ slot inconsistent at degree {degree}")]
    Consistency { degree: usize },
    #[error("truncation mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
}

impl From<crate::gw::GwError> for MirrorError {
    fn from(e: crate::gw::GwError) -> Self {
        match e {
            crate::gw::GwError::Series(s) => MirrorError::Series(s),
            other => MirrorError::Transversality(other.to_string()),
        }
    }
}
