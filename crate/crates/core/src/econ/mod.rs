//! Panel regressions of log price-to-rent and log rent on year dummies and
//! year × flood-zone interactions, with two-way clustered standard errors.

pub mod cluster;
pub mod design;
pub mod ols;
pub mod trend;

pub use cluster::{twoway_clustered_cov, ClusterConfig, ClusterCov};
pub use design::{build_design, Design, Family, Outcome, PanelObservation};
pub use ols::{ols_fit, OlsFit};
pub use trend::{national_trend, trend_series, RegressionResult, TrendPoint};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EconError {
    #[error("panel needs at least 2 distinct years, found {0}")]
    TooFewYears(usize),
    #[error("base year {0} not present in the panel")]
    BaseYearAbsent(i32),
    #[error("non-finite outcome at observation {0}")]
    NonFiniteOutcome(usize),
    #[error("zone {zone_id}: flag {flag} varies over time")]
    TimeVaryingFlag { zone_id: String, flag: &'static str },
    #[error("design matrix rank deficient; collinear columns: {0:?}")]
    RankDeficient(Vec<String>),
    #[error("cluster dimension {0} has a single cluster; variance unidentified")]
    SingleCluster(&'static str),
    #[error("residual length {got} does not match design rows {expected}")]
    LengthMismatch { got: usize, expected: usize },
}
