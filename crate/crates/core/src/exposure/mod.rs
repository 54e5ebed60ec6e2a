//! Mortgage-market exposure analytics: loan filters, originations by flood
//! zone, complex-feature dollar shares, demographic summaries, and lender
//! balance-sheet ratios.
//!
//! All dollar aggregation is exact integer arithmetic; shares are computed
//! exactly and rendered half-even at the table's printed precision.

pub mod demographics;
pub mod features;
pub mod lenders;
pub mod median;
pub mod originations;
pub mod records;

pub use demographics::{demographics_by_zone, DemographicColumn, DemographicRecord, DemographicsTable};
pub use features::{feature_shares_by_zone, FeatureCell, FeatureRow, FeatureTable};
pub use lenders::{lender_ratios_by_zone, BankRecord, LenderColumn, LenderTable};
pub use median::weighted_median;
pub use originations::{originations_by_zone_year, OriginationRow, OriginationsTable};
pub use records::{filter_loans_mcdash, DocType, LenderKind, Lien, LoanRecord, Occupancy};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExposureError {
    #[error("weighted median of an empty set")]
    EmptyMedian,
    #[error("weighted median: all weights zero")]
    AllWeightsZero,
    #[error("weighted median: negative weight {0}")]
    NegativeWeight(f64),
}

/// Banker's rounding at `decimals` places, for rendering shares at the
/// table's printed precision.
pub fn round_half_even(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round_ties_even() / scale
}

/// Percentage share, undefined on a zero denominator.
pub(crate) fn pct(numer: u64, denom: u64) -> Option<f64> {
    if denom == 0 {
        None
    } else {
        Some(100.0 * numer as f64 / denom as f64)
    }
}
