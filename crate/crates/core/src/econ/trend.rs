//! Extraction of per-year interaction trends with 95% confidence bounds.

use nalgebra::{DMatrix, DVector};

use super::cluster::ClusterCov;
use super::design::{Design, Family};
use super::ols::OlsFit;

/// A fitted regression with clustered covariance, keyed by column name.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub beta: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub clusters_a: usize,
    pub clusters_b: usize,
    pub years: Vec<i32>,
    pub base_year: i32,
}

impl RegressionResult {
    pub fn new(design: &Design, fit: &OlsFit, cov: &ClusterCov) -> Self {
        RegressionResult {
            names: design.names.clone(),
            beta: fit.beta.clone(),
            cov: cov.cov.clone(),
            clusters_a: cov.clusters_a,
            clusters_b: cov.clusters_b,
            years: design.years.clone(),
            base_year: design.base_year,
        }
    }

    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        let k = self.names.iter().position(|n| n == name)?;
        Some((self.beta[k], self.cov[(k, k)].max(0.0).sqrt()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendPoint {
    pub year: i32,
    pub estimate: f64,
    pub lower95: f64,
    pub upper95: f64,
}

const Z_95: f64 = 1.96;

/// Per-year interaction coefficients for one zone family, relative to the
/// base year (which appears as an exact zero with zero-width interval). The
/// national trend is the `year_*` dummy series, family-independent.
pub fn trend_series(result: &RegressionResult, family: Family) -> Vec<TrendPoint> {
    let infix = family.column_infix();
    result
        .years
        .iter()
        .map(|&year| {
            if year == result.base_year {
                return TrendPoint { year, estimate: 0.0, lower95: 0.0, upper95: 0.0 };
            }
            match result.coefficient(&format!("year_{year}_x_{infix}")) {
                Some((b, se)) => TrendPoint {
                    year,
                    estimate: b,
                    lower95: b - Z_95 * se,
                    upper95: b + Z_95 * se,
                },
                // Column dropped (no zones in the group that year).
                None => TrendPoint {
                    year,
                    estimate: f64::NAN,
                    lower95: f64::NAN,
                    upper95: f64::NAN,
                },
            }
        })
        .collect()
}

/// The common year-dummy series (the national trend), base year zero.
pub fn national_trend(result: &RegressionResult) -> Vec<TrendPoint> {
    result
        .years
        .iter()
        .map(|&year| {
            if year == result.base_year {
                return TrendPoint { year, estimate: 0.0, lower95: 0.0, upper95: 0.0 };
            }
            let (b, se) = result
                .coefficient(&format!("year_{year}"))
                .expect("year dummy present for non-base year");
            TrendPoint {
                year,
                estimate: b,
                lower95: b - Z_95 * se,
                upper95: b + Z_95 * se,
            }
        })
        .collect()
}
