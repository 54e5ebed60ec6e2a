//! Design-matrix assembly for the year × zone interaction regressions.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::EconError;

/// One zone-month of the price/rent panel. Zone flags are time-invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelObservation {
    pub zone_id: String,
    pub year: i32,
    pub month: u32,
    pub log_price_to_rent: f64,
    pub log_rent: f64,
    /// Maximum surge above 15 ft anywhere in the zone.
    pub surge15: bool,
    /// More than half the zone's area in the floodplain.
    pub sfha_majority: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    LogPriceToRent,
    LogRent,
}

/// Interaction family selectable in trend extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Surge15,
    Sfha,
}

impl Family {
    pub fn column_infix(&self) -> &'static str {
        match self {
            Family::Surge15 => "surge15",
            Family::Sfha => "sfha",
        }
    }
}

/// Assembled design: intercept, year dummies relative to the base year, and
/// year × surge15 / year × sfha interactions with the base year's
/// interactions omitted (coefficients measured relative to the base year).
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub x: DMatrix<f64>,
    /// Column names parallel to `x`'s columns.
    pub names: Vec<String>,
    /// Columns removed: the two base-year interactions plus any all-zero
    /// column (e.g. an interaction with no zone in the group that year).
    pub dropped: Vec<String>,
    /// Distinct years ascending.
    pub years: Vec<i32>,
    pub base_year: i32,
    /// Cluster assignment per row, by zone and by year.
    pub zone_cluster: Vec<usize>,
    pub year_cluster: Vec<usize>,
}

/// Builds (X, y) for one outcome. Column order: intercept; year dummies
/// ascending (base year omitted); year × surge15 ascending; year × sfha
/// ascending.
pub fn build_design(
    panel: &[PanelObservation],
    base_year: i32,
    outcome: Outcome,
) -> Result<(Design, DVector<f64>), EconError> {
    let mut years: Vec<i32> = panel.iter().map(|o| o.year).collect();
    years.sort_unstable();
    years.dedup();
    if years.len() < 2 {
        return Err(EconError::TooFewYears(years.len()));
    }
    if !years.contains(&base_year) {
        return Err(EconError::BaseYearAbsent(base_year));
    }
    let mut flags_by_zone: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
    for o in panel {
        let entry = flags_by_zone
            .entry(o.zone_id.as_str())
            .or_insert((o.surge15, o.sfha_majority));
        if entry.0 != o.surge15 {
            return Err(EconError::TimeVaryingFlag {
                zone_id: o.zone_id.clone(),
                flag: "surge15",
            });
        }
        if entry.1 != o.sfha_majority {
            return Err(EconError::TimeVaryingFlag {
                zone_id: o.zone_id.clone(),
                flag: "sfha_majority",
            });
        }
    }

    // Full column plan: 1 + (T-1) + T + T, then drop base-year interactions.
    let mut names = vec!["intercept".to_string()];
    for &y in &years {
        if y != base_year {
            names.push(format!("year_{y}"));
        }
    }
    for &y in &years {
        names.push(format!("year_{y}_x_surge15"));
    }
    for &y in &years {
        names.push(format!("year_{y}_x_sfha"));
    }
    let col_of: BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(k, n)| (n.as_str(), k)).collect();

    let n = panel.len();
    let mut x = DMatrix::zeros(n, names.len());
    let mut y = DVector::zeros(n);
    let mut zone_ids: BTreeMap<&str, usize> = BTreeMap::new();
    let mut zone_cluster = Vec::with_capacity(n);
    let mut year_cluster = Vec::with_capacity(n);
    for (row, o) in panel.iter().enumerate() {
        let value = match outcome {
            Outcome::LogPriceToRent => o.log_price_to_rent,
            Outcome::LogRent => o.log_rent,
        };
        if !value.is_finite() {
            return Err(EconError::NonFiniteOutcome(row));
        }
        y[row] = value;
        x[(row, 0)] = 1.0;
        if o.year != base_year {
            x[(row, col_of[format!("year_{}", o.year).as_str()])] = 1.0;
        }
        if o.surge15 {
            x[(row, col_of[format!("year_{}_x_surge15", o.year).as_str()])] = 1.0;
        }
        if o.sfha_majority {
            x[(row, col_of[format!("year_{}_x_sfha", o.year).as_str()])] = 1.0;
        }
        let next = zone_ids.len();
        zone_cluster.push(*zone_ids.entry(o.zone_id.as_str()).or_insert(next));
        year_cluster.push(years.binary_search(&o.year).expect("year indexed"));
    }

    // Normalization + degeneracy drops.
    let base_interactions = [
        format!("year_{base_year}_x_surge15"),
        format!("year_{base_year}_x_sfha"),
    ];
    let mut dropped = Vec::new();
    let mut keep = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let all_zero = x.column(k).iter().all(|&v| v == 0.0);
        if base_interactions.contains(name) || all_zero {
            dropped.push(name.clone());
        } else {
            keep.push(k);
        }
    }
    let x = x.select_columns(&keep);
    let names = keep.iter().map(|&k| names[k].clone()).collect();

    Ok((
        Design { x, names, dropped, years, base_year, zone_cluster, year_cluster },
        y,
    ))
}

#[cfg(test)]
pub(crate) fn obs(
    zone: &str,
    year: i32,
    value: f64,
    surge15: bool,
    sfha: bool,
) -> PanelObservation {
    PanelObservation {
        zone_id: zone.to_string(),
        year,
        month: 6,
        log_price_to_rent: value,
        log_rent: 0.5 * value,
        surge15,
        sfha_majority: sfha,
    }
}
