//! Per-zone flood classification table: surge thresholds, floodplain share
//! flags, sea-level-rise flags.

use std::collections::BTreeMap;

use crate::geom::join::SurgeValue;

/// Which way the surge threshold comparison goes. The source tables say
/// both "more than" and "at least"; the comparator is configurable with
/// `Ge` as the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Ge,
    Gt,
}

impl Comparator {
    pub fn holds(&self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Ge => value >= threshold,
            Comparator::Gt => value > threshold,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Comparator::Ge => "ge",
            Comparator::Gt => "gt",
        }
    }
}

/// One zone's fused classification for a single (category, tide) scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneClassification {
    pub zone_id: String,
    /// Max surge above ground, feet; None when not covered by any basin.
    pub max_surge_ft: Option<f64>,
    /// Parallel to the configured thresholds, e.g. {5, 10, 15, 20} ft.
    pub surge_flags: Vec<bool>,
    pub sfha_share: Option<f64>,
    /// Any overlap with the floodplain.
    pub sfha_any: bool,
    /// More than half the surface area in the floodplain.
    pub sfha_majority: bool,
    pub slr3: bool,
    pub slr6: bool,
    pub covered: bool,
    /// Population weight carried through to demographic summaries.
    pub population: f64,
    /// Names of inputs this zone was missing from.
    pub missing: Vec<&'static str>,
}

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    /// Ascending surge thresholds in feet.
    pub thresholds_ft: Vec<f64>,
    pub category: u8,
    pub tide_offset_ft: f64,
    pub comparator: Comparator,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            thresholds_ft: vec![5.0, 10.0, 15.0, 20.0],
            category: 4,
            tide_offset_ft: 2.0,
            comparator: Comparator::Ge,
        }
    }
}

/// Fuses the per-zone inputs into one record per zone. The zone universe is
/// the union of all input key sets; a zone missing from an input gets
/// `covered = false` and an explicit marker naming the missing input.
pub fn classify(
    surge: &BTreeMap<String, SurgeValue>,
    sfha_share: &BTreeMap<String, f64>,
    slr3: &BTreeMap<String, bool>,
    slr6: &BTreeMap<String, bool>,
    population: &BTreeMap<String, f64>,
    cfg: &ClassifyConfig,
) -> Vec<ZoneClassification> {
    let mut ids: Vec<&String> = surge
        .keys()
        .chain(sfha_share.keys())
        .chain(slr3.keys())
        .chain(slr6.keys())
        .collect();
    ids.sort();
    ids.dedup();

    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let mut missing = Vec::new();
        let surge_val = match surge.get(id) {
            Some(v) => *v,
            None => {
                missing.push("surge");
                SurgeValue::Uncovered
            }
        };
        let share = match sfha_share.get(id) {
            Some(v) => Some(*v),
            None => {
                missing.push("sfha");
                None
            }
        };
        let slr3_flag = match slr3.get(id) {
            Some(v) => *v,
            None => {
                missing.push("slr3");
                false
            }
        };
        let slr6_flag = match slr6.get(id) {
            Some(v) => *v,
            None => {
                missing.push("slr6");
                false
            }
        };
        let max_surge_ft = surge_val.feet();
        let covered = max_surge_ft.is_some() && missing.is_empty();
        let surge_flags = cfg
            .thresholds_ft
            .iter()
            .map(|&t| max_surge_ft.is_some_and(|v| cfg.comparator.holds(v, t)))
            .collect();
        out.push(ZoneClassification {
            zone_id: id.clone(),
            max_surge_ft,
            surge_flags,
            sfha_share: share,
            sfha_any: share.is_some_and(|s| s > 0.0),
            sfha_majority: share.is_some_and(|s| s > 0.5),
            slr3: slr3_flag,
            slr6: slr6_flag,
            covered,
            population: population.get(id).copied().unwrap_or(0.0),
            missing,
        });
    }
    out
}

/// Named zone-membership flags the analytics select by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneFlag {
    /// Surge threshold by index into `thresholds_ft`.
    Surge(usize),
    SfhaAny,
    SfhaMajority,
    Slr3,
    Slr6,
}

impl ZoneFlag {
    pub fn is_set(&self, z: &ZoneClassification) -> bool {
        match self {
            ZoneFlag::Surge(t) => z.surge_flags.get(*t).copied().unwrap_or(false),
            ZoneFlag::SfhaAny => z.sfha_any,
            ZoneFlag::SfhaMajority => z.sfha_majority,
            ZoneFlag::Slr3 => z.slr3,
            ZoneFlag::Slr6 => z.slr6,
        }
    }
}
