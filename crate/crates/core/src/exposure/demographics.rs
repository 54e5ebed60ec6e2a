//! Population-weighted demographic summaries per zone definition.

use std::collections::BTreeMap;

use crate::zones::{ZoneClassification, ZoneFlag};

use super::median::weighted_median;

/// Zone-level census summary (5-year survey averages).
#[derive(Debug, Clone, PartialEq)]
pub struct DemographicRecord {
    pub zone_id: String,
    /// Survey population weight.
    pub population: f64,
    pub median_household_income: f64,
    pub median_age: f64,
    pub median_house_value: f64,
    pub median_monthly_owner_cost: f64,
    pub median_gross_rent: f64,
    pub pct_owner_cost_share_income: f64,
    pub pct_owner_occupied: f64,
    pub pct_mobile_homes: f64,
    pub pct_asian: f64,
    pub pct_black: f64,
    pub pct_white: f64,
    pub pct_hispanic: f64,
    pub pct_below_poverty: f64,
    pub pct_no_health_coverage: f64,
}

pub const MEDIAN_FIELDS: [&str; 5] = [
    "median_household_income",
    "median_age",
    "median_house_value",
    "median_monthly_owner_cost",
    "median_gross_rent",
];

pub const PCT_FIELDS: [&str; 9] = [
    "pct_owner_cost_share_income",
    "pct_owner_occupied",
    "pct_mobile_homes",
    "pct_asian",
    "pct_black",
    "pct_white",
    "pct_hispanic",
    "pct_below_poverty",
    "pct_no_health_coverage",
];

impl DemographicRecord {
    /// Median-type fields in [`MEDIAN_FIELDS`] order.
    pub fn medians(&self) -> [f64; 5] {
        [
            self.median_household_income,
            self.median_age,
            self.median_house_value,
            self.median_monthly_owner_cost,
            self.median_gross_rent,
        ]
    }

    /// Percentage-type fields in [`PCT_FIELDS`] order.
    pub fn percents(&self) -> [f64; 9] {
        [
            self.pct_owner_cost_share_income,
            self.pct_owner_occupied,
            self.pct_mobile_homes,
            self.pct_asian,
            self.pct_black,
            self.pct_white,
            self.pct_hispanic,
            self.pct_below_poverty,
            self.pct_no_health_coverage,
        ]
    }
}

/// One summary column; `None` cells mean the column had no zones.
#[derive(Debug, Clone, PartialEq)]
pub struct DemographicColumn {
    pub name: String,
    pub zone_count: usize,
    pub population: f64,
    /// Column population over the grand total, percent.
    pub population_share_pct: Option<f64>,
    /// Population-weighted medians of zone medians, [`MEDIAN_FIELDS`] order.
    pub medians: [Option<f64>; 5],
    /// Population-weighted means, [`PCT_FIELDS`] order.
    pub pct_means: [Option<f64>; 9],
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemographicsTable {
    /// One column per requested flag, then the "rest" column last.
    pub columns: Vec<DemographicColumn>,
    /// Records whose zone_id has no classification; they land in "rest".
    pub unmatched_zones: usize,
}

fn summarize(name: &str, members: &[&DemographicRecord], grand_total: f64) -> DemographicColumn {
    let population: f64 = members.iter().map(|r| r.population).sum();
    let weights: Vec<f64> = members.iter().map(|r| r.population).collect();
    let mut medians = [None; 5];
    for (k, slot) in medians.iter_mut().enumerate() {
        let values: Vec<f64> = members.iter().map(|r| r.medians()[k]).collect();
        *slot = weighted_median(&values, &weights).ok();
    }
    let mut pct_means = [None; 9];
    if population > 0.0 {
        for (k, slot) in pct_means.iter_mut().enumerate() {
            let s: f64 = members.iter().map(|r| r.population * r.percents()[k]).sum();
            *slot = Some(s / population);
        }
    }
    DemographicColumn {
        name: name.to_string(),
        zone_count: members.len(),
        population,
        population_share_pct: if grand_total > 0.0 {
            Some(100.0 * population / grand_total)
        } else {
            None
        },
        medians,
        pct_means,
    }
}

/// Summarizes demographics into one column per zone flag plus a final
/// "rest" column of zones in none of the flagged sets. Medians aggregate as
/// population-weighted medians of the zone medians; percentages as
/// population-weighted means.
pub fn demographics_by_zone(
    records: &[DemographicRecord],
    classification: &[ZoneClassification],
    flags: &[(String, ZoneFlag)],
) -> DemographicsTable {
    let by_zone: BTreeMap<&str, &ZoneClassification> = classification
        .iter()
        .map(|z| (z.zone_id.as_str(), z))
        .collect();
    let grand_total: f64 = records.iter().map(|r| r.population).sum();
    let mut unmatched = 0usize;
    let mut columns = Vec::with_capacity(flags.len() + 1);
    for (name, flag) in flags {
        let members: Vec<&DemographicRecord> = records
            .iter()
            .filter(|r| by_zone.get(r.zone_id.as_str()).is_some_and(|z| flag.is_set(z)))
            .collect();
        columns.push(summarize(name, &members, grand_total));
    }
    let rest: Vec<&DemographicRecord> = records
        .iter()
        .filter(|r| match by_zone.get(r.zone_id.as_str()) {
            Some(z) => !flags.iter().any(|(_, f)| f.is_set(z)),
            None => {
                unmatched += 1;
                true
            }
        })
        .collect();
    columns.push(summarize("rest", &rest, grand_total));
    DemographicsTable { columns, unmatched_zones: unmatched }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::join::SurgeValue;
    use crate::zones::{classify, ClassifyConfig};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn record(zone: &str, population: f64, seedling: f64) -> DemographicRecord {
        DemographicRecord {
            zone_id: zone.to_string(),
            population,
            median_household_income: 40_000.0 + 1000.0 * seedling,
            median_age: 30.0 + seedling,
            median_house_value: 200_000.0 + 5000.0 * seedling,
            median_monthly_owner_cost: 1200.0 + 10.0 * seedling,
            median_gross_rent: 900.0 + 7.0 * seedling,
            pct_owner_cost_share_income: 20.0 + seedling,
            pct_owner_occupied: 60.0 + seedling,
            pct_mobile_homes: 2.0 + 0.1 * seedling,
            pct_asian: 4.0,
            pct_black: 12.0,
            pct_white: 70.0,
            pct_hispanic: 15.0,
            pct_below_poverty: 13.0 + 0.2 * seedling,
            pct_no_health_coverage: 9.0,
        }
    }

    fn classes(surge_ft: &[(&str, f64)]) -> Vec<ZoneClassification> {
        let surge: BTreeMap<String, SurgeValue> = surge_ft
            .iter()
            .map(|(id, ft)| (id.to_string(), SurgeValue::CoveredFt(*ft)))
            .collect();
        let e = BTreeMap::new();
        let b = BTreeMap::new();
        classify(&surge, &e, &b, &b, &BTreeMap::new(), &ClassifyConfig::default())
    }

    #[test]
    fn single_zone_column_equals_its_record() {
        let cls = classes(&[("wet", 9.0), ("dry", 0.0)]);
        let recs = vec![record("wet", 500.0, 3.0), record("dry", 1500.0, 7.0)];
        let t = demographics_by_zone(
            &recs,
            &cls,
            &[("surge5".to_string(), ZoneFlag::Surge(0))],
        );
        let wet = &t.columns[0];
        assert_eq!(wet.zone_count, 1);
        for (k, m) in wet.medians.iter().enumerate() {
            assert_eq!(m.unwrap(), recs[0].medians()[k]);
        }
        for (k, p) in wet.pct_means.iter().enumerate() {
            assert_relative_eq!(p.unwrap(), recs[0].percents()[k]);
        }
        assert_relative_eq!(wet.population_share_pct.unwrap(), 25.0);
    }

    #[test]
    fn disjoint_flags_and_rest_partition_population() {
        // surge15 and (surge5 and not surge15) are not directly expressible;
        // use surge15 alone: column + rest partition when there is one flag.
        let cls = classes(&[("a", 16.0), ("b", 16.5), ("c", 2.0), ("d", 0.0)]);
        let recs = vec![
            record("a", 100.0, 0.0),
            record("b", 200.0, 1.0),
            record("c", 300.0, 2.0),
            record("d", 400.0, 3.0),
        ];
        let t = demographics_by_zone(
            &recs,
            &cls,
            &[("surge15".to_string(), ZoneFlag::Surge(2))],
        );
        let shares: f64 = t.columns.iter().map(|c| c.population_share_pct.unwrap()).sum();
        assert_relative_eq!(shares, 100.0, epsilon = 1e-12);
        assert_eq!(t.columns[1].zone_count, 2);
    }

    #[test]
    fn empty_column_is_all_undefined() {
        let cls = classes(&[("dry", 0.0)]);
        let recs = vec![record("dry", 100.0, 0.0)];
        let t = demographics_by_zone(
            &recs,
            &cls,
            &[("surge5".to_string(), ZoneFlag::Surge(0))],
        );
        let empty = &t.columns[0];
        assert!(empty.medians.iter().all(Option::is_none));
        assert!(empty.pct_means.iter().all(Option::is_none));
        assert_eq!(empty.population_share_pct, Some(0.0));
    }

    #[test]
    fn unclassified_zone_lands_in_rest() {
        let cls = classes(&[("wet", 9.0)]);
        let recs = vec![record("wet", 10.0, 0.0), record("ghost", 90.0, 1.0)];
        let t = demographics_by_zone(
            &recs,
            &cls,
            &[("surge5".to_string(), ZoneFlag::Surge(0))],
        );
        assert_eq!(t.unmatched_zones, 1);
        assert_relative_eq!(t.columns[1].population, 90.0);
    }

    /// 20-zone random fixture against a straightforward recomputation:
    /// expansion-oracle medians (integer populations) and directly-averaged
    /// percentages.
    #[test]
    fn random_fixture_matches_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut recs = Vec::new();
        let mut surge = Vec::new();
        let names: Vec<String> = (0..20).map(|k| format!("z{k:02}")).collect();
        for name in &names {
            let pop = rng.gen_range(1..50) as f64;
            recs.push(record(name, pop, rng.gen_range(0.0..10.0)));
            surge.push((name.as_str(), rng.gen_range(0.0..12.0)));
        }
        let cls = classes(&surge);
        let t = demographics_by_zone(
            &recs,
            &cls,
            &[("surge5".to_string(), ZoneFlag::Surge(0))],
        );
        let member: Vec<&DemographicRecord> = recs
            .iter()
            .zip(&surge)
            .filter(|(_, (_, ft))| *ft >= 5.0)
            .map(|(r, _)| r)
            .collect();
        assert_eq!(t.columns[0].zone_count, member.len());
        // Median oracle: repeat each zone's value population times.
        for k in 0..5 {
            let mut expanded: Vec<f64> = Vec::new();
            for r in &member {
                expanded.extend(std::iter::repeat(r.medians()[k]).take(r.population as usize));
            }
            expanded.sort_by(f64::total_cmp);
            let oracle = expanded[expanded.len().div_ceil(2) - 1];
            assert_eq!(t.columns[0].medians[k].unwrap(), oracle, "median field {k}");
        }
        // Percentage oracle: direct weighted average.
        let pop: f64 = member.iter().map(|r| r.population).sum();
        for k in 0..9 {
            let oracle: f64 =
                member.iter().map(|r| r.population * r.percents()[k] / pop).sum();
            assert_relative_eq!(
                t.columns[0].pct_means[k].unwrap(),
                oracle,
                max_relative = 1e-12
            );
        }
    }
}
