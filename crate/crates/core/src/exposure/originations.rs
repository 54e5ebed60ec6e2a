//! Yearly origination volumes split by flood-zone membership.

use std::collections::BTreeMap;

use crate::zones::{ZoneClassification, ZoneFlag};

use super::records::LoanRecord;
use super::pct;

/// One year of origination totals for a single zone definition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OriginationRow {
    pub year: i32,
    pub total: u64,
    pub in_zone: u64,
    /// in_zone / total, percent; None for a zero-volume year.
    pub share_pct: Option<f64>,
    pub agency_total: u64,
    pub agency_in_zone: u64,
    pub agency_share_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OriginationsTable {
    pub rows: Vec<OriginationRow>,
    /// Dollars in loans whose zone_id has no classification; treated as
    /// out-of-zone in the rows, surfaced here.
    pub unmatched_dollars: u64,
    pub unmatched_loans: u64,
}

/// Unweighted dollar sums of originations by year, split by membership in the
/// zone named by `flag`. Loans in unclassified zones count as out-of-zone and
/// are tallied in the diagnostics fields.
pub fn originations_by_zone_year(
    loans: &[LoanRecord],
    classification: &[ZoneClassification],
    flag: ZoneFlag,
) -> OriginationsTable {
    let in_zone: BTreeMap<&str, bool> = classification
        .iter()
        .map(|z| (z.zone_id.as_str(), flag.is_set(z)))
        .collect();
    let mut rows: BTreeMap<i32, OriginationRow> = BTreeMap::new();
    let mut table = OriginationsTable::default();
    for loan in loans {
        let row = rows.entry(loan.year).or_insert_with(|| OriginationRow {
            year: loan.year,
            ..OriginationRow::default()
        });
        let member = match in_zone.get(loan.zone_id.as_str()) {
            Some(&m) => m,
            None => {
                table.unmatched_dollars += loan.amount;
                table.unmatched_loans += 1;
                false
            }
        };
        row.total += loan.amount;
        if member {
            row.in_zone += loan.amount;
        }
        if loan.agency_flag {
            row.agency_total += loan.amount;
            if member {
                row.agency_in_zone += loan.amount;
            }
        }
    }
    table.rows = rows
        .into_values()
        .map(|mut r| {
            r.share_pct = pct(r.in_zone, r.total);
            r.agency_share_pct = pct(r.agency_in_zone, r.agency_total);
            r
        })
        .collect();
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::join::SurgeValue;
    use crate::zones::{classify, ClassifyConfig};
    use crate::exposure::records::test_loan;
    use crate::exposure::round_half_even;

    fn classes(surge_zones: &[(&str, f64)]) -> Vec<ZoneClassification> {
        let surge: BTreeMap<String, SurgeValue> = surge_zones
            .iter()
            .map(|(id, ft)| (id.to_string(), SurgeValue::CoveredFt(*ft)))
            .collect();
        let empty_f = BTreeMap::new();
        let empty_b = BTreeMap::new();
        classify(&surge, &empty_f, &empty_b, &empty_b, &BTreeMap::new(), &ClassifyConfig::default())
    }

    #[test]
    fn aggregate_2012_share() {
        // One in-zone and one out-of-zone loan carrying the year's dollar
        // totals: 210 b$ of 2,135 b$ in the 5 ft surge zone.
        let cls = classes(&[("wet", 8.0), ("dry", 0.0)]);
        let loans = vec![
            test_loan(2012, "wet", 210_000_000_000),
            test_loan(2012, "dry", 2_135_000_000_000 - 210_000_000_000),
        ];
        let t = originations_by_zone_year(&loans, &cls, ZoneFlag::Surge(0));
        let share = t.rows[0].share_pct.unwrap();
        assert!((round_half_even(share, 2) - 9.84).abs() < 0.05);
        assert_eq!(t.rows[0].total, 2_135_000_000_000);
        assert_eq!(t.unmatched_loans, 0);
    }

    #[test]
    fn no_loans_in_zone_is_zero_share() {
        let cls = classes(&[("wet", 8.0), ("dry", 0.0)]);
        let loans = vec![test_loan(2015, "dry", 1_000_000)];
        let t = originations_by_zone_year(&loans, &cls, ZoneFlag::Surge(0));
        assert_eq!(t.rows[0].in_zone, 0);
        assert_eq!(t.rows[0].share_pct, Some(0.0));
    }

    #[test]
    fn year_without_volume_is_absent_not_zero() {
        let cls = classes(&[("dry", 0.0)]);
        let t = originations_by_zone_year(&[], &cls, ZoneFlag::Surge(0));
        assert!(t.rows.is_empty());
    }

    #[test]
    fn agency_split() {
        let cls = classes(&[("wet", 8.0), ("dry", 0.0)]);
        let mut a = test_loan(2013, "wet", 30);
        a.agency_flag = true;
        let mut b = test_loan(2013, "dry", 70);
        b.agency_flag = true;
        let c = test_loan(2013, "wet", 900);
        let t = originations_by_zone_year(&[a, b, c], &cls, ZoneFlag::Surge(0));
        let r = &t.rows[0];
        assert_eq!((r.total, r.in_zone), (1000, 930));
        assert_eq!((r.agency_total, r.agency_in_zone), (100, 30));
        assert_eq!(r.agency_share_pct, Some(30.0));
    }

    #[test]
    fn unmatched_zone_counts_out_of_zone_and_is_reported() {
        let cls = classes(&[("wet", 8.0)]);
        let loans = vec![test_loan(2012, "wet", 40), test_loan(2012, "nowhere", 60)];
        let t = originations_by_zone_year(&loans, &cls, ZoneFlag::Surge(0));
        assert_eq!(t.rows[0].total, 100);
        assert_eq!(t.rows[0].in_zone, 40);
        assert_eq!(t.unmatched_dollars, 60);
        assert_eq!(t.unmatched_loans, 1);
    }

    /// Nested zone definitions give nested in-zone volumes.
    #[test]
    fn threshold_monotonicity() {
        let cls = classes(&[("a", 22.0), ("b", 17.0), ("c", 12.0), ("d", 7.0), ("e", 1.0)]);
        let loans: Vec<_> = ["a", "b", "c", "d", "e"]
            .iter()
            .map(|z| test_loan(2016, z, 100))
            .collect();
        let vol = |t: usize| {
            originations_by_zone_year(&loans, &cls, ZoneFlag::Surge(t)).rows[0].in_zone
        };
        assert!(vol(0) >= vol(1) && vol(1) >= vol(2) && vol(2) >= vol(3));
        assert_eq!((vol(0), vol(1), vol(2), vol(3)), (400, 300, 200, 100));
    }
}
