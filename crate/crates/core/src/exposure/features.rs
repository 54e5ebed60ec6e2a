//! Complex-mortgage feature dollar shares, in-zone vs out-of-zone.

use std::collections::BTreeMap;

use crate::zones::{ZoneClassification, ZoneFlag};

use super::records::{DocType, LoanRecord};
use super::pct;

/// Dollar totals for one (year, side) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeatureCell {
    pub total: u64,
    pub io: u64,
    pub fixed_rate: u64,
    pub full_doc: u64,
    pub nina: u64,
}

impl FeatureCell {
    fn add(&mut self, loan: &LoanRecord) {
        self.total += loan.amount;
        if loan.io_flag {
            self.io += loan.amount;
        }
        if loan.fixed_rate_flag {
            self.fixed_rate += loan.amount;
        }
        match loan.doc_type {
            DocType::Full => self.full_doc += loan.amount,
            DocType::Nina => self.nina += loan.amount,
            DocType::Low => {}
        }
    }

    pub fn io_pct(&self) -> Option<f64> {
        pct(self.io, self.total)
    }
    pub fn fixed_rate_pct(&self) -> Option<f64> {
        pct(self.fixed_rate, self.total)
    }
    pub fn full_doc_pct(&self) -> Option<f64> {
        pct(self.full_doc, self.total)
    }
    pub fn nina_pct(&self) -> Option<f64> {
        pct(self.nina, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureRow {
    pub year: i32,
    pub in_zone: FeatureCell,
    pub out_zone: FeatureCell,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureTable {
    pub rows: Vec<FeatureRow>,
    pub unmatched_dollars: u64,
    pub unmatched_loans: u64,
}

/// Dollar-weighted shares of interest-only, fixed-rate, full-documentation,
/// and NINA loans by year, split by the zone flag. Expects McDash-filtered
/// loans; unclassified zones fall to the out-of-zone side and are reported.
pub fn feature_shares_by_zone(
    loans: &[LoanRecord],
    classification: &[ZoneClassification],
    flag: ZoneFlag,
) -> FeatureTable {
    let in_zone: BTreeMap<&str, bool> = classification
        .iter()
        .map(|z| (z.zone_id.as_str(), flag.is_set(z)))
        .collect();
    let mut rows: BTreeMap<i32, FeatureRow> = BTreeMap::new();
    let mut table = FeatureTable::default();
    for loan in loans {
        let row = rows.entry(loan.year).or_insert_with(|| FeatureRow {
            year: loan.year,
            ..FeatureRow::default()
        });
        let member = match in_zone.get(loan.zone_id.as_str()) {
            Some(&m) => m,
            None => {
                table.unmatched_dollars += loan.amount;
                table.unmatched_loans += 1;
                false
            }
        };
        if member {
            row.in_zone.add(loan);
        } else {
            row.out_zone.add(loan);
        }
    }
    table.rows = rows.into_values().collect();
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::join::SurgeValue;
    use crate::zones::{classify, ClassifyConfig};
    use crate::exposure::records::test_loan;
    use crate::exposure::round_half_even;

    fn classes() -> Vec<ZoneClassification> {
        let surge: BTreeMap<String, SurgeValue> = [
            ("wet".to_string(), SurgeValue::CoveredFt(8.0)),
            ("dry".to_string(), SurgeValue::CoveredFt(0.0)),
        ]
        .into_iter()
        .collect();
        let empty_f = BTreeMap::new();
        let empty_b = BTreeMap::new();
        classify(&surge, &empty_f, &empty_b, &empty_b, &BTreeMap::new(), &ClassifyConfig::default())
    }

    #[test]
    fn surge_zone_io_share() {
        // 5,771 M$ interest-only of 56,364 M$ in the surge zone -> 10.2%.
        let mut io = test_loan(2016, "wet", 5_771_000_000);
        io.io_flag = true;
        let rest = test_loan(2016, "wet", 56_364_000_000 - 5_771_000_000);
        let t = feature_shares_by_zone(&[io, rest], &classes(), ZoneFlag::Surge(0));
        let got = round_half_even(t.rows[0].in_zone.io_pct().unwrap(), 1);
        assert!((got - 10.2).abs() < 0.05, "io share {got}");
    }

    #[test]
    fn other_zip_fixed_rate_share() {
        // 729,140 M$ fixed-rate of 811,134 M$ outside the zone -> 89.9%.
        let fr = test_loan(2016, "dry", 729_140_000_000);
        let mut arm = test_loan(2016, "dry", 811_134_000_000 - 729_140_000_000);
        arm.fixed_rate_flag = false;
        let t = feature_shares_by_zone(&[fr, arm], &classes(), ZoneFlag::Surge(0));
        let got = round_half_even(t.rows[0].out_zone.fixed_rate_pct().unwrap(), 1);
        assert!((got - 89.9).abs() < 0.05, "fixed-rate share {got}");
    }

    #[test]
    fn all_io_is_hundred_percent() {
        let mut a = test_loan(2010, "wet", 100);
        a.io_flag = true;
        let mut b = test_loan(2010, "wet", 900);
        b.io_flag = true;
        let t = feature_shares_by_zone(&[a, b], &classes(), ZoneFlag::Surge(0));
        assert_eq!(t.rows[0].in_zone.io_pct(), Some(100.0));
    }

    #[test]
    fn empty_side_share_is_undefined() {
        let loans = vec![test_loan(2011, "dry", 100)];
        let t = feature_shares_by_zone(&loans, &classes(), ZoneFlag::Surge(0));
        assert_eq!(t.rows[0].in_zone.io_pct(), None);
        assert_eq!(t.rows[0].out_zone.io_pct(), Some(0.0));
    }

    /// Dollar-weighted shares are invariant under splitting a loan into two
    /// with the same attributes and amounts summing to the original.
    #[test]
    fn loan_split_invariance() {
        let mut a = test_loan(2014, "wet", 1_000_001);
        a.io_flag = true;
        let b = test_loan(2014, "wet", 2_500_000);
        let whole = feature_shares_by_zone(&[a.clone(), b.clone()], &classes(), ZoneFlag::Surge(0));
        let mut a1 = a.clone();
        a1.amount = 399_999;
        let mut a2 = a;
        a2.amount = 600_002;
        let split = feature_shares_by_zone(&[a1, a2, b], &classes(), ZoneFlag::Surge(0));
        assert_eq!(whole.rows[0].in_zone, split.rows[0].in_zone);
    }

    /// In-zone + out-of-zone = total over all loans, exactly.
    #[test]
    fn sum_decomposition_exact() {
        let loans: Vec<LoanRecord> = (0..40)
            .map(|k| {
                let zone = if k % 3 == 0 { "wet" } else { "dry" };
                let mut l = test_loan(2015, zone, 100_003 + 17 * k);
                l.io_flag = k % 2 == 0;
                l
            })
            .collect();
        let t = feature_shares_by_zone(&loans, &classes(), ZoneFlag::Surge(0));
        let total: u64 = loans.iter().map(|l| l.amount).sum();
        let r = &t.rows[0];
        assert_eq!(r.in_zone.total + r.out_zone.total, total);
        assert_eq!(
            r.in_zone.io + r.out_zone.io,
            loans.iter().filter(|l| l.io_flag).map(|l| l.amount).sum::<u64>()
        );
    }
}
