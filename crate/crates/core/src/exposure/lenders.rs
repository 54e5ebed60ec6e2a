//! Lender balance-sheet ratios by flood zone, origination-volume weighted.

use std::collections::BTreeMap;

use crate::zones::{ZoneClassification, ZoneFlag};

use super::median::weighted_median;
use super::records::{LenderKind, LoanRecord};

/// One bank's condition-and-income report for a quarter. All balance-sheet
/// fields in whole dollars; net income is for the quarter.
#[derive(Debug, Clone, PartialEq)]
pub struct BankRecord {
    pub lender_id: String,
    /// e.g. "2012Q1".
    pub quarter: String,
    pub assets: f64,
    pub net_income: f64,
    pub equity: f64,
    pub loans: f64,
    pub deposits: f64,
    pub liquid_assets: f64,
}

pub const RATIO_FIELDS: [&str; 6] = [
    "roa",
    "roe",
    "loans_to_assets",
    "deposits_to_assets",
    "liquidity_to_assets",
    "equity_to_assets",
];

impl BankRecord {
    /// Ratios in [`RATIO_FIELDS`] order.
    pub fn ratios(&self) -> [f64; 6] {
        [
            self.net_income / self.assets,
            self.net_income / self.equity,
            self.loans / self.assets,
            self.deposits / self.assets,
            self.liquid_assets / self.assets,
            self.equity / self.assets,
        ]
    }
}

/// One zone definition's column of the lender table.
#[derive(Debug, Clone, PartialEq)]
pub struct LenderColumn {
    pub name: String,
    /// Volume-weighted means over bank lenders, [`RATIO_FIELDS`] order;
    /// `None` when no matched bank volume.
    pub ratio_means: [Option<f64>; 6],
    /// Volume-weighted median of bank assets, dollars.
    pub median_assets: Option<f64>,
    /// Non-bank origination dollars over total origination dollars, percent.
    pub nonbank_share_pct: Option<f64>,
    pub bank_dollars: u64,
    pub nonbank_dollars: u64,
    /// Bank-kind volume with no bank record for the quarter; excluded from
    /// the ratio weights, reported here.
    pub unmatched_dollars: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LenderTable {
    pub quarter: String,
    pub year: i32,
    pub columns: Vec<LenderColumn>,
}

/// Table of average bank ratios per zone definition, weighted by each
/// lender's origination volume in the zone during `year`, using bank reports
/// for `quarter`. The last row of the published table, the non-bank volume
/// share, is included per column.
pub fn lender_ratios_by_zone(
    loans: &[LoanRecord],
    banks: &[BankRecord],
    classification: &[ZoneClassification],
    flags: &[(String, ZoneFlag)],
    year: i32,
    quarter: &str,
) -> LenderTable {
    let by_zone: BTreeMap<&str, &ZoneClassification> = classification
        .iter()
        .map(|z| (z.zone_id.as_str(), z))
        .collect();
    let bank_by_id: BTreeMap<&str, &BankRecord> = banks
        .iter()
        .filter(|b| b.quarter == quarter)
        .map(|b| (b.lender_id.as_str(), b))
        .collect();
    let mut columns = Vec::with_capacity(flags.len());
    for (name, flag) in flags {
        // Pool each lender's volume over the column's zones.
        let mut volume_by_lender: BTreeMap<&str, (u64, LenderKind)> = BTreeMap::new();
        let mut nonbank_dollars = 0u64;
        let mut total_dollars = 0u64;
        for loan in loans {
            if loan.year != year {
                continue;
            }
            if !by_zone.get(loan.zone_id.as_str()).is_some_and(|z| flag.is_set(z)) {
                continue;
            }
            total_dollars += loan.amount;
            if loan.lender_kind == LenderKind::NonBank {
                nonbank_dollars += loan.amount;
            }
            let e = volume_by_lender
                .entry(loan.lender_id.as_str())
                .or_insert((0, loan.lender_kind));
            e.0 += loan.amount;
        }
        let mut weights = Vec::new();
        let mut ratio_rows: Vec<[f64; 6]> = Vec::new();
        let mut assets = Vec::new();
        let mut unmatched_dollars = 0u64;
        for (lender, (vol, kind)) in &volume_by_lender {
            if *kind != LenderKind::Bank {
                continue;
            }
            match bank_by_id.get(lender) {
                Some(bank) => {
                    weights.push(*vol as f64);
                    ratio_rows.push(bank.ratios());
                    assets.push(bank.assets);
                }
                None => unmatched_dollars += vol,
            }
        }
        let matched: f64 = weights.iter().sum();
        let mut ratio_means = [None; 6];
        if matched > 0.0 {
            for (k, slot) in ratio_means.iter_mut().enumerate() {
                let s: f64 = ratio_rows
                    .iter()
                    .zip(&weights)
                    .map(|(r, w)| w * r[k])
                    .sum();
                *slot = Some(s / matched);
            }
        }
        columns.push(LenderColumn {
            name: name.clone(),
            ratio_means,
            median_assets: weighted_median(&assets, &weights).ok(),
            nonbank_share_pct: if total_dollars > 0 {
                Some(100.0 * nonbank_dollars as f64 / total_dollars as f64)
            } else {
                None
            },
            bank_dollars: total_dollars - nonbank_dollars,
            nonbank_dollars,
            unmatched_dollars,
        });
    }
    LenderTable { quarter: quarter.to_string(), year, columns }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exposure::records::test_loan;
    use crate::geom::join::SurgeValue;
    use crate::zones::{classify, ClassifyConfig};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn classes() -> Vec<ZoneClassification> {
        let surge: BTreeMap<String, SurgeValue> = [
            ("wet".to_string(), SurgeValue::CoveredFt(8.0)),
            ("dry".to_string(), SurgeValue::CoveredFt(0.0)),
        ]
        .into_iter()
        .collect();
        let e = BTreeMap::new();
        let b = BTreeMap::new();
        classify(&surge, &e, &b, &b, &BTreeMap::new(), &ClassifyConfig::default())
    }

    fn bank(id: &str, assets: f64, net_income: f64) -> BankRecord {
        BankRecord {
            lender_id: id.to_string(),
            quarter: "2012Q1".to_string(),
            assets,
            net_income,
            equity: 0.1 * assets,
            loans: 0.6 * assets,
            deposits: 0.7 * assets,
            liquid_assets: 0.2 * assets,
        }
    }

    fn loan_from(lender: &str, zone: &str, amount: u64, kind: LenderKind) -> LoanRecord {
        let mut l = test_loan(2012, zone, amount);
        l.lender_id = lender.to_string();
        l.lender_kind = kind;
        l
    }

    fn flags() -> Vec<(String, ZoneFlag)> {
        vec![("surge5".to_string(), ZoneFlag::Surge(0))]
    }

    #[test]
    fn single_bank_column_equals_its_ratios() {
        let banks = vec![bank("B1", 1_000_000.0, 2_500.0)];
        let loans = vec![loan_from("B1", "wet", 500_000, LenderKind::Bank)];
        let t = lender_ratios_by_zone(&loans, &banks, &classes(), &flags(), 2012, "2012Q1");
        let c = &t.columns[0];
        for (k, m) in c.ratio_means.iter().enumerate() {
            assert_relative_eq!(m.unwrap(), banks[0].ratios()[k]);
        }
        assert_eq!(c.median_assets, Some(1_000_000.0));
        assert_eq!(c.nonbank_share_pct, Some(0.0));
    }

    #[test]
    fn equal_volume_banks_average_roa() {
        // ROA 0.2% and 0.3% with equal in-zone volume -> 0.25%.
        let banks = vec![bank("B1", 1e6, 2e3), bank("B2", 1e6, 3e3)];
        let loans = vec![
            loan_from("B1", "wet", 100_000, LenderKind::Bank),
            loan_from("B2", "wet", 100_000, LenderKind::Bank),
        ];
        let t = lender_ratios_by_zone(&loans, &banks, &classes(), &flags(), 2012, "2012Q1");
        assert_relative_eq!(t.columns[0].ratio_means[0].unwrap(), 0.0025);
    }

    #[test]
    fn nonbank_share_and_unmatched_volume() {
        let banks = vec![bank("B1", 1e6, 2e3)];
        let loans = vec![
            loan_from("B1", "wet", 600_000, LenderKind::Bank),
            loan_from("N1", "wet", 300_000, LenderKind::NonBank),
            loan_from("B9", "wet", 100_000, LenderKind::Bank), // no report
        ];
        let t = lender_ratios_by_zone(&loans, &banks, &classes(), &flags(), 2012, "2012Q1");
        let c = &t.columns[0];
        assert_relative_eq!(t.columns[0].nonbank_share_pct.unwrap(), 30.0);
        assert_eq!(c.unmatched_dollars, 100_000);
        assert_eq!(c.bank_dollars + c.nonbank_dollars, 1_000_000);
        // Ratio weights exclude the unmatched lender: means equal B1's.
        assert_relative_eq!(c.ratio_means[0].unwrap(), banks[0].ratios()[0]);
    }

    #[test]
    fn other_years_and_quarters_ignored() {
        let mut old = bank("B1", 1e6, 9e9);
        old.quarter = "2011Q4".to_string();
        let banks = vec![bank("B1", 1e6, 2e3), old];
        let mut stale = loan_from("B1", "wet", 999_999, LenderKind::Bank);
        stale.year = 2011;
        let loans = vec![loan_from("B1", "wet", 100_000, LenderKind::Bank), stale];
        let t = lender_ratios_by_zone(&loans, &banks, &classes(), &flags(), 2012, "2012Q1");
        assert_relative_eq!(t.columns[0].ratio_means[0].unwrap(), 0.0025 * 0.8);
        assert_eq!(t.columns[0].bank_dollars, 100_000);
    }

    /// 5-bank random fixture against a direct recomputation of the weighted
    /// means and the weighted median of assets.
    #[test]
    fn random_fixture_matches_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let banks: Vec<BankRecord> = (0..5)
            .map(|k| bank(&format!("B{k}"), rng.gen_range(1e6..1e8), rng.gen_range(1e3..1e5)))
            .collect();
        let mut loans = Vec::new();
        for _ in 0..60 {
            let b = rng.gen_range(0..5);
            let zone = if rng.gen_bool(0.5) { "wet" } else { "dry" };
            loans.push(loan_from(&format!("B{b}"), zone, rng.gen_range(60_000..500_000), LenderKind::Bank));
        }
        let t = lender_ratios_by_zone(&loans, &banks, &classes(), &flags(), 2012, "2012Q1");
        // Oracle: accumulate per-bank wet volume, then average directly.
        let mut vol = [0u64; 5];
        for l in &loans {
            if l.zone_id == "wet" {
                let k: usize = l.lender_id[1..].parse().unwrap();
                vol[k] += l.amount;
            }
        }
        let total: f64 = vol.iter().map(|&v| v as f64).sum();
        for r in 0..6 {
            let oracle: f64 = (0..5)
                .map(|k| vol[k] as f64 / total * banks[k].ratios()[r])
                .sum();
            assert_relative_eq!(
                t.columns[0].ratio_means[r].unwrap(),
                oracle,
                max_relative = 1e-12
            );
        }
        let assets: Vec<f64> = banks.iter().map(|b| b.assets).collect();
        let weights: Vec<f64> = vol.iter().map(|&v| v as f64).collect();
        assert_eq!(
            t.columns[0].median_assets,
            weighted_median(&assets, &weights).ok()
        );
    }
}
