//! CSV readers/writers for loans, banks, demographics, and the price/rent
//! panel, plus the rendered output tables.

use std::path::Path;

use anyhow::anyhow;
use floodrisk_core::econ::{PanelObservation, TrendPoint};
use floodrisk_core::exposure::demographics::{DemographicRecord, MEDIAN_FIELDS, PCT_FIELDS};
use floodrisk_core::exposure::lenders::{BankRecord, LenderTable, RATIO_FIELDS};
use floodrisk_core::exposure::records::{DocType, LenderKind, Lien, LoanRecord, Occupancy};
use floodrisk_core::exposure::{round_half_even, DemographicsTable, FeatureTable, OriginationsTable};
use serde::{Deserialize, Serialize};

use crate::diag::Diagnostics;
use crate::errors::{validation, CliResult, Contextual};

// ---------------------------------------------------------------- loans ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoanRow {
    pub year: i32,
    pub zone_id: String,
    pub amount: u64,
    pub agency: u8,
    pub lien: String,
    pub occupancy: String,
    pub property_value: u64,
    pub io: u8,
    pub fixed_rate: u8,
    pub doc_type: String,
    pub lender_id: String,
    pub lender_kind: String,
}

impl LoanRow {
    pub fn from_record(l: &LoanRecord) -> Self {
        LoanRow {
            year: l.year,
            zone_id: l.zone_id.clone(),
            amount: l.amount,
            agency: l.agency_flag as u8,
            lien: match l.lien {
                Lien::First => "first".into(),
                Lien::Other => "other".into(),
            },
            occupancy: match l.occupancy {
                Occupancy::Owner => "owner".into(),
                Occupancy::Other => "other".into(),
            },
            property_value: l.property_value,
            io: l.io_flag as u8,
            fixed_rate: l.fixed_rate_flag as u8,
            doc_type: match l.doc_type {
                DocType::Full => "full".into(),
                DocType::Low => "low".into(),
                DocType::Nina => "nina".into(),
            },
            lender_id: l.lender_id.clone(),
            lender_kind: match l.lender_kind {
                LenderKind::Bank => "bank".into(),
                LenderKind::NonBank => "nonbank".into(),
            },
        }
    }

    pub fn to_record(&self) -> Result<LoanRecord, String> {
        if self.amount == 0 {
            return Err("amount must be positive".into());
        }
        let lien = match self.lien.as_str() {
            "first" => Lien::First,
            "other" => Lien::Other,
            v => return Err(format!("bad lien {v:?}")),
        };
        let occupancy = match self.occupancy.as_str() {
            "owner" => Occupancy::Owner,
            "other" => Occupancy::Other,
            v => return Err(format!("bad occupancy {v:?}")),
        };
        let doc_type = match self.doc_type.as_str() {
            "full" => DocType::Full,
            "low" => DocType::Low,
            "nina" => DocType::Nina,
            v => return Err(format!("bad doc_type {v:?}")),
        };
        let lender_kind = match self.lender_kind.as_str() {
            "bank" => LenderKind::Bank,
            "nonbank" => LenderKind::NonBank,
            v => return Err(format!("bad lender_kind {v:?}")),
        };
        Ok(LoanRecord {
            year: self.year,
            zone_id: self.zone_id.clone(),
            amount: self.amount,
            agency_flag: self.agency != 0,
            lien,
            occupancy,
            property_value: self.property_value,
            io_flag: self.io != 0,
            fixed_rate_flag: self.fixed_rate != 0,
            doc_type,
            lender_id: self.lender_id.clone(),
            lender_kind,
        })
    }
}

fn csv_string<S: Serialize>(rows: impl IntoIterator<Item = S>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf8")
}

pub fn write_loans(loans: &[LoanRecord]) -> String {
    csv_string(loans.iter().map(LoanRow::from_record))
}

fn parse_csv<'de, Row, Rec, F>(
    text: &str,
    file: &str,
    expected_header: &[&str],
    convert: F,
    diags: &mut Diagnostics,
) -> CliResult<Vec<Rec>>
where
    Row: serde::de::DeserializeOwned,
    F: Fn(Row) -> Result<Rec, String>,
{
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().invalid(&format!("{file}: unreadable header"))?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected_header {
        return Err(validation(anyhow!(
            "{file}: bad header, expected {expected_header:?}, found {found:?}"
        )));
    }
    let mut out = Vec::new();
    let mut total = 0usize;
    for (k, record) in reader.deserialize::<Row>().enumerate() {
        let line = k as u64 + 2;
        total += 1;
        match record {
            Ok(row) => match convert(row) {
                Ok(rec) => out.push(rec),
                Err(msg) => diags.push(file, line, msg),
            },
            Err(e) => diags.push(file, line, e.to_string()),
        }
    }
    diags.check_fatal(file, total)?;
    Ok(out)
}

pub const LOAN_HEADER: [&str; 12] = [
    "year", "zone_id", "amount", "agency", "lien", "occupancy", "property_value", "io",
    "fixed_rate", "doc_type", "lender_id", "lender_kind",
];

pub fn parse_loans(text: &str, file: &str, diags: &mut Diagnostics) -> CliResult<Vec<LoanRecord>> {
    parse_csv(text, file, &LOAN_HEADER, |r: LoanRow| r.to_record(), diags)
}

// ---------------------------------------------------------------- banks ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankRow {
    pub lender_id: String,
    pub quarter: String,
    pub assets: f64,
    pub net_income: f64,
    pub equity: f64,
    pub loans: f64,
    pub deposits: f64,
    pub liquid_assets: f64,
}

pub const BANK_HEADER: [&str; 8] = [
    "lender_id", "quarter", "assets", "net_income", "equity", "loans", "deposits",
    "liquid_assets",
];

pub fn write_banks(banks: &[BankRecord]) -> String {
    csv_string(banks.iter().map(|b| BankRow {
        lender_id: b.lender_id.clone(),
        quarter: b.quarter.clone(),
        assets: b.assets,
        net_income: b.net_income,
        equity: b.equity,
        loans: b.loans,
        deposits: b.deposits,
        liquid_assets: b.liquid_assets,
    }))
}

pub fn parse_banks(text: &str, file: &str, diags: &mut Diagnostics) -> CliResult<Vec<BankRecord>> {
    parse_csv(
        text,
        file,
        &BANK_HEADER,
        |r: BankRow| {
            if !(r.assets > 0.0) {
                return Err(format!("assets must be positive, got {}", r.assets));
            }
            if !(r.equity > 0.0) {
                return Err(format!("equity must be positive, got {}", r.equity));
            }
            Ok(BankRecord {
                lender_id: r.lender_id,
                quarter: r.quarter,
                assets: r.assets,
                net_income: r.net_income,
                equity: r.equity,
                loans: r.loans,
                deposits: r.deposits,
                liquid_assets: r.liquid_assets,
            })
        },
        diags,
    )
}

// --------------------------------------------------------- demographics ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemographicRow {
    pub zone_id: String,
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

pub const DEMOGRAPHIC_HEADER: [&str; 16] = [
    "zone_id",
    "population",
    "median_household_income",
    "median_age",
    "median_house_value",
    "median_monthly_owner_cost",
    "median_gross_rent",
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

pub fn write_demographics(records: &[DemographicRecord]) -> String {
    csv_string(records.iter().map(|r| DemographicRow {
        zone_id: r.zone_id.clone(),
        population: r.population,
        median_household_income: r.median_household_income,
        median_age: r.median_age,
        median_house_value: r.median_house_value,
        median_monthly_owner_cost: r.median_monthly_owner_cost,
        median_gross_rent: r.median_gross_rent,
        pct_owner_cost_share_income: r.pct_owner_cost_share_income,
        pct_owner_occupied: r.pct_owner_occupied,
        pct_mobile_homes: r.pct_mobile_homes,
        pct_asian: r.pct_asian,
        pct_black: r.pct_black,
        pct_white: r.pct_white,
        pct_hispanic: r.pct_hispanic,
        pct_below_poverty: r.pct_below_poverty,
        pct_no_health_coverage: r.pct_no_health_coverage,
    }))
}

pub fn parse_demographics(
    text: &str,
    file: &str,
    diags: &mut Diagnostics,
) -> CliResult<Vec<DemographicRecord>> {
    parse_csv(
        text,
        file,
        &DEMOGRAPHIC_HEADER,
        |r: DemographicRow| {
            if r.population < 0.0 {
                return Err(format!("negative population {}", r.population));
            }
            let pcts = [
                r.pct_owner_cost_share_income,
                r.pct_owner_occupied,
                r.pct_mobile_homes,
                r.pct_asian,
                r.pct_black,
                r.pct_white,
                r.pct_hispanic,
                r.pct_below_poverty,
                r.pct_no_health_coverage,
            ];
            if let Some(bad) = pcts.iter().find(|p| !(0.0..=100.0).contains(*p)) {
                return Err(format!("percentage {bad} outside [0, 100]"));
            }
            Ok(DemographicRecord {
                zone_id: r.zone_id,
                population: r.population,
                median_household_income: r.median_household_income,
                median_age: r.median_age,
                median_house_value: r.median_house_value,
                median_monthly_owner_cost: r.median_monthly_owner_cost,
                median_gross_rent: r.median_gross_rent,
                pct_owner_cost_share_income: r.pct_owner_cost_share_income,
                pct_owner_occupied: r.pct_owner_occupied,
                pct_mobile_homes: r.pct_mobile_homes,
                pct_asian: r.pct_asian,
                pct_black: r.pct_black,
                pct_white: r.pct_white,
                pct_hispanic: r.pct_hispanic,
                pct_below_poverty: r.pct_below_poverty,
                pct_no_health_coverage: r.pct_no_health_coverage,
            })
        },
        diags,
    )
}

// ---------------------------------------------------------------- panel ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PanelRow {
    pub zone_id: String,
    pub year: i32,
    pub month: u32,
    pub price_index: f64,
    pub rent_index: f64,
}

pub const PANEL_HEADER: [&str; 5] = ["zone_id", "year", "month", "price_index", "rent_index"];

pub fn write_panel(rows: &[PanelRow]) -> String {
    csv_string(rows.iter().cloned())
}

/// Parses the raw index panel. Flags are attached later from the
/// classification; log price-to-rent = log(price) − log(rent).
pub fn parse_panel(text: &str, file: &str, diags: &mut Diagnostics) -> CliResult<Vec<PanelRow>> {
    parse_csv(
        text,
        file,
        &PANEL_HEADER,
        |r: PanelRow| {
            if !(r.price_index > 0.0) || !(r.rent_index > 0.0) {
                return Err(format!(
                    "indexes must be positive, got price {} rent {}",
                    r.price_index, r.rent_index
                ));
            }
            if !(1..=12).contains(&r.month) {
                return Err(format!("month {} outside 1..=12", r.month));
            }
            Ok(r)
        },
        diags,
    )
}

impl PanelRow {
    pub fn to_observation(&self, surge15: bool, sfha_majority: bool) -> PanelObservation {
        PanelObservation {
            zone_id: self.zone_id.clone(),
            year: self.year,
            month: self.month,
            log_price_to_rent: self.price_index.ln() - self.rent_index.ln(),
            log_rent: self.rent_index.ln(),
            surge15,
            sfha_majority,
        }
    }
}

// -------------------------------------------------------- output tables ----

fn fmt_opt_pct(v: Option<f64>, decimals: u32) -> String {
    match v {
        Some(p) => format!("{:.*}", decimals as usize, round_half_even(p, decimals)),
        None => String::new(),
    }
}

/// Originations table: year, totals in dollars, shares in percent.
pub fn render_originations(table: &OriginationsTable, decimals: u32) -> String {
    let mut s = String::from(
        "year,total_dollars,in_zone_dollars,in_zone_pct,agency_dollars,agency_in_zone_dollars,agency_in_zone_pct\n",
    );
    for r in &table.rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.year,
            r.total,
            r.in_zone,
            fmt_opt_pct(r.share_pct, decimals),
            r.agency_total,
            r.agency_in_zone,
            fmt_opt_pct(r.agency_share_pct, decimals),
        ));
    }
    s
}

/// Feature-share table, in-zone and out-of-zone blocks per year.
pub fn render_features(table: &FeatureTable, decimals: u32) -> String {
    let mut s = String::from(
        "year,side,total_dollars,io_dollars,io_pct,fixed_rate_dollars,fixed_rate_pct,full_doc_dollars,full_doc_pct,nina_dollars,nina_pct\n",
    );
    for r in &table.rows {
        for (side, c) in [("in_zone", &r.in_zone), ("other", &r.out_zone)] {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.year,
                side,
                c.total,
                c.io,
                fmt_opt_pct(c.io_pct(), decimals),
                c.fixed_rate,
                fmt_opt_pct(c.fixed_rate_pct(), decimals),
                c.full_doc,
                fmt_opt_pct(c.full_doc_pct(), decimals),
                c.nina,
                fmt_opt_pct(c.nina_pct(), decimals),
            ));
        }
    }
    s
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Demographics summary, one row per statistic, one column per zone set.
pub fn render_demographics(table: &DemographicsTable) -> String {
    let mut s = String::from("statistic");
    for c in &table.columns {
        s.push(',');
        s.push_str(&c.name);
    }
    s.push('\n');
    for (k, field) in MEDIAN_FIELDS.iter().enumerate() {
        s.push_str(field);
        for c in &table.columns {
            s.push(',');
            s.push_str(&fmt_opt(c.medians[k]));
        }
        s.push('\n');
    }
    for (k, field) in PCT_FIELDS.iter().enumerate() {
        s.push_str(field);
        for c in &table.columns {
            s.push(',');
            s.push_str(&fmt_opt(c.pct_means[k]));
        }
        s.push('\n');
    }
    s.push_str("population_share_pct");
    for c in &table.columns {
        s.push(',');
        s.push_str(&fmt_opt(c.population_share_pct));
    }
    s.push('\n');
    s
}

/// Lender ratios, one row per statistic, one column per zone set.
pub fn render_lenders(table: &LenderTable) -> String {
    let mut s = String::from("statistic");
    for c in &table.columns {
        s.push(',');
        s.push_str(&c.name);
    }
    s.push('\n');
    for (k, field) in RATIO_FIELDS.iter().enumerate() {
        s.push_str(field);
        for c in &table.columns {
            s.push(',');
            s.push_str(&fmt_opt(c.ratio_means[k]));
        }
        s.push('\n');
    }
    s.push_str("median_assets");
    for c in &table.columns {
        s.push(',');
        s.push_str(&fmt_opt(c.median_assets));
    }
    s.push('\n');
    s.push_str("nonbank_share_pct");
    for c in &table.columns {
        s.push(',');
        s.push_str(&fmt_opt(c.nonbank_share_pct));
    }
    s.push('\n');
    s.push_str("unmatched_dollars");
    for c in &table.columns {
        s.push(',');
        s.push_str(&c.unmatched_dollars.to_string());
    }
    s.push('\n');
    s
}

/// Trend plot data: year, estimate, 95% bounds.
pub fn render_trend(series: &[TrendPoint], label: &str) -> String {
    let mut s = String::from("family,year,estimate,lower95,upper95\n");
    for p in series {
        s.push_str(&format!(
            "{label},{},{},{},{}\n",
            p.year, p.estimate, p.lower95, p.upper95
        ));
    }
    s
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).invalid(&format!("reading {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loan() -> LoanRecord {
        LoanRecord {
            year: 2014,
            zone_id: "z1".into(),
            amount: 250_000,
            agency_flag: true,
            lien: Lien::First,
            occupancy: Occupancy::Owner,
            property_value: 400_000,
            io_flag: false,
            fixed_rate_flag: true,
            doc_type: DocType::Full,
            lender_id: "L1".into(),
            lender_kind: LenderKind::Bank,
        }
    }

    #[test]
    fn loans_round_trip() {
        let loans = vec![loan()];
        let mut diags = Diagnostics::default();
        let parsed = parse_loans(&write_loans(&loans), "l.csv", &mut diags).unwrap();
        assert_eq!(parsed, loans);
        assert!(diags.is_empty());
    }

    #[test]
    fn negative_amount_rejected_with_line() {
        let mut rows: Vec<LoanRecord> = (0..150).map(|_| loan()).collect();
        rows[3].amount = 250_000;
        let mut text = write_loans(&rows);
        text = text.replacen("250000", "0", 1);
        let mut diags = Diagnostics::default();
        let parsed = parse_loans(&text, "l.csv", &mut diags).unwrap();
        assert_eq!(parsed.len(), 149);
        assert_eq!(diags.entries[0].line, 2);
        assert!(diags.entries[0].message.contains("positive"));
    }

    #[test]
    fn empty_file_with_header_is_empty_ok() {
        let text = LOAN_HEADER.join(",") + "\n";
        let mut diags = Diagnostics::default();
        let parsed = parse_loans(&text, "l.csv", &mut diags).unwrap();
        assert!(parsed.is_empty());
        assert!(diags.is_empty());
    }

    #[test]
    fn wrong_header_is_fatal() {
        let text = "a,b,c\n1,2,3\n";
        assert!(parse_loans(text, "l.csv", &mut Diagnostics::default()).is_err());
    }

    #[test]
    fn panel_round_trip_and_log_construction() {
        let rows = vec![PanelRow {
            zone_id: "z1".into(),
            year: 2013,
            month: 4,
            price_index: 200.0,
            rent_index: 10.0,
        }];
        let mut diags = Diagnostics::default();
        let parsed = parse_panel(&write_panel(&rows), "p.csv", &mut diags).unwrap();
        assert_eq!(parsed.len(), 1);
        let obs = parsed[0].to_observation(true, false);
        assert!((obs.log_price_to_rent - (200.0f64 / 10.0).ln()).abs() < 1e-12);
        assert!(obs.surge15);
    }

    #[test]
    fn banks_and_demographics_round_trip() {
        let banks = vec![BankRecord {
            lender_id: "L1".into(),
            quarter: "2012Q1".into(),
            assets: 5e8,
            net_income: 1e6,
            equity: 5e7,
            loans: 3e8,
            deposits: 3.5e8,
            liquid_assets: 1e8,
        }];
        let mut diags = Diagnostics::default();
        assert_eq!(parse_banks(&write_banks(&banks), "b.csv", &mut diags).unwrap(), banks);

        let demo = vec![DemographicRecord {
            zone_id: "z1".into(),
            population: 4000.0,
            median_household_income: 52_000.0,
            median_age: 41.0,
            median_house_value: 210_000.0,
            median_monthly_owner_cost: 1_400.0,
            median_gross_rent: 950.0,
            pct_owner_cost_share_income: 24.0,
            pct_owner_occupied: 63.0,
            pct_mobile_homes: 3.0,
            pct_asian: 2.5,
            pct_black: 14.0,
            pct_white: 71.0,
            pct_hispanic: 16.0,
            pct_below_poverty: 12.0,
            pct_no_health_coverage: 10.0,
        }];
        assert_eq!(
            parse_demographics(&write_demographics(&demo), "d.csv", &mut diags).unwrap(),
            demo
        );
        assert!(diags.is_empty());
    }
}
