//! Loan-level records and sample filters.

use std::collections::BTreeMap;

/// Lien position at origination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lien {
    First,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupancy {
    Owner,
    Other,
}

/// Documentation level; mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocType {
    Full,
    Low,
    /// No income, no asset documentation.
    Nina,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LenderKind {
    Bank,
    NonBank,
}

/// One originated mortgage.
#[derive(Debug, Clone, PartialEq)]
pub struct LoanRecord {
    pub year: i32,
    pub zone_id: String,
    /// Origination amount, whole dollars.
    pub amount: u64,
    /// Purchased or securitized by Fannie Mae, Ginnie Mae, Freddie Mac,
    /// or Farmer Mac.
    pub agency_flag: bool,
    pub lien: Lien,
    pub occupancy: Occupancy,
    /// Property value at origination, whole dollars.
    pub property_value: u64,
    pub io_flag: bool,
    pub fixed_rate_flag: bool,
    pub doc_type: DocType,
    pub lender_id: String,
    pub lender_kind: LenderKind,
}

const MIN_VALUE_DOLLARS: u64 = 50_000;
const MIN_AMOUNT_DOLLARS: u64 = 50_000;
const MIN_LOANS_PER_ZONE: usize = 10;

/// Servicing-data sample restrictions: first liens on owner-occupied housing
/// with property value and loan amount above $50,000, in zones keeping at
/// least 10 such loans.
pub fn filter_loans_mcdash(loans: &[LoanRecord]) -> Vec<LoanRecord> {
    let survivors: Vec<&LoanRecord> = loans
        .iter()
        .filter(|l| {
            l.lien == Lien::First
                && l.occupancy == Occupancy::Owner
                && l.property_value > MIN_VALUE_DOLLARS
                && l.amount > MIN_AMOUNT_DOLLARS
        })
        .collect();
    let mut per_zone: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &survivors {
        *per_zone.entry(l.zone_id.as_str()).or_insert(0) += 1;
    }
    survivors
        .into_iter()
        .filter(|l| per_zone[l.zone_id.as_str()] >= MIN_LOANS_PER_ZONE)
        .cloned()
        .collect()
}

#[cfg(test)]
pub(crate) fn test_loan(year: i32, zone: &str, amount: u64) -> LoanRecord {
    LoanRecord {
        year,
        zone_id: zone.to_string(),
        amount,
        agency_flag: false,
        lien: Lien::First,
        occupancy: Occupancy::Owner,
        property_value: 300_000,
        io_flag: false,
        fixed_rate_flag: true,
        doc_type: DocType::Full,
        lender_id: "L1".to_string(),
        lender_kind: LenderKind::Bank,
    }
}
