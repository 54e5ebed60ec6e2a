//! Classification table CSV: one row per zone, surge flags per threshold,
//! floodplain share, SLR flags, coverage.

use std::path::Path;

use anyhow::anyhow;
use floodrisk_core::zones::{ClassifyConfig, Comparator, ZoneClassification};

use crate::diag::Diagnostics;
use crate::errors::{validation, CliResult, Contextual};
use crate::formats::fmt_f64;

fn threshold_column(t: f64) -> String {
    if t.fract() == 0.0 {
        format!("surge{}", t as i64)
    } else {
        format!("surge{t}")
    }
}

pub fn write_classification(rows: &[ZoneClassification], cfg: &ClassifyConfig) -> String {
    let mut s = String::from("zone_id,category,tide_ft,comparator,max_surge_ft");
    for &t in &cfg.thresholds_ft {
        s.push(',');
        s.push_str(&threshold_column(t));
    }
    s.push_str(",sfha_share,sfha_any,sfha_majority,slr3,slr6,covered,population,missing\n");
    for z in rows {
        s.push_str(&z.zone_id);
        s.push_str(&format!(",{},{},{}", cfg.category, fmt_f64(cfg.tide_offset_ft), cfg.comparator.as_str()));
        s.push(',');
        if let Some(v) = z.max_surge_ft {
            s.push_str(&fmt_f64(v));
        }
        for &f in &z.surge_flags {
            s.push(',');
            s.push(if f { '1' } else { '0' });
        }
        s.push(',');
        if let Some(v) = z.sfha_share {
            s.push_str(&fmt_f64(v));
        }
        for f in [z.sfha_any, z.sfha_majority, z.slr3, z.slr6, z.covered] {
            s.push(',');
            s.push(if f { '1' } else { '0' });
        }
        s.push_str(&format!(",{}", fmt_f64(z.population)));
        s.push(',');
        s.push_str(&z.missing.join(";"));
        s.push('\n');
    }
    s
}

/// Reads a classification table back, reconstructing the threshold list from
/// the header.
pub fn parse_classification(
    text: &str,
    file: &str,
    diags: &mut Diagnostics,
) -> CliResult<(Vec<ZoneClassification>, ClassifyConfig)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| validation(anyhow!("{file}: empty file")))?;
    let cols: Vec<&str> = header.split(',').collect();
    let fixed_head = ["zone_id", "category", "tide_ft", "comparator", "max_surge_ft"];
    if cols.len() < 13 || cols[..5] != fixed_head {
        return Err(validation(anyhow!(
            "{file}: bad header, expected it to start with {fixed_head:?}"
        )));
    }
    let tail = ["sfha_share", "sfha_any", "sfha_majority", "slr3", "slr6", "covered", "population", "missing"];
    let n_thresholds = cols.len() - 5 - tail.len();
    if cols[5 + n_thresholds..] != tail {
        return Err(validation(anyhow!("{file}: bad header, expected it to end with {tail:?}")));
    }
    let thresholds_ft: Vec<f64> = cols[5..5 + n_thresholds]
        .iter()
        .map(|c| {
            c.strip_prefix("surge")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| validation(anyhow!("{file}: bad threshold column {c:?}")))
        })
        .collect::<CliResult<_>>()?;

    let mut rows = Vec::new();
    let mut cfg: Option<ClassifyConfig> = None;
    let mut total = 0usize;
    for (k, line) in lines.enumerate() {
        let lineno = k as u64 + 2;
        if line.is_empty() {
            continue;
        }
        total += 1;
        match parse_row(line, n_thresholds, &thresholds_ft) {
            Ok((z, row_cfg)) => {
                match &cfg {
                    None => cfg = Some(row_cfg),
                    Some(c)
                        if c.category != row_cfg.category
                            || c.tide_offset_ft != row_cfg.tide_offset_ft
                            || c.comparator != row_cfg.comparator =>
                    {
                        diags.push(file, lineno, "row disagrees with the table's scenario");
                        continue;
                    }
                    Some(_) => {}
                }
                rows.push(z);
            }
            Err(msg) => diags.push(file, lineno, msg),
        }
    }
    diags.check_fatal(file, total)?;
    let cfg = cfg.unwrap_or_else(|| ClassifyConfig {
        thresholds_ft: thresholds_ft.clone(),
        ..ClassifyConfig::default()
    });
    Ok((rows, cfg))
}

fn parse_row(
    line: &str,
    n_thresholds: usize,
    thresholds_ft: &[f64],
) -> Result<(ZoneClassification, ClassifyConfig), String> {
    let fields: Vec<&str> = line.split(',').collect();
    let expected = 5 + n_thresholds + 8;
    if fields.len() != expected {
        return Err(format!("expected {expected} fields, found {}", fields.len()));
    }
    let flag = |s: &str| match s {
        "1" => Ok(true),
        "0" => Ok(false),
        v => Err(format!("bad flag {v:?}")),
    };
    let category: u8 = fields[1].parse().map_err(|_| format!("bad category {:?}", fields[1]))?;
    let tide: f64 = fields[2].parse().map_err(|_| format!("bad tide {:?}", fields[2]))?;
    let comparator = match fields[3] {
        "ge" => Comparator::Ge,
        "gt" => Comparator::Gt,
        v => return Err(format!("bad comparator {v:?}")),
    };
    let max_surge_ft = if fields[4].is_empty() {
        None
    } else {
        Some(fields[4].parse().map_err(|_| format!("bad surge {:?}", fields[4]))?)
    };
    let surge_flags: Vec<bool> = fields[5..5 + n_thresholds]
        .iter()
        .map(|s| flag(s))
        .collect::<Result<_, _>>()?;
    let base = 5 + n_thresholds;
    let sfha_share = if fields[base].is_empty() {
        None
    } else {
        Some(fields[base].parse().map_err(|_| format!("bad sfha share {:?}", fields[base]))?)
    };
    let missing: Vec<&'static str> = fields[base + 7]
        .split(';')
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "surge" => Ok("surge"),
            "sfha" => Ok("sfha"),
            "slr3" => Ok("slr3"),
            "slr6" => Ok("slr6"),
            v => Err(format!("unknown missing marker {v:?}")),
        })
        .collect::<Result<_, _>>()?;
    Ok((
        ZoneClassification {
            zone_id: fields[0].to_string(),
            max_surge_ft,
            surge_flags,
            sfha_share,
            sfha_any: flag(fields[base + 1])?,
            sfha_majority: flag(fields[base + 2])?,
            slr3: flag(fields[base + 3])?,
            slr6: flag(fields[base + 4])?,
            covered: flag(fields[base + 5])?,
            population: fields[base + 6]
                .parse()
                .map_err(|_| format!("bad population {:?}", fields[base + 6]))?,
            missing,
        },
        ClassifyConfig {
            thresholds_ft: thresholds_ft.to_vec(),
            category,
            tide_offset_ft: tide,
            comparator,
        },
    ))
}

pub fn read_classification(
    path: &Path,
    diags: &mut Diagnostics,
) -> CliResult<(Vec<ZoneClassification>, ClassifyConfig)> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading classification {}", path.display()))?;
    parse_classification(&text, &path.display().to_string(), diags)
}
