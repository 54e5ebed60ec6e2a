//! Surge envelope grid files (MEOW and MOM), values in feet above datum.
//!
//! ```text
//! envelope <meow|mom> <basin_id>
//! storm <storm_id>          # meow only
//! category <1-5>
//! tide_ft <t>
//! shape <nr> <na>
//! <nr lines of na values, feet>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use anyhow::anyhow;
use floodrisk_core::surge::{MeowField, MomField, FT_TO_M};

use crate::errors::{validation, CliResult, Contextual};
use crate::formats::fmt_f64;

fn write_grid(
    kind: &str,
    basin_id: &str,
    storm: Option<&str>,
    category: u8,
    tide_ft: f64,
    nr: usize,
    na: usize,
    eta_m: &[f64],
) -> String {
    let mut s = String::new();
    writeln!(s, "envelope {kind} {basin_id}").unwrap();
    if let Some(id) = storm {
        writeln!(s, "storm {id}").unwrap();
    }
    writeln!(s, "category {category}").unwrap();
    writeln!(s, "tide_ft {}", fmt_f64(tide_ft)).unwrap();
    writeln!(s, "shape {nr} {na}").unwrap();
    for i in 0..nr {
        let row: Vec<String> =
            (0..na).map(|j| fmt_f64(eta_m[i * na + j] / FT_TO_M)).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

pub fn write_meow(meow: &MeowField, nr: usize, na: usize) -> String {
    write_grid(
        "meow",
        &meow.basin_id,
        Some(&meow.storm_id),
        meow.category,
        meow.tide_offset_ft,
        nr,
        na,
        &meow.max_eta_m,
    )
}

pub fn write_mom(mom: &MomField, nr: usize, na: usize) -> String {
    write_grid("mom", &mom.basin_id, None, mom.category, mom.tide_offset_ft, nr, na, &mom.max_eta_m)
}

pub fn parse_mom(text: &str, file: &str) -> CliResult<MomField> {
    let (basin_id, storm, category, tide_offset_ft, max_eta_m) = parse_grid(text, file, "mom")?;
    debug_assert!(storm.is_none());
    Ok(MomField { basin_id, category, tide_offset_ft, max_eta_m })
}

pub fn parse_meow(text: &str, file: &str) -> CliResult<MeowField> {
    let (basin_id, storm, category, tide_offset_ft, max_eta_m) = parse_grid(text, file, "meow")?;
    let storm_id =
        storm.ok_or_else(|| validation(anyhow!("{file}: meow file missing storm line")))?;
    Ok(MeowField { basin_id, storm_id, category, tide_offset_ft, max_eta_m })
}

#[allow(clippy::type_complexity)]
fn parse_grid(
    text: &str,
    file: &str,
    kind: &str,
) -> CliResult<(String, Option<String>, u8, f64, Vec<f64>)> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k as u64 + 1, l.trim())).peekable();
    let (n, header) = lines
        .next()
        .ok_or_else(|| validation(anyhow!("{file}: empty file")))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("envelope") || head.next() != Some(kind) {
        return Err(validation(anyhow!(
            "{file}:{n}: expected 'envelope {kind} <basin>', found {header:?}"
        )));
    }
    let basin_id = head
        .next()
        .ok_or_else(|| validation(anyhow!("{file}:{n}: missing basin id")))?
        .to_string();
    let storm = match lines.peek() {
        Some((_, line)) if line.starts_with("storm ") => {
            let (_, line) = lines.next().expect("peeked");
            Some(line.trim_start_matches("storm ").trim().to_string())
        }
        _ => None,
    };

    let mut field = |name: &str| -> CliResult<String> {
        let (n, line) = lines
            .next()
            .ok_or_else(|| validation(anyhow!("{file}: missing {name} line")))?;
        line.strip_prefix(name)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| validation(anyhow!("{file}:{n}: expected '{name} ...', found {line:?}")))
    };
    let category: u8 = field("category")?.parse().invalid(&format!("{file}: bad category"))?;
    let tide_offset_ft: f64 = field("tide_ft")?.parse().invalid(&format!("{file}: bad tide_ft"))?;
    let shape = field("shape")?;
    let dims: Vec<usize> = shape
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .invalid(&format!("{file}: bad shape"))?;
    let [nr, na] = dims[..] else {
        return Err(validation(anyhow!("{file}: shape needs 'nr na'")));
    };
    let mut max_eta_m = Vec::with_capacity(nr * na);
    for _ in 0..nr {
        let (n, row) = lines
            .next()
            .ok_or_else(|| validation(anyhow!("{file}: truncated grid")))?;
        let vals: Vec<f64> = row
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .invalid(&format!("{file}:{n}: bad grid value"))?;
        if vals.len() != na {
            return Err(validation(anyhow!(
                "{file}:{n}: row has {} values, expected {na}",
                vals.len()
            )));
        }
        max_eta_m.extend(vals.into_iter().map(|ft| ft * FT_TO_M));
    }
    Ok((basin_id, storm, category, tide_offset_ft, max_eta_m))
}

pub fn read_mom(path: &Path) -> CliResult<MomField> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading envelope file {}", path.display()))?;
    parse_mom(&text, &path.display().to_string())
}

pub fn read_meow(path: &Path) -> CliResult<MeowField> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading envelope file {}", path.display()))?;
    parse_meow(&text, &path.display().to_string())
}
