//! Basin grid text format.
//!
//! ```text
//! basin <id>
//! pole <lon_deg> <lat_deg>
//! edges <r0> <r1> ... <r_nr>        # metres, ascending
//! sectors <na>
//! elevation                          # nr lines of na values, metres
//! ...
//! friction                           # nr lines of na values, 1/s
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use floodrisk_core::surge::BasinGrid;

use crate::errors::{validation, CliResult, Contextual};
use crate::formats::fmt_f64;

pub fn write_basin(basin: &BasinGrid) -> String {
    let na = basin.angular_count;
    let nr = basin.radial_count();
    let mut s = String::new();
    writeln!(s, "basin {}", basin.basin_id).unwrap();
    writeln!(s, "pole {} {}", fmt_f64(basin.pole_lon), fmt_f64(basin.pole_lat)).unwrap();
    let edges: Vec<String> = basin.radial_edges.iter().map(|&e| fmt_f64(e)).collect();
    writeln!(s, "edges {}", edges.join(" ")).unwrap();
    writeln!(s, "sectors {na}").unwrap();
    for (label, field) in [("elevation", &basin.cell_elevation), ("friction", &basin.friction_coeff)]
    {
        writeln!(s, "{label}").unwrap();
        for i in 0..nr {
            let row: Vec<String> =
                (0..na).map(|j| fmt_f64(field[i * na + j])).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
    }
    s
}

pub fn parse_basin(text: &str, file: &str) -> CliResult<BasinGrid> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k as u64 + 1, l.trim()));
    let mut next_line = |expect: &str| {
        lines
            .next()
            .ok_or_else(|| validation(anyhow!("{file}: missing {expect} line")))
    };

    let (n, header) = next_line("basin")?;
    let basin_id = header
        .strip_prefix("basin ")
        .ok_or_else(|| validation(anyhow!("{file}:{n}: expected 'basin <id>', found {header:?}")))?
        .to_string();

    let (n, pole) = next_line("pole")?;
    let pole_parts: Vec<f64> = pole
        .strip_prefix("pole ")
        .ok_or_else(|| validation(anyhow!("{file}:{n}: expected 'pole <lon> <lat>'")))?
        .split_whitespace()
        .map(|t| t.parse::<f64>().with_context(|| format!("{file}:{n}: bad pole value {t:?}")))
        .collect::<Result<_, _>>()
        .map_err(validation)?;
    let [pole_lon, pole_lat] = pole_parts[..] else {
        return Err(validation(anyhow!("{file}:{n}: pole needs exactly 2 values")));
    };

    let (n, edges_line) = next_line("edges")?;
    let radial_edges: Vec<f64> = edges_line
        .strip_prefix("edges ")
        .ok_or_else(|| validation(anyhow!("{file}:{n}: expected 'edges <r...>'")))?
        .split_whitespace()
        .map(|t| t.parse::<f64>().with_context(|| format!("{file}:{n}: bad edge {t:?}")))
        .collect::<Result<_, _>>()
        .map_err(validation)?;

    let (n, sectors_line) = next_line("sectors")?;
    let angular_count: usize = sectors_line
        .strip_prefix("sectors ")
        .ok_or_else(|| validation(anyhow!("{file}:{n}: expected 'sectors <na>'")))?
        .trim()
        .parse()
        .invalid(&format!("{file}:{n}: bad sector count"))?;

    let nr = radial_edges.len().saturating_sub(1);
    let mut fields = Vec::new();
    for label in ["elevation", "friction"] {
        let (n, got) = next_line(label)?;
        if got != label {
            return Err(validation(anyhow!("{file}:{n}: expected {label:?}, found {got:?}")));
        }
        let mut values = Vec::with_capacity(nr * angular_count);
        for _ in 0..nr {
            let (n, row) = next_line(&format!("{label} row"))?;
            let row_vals: Vec<f64> = row
                .split_whitespace()
                .map(|t| t.parse::<f64>().with_context(|| format!("{file}:{n}: bad value {t:?}")))
                .collect::<Result<_, _>>()
                .map_err(validation)?;
            if row_vals.len() != angular_count {
                return Err(validation(anyhow!(
                    "{file}:{n}: {label} row has {} values, expected {angular_count}",
                    row_vals.len()
                )));
            }
            values.extend(row_vals);
        }
        fields.push(values);
    }
    let friction_coeff = fields.pop().unwrap();
    let cell_elevation = fields.pop().unwrap();

    let basin = BasinGrid {
        basin_id,
        pole_lon,
        pole_lat,
        radial_edges,
        angular_count,
        cell_elevation,
        friction_coeff,
    };
    basin
        .validate()
        .map_err(|e| validation(anyhow!("{file}: {e}")))?;
    Ok(basin)
}

pub fn read_basin(path: &Path) -> CliResult<BasinGrid> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading basin file {}", path.display()))?;
    parse_basin(&text, &path.display().to_string())
}
