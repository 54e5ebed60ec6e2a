//! ESRI ASCII grid reader/writer for the DEM and its sea mask.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::anyhow;
use floodrisk_core::geom::slr::DemRaster;

use crate::errors::{validation, CliResult, Contextual};
use crate::formats::fmt_f64;

struct AsciiGrid {
    ncols: usize,
    nrows: usize,
    xll: f64,
    yll: f64,
    cellsize: f64,
    values: Vec<f64>,
}

fn write_ascii(g: &AsciiGrid) -> String {
    let mut s = String::new();
    writeln!(s, "ncols {}", g.ncols).unwrap();
    writeln!(s, "nrows {}", g.nrows).unwrap();
    writeln!(s, "xllcorner {}", fmt_f64(g.xll)).unwrap();
    writeln!(s, "yllcorner {}", fmt_f64(g.yll)).unwrap();
    writeln!(s, "cellsize {}", fmt_f64(g.cellsize)).unwrap();
    writeln!(s, "NODATA_value -9999").unwrap();
    for row in 0..g.nrows {
        let line: Vec<String> =
            (0..g.ncols).map(|c| fmt_f64(g.values[row * g.ncols + c])).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    s
}

fn parse_ascii(text: &str, file: &str) -> CliResult<AsciiGrid> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k as u64 + 1, l.trim()));
    let mut header = |name: &str| -> CliResult<f64> {
        let (n, line) = lines
            .next()
            .ok_or_else(|| validation(anyhow!("{file}: missing {name} header")))?;
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| validation(anyhow!("{file}:{n}: bad header line {line:?}")))?;
        if !key.eq_ignore_ascii_case(name) {
            return Err(validation(anyhow!("{file}:{n}: expected {name}, found {key}")));
        }
        value.trim().parse().invalid(&format!("{file}:{n}: bad {name}"))
    };
    let ncols = header("ncols")? as usize;
    let nrows = header("nrows")? as usize;
    let xll = header("xllcorner")?;
    let yll = header("yllcorner")?;
    let cellsize = header("cellsize")?;
    let _nodata = header("NODATA_value")?;
    let mut values = Vec::with_capacity(nrows * ncols);
    for _ in 0..nrows {
        let (n, row) = lines
            .next()
            .ok_or_else(|| validation(anyhow!("{file}: truncated grid")))?;
        let vals: Vec<f64> = row
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .invalid(&format!("{file}:{n}: bad value"))?;
        if vals.len() != ncols {
            return Err(validation(anyhow!(
                "{file}:{n}: row has {} values, expected {ncols}",
                vals.len()
            )));
        }
        values.extend(vals);
    }
    Ok(AsciiGrid { ncols, nrows, xll, yll, cellsize, values })
}

pub fn write_dem(dem: &DemRaster) -> String {
    write_ascii(&AsciiGrid {
        ncols: dem.ncols,
        nrows: dem.nrows,
        xll: dem.xll,
        yll: dem.yll,
        cellsize: dem.cellsize,
        values: dem.elevation_m.clone(),
    })
}

pub fn write_sea_mask(dem: &DemRaster) -> String {
    write_ascii(&AsciiGrid {
        ncols: dem.ncols,
        nrows: dem.nrows,
        xll: dem.xll,
        yll: dem.yll,
        cellsize: dem.cellsize,
        values: dem.sea_mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
    })
}

/// Parses the elevation grid and its 0/1 sea-mask companion; the two must
/// agree on shape and georeferencing.
pub fn parse_dem(
    dem_text: &str,
    dem_file: &str,
    mask_text: &str,
    mask_file: &str,
) -> CliResult<DemRaster> {
    let g = parse_ascii(dem_text, dem_file)?;
    let m = parse_ascii(mask_text, mask_file)?;
    if (g.ncols, g.nrows, g.xll, g.yll, g.cellsize)
        != (m.ncols, m.nrows, m.xll, m.yll, m.cellsize)
    {
        return Err(validation(anyhow!(
            "{dem_file} and {mask_file} disagree on grid shape or georeferencing"
        )));
    }
    let dem = DemRaster {
        ncols: g.ncols,
        nrows: g.nrows,
        xll: g.xll,
        yll: g.yll,
        cellsize: g.cellsize,
        elevation_m: g.values,
        sea_mask: m.values.iter().map(|&v| v != 0.0).collect(),
    };
    dem.validate().map_err(|e| validation(anyhow!("{dem_file}: {e}")))?;
    Ok(dem)
}

pub fn read_dem(dem_path: &Path, mask_path: &Path) -> CliResult<DemRaster> {
    let dem_text = std::fs::read_to_string(dem_path)
        .invalid(&format!("reading DEM {}", dem_path.display()))?;
    let mask_text = std::fs::read_to_string(mask_path)
        .invalid(&format!("reading sea mask {}", mask_path.display()))?;
    parse_dem(
        &dem_text,
        &dem_path.display().to_string(),
        &mask_text,
        &mask_path.display().to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DemRaster {
        DemRaster {
            ncols: 3,
            nrows: 2,
            xll: -90.5,
            yll: 28.5,
            cellsize: 0.01,
            elevation_m: vec![1.5, 0.25, -0.5, -1.0, -2.0, -3.0],
            sea_mask: vec![false, false, true, true, true, true],
        }
    }

    #[test]
    fn round_trip() {
        let d = sample();
        let parsed =
            parse_dem(&write_dem(&d), "dem.asc", &write_sea_mask(&d), "mask.asc").unwrap();
        assert_eq!(parsed, d);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let d = sample();
        let mut other = sample();
        other.ncols = 2;
        other.nrows = 3;
        let err = parse_dem(&write_dem(&d), "dem.asc", &write_sea_mask(&other), "mask.asc")
            .unwrap_err();
        assert!(err.to_string().contains("disagree"));
    }

    #[test]
    fn sea_above_zero_rejected() {
        let mut d = sample();
        d.elevation_m[2] = 0.5; // masked as sea
        assert!(parse_dem(&write_dem(&d), "d", &write_sea_mask(&d), "m").is_err());
    }
}
