//! Storm ensemble CSV.
//!
//! Header: `storm_id,deficit_mb,rmax_km,heading_deg,speed_ms,landfall_lon,
//! landfall_lat,category,tide_ft`. Heading is the compass bearing of storm
//! motion (degrees clockwise from north). Each row expands to a two-point
//! track running through the landfall point over a 12-hour window with
//! landfall at hour 6.

use std::path::Path;

use anyhow::anyhow;
use floodrisk_core::geom::proj::EARTH_RADIUS_M;
use floodrisk_core::surge::{StormParams, TrackPoint};
use serde::{Deserialize, Serialize};

use crate::diag::Diagnostics;
use crate::errors::{validation, CliResult, Contextual};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StormRow {
    pub storm_id: String,
    pub deficit_mb: f64,
    pub rmax_km: f64,
    pub heading_deg: f64,
    pub speed_ms: f64,
    pub landfall_lon: f64,
    pub landfall_lat: f64,
    pub category: u8,
    pub tide_ft: f64,
}

pub const TRACK_WINDOW_H: f64 = 12.0;
pub const LANDFALL_H: f64 = 6.0;

impl StormRow {
    /// Expands the parametric row into simulation inputs.
    pub fn to_params(&self) -> StormParams {
        let deg_per_m_lat = 1.0 / (EARTH_RADIUS_M * std::f64::consts::PI / 180.0);
        let deg_per_m_lon = deg_per_m_lat / self.landfall_lat.to_radians().cos();
        let bearing = self.heading_deg.to_radians();
        // Compass bearing: 0° = north, 90° = east.
        let (dir_e, dir_n) = (bearing.sin(), bearing.cos());
        let point = |t_h: f64| {
            let dist = self.speed_ms * (t_h - LANDFALL_H) * 3600.0;
            TrackPoint {
                lon: self.landfall_lon + dist * dir_e * deg_per_m_lon,
                lat: self.landfall_lat + dist * dir_n * deg_per_m_lat,
                time_h: t_h,
            }
        };
        StormParams {
            storm_id: self.storm_id.clone(),
            pressure_deficit_mb: self.deficit_mb,
            radius_max_winds_km: self.rmax_km,
            track: vec![point(0.0), point(TRACK_WINDOW_H)],
            category: self.category,
            tide_offset_ft: self.tide_ft,
        }
    }
}

pub fn write_storms(rows: &[StormRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf8 csv")
}

/// Parses the ensemble, collecting a diagnostic per bad row and erroring on
/// a bad header or a fatal bad-row share.
pub fn parse_storms(text: &str, file: &str, diags: &mut Diagnostics) -> CliResult<Vec<StormRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().invalid(&format!("{file}: unreadable header"))?;
    let expected =
        ["storm_id", "deficit_mb", "rmax_km", "heading_deg", "speed_ms", "landfall_lon", "landfall_lat", "category", "tide_ft"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(validation(anyhow!(
            "{file}: bad header, expected {expected:?}, found {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    let mut total = 0usize;
    for (k, record) in reader.deserialize::<StormRow>().enumerate() {
        let line = k as u64 + 2;
        total += 1;
        match record {
            Ok(row) => match row.to_params().validate() {
                Ok(()) => rows.push(row),
                Err(e) => diags.push(file, line, e.to_string()),
            },
            Err(e) => diags.push(file, line, e.to_string()),
        }
    }
    diags.check_fatal(file, total)?;
    Ok(rows)
}

pub fn read_storms(path: &Path, diags: &mut Diagnostics) -> CliResult<Vec<StormRow>> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading storm ensemble {}", path.display()))?;
    parse_storms(&text, &path.display().to_string(), diags)
}
