//! Sea-level-rise bathtub inundation with hydrologic connectivity.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use thiserror::Error;

use crate::surge::storm::FT_TO_M;

use super::join::ZoneRecord;
use super::polygon::{interiors_overlap, MultiPolygon, Polygon};

/// Regular lon/lat raster of ground elevation relative to MHHW, metres.
/// Values are row-major with row 0 at the top (northernmost), matching the
/// ESRI ASCII grid layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DemRaster {
    pub ncols: usize,
    pub nrows: usize,
    /// Lower-left corner of the grid, degrees.
    pub xll: f64,
    pub yll: f64,
    /// Cell size, degrees.
    pub cellsize: f64,
    pub elevation_m: Vec<f64>,
    /// Open-ocean cells; the connectivity seeds.
    pub sea_mask: Vec<bool>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SlrError {
    #[error("SLR level {0} ft outside the supported [0, 6] ft range")]
    LevelOutOfRange(f64),
    #[error("DEM: non-finite elevation at row {0}, col {1}")]
    NonFiniteElevation(usize, usize),
    #[error("DEM: sea-mask cell at row {0}, col {1} has elevation {2} > 0")]
    SeaAboveZero(usize, usize, f64),
    #[error("DEM: {field} length {got}, expected {expected}")]
    BadLength { field: &'static str, got: usize, expected: usize },
}

impl DemRaster {
    pub fn idx(&self, row: usize, col: usize) -> usize {
        row * self.ncols + col
    }

    pub fn validate(&self) -> Result<(), SlrError> {
        let n = self.ncols * self.nrows;
        if self.elevation_m.len() != n {
            return Err(SlrError::BadLength {
                field: "elevation",
                got: self.elevation_m.len(),
                expected: n,
            });
        }
        if self.sea_mask.len() != n {
            return Err(SlrError::BadLength {
                field: "sea_mask",
                got: self.sea_mask.len(),
                expected: n,
            });
        }
        for row in 0..self.nrows {
            for col in 0..self.ncols {
                let k = self.idx(row, col);
                if !self.elevation_m[k].is_finite() {
                    return Err(SlrError::NonFiniteElevation(row, col));
                }
                if self.sea_mask[k] && self.elevation_m[k] > 0.0 {
                    return Err(SlrError::SeaAboveZero(row, col, self.elevation_m[k]));
                }
            }
        }
        Ok(())
    }

    /// Lon/lat square footprint of a raster cell.
    pub fn cell_rect(&self, row: usize, col: usize) -> Polygon {
        let x0 = self.xll + col as f64 * self.cellsize;
        // Row 0 is the top row.
        let y0 = self.yll + (self.nrows - 1 - row) as f64 * self.cellsize;
        Polygon::rect(x0, y0, x0 + self.cellsize, y0 + self.cellsize)
    }
}

/// Cells flooded by `level_ft` of sea level rise: elevation at or below the
/// level AND 4-neighbour connected to an open-ocean cell. An enclosed
/// depression below the level stays dry.
pub fn slr_inundation(dem: &DemRaster, level_ft: f64) -> Result<Vec<bool>, SlrError> {
    if !(0.0..=6.0).contains(&level_ft) {
        return Err(SlrError::LevelOutOfRange(level_ft));
    }
    dem.validate()?;
    let level_m = level_ft * FT_TO_M;
    let mut flooded = vec![false; dem.ncols * dem.nrows];
    let mut queue = VecDeque::new();
    for k in 0..flooded.len() {
        if dem.sea_mask[k] && dem.elevation_m[k] <= level_m {
            flooded[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        let (row, col) = (k / dem.ncols, k % dem.ncols);
        let push = |r: usize, c: usize, flooded: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
            let n = r * dem.ncols + c;
            if !flooded[n] && dem.elevation_m[n] <= level_m {
                flooded[n] = true;
                queue.push_back(n);
            }
        };
        if row > 0 {
            push(row - 1, col, &mut flooded, &mut queue);
        }
        if row + 1 < dem.nrows {
            push(row + 1, col, &mut flooded, &mut queue);
        }
        if col > 0 {
            push(row, col - 1, &mut flooded, &mut queue);
        }
        if col + 1 < dem.ncols {
            push(row, col + 1, &mut flooded, &mut queue);
        }
    }
    Ok(flooded)
}

/// A zone is flagged iff any raster cell intersecting it is inundated.
pub fn zone_slr_flags(
    dem: &DemRaster,
    flooded: &[bool],
    zones: &[ZoneRecord],
) -> BTreeMap<String, bool> {
    let mut out = BTreeMap::new();
    for zone in zones {
        let bb = zone.geometry.bbox();
        // Candidate raster rows/cols from the zone bbox.
        let col_lo = (((bb.min.x - dem.xll) / dem.cellsize).floor().max(0.0)) as usize;
        let col_hi = ((bb.max.x - dem.xll) / dem.cellsize).ceil().max(0.0) as usize;
        let y_top = dem.yll + dem.nrows as f64 * dem.cellsize;
        let row_lo = (((y_top - bb.max.y) / dem.cellsize).floor().max(0.0)) as usize;
        let row_hi = ((y_top - bb.min.y) / dem.cellsize).ceil().max(0.0) as usize;
        let mut hit = false;
        'scan: for row in row_lo..row_hi.min(dem.nrows) {
            for col in col_lo..col_hi.min(dem.ncols) {
                if !flooded[dem.idx(row, col)] {
                    continue;
                }
                let rect = MultiPolygon(vec![dem.cell_rect(row, col)]);
                if interiors_overlap(&zone.geometry, &rect) {
                    hit = true;
                    break 'scan;
                }
            }
        }
        out.insert(zone.zone_id.clone(), hit);
    }
    out
}
