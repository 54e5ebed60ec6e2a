//! Zone-cell spatial join, DEM subtraction, and per-zone surge maxima.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::surge::meow::MomField;
use crate::surge::storm::FT_TO_M;

use super::cells::CellGeometry;
use super::polygon::{interiors_overlap, MultiPolygon};
use super::rtree::StrTree;

/// Zone polygon (ZCTA5 or tract), lon/lat degrees, possibly multi-part with holes.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneRecord {
    pub zone_id: String,
    pub geometry: MultiPolygon,
    /// Total surface area, m².
    pub area_m2: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum JoinError {
    #[error("zone {0}: degenerate or invalid polygon (area {1})")]
    InvalidZone(String, f64),
}

/// Result of joining zones against one basin's cells: per zone, the indices
/// of intersecting cells (positions into the cell slice). Zones whose
/// geometry is invalid are reported and skipped; the join continues.
#[derive(Debug, Default)]
pub struct ZoneCellJoin {
    pub cells_by_zone: BTreeMap<String, Vec<usize>>,
    pub errors: Vec<JoinError>,
}

/// Builds the bbox index over cells. Query + exact refinement happens in
/// [`zone_cell_join`].
pub fn build_cell_index(cells: &[CellGeometry]) -> StrTree<usize> {
    StrTree::build(cells.iter().enumerate().map(|(k, c)| (c.bbox, k)).collect())
}

/// Exact zone-cell intersection join: bbox candidates from the index,
/// refined with a polygon interiors-overlap test. Every intersecting
/// (zone, cell) pair appears exactly once.
pub fn zone_cell_join(
    zones: &[ZoneRecord],
    cells: &[CellGeometry],
    index: &StrTree<usize>,
) -> ZoneCellJoin {
    let mut out = ZoneCellJoin::default();
    for zone in zones {
        if zone.geometry.0.is_empty() || zone.geometry.area() <= 0.0 {
            out.errors
                .push(JoinError::InvalidZone(zone.zone_id.clone(), zone.geometry.area()));
            continue;
        }
        let mut hits: Vec<usize> = index
            .query(&zone.geometry.bbox())
            .into_iter()
            .copied()
            .filter(|&k| interiors_overlap(&zone.geometry, &cells[k].polygon()))
            .collect();
        hits.sort_unstable();
        out.cells_by_zone.insert(zone.zone_id.clone(), hits);
    }
    out
}

/// Per-cell surge height above ground in feet: `max(0, water − ground)`.
/// `None` marks cells with no elevation coverage; they are excluded from
/// zone maxima.
pub fn surge_above_ground(mom: &MomField, elevation_m: &[f64]) -> Vec<Option<f64>> {
    mom.max_eta_m
        .iter()
        .zip(elevation_m)
        .map(|(&eta, &z)| {
            if z.is_finite() {
                Some((eta - z).max(0.0) / FT_TO_M)
            } else {
                None
            }
        })
        .collect()
}

/// Per-zone surge: covered with a height, or not covered by any basin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurgeValue {
    CoveredFt(f64),
    Uncovered,
}

impl SurgeValue {
    pub fn feet(&self) -> Option<f64> {
        match self {
            SurgeValue::CoveredFt(v) => Some(*v),
            SurgeValue::Uncovered => None,
        }
    }
}

/// Maximum surge above ground over the cells one basin contributes to a zone.
pub fn zone_max_surge_one_basin(joined_cells: &[usize], surge_ft: &[Option<f64>]) -> SurgeValue {
    let mut best: Option<f64> = None;
    for &k in joined_cells {
        if let Some(v) = surge_ft[k] {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best.map_or(SurgeValue::Uncovered, SurgeValue::CoveredFt)
}

/// Combines per-basin contributions for every zone: where basins overlap the
/// maximum wins, and a zone is uncovered only if no basin covers it.
pub fn zone_max_surge(
    zones: &[ZoneRecord],
    basins: &[(ZoneCellJoin, Vec<Option<f64>>)],
) -> BTreeMap<String, SurgeValue> {
    let mut out = BTreeMap::new();
    for zone in zones {
        let mut acc = SurgeValue::Uncovered;
        for (join, surge) in basins {
            if let Some(cells) = join.cells_by_zone.get(&zone.zone_id) {
                match (acc, zone_max_surge_one_basin(cells, surge)) {
                    (SurgeValue::CoveredFt(a), SurgeValue::CoveredFt(b)) => {
                        acc = SurgeValue::CoveredFt(a.max(b));
                    }
                    (SurgeValue::Uncovered, v @ SurgeValue::CoveredFt(_)) => acc = v,
                    _ => {}
                }
            }
        }
        out.insert(zone.zone_id.clone(), acc);
    }
    out
}
