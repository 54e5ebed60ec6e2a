//! Flood-insurance floodplain area shares.

use thiserror::Error;

use super::join::ZoneRecord;
use super::polygon::{intersection_area, MultiPolygon, Polygon, Ring};
use super::proj::LocalProjection;

#[derive(Debug, Error, PartialEq)]
pub enum SfhaError {
    #[error("zone {0}: degenerate area {1} m²")]
    DegenerateZone(String, f64),
}

/// Fraction of the zone's surface area inside the SFHA set, in [0, 1].
///
/// Both geometries are in lon/lat degrees and are projected to planar metres
/// before clipping. SFHA parts must not overlap one another.
pub fn sfha_area_share(
    zone: &ZoneRecord,
    sfha: &MultiPolygon,
    proj: &LocalProjection,
) -> Result<f64, SfhaError> {
    let zone_planar = project(&zone.geometry, proj);
    let zone_area = zone_planar.area();
    if !(zone_area > 0.0) {
        return Err(SfhaError::DegenerateZone(zone.zone_id.clone(), zone_area));
    }
    if sfha.0.is_empty() || !zone_planar.bbox().intersects(&project(sfha, proj).bbox()) {
        return Ok(0.0);
    }
    let sfha_planar = project(sfha, proj);
    let share = intersection_area(&zone_planar, &sfha_planar) / zone_area;
    Ok(share.clamp(0.0, 1.0))
}

fn project(mp: &MultiPolygon, proj: &LocalProjection) -> MultiPolygon {
    let ring = |r: &Ring| Ring::new(r.0.iter().map(|p| proj.to_xy(p.x, p.y)).collect());
    MultiPolygon(
        mp.0.iter()
            .map(|p| Polygon::new(ring(&p.outer), p.holes.iter().map(&ring).collect()))
            .collect(),
    )
}

/// Degenerate-safe helper: the projection reference for a run, at the
/// centroid of all zone bounding boxes.
pub fn shared_projection(zones: &[ZoneRecord]) -> LocalProjection {
    if zones.is_empty() {
        return LocalProjection::new(0.0, 0.0);
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for z in zones {
        let c = z.geometry.bbox().center();
        cx += c.x;
        cy += c.y;
    }
    let n = zones.len() as f64;
    LocalProjection::new(cx / n, cy / n)
}
