//! GeoJSON readers/writers for zone polygons and the floodplain layer.
//!
//! Zones are a FeatureCollection of Polygon/MultiPolygon features carrying a
//! `zone_id` property (and optionally `population`). The floodplain file is a
//! FeatureCollection whose geometries are unioned into one multi-polygon set.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;
use floodrisk_core::geom::join::ZoneRecord;
use floodrisk_core::geom::polygon::{MultiPolygon, Polygon, Pt, Ring};
use floodrisk_core::geom::proj::LocalProjection;
use floodrisk_core::geom::sfha::shared_projection;
use serde_json::{json, Value};

use crate::diag::Diagnostics;
use crate::errors::{validation, CliResult, Contextual};

fn ring_to_json(ring: &Ring) -> Value {
    let mut coords: Vec<Value> =
        ring.0.iter().map(|p| json!([p.x, p.y])).collect();
    if let Some(first) = coords.first().cloned() {
        coords.push(first); // GeoJSON rings are explicitly closed.
    }
    Value::Array(coords)
}

fn polygon_to_json(poly: &Polygon) -> Value {
    let mut rings = vec![ring_to_json(&poly.outer)];
    rings.extend(poly.holes.iter().map(ring_to_json));
    json!({ "type": "Polygon", "coordinates": rings })
}

fn multipolygon_to_json(mp: &MultiPolygon) -> Value {
    if mp.0.len() == 1 {
        polygon_to_json(&mp.0[0])
    } else {
        let polys: Vec<Value> = mp
            .0
            .iter()
            .map(|p| polygon_to_json(p)["coordinates"].clone())
            .collect();
        json!({ "type": "MultiPolygon", "coordinates": polys })
    }
}

pub fn write_zones(zones: &[(String, MultiPolygon, f64)]) -> String {
    let features: Vec<Value> = zones
        .iter()
        .map(|(id, geom, population)| {
            json!({
                "type": "Feature",
                "properties": { "zone_id": id, "population": population },
                "geometry": multipolygon_to_json(geom),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "type": "FeatureCollection", "features": features }))
        .expect("serializable")
}

pub fn write_sfha(parts: &MultiPolygon) -> String {
    let features: Vec<Value> = parts
        .0
        .iter()
        .map(|p| {
            json!({
                "type": "Feature",
                "properties": {},
                "geometry": polygon_to_json(p),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "type": "FeatureCollection", "features": features }))
        .expect("serializable")
}

fn json_ring(v: &Value) -> Option<Ring> {
    let coords = v.as_array()?;
    let mut pts = Vec::with_capacity(coords.len());
    for c in coords {
        let pair = c.as_array()?;
        pts.push(Pt::new(pair.first()?.as_f64()?, pair.get(1)?.as_f64()?));
    }
    // Drop the closing duplicate if present.
    if pts.len() >= 2 && pts.first() == pts.last() {
        pts.pop();
    }
    if pts.len() < 3 {
        return None;
    }
    Some(Ring::new(pts))
}

fn json_polygon(rings: &Value) -> Option<Polygon> {
    let rings = rings.as_array()?;
    let outer = json_ring(rings.first()?)?;
    let holes: Option<Vec<Ring>> = rings[1..].iter().map(json_ring).collect();
    Some(Polygon::new(outer, holes?))
}

fn json_geometry(geom: &Value) -> Option<MultiPolygon> {
    match geom.get("type")?.as_str()? {
        "Polygon" => Some(MultiPolygon(vec![json_polygon(geom.get("coordinates")?)?])),
        "MultiPolygon" => {
            let polys: Option<Vec<Polygon>> = geom
                .get("coordinates")?
                .as_array()?
                .iter()
                .map(json_polygon)
                .collect();
            Some(MultiPolygon(polys?))
        }
        _ => None,
    }
}

/// Zones plus their population property. Features with a missing/duplicate
/// zone_id or a degenerate geometry get a diagnostic and are skipped.
pub fn parse_zones(
    text: &str,
    file: &str,
    diags: &mut Diagnostics,
) -> CliResult<(Vec<ZoneRecord>, BTreeMap<String, f64>)> {
    let root: Value =
        serde_json::from_str(text).invalid(&format!("{file}: not valid JSON"))?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(validation(anyhow!("{file}: expected a FeatureCollection")));
    }
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| validation(anyhow!("{file}: missing features array")))?;
    let mut raw = Vec::new();
    let mut populations = BTreeMap::new();
    let mut seen = std::collections::BTreeSet::new();
    for (k, feature) in features.iter().enumerate() {
        let n = k as u64 + 1; // feature index; GeoJSON has no line mapping
        let Some(zone_id) = feature
            .pointer("/properties/zone_id")
            .and_then(Value::as_str)
            .map(str::to_string)
        else {
            diags.push(file, n, "feature without a zone_id property");
            continue;
        };
        if !seen.insert(zone_id.clone()) {
            diags.push(file, n, format!("duplicate zone_id {zone_id}"));
            continue;
        }
        let Some(geometry) = feature.get("geometry").and_then(json_geometry) else {
            diags.push(file, n, format!("zone {zone_id}: unusable geometry"));
            continue;
        };
        let population = feature
            .pointer("/properties/population")
            .and_then(Value::as_f64)
            .unwrap_or(0.0);
        populations.insert(zone_id.clone(), population);
        raw.push((zone_id, geometry));
    }
    diags.check_fatal(file, features.len())?;

    // Areas under one shared local projection.
    let prelim: Vec<ZoneRecord> = raw
        .iter()
        .map(|(id, g)| ZoneRecord { zone_id: id.clone(), geometry: g.clone(), area_m2: 0.0 })
        .collect();
    let proj = shared_projection(&prelim);
    let zones = raw
        .into_iter()
        .map(|(zone_id, geometry)| {
            let area_m2 = planar_area(&geometry, &proj);
            ZoneRecord { zone_id, geometry, area_m2 }
        })
        .collect();
    Ok((zones, populations))
}

fn planar_area(mp: &MultiPolygon, proj: &LocalProjection) -> f64 {
    let project = |r: &Ring| Ring::new(r.0.iter().map(|p| proj.to_xy(p.x, p.y)).collect());
    MultiPolygon(
        mp.0.iter()
            .map(|p| Polygon::new(project(&p.outer), p.holes.iter().map(&project).collect()))
            .collect(),
    )
    .area()
}

/// All floodplain parts as one multi-polygon set; parts must not overlap.
pub fn parse_sfha(text: &str, file: &str, diags: &mut Diagnostics) -> CliResult<MultiPolygon> {
    let root: Value =
        serde_json::from_str(text).invalid(&format!("{file}: not valid JSON"))?;
    let features = root
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| validation(anyhow!("{file}: missing features array")))?;
    let mut parts = Vec::new();
    for (k, feature) in features.iter().enumerate() {
        match feature.get("geometry").and_then(json_geometry) {
            Some(mp) => parts.extend(mp.0),
            None => diags.push(file, k as u64 + 1, "unusable floodplain geometry"),
        }
    }
    diags.check_fatal(file, features.len())?;
    Ok(MultiPolygon(parts))
}

pub fn read_zones(
    path: &Path,
    diags: &mut Diagnostics,
) -> CliResult<(Vec<ZoneRecord>, BTreeMap<String, f64>)> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading zones {}", path.display()))?;
    parse_zones(&text, &path.display().to_string(), diags)
}

pub fn read_sfha(path: &Path, diags: &mut Diagnostics) -> CliResult<MultiPolygon> {
    let text = std::fs::read_to_string(path)
        .invalid(&format!("reading floodplain {}", path.display()))?;
    parse_sfha(&text, &path.display().to_string(), diags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> MultiPolygon {
        MultiPolygon(vec![Polygon::rect(x0, y0, x1, y1)])
    }

    #[test]
    fn zone_round_trip_with_population() {
        let zones = vec![
            ("z01".to_string(), rect(-90.1, 29.0, -90.0, 29.1), 1200.0),
            ("z02".to_string(), rect(-90.0, 29.0, -89.9, 29.1), 800.0),
        ];
        let text = write_zones(&zones);
        let mut diags = Diagnostics::default();
        let (parsed, pops) = parse_zones(&text, "z.geojson", &mut diags).unwrap();
        assert!(diags.is_empty());
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].zone_id, "z01");
        assert_eq!(pops["z02"], 800.0);
        // ~0.1 deg x 0.1 deg at 29N: 11.1 km x 9.7 km.
        assert_relative_eq!(parsed[0].area_m2, 11.119e3 * 9.72e3, max_relative = 0.01);
        assert_eq!(parsed[0].geometry, zones[0].1);
    }

    #[test]
    fn missing_id_and_duplicate_are_diagnosed() {
        let good = ("z01".to_string(), rect(0.0, 0.0, 1.0, 1.0), 1.0);
        let dup_text = write_zones(&[good.clone(), good.clone()]);
        let mut diags = Diagnostics::default();
        // 1 bad of 2 features: fatal share.
        assert!(parse_zones(&dup_text, "z.geojson", &mut diags).is_err());
        assert_eq!(diags.entries.len(), 1);
        assert!(diags.entries[0].message.contains("duplicate"));

        let anon = write_zones(&[good]).replacen("\"zone_id\": \"z01\"", "\"other\": 1", 1);
        let mut diags = Diagnostics::default();
        assert!(parse_zones(&anon, "z.geojson", &mut diags).is_err());
        assert!(diags.entries[0].message.contains("zone_id"));
    }

    #[test]
    fn sfha_flattens_features() {
        let parts = MultiPolygon(vec![
            Polygon::rect(0.0, 0.0, 1.0, 1.0),
            Polygon::rect(2.0, 0.0, 3.0, 1.0),
        ]);
        let mut diags = Diagnostics::default();
        let parsed = parse_sfha(&write_sfha(&parts), "s.geojson", &mut diags).unwrap();
        assert_eq!(parsed.0.len(), 2);
        assert_relative_eq!(parsed.area(), parts.area());
    }

    #[test]
    fn holes_survive_the_round_trip() {
        let outer = Ring::new(vec![
            Pt::new(0.0, 0.0),
            Pt::new(4.0, 0.0),
            Pt::new(4.0, 4.0),
            Pt::new(0.0, 4.0),
        ]);
        let hole = Ring::new(vec![
            Pt::new(1.0, 1.0),
            Pt::new(1.0, 2.0),
            Pt::new(2.0, 2.0),
            Pt::new(2.0, 1.0),
        ]);
        let holed = MultiPolygon(vec![Polygon::new(outer, vec![hole])]);
        let text = write_zones(&[("h".to_string(), holed.clone(), 0.0)]);
        let (parsed, _) =
            parse_zones(&text, "z", &mut Diagnostics::default()).unwrap();
        assert_relative_eq!(
            planar_area(&parsed[0].geometry, &LocalProjection::new(0.0, 0.0)),
            planar_area(&holed, &LocalProjection::new(0.0, 0.0)),
            max_relative = 1e-12
        );
    }
}
