//! Geographic footprint of basin grid cells.

use crate::surge::basin::{BasinError, BasinGrid};

use super::polygon::{Aabb, MultiPolygon, Polygon, Pt, Ring};
use super::proj::LocalProjection;

/// Quadrilateral footprint of one polar cell, corners in lon/lat degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub basin_id: String,
    pub i: usize,
    pub j: usize,
    /// (r_i, θ_j), (r_{i+1}, θ_j), (r_{i+1}, θ_{j+1}), (r_i, θ_{j+1}),
    /// counter-clockwise, projected to lon/lat.
    pub corners: [Pt; 4],
    pub bbox: Aabb,
}

impl CellGeometry {
    pub fn ring(&self) -> Ring {
        Ring::new(self.corners.to_vec())
    }

    pub fn polygon(&self) -> MultiPolygon {
        MultiPolygon(vec![Polygon::from_ring(self.ring())])
    }

    /// Planar area in m² under the basin's local projection.
    pub fn area_m2(&self, proj: &LocalProjection) -> f64 {
        let pts: Vec<Pt> = self.corners.iter().map(|p| proj.to_xy(p.x, p.y)).collect();
        Ring::new(pts).area()
    }
}

/// Lon/lat footprint of cell (i, j).
pub fn cell_polygon(basin: &BasinGrid, i: usize, j: usize) -> Result<CellGeometry, BasinError> {
    let nr = basin.radial_count();
    let na = basin.angular_count;
    if i >= nr || j >= na {
        return Err(BasinError::IndexOutOfRange {
            basin_id: basin.basin_id.clone(),
            i,
            j,
            nr,
            na,
        });
    }
    let proj = basin.projection();
    let dth = basin.delta_theta();
    let (r0, r1) = (basin.radial_edges[i], basin.radial_edges[i + 1]);
    let (t0, t1) = (j as f64 * dth, (j + 1) as f64 * dth);
    let corner = |r: f64, t: f64| {
        let (lon, lat) = proj.to_lonlat(Pt::new(r * t.cos(), r * t.sin()));
        Pt::new(lon, lat)
    };
    let corners = [corner(r0, t0), corner(r1, t0), corner(r1, t1), corner(r0, t1)];
    let bbox = Aabb::of_points(&corners);
    Ok(CellGeometry { basin_id: basin.basin_id.clone(), i, j, corners, bbox })
}

/// Footprints of every cell of a basin, row-major.
pub fn all_cell_polygons(basin: &BasinGrid) -> Vec<CellGeometry> {
    let mut out = Vec::with_capacity(basin.cell_count());
    for i in 0..basin.radial_count() {
        for j in 0..basin.angular_count {
            out.push(cell_polygon(basin, i, j).expect("index in range"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn basin(radial_edges: Vec<f64>, na: usize) -> BasinGrid {
        let nr = radial_edges.len() - 1;
        BasinGrid {
            basin_id: "b".into(),
            pole_lon: 0.0,
            pole_lat: 0.0,
            radial_edges,
            angular_count: na,
            cell_elevation: vec![-5.0; nr * na],
            friction_coeff: vec![0.0; nr * na],
        }
    }

    #[test]
    fn corners_by_hand_at_equatorial_pole() {
        // Pole at (0,0): 1 m east = 1/111194.9 deg of longitude.
        let b = basin(vec![1000.0, 1250.0], 4);
        let c = cell_polygon(&b, 0, 0).unwrap();
        let deg_per_m = 1.0 / (crate::geom::proj::EARTH_RADIUS_M * std::f64::consts::PI / 180.0);
        // First sector spans bearings 0° (east) to 90° (north).
        assert_relative_eq!(c.corners[0].x, 1000.0 * deg_per_m, max_relative = 1e-12);
        assert_relative_eq!(c.corners[0].y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(c.corners[1].x, 1250.0 * deg_per_m, max_relative = 1e-12);
        assert_relative_eq!(c.corners[3].x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(c.corners[3].y, 1000.0 * deg_per_m, max_relative = 1e-12);
    }

    #[test]
    fn quarter_km_cells_near_250m_square() {
        // Tune the grid so inner cells are ~250 m x 250 m: radial step 250 m
        // at radius r with sector arc r·Δθ = 250 m.
        let r0 = 20_000.0;
        let na = (2.0 * std::f64::consts::PI * r0 / 250.0).round() as usize;
        let edges: Vec<f64> = (0..=4).map(|k| r0 + 250.0 * k as f64).collect();
        let b = basin(edges, na);
        let proj = b.projection();
        for i in 0..b.radial_count() {
            let c = cell_polygon(&b, i, 0).unwrap();
            let area = c.area_m2(&proj);
            assert!(
                (area - 62_500.0).abs() / 62_500.0 < 0.20,
                "cell area {area} m² not within 20% of 62500"
            );
        }
    }

    #[test]
    fn cells_tile_the_annulus() {
        let b = basin(vec![5_000.0, 7_000.0, 9_500.0, 12_000.0], 128);
        let proj = b.projection();
        let total: f64 = all_cell_polygons(&b).iter().map(|c| c.area_m2(&proj)).sum();
        let (r0, r1) = (5_000.0_f64, 12_000.0_f64);
        let annulus = std::f64::consts::PI * (r1 * r1 - r0 * r0);
        // Quadrilateral corners cut the arc, so the tiling is slightly
        // inside the true annulus; 0.1% covers it at this sector width.
        assert!(
            ((total - annulus) / annulus).abs() < 1e-3,
            "tiled {total} vs annulus {annulus}"
        );
    }

    #[test]
    fn out_of_range_index() {
        let b = basin(vec![1000.0, 2000.0], 8);
        assert!(matches!(
            cell_polygon(&b, 1, 0),
            Err(BasinError::IndexOutOfRange { .. })
        ));
    }
}
