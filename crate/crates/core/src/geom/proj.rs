//! Local equirectangular projection used for all per-basin planar work.

use super::polygon::Pt;

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Maps lon/lat degrees to local planar metres around a reference point.
/// x grows east, y grows north.
#[derive(Debug, Clone, Copy)]
pub struct LocalProjection {
    pub lon0: f64,
    pub lat0: f64,
    cos_lat0: f64,
}

impl LocalProjection {
    pub fn new(lon0: f64, lat0: f64) -> Self {
        LocalProjection { lon0, lat0, cos_lat0: lat0.to_radians().cos() }
    }

    pub fn to_xy(&self, lon: f64, lat: f64) -> Pt {
        Pt::new(
            EARTH_RADIUS_M * self.cos_lat0 * (lon - self.lon0).to_radians(),
            EARTH_RADIUS_M * (lat - self.lat0).to_radians(),
        )
    }

    pub fn to_lonlat(&self, p: Pt) -> (f64, f64) {
        (
            self.lon0 + (p.x / (EARTH_RADIUS_M * self.cos_lat0)).to_degrees(),
            self.lat0 + (p.y / EARTH_RADIUS_M).to_degrees(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn round_trip() {
        let proj = LocalProjection::new(-90.0, 29.5);
        let p = proj.to_xy(-89.7, 30.1);
        let (lon, lat) = proj.to_lonlat(p);
        assert_relative_eq!(lon, -89.7, epsilon = 1e-12);
        assert_relative_eq!(lat, 30.1, epsilon = 1e-12);
    }

    #[test]
    fn one_degree_latitude_is_about_111km() {
        let proj = LocalProjection::new(0.0, 0.0);
        let p = proj.to_xy(0.0, 1.0);
        assert_relative_eq!(p.y, 111_194.9, epsilon = 1.0);
    }
}
