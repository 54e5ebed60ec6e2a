//! Polar computation grid for one basin.

use thiserror::Error;

use crate::geom::polygon::Pt;
use crate::geom::proj::LocalProjection;

/// Polar basin grid. Cells are indexed (i, j): i = radial band
/// (0..radial_count), j = angular sector (0..angular_count, periodic).
/// Per-cell values are stored row-major: `index = i * angular_count + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub basin_id: String,
    pub pole_lon: f64,
    pub pole_lat: f64,
    /// Strictly increasing radial cell edges, metres. First edge > 0.
    pub radial_edges: Vec<f64>,
    pub angular_count: usize,
    /// Ground/seabed elevation per cell, metres relative to the still-water
    /// datum. Negative = underwater.
    pub cell_elevation: Vec<f64>,
    /// Dimensionless linear bottom-friction coefficient per cell.
    pub friction_coeff: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum BasinError {
    #[error("basin {0}: radial edges must be strictly increasing and start > 0")]
    BadRadialEdges(String),
    #[error("basin {0}: angular_count must be >= 3, got {1}")]
    BadAngularCount(String, usize),
    #[error("basin {basin_id}: expected {expected} cell values, got {got}")]
    BadCellCount { basin_id: String, expected: usize, got: usize },
    #[error("basin {0}: non-finite elevation at cell ({1}, {2})")]
    NonFiniteElevation(String, usize, usize),
    #[error("basin {basin_id}: cell index ({i}, {j}) out of range {nr}x{na}")]
    IndexOutOfRange { basin_id: String, i: usize, j: usize, nr: usize, na: usize },
}

impl BasinGrid {
    pub fn radial_count(&self) -> usize {
        self.radial_edges.len() - 1
    }

    pub fn cell_count(&self) -> usize {
        self.radial_count() * self.angular_count
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.angular_count + j
    }

    pub fn delta_theta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.angular_count as f64
    }

    pub fn projection(&self) -> LocalProjection {
        LocalProjection::new(self.pole_lon, self.pole_lat)
    }

    pub fn validate(&self) -> Result<(), BasinError> {
        if self.radial_edges.len() < 2
            || self.radial_edges[0] <= 0.0
            || self.radial_edges.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(BasinError::BadRadialEdges(self.basin_id.clone()));
        }
        if self.angular_count < 3 {
            return Err(BasinError::BadAngularCount(
                self.basin_id.clone(),
                self.angular_count,
            ));
        }
        for field in [&self.cell_elevation, &self.friction_coeff] {
            if field.len() != self.cell_count() {
                return Err(BasinError::BadCellCount {
                    basin_id: self.basin_id.clone(),
                    expected: self.cell_count(),
                    got: field.len(),
                });
            }
        }
        for i in 0..self.radial_count() {
            for j in 0..self.angular_count {
                if !self.cell_elevation[self.idx(i, j)].is_finite() {
                    return Err(BasinError::NonFiniteElevation(self.basin_id.clone(), i, j));
                }
            }
        }
        Ok(())
    }

    /// Radial centre of band i.
    pub fn r_center(&self, i: usize) -> f64 {
        0.5 * (self.radial_edges[i] + self.radial_edges[i + 1])
    }

    /// Angular centre of sector j. θ = 0 points east, grows CCW.
    pub fn theta_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.delta_theta()
    }

    /// Exact polar-annulus sector area of cell (i, j), m².
    pub fn cell_area(&self, i: usize) -> f64 {
        let (r0, r1) = (self.radial_edges[i], self.radial_edges[i + 1]);
        0.5 * (r1 * r1 - r0 * r0) * self.delta_theta()
    }

    /// Planar position of the centre of cell (i, j) relative to the pole, metres.
    pub fn cell_center_xy(&self, i: usize, j: usize) -> Pt {
        let r = self.r_center(i);
        let th = self.theta_center(j);
        Pt::new(r * th.cos(), r * th.sin())
    }

    /// Smallest cell width (used by the CFL bound): min over cells of the
    /// radial extent and the inner-arc length.
    pub fn min_cell_width(&self) -> f64 {
        let dth = self.delta_theta();
        (0..self.radial_count())
            .map(|i| {
                let dr = self.radial_edges[i + 1] - self.radial_edges[i];
                dr.min(self.radial_edges[i] * dth)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest still-water depth at a given tide level, metres.
    pub fn max_depth(&self, tide_m: f64) -> f64 {
        self.cell_elevation
            .iter()
            .map(|&z| (tide_m - z).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Outer bounding radius, metres.
    pub fn outer_radius(&self) -> f64 {
        *self.radial_edges.last().unwrap()
    }
}
