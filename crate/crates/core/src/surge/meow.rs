//! Maximum Envelope of Water per storm, and Maximum of MEOWs per
//! category/tide scenario.

use thiserror::Error;

use super::basin::BasinGrid;
use super::solver::{step_shallow_water, ForcingField, SimConfig, SimState, SolverError};
use super::storm::{wind_pressure_at_offset, StormError, StormParams, WindModel, FT_TO_M};
use crate::geom::polygon::Pt;
use crate::geom::proj::LocalProjection;

/// Per-cell maximum water level over one simulated storm, metres above datum.
#[derive(Debug, Clone, PartialEq)]
pub struct MeowField {
    pub basin_id: String,
    pub storm_id: String,
    pub category: u8,
    pub tide_offset_ft: f64,
    pub max_eta_m: Vec<f64>,
}

/// Pointwise maximum over the MEOWs of one category/tide scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct MomField {
    pub basin_id: String,
    pub category: u8,
    pub tide_offset_ft: f64,
    pub max_eta_m: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MeowError {
    #[error(transparent)]
    Storm(#[from] StormError),
    #[error("storm {storm_id}: track stays {min_distance_km:.1} km from pole of basin {basin_id}, outside its {outer_radius_km:.1} km bounding circle")]
    TrackMissesBasin {
        storm_id: String,
        basin_id: String,
        min_distance_km: f64,
        outer_radius_km: f64,
    },
    #[error("storm {storm_id} on basin {basin_id}, step {step}: {source}")]
    Solver { storm_id: String, basin_id: String, step: u64, source: SolverError },
    #[error("MOM of an empty MEOW list")]
    EmptyEnsemble,
    #[error("MEOW grids differ: {0} vs {1}")]
    GridMismatch(String, String),
    #[error("MEOWs mix scenarios: category/tide ({0}, {1}) vs ({2}, {3})")]
    ScenarioMismatch(u8, f64, u8, f64),
}

/// Simulates one storm over a basin and returns the per-cell water-level
/// envelope. Deterministic for fixed inputs.
pub fn run_storm_meow(
    basin: &BasinGrid,
    storm: &StormParams,
    wind_model: &WindModel,
    cfg: &SimConfig,
) -> Result<MeowField, MeowError> {
    storm.validate()?;
    let proj = basin.projection();

    // The track must pass within the basin's bounding circle.
    let (start_h, end_h) = storm.track_window_h();
    let samples = 64;
    let min_dist = (0..=samples)
        .map(|s| {
            let t = start_h + (end_h - start_h) * s as f64 / samples as f64;
            let (c, _) = storm.center_at(t).expect("t inside window");
            let p = proj.to_xy(c.lon, c.lat);
            (p.x * p.x + p.y * p.y).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    if min_dist > basin.outer_radius() {
        return Err(MeowError::TrackMissesBasin {
            storm_id: storm.storm_id.clone(),
            basin_id: basin.basin_id.clone(),
            min_distance_km: min_dist / 1000.0,
            outer_radius_km: basin.outer_radius() / 1000.0,
        });
    }

    let tide_m = storm.tide_offset_ft * FT_TO_M;
    let mut state = SimState::still(basin, tide_m);
    let dt = cfg.cfl_safety * basin.min_cell_width()
        / (super::solver::GRAVITY * basin.max_depth(tide_m)).sqrt().max(1e-6);
    // Headroom for the surge itself raising the wave speed above still water.
    let dt = 0.8 * dt;

    let duration_s = (end_h - start_h + cfg.extra_hours) * 3600.0;
    let n_steps = (duration_s / dt).ceil() as u64;

    let nr = basin.radial_count();
    let na = basin.angular_count;
    let centers: Vec<Pt> = (0..nr)
        .flat_map(|i| (0..na).map(move |j| (i, j)))
        .map(|(i, j)| basin.cell_center_xy(i, j))
        .collect();

    let mut forcing = ForcingField::calm(nr * na);
    let mut meow = state.eta.clone();
    let refresh = cfg.forcing_update_every.max(1) as u64;

    for step in 0..n_steps {
        if step % refresh == 0 {
            let t_h = start_h + state.time_s / 3600.0;
            if t_h <= end_h {
                update_forcing(&mut forcing, storm, wind_model, &proj, &centers, t_h);
            } else {
                forcing = ForcingField::calm(nr * na);
            }
        }
        step_shallow_water(&mut state, basin, &forcing, dt, tide_m, cfg, step).map_err(|e| {
            MeowError::Solver {
                storm_id: storm.storm_id.clone(),
                basin_id: basin.basin_id.clone(),
                step,
                source: e,
            }
        })?;
        for (m, &e) in meow.iter_mut().zip(&state.eta) {
            if e > *m {
                *m = e;
            }
        }
    }

    Ok(MeowField {
        basin_id: basin.basin_id.clone(),
        storm_id: storm.storm_id.clone(),
        category: storm.category,
        tide_offset_ft: storm.tide_offset_ft,
        max_eta_m: meow,
    })
}

fn update_forcing(
    forcing: &mut ForcingField,
    storm: &StormParams,
    wind_model: &WindModel,
    proj: &LocalProjection,
    centers: &[Pt],
    t_h: f64,
) {
    let (center, translation) = storm.center_at(t_h).expect("t inside window");
    let c = proj.to_xy(center.lon, center.lat);
    for (k, p) in centers.iter().enumerate() {
        let offset = Pt::new(p.x - c.x, p.y - c.y);
        let (w, dp) = wind_pressure_at_offset(storm, wind_model, offset, translation);
        forcing.wind[k] = w;
        forcing.deficit_pa[k] = dp;
    }
}

/// Pointwise maximum over MEOWs of one category and tide. Order-independent.
pub fn compute_mom(meows: &[MeowField]) -> Result<MomField, MeowError> {
    let first = meows.first().ok_or(MeowError::EmptyEnsemble)?;
    let mut max_eta = first.max_eta_m.clone();
    for m in &meows[1..] {
        if m.basin_id != first.basin_id || m.max_eta_m.len() != first.max_eta_m.len() {
            return Err(MeowError::GridMismatch(first.basin_id.clone(), m.basin_id.clone()));
        }
        if m.category != first.category || m.tide_offset_ft != first.tide_offset_ft {
            return Err(MeowError::ScenarioMismatch(
                first.category,
                first.tide_offset_ft,
                m.category,
                m.tide_offset_ft,
            ));
        }
        for (acc, &v) in max_eta.iter_mut().zip(&m.max_eta_m) {
            if v > *acc {
                *acc = v;
            }
        }
    }
    Ok(MomField {
        basin_id: first.basin_id.clone(),
        category: first.category,
        tide_offset_ft: first.tide_offset_ft,
        max_eta_m: max_eta,
    })
}
