//! Explicit forward-backward shallow-water stepper on the polar basin grid.
//!
//! Linearized depth-integrated equations on an Arakawa-C staggering:
//! free-surface elevation `eta` at cell centres, radial transport `U`
//! (m²/s, positive outward) at radial faces, azimuthal transport `V`
//! (positive counter-clockwise) at azimuthal faces. One step is a
//! finite-volume continuity update from the old transports, then a momentum
//! update from the new surface:
//!
//! ```text
//! η  += −dt / A · ( Σ outward face fluxes )
//! U  += dt ( −g d ∂η/∂r + f V̄ + τ_r/ρ_w + d/ρ_w ∂Δp/∂r ),  then /(1 + dt c_f / d)
//! V  += dt ( −g d ∂η/∂s − f Ū + τ_s/ρ_w + d/ρ_w ∂Δp/∂s ),  then /(1 + dt c_f / d)
//! ```
//!
//! where `d` is the face water depth above the higher of the two adjacent
//! cell bottoms, and `Δp` the atmospheric pressure deficit. A face is dry,
//! and carries no transport, when that depth is below the dry tolerance;
//! water above a sill floods the neighbouring dry cell, which is the whole
//! wetting rule. Wind stress is quadratic, τ = ρ_air C_d |W| W. Bottom
//! friction is linear in the transport and applied implicitly.
//!
//! Boundaries: the innermost and outermost radial faces are walls; in open
//! mode the outermost cell ring is additionally clamped to the tide level
//! each step, which feeds the basin from the ocean side. The azimuthal
//! direction is periodic. The finite-volume form conserves volume exactly
//! (to roundoff) in closed mode.

use thiserror::Error;

use super::basin::BasinGrid;
use crate::geom::polygon::Pt;

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterBoundary {
    /// Outer ring clamped to the tide level (ocean side).
    Open,
    /// Reflecting wall; volume is conserved exactly.
    Closed,
}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub cfl_safety: f64,
    pub rho_water: f64,
    pub rho_air: f64,
    /// Quadratic wind-stress drag coefficient.
    pub wind_drag_cd: f64,
    /// f-plane Coriolis parameter at the basin centroid, 1/s.
    pub coriolis_f: f64,
    /// A face is dry below this water depth, metres.
    pub dry_tolerance_m: f64,
    pub outer_boundary: OuterBoundary,
    /// Re-evaluate the storm forcing every this many steps.
    pub forcing_update_every: usize,
    /// Keep stepping this long after the track window closes, hours.
    pub extra_hours: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            cfl_safety: 0.5,
            rho_water: 1025.0,
            rho_air: 1.15,
            wind_drag_cd: 2.0e-3,
            coriolis_f: 7.0e-5,
            dry_tolerance_m: 0.01,
            outer_boundary: OuterBoundary::Open,
            forcing_update_every: 4,
            extra_hours: 0.0,
        }
    }
}

/// Instantaneous model state on one basin grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Free-surface elevation per cell, metres above datum. nr × na.
    pub eta: Vec<f64>,
    /// Radial transports at radial faces, (nr+1) × na. Row 0 and row nr are
    /// boundary walls and stay zero.
    pub flux_r: Vec<f64>,
    /// Azimuthal transports at azimuthal faces, nr × na; face j sits between
    /// sectors j-1 and j (periodic).
    pub flux_t: Vec<f64>,
    pub time_s: f64,
}

impl SimState {
    /// Still water at the given level, no motion.
    pub fn still(basin: &BasinGrid, level_m: f64) -> Self {
        let nr = basin.radial_count();
        let na = basin.angular_count;
        SimState {
            eta: vec![level_m; nr * na],
            flux_r: vec![0.0; (nr + 1) * na],
            flux_t: vec![0.0; nr * na],
            time_s: 0.0,
        }
    }

    /// Total water volume above ground, m³.
    pub fn volume(&self, basin: &BasinGrid) -> f64 {
        let na = basin.angular_count;
        let mut v = 0.0;
        for i in 0..basin.radial_count() {
            let area = basin.cell_area(i);
            for j in 0..na {
                let k = i * na + j;
                v += area * (self.eta[k] - basin.cell_elevation[k]).max(0.0);
            }
        }
        v
    }
}

/// Forcing sampled at cell centres: wind vector (m/s, planar east/north
/// components in the basin frame) and atmospheric pressure deficit (Pa).
#[derive(Debug, Clone)]
pub struct ForcingField {
    pub wind: Vec<Pt>,
    pub deficit_pa: Vec<f64>,
}

impl ForcingField {
    pub fn calm(cell_count: usize) -> Self {
        ForcingField { wind: vec![Pt::new(0.0, 0.0); cell_count], deficit_pa: vec![0.0; cell_count] }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error(
        "CFL violation: dt = {dt} s exceeds bound {bound} s \
         (safety {safety} x min width {min_width} m / wave speed {wave_speed} m/s)"
    )]
    CflViolation { dt: f64, bound: f64, safety: f64, min_width: f64, wave_speed: f64 },
    #[error("non-finite state at step {step}, cell ({i}, {j})")]
    NonFinite { step: u64, i: usize, j: usize },
    #[error("forcing field sized {got}, basin has {expected} cells")]
    ForcingSizeMismatch { got: usize, expected: usize },
}

/// Largest stable time step for the current state.
pub fn cfl_bound(basin: &BasinGrid, state: &SimState, cfg: &SimConfig) -> f64 {
    let max_depth = state
        .eta
        .iter()
        .zip(&basin.cell_elevation)
        .map(|(&e, &z)| (e - z).max(0.0))
        .fold(0.0, f64::max);
    let wave_speed = (GRAVITY * max_depth).sqrt().max(1e-6);
    cfg.cfl_safety * basin.min_cell_width() / wave_speed
}

/// Advances the state by one step of length `dt` seconds.
pub fn step_shallow_water(
    state: &mut SimState,
    basin: &BasinGrid,
    forcing: &ForcingField,
    dt: f64,
    tide_m: f64,
    cfg: &SimConfig,
    step_no: u64,
) -> Result<(), SolverError> {
    let nr = basin.radial_count();
    let na = basin.angular_count;
    if forcing.wind.len() != nr * na || forcing.deficit_pa.len() != nr * na {
        return Err(SolverError::ForcingSizeMismatch {
            got: forcing.wind.len(),
            expected: nr * na,
        });
    }
    let bound = cfl_bound(basin, state, cfg);
    if dt > bound {
        let max_depth = state
            .eta
            .iter()
            .zip(&basin.cell_elevation)
            .map(|(&e, &z)| (e - z).max(0.0))
            .fold(0.0, f64::max);
        return Err(SolverError::CflViolation {
            dt,
            bound,
            safety: cfg.cfl_safety,
            min_width: basin.min_cell_width(),
            wave_speed: (GRAVITY * max_depth).sqrt(),
        });
    }

    let dth = basin.delta_theta();
    let inv_rho_w = 1.0 / cfg.rho_water;

    // Continuity from the old transports.
    for i in 0..nr {
        let inv_area = 1.0 / basin.cell_area(i);
        let len_in = basin.radial_edges[i] * dth;
        let len_out = basin.radial_edges[i + 1] * dth;
        let dr = basin.radial_edges[i + 1] - basin.radial_edges[i];
        for j in 0..na {
            let k = i * na + j;
            let jp = if j + 1 == na { 0 } else { j + 1 };
            let div = state.flux_r[(i + 1) * na + j] * len_out - state.flux_r[i * na + j] * len_in
                + (state.flux_t[i * na + jp] - state.flux_t[k]) * dr;
            state.eta[k] -= dt * inv_area * div;
        }
    }

    if cfg.outer_boundary == OuterBoundary::Open {
        for j in 0..na {
            let k = (nr - 1) * na + j;
            // Only clamp where the ocean actually reaches; land stays land.
            if basin.cell_elevation[k] < tide_m {
                state.eta[k] = tide_m;
            }
        }
    }

    // Radial momentum at interior radial faces.
    for i in 1..nr {
        let inv_dr_c = 1.0 / (basin.r_center(i) - basin.r_center(i - 1));
        for j in 0..na {
            let k_in = (i - 1) * na + j;
            let k_out = i * na + j;
            let face = i * na + j;
            let sill = basin.cell_elevation[k_in].max(basin.cell_elevation[k_out]);
            let depth = 0.5 * (state.eta[k_in] + state.eta[k_out]) - sill;
            if depth <= cfg.dry_tolerance_m {
                state.flux_r[face] = 0.0;
                continue;
            }
            let detadr = (state.eta[k_out] - state.eta[k_in]) * inv_dr_c;
            let jp = if j + 1 == na { 0 } else { j + 1 };
            let v_bar = 0.25
                * (state.flux_t[k_in]
                    + state.flux_t[(i - 1) * na + jp]
                    + state.flux_t[k_out]
                    + state.flux_t[i * na + jp]);
            // Face direction vectors from the face-centre angle.
            let th = basin.theta_center(j);
            let (cth, sth) = (th.cos(), th.sin());
            let wx = 0.5 * (forcing.wind[k_in].x + forcing.wind[k_out].x);
            let wy = 0.5 * (forcing.wind[k_in].y + forcing.wind[k_out].y);
            let wmag = (wx * wx + wy * wy).sqrt();
            let tau_r = cfg.rho_air * cfg.wind_drag_cd * wmag * (wx * cth + wy * sth);
            let dpdr = (forcing.deficit_pa[k_out] - forcing.deficit_pa[k_in]) * inv_dr_c;
            let accel = -GRAVITY * depth * detadr
                + cfg.coriolis_f * v_bar
                + tau_r * inv_rho_w
                + depth * inv_rho_w * dpdr;
            let cf = 0.5 * (basin.friction_coeff[k_in] + basin.friction_coeff[k_out]);
            let u_new = (state.flux_r[face] + dt * accel) / (1.0 + dt * cf / depth);
            state.flux_r[face] = u_new;
        }
    }

    // Azimuthal momentum (periodic).
    for i in 0..nr {
        let inv_ds = 1.0 / (basin.r_center(i) * dth);
        for j in 0..na {
            let jm = if j == 0 { na - 1 } else { j - 1 };
            let k_a = i * na + jm;
            let k_b = i * na + j;
            let sill = basin.cell_elevation[k_a].max(basin.cell_elevation[k_b]);
            let depth = 0.5 * (state.eta[k_a] + state.eta[k_b]) - sill;
            if depth <= cfg.dry_tolerance_m {
                state.flux_t[k_b] = 0.0;
                continue;
            }
            let detads = (state.eta[k_b] - state.eta[k_a]) * inv_ds;
            let u_bar = 0.25
                * (state.flux_r[i * na + jm]
                    + state.flux_r[(i + 1) * na + jm]
                    + state.flux_r[i * na + j]
                    + state.flux_r[(i + 1) * na + j]);
            // Face sits on the edge angle j·Δθ; tangential dir is (−sin, cos).
            let th = j as f64 * dth;
            let (cth, sth) = (th.cos(), th.sin());
            let wx = 0.5 * (forcing.wind[k_a].x + forcing.wind[k_b].x);
            let wy = 0.5 * (forcing.wind[k_a].y + forcing.wind[k_b].y);
            let wmag = (wx * wx + wy * wy).sqrt();
            let tau_s = cfg.rho_air * cfg.wind_drag_cd * wmag * (-wx * sth + wy * cth);
            let dpds = (forcing.deficit_pa[k_b] - forcing.deficit_pa[k_a]) * inv_ds;
            let accel = -GRAVITY * depth * detads - cfg.coriolis_f * u_bar
                + tau_s * inv_rho_w
                + depth * inv_rho_w * dpds;
            let cf = 0.5 * (basin.friction_coeff[k_a] + basin.friction_coeff[k_b]);
            state.flux_t[k_b] = (state.flux_t[k_b] + dt * accel) / (1.0 + dt * cf / depth);
        }
    }

    for i in 0..nr {
        for j in 0..na {
            if !state.eta[i * na + j].is_finite() {
                return Err(SolverError::NonFinite { step: step_no, i, j });
            }
        }
    }
    state.time_s += dt;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat_basin(nr: usize, na: usize, depth: f64) -> BasinGrid {
        BasinGrid {
            basin_id: "flat".into(),
            pole_lon: -90.0,
            pole_lat: 29.0,
            radial_edges: (0..=nr).map(|i| 20_000.0 + 5_000.0 * i as f64).collect(),
            angular_count: na,
            cell_elevation: vec![-depth; nr * na],
            friction_coeff: vec![0.0; nr * na],
        }
    }

    fn quiet_cfg() -> SimConfig {
        SimConfig {
            coriolis_f: 0.0,
            outer_boundary: OuterBoundary::Closed,
            ..SimConfig::default()
        }
    }

    #[test]
    fn equilibrium_is_exact() {
        let basin = flat_basin(5, 8, 12.0);
        let cfg = quiet_cfg();
        let tide = 0.5;
        let mut state = SimState::still(&basin, tide);
        let calm = ForcingField::calm(basin.cell_count());
        let before = state.clone();
        for s in 0..50 {
            step_shallow_water(&mut state, &basin, &calm, 10.0, tide, &cfg, s).unwrap();
        }
        assert_eq!(state.eta, before.eta);
        assert_eq!(state.flux_r, before.flux_r);
        assert_eq!(state.flux_t, before.flux_t);
    }

    #[test]
    fn one_step_flux_matches_hand_calculation() {
        // 3x3 grid, single raised cell, zero forcing, no rotation/friction.
        let basin = flat_basin(3, 3, 10.0);
        let cfg = quiet_cfg();
        let mut state = SimState::still(&basin, 0.0);
        let na = 3;
        state.eta[na + 1] = 0.2; // cell (1, 1)
        let dt = 5.0;
        let calm = ForcingField::calm(basin.cell_count());
        step_shallow_water(&mut state, &basin, &calm, dt, 0.0, &cfg, 0).unwrap();

        // Continuity sees zero fluxes, so eta is unchanged; then
        // U = −g·d·(Δη/Δr_c)·dt at the faces around cell (1,1).
        // Radial face between (0,1) and (1,1): Δη = 0.2, Δr_c = 5000 m,
        // d = 0.5·(0 + 0.2) − (−10) = 10.1 m.
        let expected = -GRAVITY * 10.1 * (0.2 / 5000.0) * dt;
        assert_relative_eq!(state.flux_r[na + 1], expected, max_relative = 1e-14);
        // Face between (1,1) and (2,1): Δη = −0.2.
        assert_relative_eq!(state.flux_r[2 * na + 1], -expected, max_relative = 1e-14);
        // Azimuthal face between (1,0) and (1,1): arc spacing r_c(1)·Δθ.
        let ds = basin.r_center(1) * basin.delta_theta();
        let expected_t = -GRAVITY * 10.1 * (0.2 / ds) * dt;
        assert_relative_eq!(state.flux_t[na + 1], expected_t, max_relative = 1e-14);
        // Face between (1,1) and (1,2): Δη = −0.2.
        assert_relative_eq!(state.flux_t[na + 2], -expected_t, max_relative = 1e-14);
        // Faces away from the disturbance stay zero.
        assert_eq!(state.flux_r[0], 0.0);
        assert_eq!(state.flux_t[0], 0.0);
    }

    #[test]
    fn closed_basin_conserves_volume() {
        let basin = flat_basin(6, 12, 15.0);
        let cfg = quiet_cfg();
        let mut state = SimState::still(&basin, 0.0);
        // A bump to slosh around.
        for j in 0..12 {
            state.eta[j] = 0.3;
        }
        let v0 = state.volume(&basin);
        let calm = ForcingField::calm(basin.cell_count());
        let dt = 0.9 * cfl_bound(&basin, &state, &cfg);
        for s in 0..1000 {
            step_shallow_water(&mut state, &basin, &calm, dt, 0.0, &cfg, s).unwrap();
        }
        let v1 = state.volume(&basin);
        assert!(
            ((v1 - v0) / v0).abs() < 1e-12,
            "volume drift {}",
            ((v1 - v0) / v0).abs()
        );
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let basin = flat_basin(3, 6, 10.0);
        let cfg = quiet_cfg();
        let mut state = SimState::still(&basin, 0.0);
        let calm = ForcingField::calm(basin.cell_count());
        let bad_dt = 2.0 * cfl_bound(&basin, &state, &cfg);
        let err = step_shallow_water(&mut state, &basin, &calm, bad_dt, 0.0, &cfg, 0);
        assert!(matches!(err, Err(SolverError::CflViolation { .. })));
    }

    #[test]
    fn mirror_symmetric_forcing_stays_mirror_symmetric() {
        // Mirror axis through the θ=0 edge: sector j <-> na-1-j.
        let nr = 4;
        let na = 8;
        let basin = flat_basin(nr, na, 10.0);
        let cfg = quiet_cfg();
        let mut state = SimState::still(&basin, 0.0);
        let mut forcing = ForcingField::calm(basin.cell_count());
        for i in 0..nr {
            for j in 0..na {
                // Pressure bump symmetric under the mirror.
                let jj = j.min(na - 1 - j) as f64;
                forcing.deficit_pa[i * na + j] = 500.0 * (1.0 + jj) / (1.0 + i as f64);
            }
        }
        let dt = 0.9 * cfl_bound(&basin, &state, &cfg);
        for s in 0..200 {
            step_shallow_water(&mut state, &basin, &forcing, dt, 0.0, &cfg, s).unwrap();
        }
        for i in 0..nr {
            for j in 0..na {
                let m = na - 1 - j;
                let diff = (state.eta[i * na + j] - state.eta[i * na + m]).abs();
                assert!(diff < 1e-9, "asymmetry {diff} at ({i}, {j})");
            }
        }
    }

    #[test]
    fn dry_land_emits_no_flux() {
        let nr = 3;
        let na = 4;
        let mut basin = flat_basin(nr, na, 5.0);
        // Middle ring is land well above water.
        for j in 0..na {
            basin.cell_elevation[na + j] = 3.0;
        }
        let cfg = quiet_cfg();
        let mut state = SimState::still(&basin, 0.0);
        state.eta[0] = 0.5;
        let dt = 0.9 * cfl_bound(&basin, &state, &cfg);
        for s in 0..100 {
            step_shallow_water(&mut state, &basin, &ForcingField::calm(nr * na), dt, 0.0, &cfg, s)
                .unwrap();
        }
        // No radial transport across the land ring faces.
        for j in 0..na {
            assert_eq!(state.flux_r[na + j], 0.0);
            assert_eq!(state.flux_r[2 * na + j], 0.0);
        }
        // Outer ring never felt the inner bump.
        for j in 0..na {
            assert_eq!(state.eta[2 * na + j], 0.0);
        }
    }
}
