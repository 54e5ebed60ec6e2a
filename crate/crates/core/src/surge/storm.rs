//! Parametric hurricane: track, gradient-wind profile, pressure deficit.
//!
//! The wind model is a Holland-type gradient wind:
//!
//! ```text
//! x(r)   = (Rmax / r)^B
//! V_g(r) = sqrt( B ΔP / ρ_air · x e^{-x} + (r f / 2)² ) − r f / 2
//! p(r)   = p_peripheral − ΔP (1 − e^{-x})
//! ```
//!
//! so the peripheral-minus-local pressure deficit is `ΔP (1 − e^{-x})`,
//! decaying monotonically to zero with distance. The tangential wind is
//! rotated inward by a fixed inflow angle and a fraction of the storm's
//! translation velocity is added, scaled by `V_g(r)/V_g(Rmax)`, which places
//! the wind maximum to the right of the track in the northern hemisphere.

use thiserror::Error;

use crate::geom::polygon::Pt;
use crate::geom::proj::LocalProjection;

pub const MB_TO_PA: f64 = 100.0;
pub const FT_TO_M: f64 = 0.3048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub lon: f64,
    pub lat: f64,
    /// Hours from the start of the simulation window.
    pub time_h: f64,
}

/// Parametric hurricane description.
#[derive(Debug, Clone, PartialEq)]
pub struct StormParams {
    pub storm_id: String,
    /// Central-vs-peripheral pressure difference, millibars.
    pub pressure_deficit_mb: f64,
    pub radius_max_winds_km: f64,
    /// At least two points with strictly increasing times.
    pub track: Vec<TrackPoint>,
    /// Saffir-Simpson category, 1-5.
    pub category: u8,
    /// Tide level above the still-water datum, feet.
    pub tide_offset_ft: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum StormError {
    #[error("storm {0}: pressure deficit must be >= 0, got {1}")]
    NegativeDeficit(String, f64),
    #[error("storm {0}: radius of maximum winds must be > 0, got {1}")]
    NonPositiveRadius(String, f64),
    #[error("storm {0}: track needs at least 2 points with strictly increasing times")]
    BadTrack(String),
    #[error("storm {0}: category must be in 1..=5, got {1}")]
    BadCategory(String, u8),
    #[error("storm {storm_id}: time {t_hours} h outside track window [{start_h}, {end_h}] h")]
    OutOfWindow { storm_id: String, t_hours: f64, start_h: f64, end_h: f64 },
}

impl StormParams {
    pub fn validate(&self) -> Result<(), StormError> {
        if self.pressure_deficit_mb < 0.0 {
            return Err(StormError::NegativeDeficit(
                self.storm_id.clone(),
                self.pressure_deficit_mb,
            ));
        }
        if self.radius_max_winds_km <= 0.0 {
            return Err(StormError::NonPositiveRadius(
                self.storm_id.clone(),
                self.radius_max_winds_km,
            ));
        }
        if self.track.len() < 2
            || self.track.windows(2).any(|w| w[1].time_h <= w[0].time_h)
        {
            return Err(StormError::BadTrack(self.storm_id.clone()));
        }
        if !(1..=5).contains(&self.category) {
            return Err(StormError::BadCategory(self.storm_id.clone(), self.category));
        }
        Ok(())
    }

    pub fn track_window_h(&self) -> (f64, f64) {
        (self.track[0].time_h, self.track[self.track.len() - 1].time_h)
    }

    /// Storm center and translation velocity (m/s east, m/s north) at `t_hours`,
    /// linear along the track.
    pub fn center_at(&self, t_hours: f64) -> Result<(TrackPoint, Pt), StormError> {
        let (start_h, end_h) = self.track_window_h();
        if t_hours < start_h || t_hours > end_h {
            return Err(StormError::OutOfWindow {
                storm_id: self.storm_id.clone(),
                t_hours,
                start_h,
                end_h,
            });
        }
        let seg = self
            .track
            .windows(2)
            .find(|w| t_hours <= w[1].time_h)
            .expect("t inside window");
        let (a, b) = (seg[0], seg[1]);
        let frac = (t_hours - a.time_h) / (b.time_h - a.time_h);
        let lon = a.lon + frac * (b.lon - a.lon);
        let lat = a.lat + frac * (b.lat - a.lat);
        let proj = LocalProjection::new(a.lon, a.lat);
        let end = proj.to_xy(b.lon, b.lat);
        let dt_s = (b.time_h - a.time_h) * 3600.0;
        let vel = Pt::new(end.x / dt_s, end.y / dt_s);
        Ok((TrackPoint { lon, lat, time_h: t_hours }, vel))
    }

    /// Storm heading in degrees clockwise from north, from the first track segment.
    pub fn heading_deg(&self) -> f64 {
        let (a, b) = (self.track[0], self.track[self.track.len() - 1]);
        let proj = LocalProjection::new(a.lon, a.lat);
        let end = proj.to_xy(b.lon, b.lat);
        end.x.atan2(end.y).to_degrees().rem_euclid(360.0)
    }

    /// Mean forward speed over the track, m/s.
    pub fn forward_speed_ms(&self) -> f64 {
        let (a, b) = (self.track[0], self.track[self.track.len() - 1]);
        let proj = LocalProjection::new(a.lon, a.lat);
        let end = proj.to_xy(b.lon, b.lat);
        let dt_s = (b.time_h - a.time_h) * 3600.0;
        (end.x * end.x + end.y * end.y).sqrt() / dt_s
    }
}

/// Parameters of the gradient-wind profile that the paper's data source does
/// not pin down. Defaults follow common parametric-hurricane practice.
#[derive(Debug, Clone, Copy)]
pub struct WindModel {
    /// Holland shape parameter.
    pub holland_b: f64,
    pub rho_air: f64,
    /// f-plane Coriolis parameter, 1/s.
    pub coriolis_f: f64,
    /// Surface inflow angle, degrees.
    pub inflow_angle_deg: f64,
    /// Fraction of translation velocity added to the rotating wind.
    pub asymmetry_factor: f64,
}

impl Default for WindModel {
    fn default() -> Self {
        WindModel {
            holland_b: 1.3,
            rho_air: 1.15,
            coriolis_f: 7.0e-5,
            inflow_angle_deg: 20.0,
            asymmetry_factor: 0.5,
        }
    }
}

impl WindModel {
    /// Closed-form peak gradient wind for f = 0: sqrt(B ΔP / (ρ_air e)).
    pub fn peak_wind_ms(&self, pressure_deficit_mb: f64) -> f64 {
        (self.holland_b * pressure_deficit_mb * MB_TO_PA
            / (self.rho_air * std::f64::consts::E))
            .sqrt()
    }
}

/// Wind vector (m/s east, m/s north) and pressure deficit (Pa, peripheral
/// minus local) at a lon/lat point and time.
pub fn wind_pressure_field(
    storm: &StormParams,
    model: &WindModel,
    lon: f64,
    lat: f64,
    t_hours: f64,
) -> Result<(Pt, f64), StormError> {
    let (center, translation) = storm.center_at(t_hours)?;
    let proj = LocalProjection::new(center.lon, center.lat);
    let p = proj.to_xy(lon, lat);
    Ok(wind_pressure_at_offset(storm, model, p, translation))
}

/// Same field evaluated at a planar offset (metres) from the storm center.
pub fn wind_pressure_at_offset(
    storm: &StormParams,
    model: &WindModel,
    offset: Pt,
    translation: Pt,
) -> (Pt, f64) {
    let dp_pa = storm.pressure_deficit_mb * MB_TO_PA;
    if dp_pa == 0.0 {
        return (Pt::new(0.0, 0.0), 0.0);
    }
    let r = (offset.x * offset.x + offset.y * offset.y).sqrt();
    let rmax = storm.radius_max_winds_km * 1000.0;
    if r < 1.0 {
        // At the eye center the gradient wind vanishes and the deficit is full.
        return (Pt::new(0.0, 0.0), dp_pa);
    }
    let x = (rmax / r).powf(model.holland_b);
    let gradient_term = model.holland_b * dp_pa / model.rho_air * x * (-x).exp();
    let rf2 = 0.5 * r * model.coriolis_f.abs();
    let v_g = (gradient_term + rf2 * rf2).sqrt() - rf2;

    // Cyclonic (CCW) tangential direction, rotated inward by the inflow angle.
    let (rx, ry) = (offset.x / r, offset.y / r);
    let (tx, ty) = (-ry, rx);
    let alpha = model.inflow_angle_deg.to_radians();
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let mut wx = v_g * (ca * tx - sa * rx);
    let mut wy = v_g * (ca * ty - sa * ry);

    // Forward-motion asymmetry, strongest near the radius of maximum winds.
    let v_peak = model.peak_wind_ms(storm.pressure_deficit_mb);
    if v_peak > 0.0 {
        let shape = (v_g / v_peak).clamp(0.0, 1.0);
        wx += model.asymmetry_factor * shape * translation.x;
        wy += model.asymmetry_factor * shape * translation.y;
    }

    let deficit = dp_pa * (1.0 - (-x).exp());
    (Pt::new(wx, wy), deficit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_storm(dp_mb: f64) -> StormParams {
        StormParams {
            storm_id: "t1".into(),
            pressure_deficit_mb: dp_mb,
            radius_max_winds_km: 40.0,
            track: vec![
                TrackPoint { lon: -90.0, lat: 27.0, time_h: 0.0 },
                TrackPoint { lon: -90.0, lat: 30.0, time_h: 12.0 },
            ],
            category: 4,
            tide_offset_ft: 2.0,
        }
    }

    /// Stationary storm: both track points equal, so translation is zero.
    fn stationary_storm(dp_mb: f64) -> StormParams {
        let mut s = test_storm(dp_mb);
        s.track[1].lon = s.track[0].lon;
        s.track[1].lat = s.track[0].lat;
        s
    }

    #[test]
    fn validation_catches_bad_inputs() {
        let mut s = test_storm(50.0);
        s.category = 6;
        assert!(matches!(s.validate(), Err(StormError::BadCategory(_, 6))));
        let mut s = test_storm(50.0);
        s.track[1].time_h = 0.0;
        assert!(matches!(s.validate(), Err(StormError::BadTrack(_))));
        assert!(test_storm(50.0).validate().is_ok());
    }

    #[test]
    fn zero_deficit_means_zero_forcing() {
        let s = test_storm(0.0);
        let m = WindModel::default();
        for (lon, lat) in [(-90.0, 28.0), (-89.0, 29.0), (-95.0, 25.0)] {
            let (w, dp) = wind_pressure_field(&s, &m, lon, lat, 3.0).unwrap();
            assert_eq!((w.x, w.y, dp), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn peak_wind_matches_hand_computed_closed_form() {
        // Hand evaluation for ΔP = 50 mb, B = 1.3, ρ_air = 1.15:
        // sqrt(1.3 · 5000 / (1.15 · e)) = 45.599545836929564 m/s
        let s = stationary_storm(50.0);
        let m = WindModel { coriolis_f: 0.0, ..WindModel::default() };
        assert_relative_eq!(m.peak_wind_ms(50.0), 45.599545836929564, epsilon = 1e-6);
        // Speed at r = Rmax equals the closed-form peak.
        let (w, _) = wind_pressure_at_offset(
            &s,
            &m,
            Pt::new(s.radius_max_winds_km * 1000.0, 0.0),
            Pt::new(0.0, 0.0),
        );
        let speed = (w.x * w.x + w.y * w.y).sqrt();
        assert_relative_eq!(speed, m.peak_wind_ms(50.0), epsilon = 1e-9);
    }

    #[test]
    fn far_field_wind_is_below_five_percent_of_peak() {
        // With gradient-wind balance the far tail collapses: at r = 100 Rmax
        // the pressure term is ~14 (m/s)² against rf/2 = 140 m/s, leaving
        // ~0.05 m/s of wind.
        let s = stationary_storm(50.0);
        let m = WindModel::default();
        let r = 100.0 * s.radius_max_winds_km * 1000.0;
        let (w, dp) = wind_pressure_at_offset(&s, &m, Pt::new(0.0, r), Pt::new(0.0, 0.0));
        let speed = (w.x * w.x + w.y * w.y).sqrt();
        assert!(speed < 0.05 * m.peak_wind_ms(50.0), "far-field speed {speed}");
        assert!(dp < 0.01 * s.pressure_deficit_mb * MB_TO_PA);
    }

    #[test]
    fn deficit_decays_monotonically() {
        let s = stationary_storm(60.0);
        let m = WindModel::default();
        let mut last = f64::INFINITY;
        for km in [1.0, 10.0, 40.0, 80.0, 200.0, 500.0, 2000.0] {
            let (_, dp) =
                wind_pressure_at_offset(&s, &m, Pt::new(km * 1000.0, 0.0), Pt::new(0.0, 0.0));
            assert!(dp < last, "deficit not decaying at {km} km");
            last = dp;
        }
    }

    #[test]
    fn asymmetry_strengthens_right_of_track() {
        // Track heading north: right of track is east of the center.
        let s = test_storm(50.0);
        let m = WindModel::default();
        let (_, trans) = s.center_at(6.0).unwrap();
        assert!(trans.y > 0.0 && trans.x.abs() < 1e-9);
        let r = s.radius_max_winds_km * 1000.0;
        let (we, _) = wind_pressure_at_offset(&s, &m, Pt::new(r, 0.0), trans);
        let (ww, _) = wind_pressure_at_offset(&s, &m, Pt::new(-r, 0.0), trans);
        let speed_e = (we.x * we.x + we.y * we.y).sqrt();
        let speed_w = (ww.x * ww.x + ww.y * ww.y).sqrt();
        assert!(speed_e > speed_w);
    }

    #[test]
    fn out_of_window_time_is_an_error() {
        let s = test_storm(50.0);
        let m = WindModel::default();
        assert!(matches!(
            wind_pressure_field(&s, &m, -90.0, 28.0, 12.5),
            Err(StormError::OutOfWindow { .. })
        ));
    }

    #[test]
    fn heading_and_speed_from_track() {
        let s = test_storm(50.0);
        assert_relative_eq!(s.heading_deg(), 0.0, epsilon = 1e-9);
        // 3 degrees of latitude in 12 h: 3 · 111.195 km / 43200 s = 7.722 m/s
        assert_relative_eq!(s.forward_speed_ms(), 7.7219, epsilon = 1e-3);
    }
}
