//! Deterministic synthetic input bundles: a coastal basin, storm ensembles,
//! a DEM, zones, a floodplain band, loans, banks, demographics, and a
//! price/rent panel that are mutually consistent. Surge-prone coastal zones
//! are generated with an elevated interest-only dollar share and a
//! depressed price-to-rent drift so the downstream facts are recoverable.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use floodrisk_core::exposure::demographics::DemographicRecord;
use floodrisk_core::exposure::lenders::BankRecord;
use floodrisk_core::exposure::records::{DocType, LenderKind, Lien, LoanRecord, Occupancy};
use floodrisk_core::geom::polygon::{MultiPolygon, Polygon};
use floodrisk_core::geom::slr::DemRaster;
use floodrisk_core::surge::BasinGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::errors::{CliResult, Contextual};
use crate::formats::storm::StormRow;
use crate::formats::tables::PanelRow;
use crate::formats::{basin, dem, geojsonio, storm, tables};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Small,
    Medium,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub scale: Scale,
    /// Interest-only dollar-share gap between surge-prone and other zones,
    /// percentage points.
    pub io_gap_ppt: f64,
    /// Extra log price-to-rent drift per year in surge-prone zones.
    pub drift_per_year: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { seed: 7, scale: Scale::Small, io_gap_ppt: 8.0, drift_per_year: -0.01 }
    }
}

#[derive(Debug, Clone)]
pub struct SynthBundle {
    pub basin: BasinGrid,
    pub storms: Vec<StormRow>,
    pub dem: DemRaster,
    /// (zone_id, geometry, population)
    pub zones: Vec<(String, MultiPolygon, f64)>,
    pub sfha: MultiPolygon,
    pub loans: Vec<LoanRecord>,
    pub banks: Vec<BankRecord>,
    pub demographics: Vec<DemographicRecord>,
    pub panel: Vec<PanelRow>,
    /// Zones generated with the elevated-IO / depressed-drift treatment
    /// (the coastal band); kept for self-checks, not written to disk.
    pub surge_prone: BTreeSet<String>,
}

// Domain: lon [-90.5, -89.9] x lat [28.8, 29.4], coastline at 29.0.
const LON0: f64 = -90.5;
const LAT0: f64 = 28.8;
const COAST_LAT: f64 = 29.0;
/// Ground slope north of the coast, metres per degree of latitude.
const SLOPE_M_PER_DEG: f64 = 30.0;

/// Shared analytic terrain so the basin grid and the DEM agree.
fn terrain_m(lon: f64, lat: f64) -> f64 {
    let base = (lat - COAST_LAT) * SLOPE_M_PER_DEG;
    if base < 0.0 {
        // Sea floor deepens offshore.
        (base * 40.0 / SLOPE_M_PER_DEG - 2.0).min(-1.0)
    } else {
        // Gentle alongshore ripple, kept above the waterline.
        base + (0.1 * ((lon - LON0) * 40.0).sin()).max(-0.09)
    }
}

pub const YEARS: std::ops::Range<i32> = 2010..2019;
pub const PANEL_YEARS: std::ops::Range<i32> = 2012..2019;
pub const LOANS_PER_ZONE_YEAR: usize = 50;
const ZONE_SIZE_DEG: f64 = 0.06;
const ZONE_LAT0: f64 = 28.92;
const ZONE_LON0: f64 = -90.48;

pub fn synth_generate(cfg: &SynthConfig) -> SynthBundle {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let (nr, na, dem_cells, zone_grid) = match cfg.scale {
        Scale::Small => (32, 64, 60, 8),
        Scale::Medium => (64, 128, 120, 10),
    };

    // Basin: polar annulus whose outer rings cover the coastal strip.
    let pole_lon = -90.2;
    let pole_lat = 28.5;
    let radial_edges: Vec<f64> = (0..=nr).map(|k| 40_000.0 + 2_000.0 * k as f64).collect();
    let proj = floodrisk_core::geom::proj::LocalProjection::new(pole_lon, pole_lat);
    let mut cell_elevation = Vec::with_capacity(nr * na);
    let dth = 2.0 * std::f64::consts::PI / na as f64;
    for i in 0..nr {
        let r = 0.5 * (radial_edges[i] + radial_edges[i + 1]);
        for j in 0..na {
            let th = (j as f64 + 0.5) * dth;
            let (lon, lat) = proj.to_lonlat(floodrisk_core::geom::polygon::Pt::new(
                r * th.cos(),
                r * th.sin(),
            ));
            cell_elevation.push(terrain_m(lon, lat));
        }
    }
    let basin = BasinGrid {
        basin_id: "synth-coastal".into(),
        pole_lon,
        pole_lat,
        radial_edges,
        angular_count: na,
        cell_elevation,
        friction_coeff: vec![1e-4; nr * na],
    };

    // Storm ensembles: 4 landfalls per category, northbound at high tide.
    let mut storms = Vec::new();
    for category in 1..=5u8 {
        for (e, lon) in [-90.4, -90.25, -90.1, -89.95].iter().enumerate() {
            storms.push(StormRow {
                storm_id: format!("c{category}-e{e}"),
                deficit_mb: 12.0 + 13.0 * category as f64,
                rmax_km: 30.0,
                heading_deg: 0.0,
                speed_ms: 5.0,
                landfall_lon: *lon,
                landfall_lat: COAST_LAT,
                category,
                tide_ft: 2.0,
            });
        }
    }

    // DEM sampled from the shared terrain at cell centres.
    let cellsize = 0.01;
    let (ncols, nrows) = (dem_cells, dem_cells);
    let mut elevation_m = Vec::with_capacity(ncols * nrows);
    let mut sea_mask = Vec::with_capacity(ncols * nrows);
    for row in 0..nrows {
        // Row 0 is the northernmost.
        let lat = LAT0 + (nrows - 1 - row) as f64 * cellsize + cellsize / 2.0;
        for col in 0..ncols {
            let lon = LON0 + col as f64 * cellsize + cellsize / 2.0;
            let z = terrain_m(lon, lat);
            elevation_m.push(z);
            sea_mask.push(z < 0.0);
        }
    }
    let dem = DemRaster { ncols, nrows, xll: LON0, yll: LAT0, cellsize, elevation_m, sea_mask };

    // Zone lattice north of the shore; the southern row is coastal water.
    let mut zones = Vec::new();
    let mut surge_prone = BTreeSet::new();
    let mut land_zones = Vec::new();
    for row in 0..zone_grid {
        for col in 0..zone_grid {
            let zone_id = format!("z{row}{col}");
            let x0 = ZONE_LON0 + col as f64 * ZONE_SIZE_DEG;
            let y0 = ZONE_LAT0 + row as f64 * ZONE_SIZE_DEG;
            let geometry = MultiPolygon(vec![Polygon::rect(
                x0,
                y0,
                x0 + ZONE_SIZE_DEG,
                y0 + ZONE_SIZE_DEG,
            )]);
            let population = rng.gen_range(500.0..5000.0_f64).round();
            let center_lat = y0 + ZONE_SIZE_DEG / 2.0;
            if center_lat > COAST_LAT {
                land_zones.push(zone_id.clone());
                if row <= 2 {
                    surge_prone.insert(zone_id.clone());
                }
            }
            zones.push((zone_id, geometry, population));
        }
    }

    // Floodplain band hugging the shore: covers the first land row fully and
    // exactly half of the second.
    let sfha = MultiPolygon(vec![Polygon::rect(LON0, 28.97, LON0 + 0.6, 29.07)]);

    // Banks.
    let mut banks = Vec::new();
    for k in 0..8 {
        let assets = 10f64.powf(8.0 + 0.25 * k as f64);
        banks.push(BankRecord {
            lender_id: format!("B{k}"),
            quarter: "2012Q1".into(),
            assets,
            net_income: assets * rng.gen_range(0.0015..0.003),
            equity: assets * rng.gen_range(0.08..0.12),
            loans: assets * rng.gen_range(0.55..0.70),
            deposits: assets * rng.gen_range(0.60..0.80),
            liquid_assets: assets * rng.gen_range(0.10..0.30),
        });
    }

    // Loans: equal amounts within a zone-year so the interest-only dollar
    // share is exactly the configured count share.
    let io_base = 0.10;
    let mut loans = Vec::new();
    for zone_id in &land_zones {
        let base_amount = 1000 * rng.gen_range(150..350u64);
        let prone = surge_prone.contains(zone_id);
        let io_share = io_base + if prone { cfg.io_gap_ppt / 100.0 } else { 0.0 };
        let io_count = (io_share * LOANS_PER_ZONE_YEAR as f64).round() as usize;
        for year in YEARS {
            let amount = base_amount + 1000 * (year - 2010) as u64;
            for k in 0..LOANS_PER_ZONE_YEAR {
                loans.push(LoanRecord {
                    year,
                    zone_id: zone_id.clone(),
                    amount,
                    agency_flag: rng.gen_bool(0.6),
                    lien: if rng.gen_bool(0.95) { Lien::First } else { Lien::Other },
                    occupancy: if rng.gen_bool(0.92) {
                        Occupancy::Owner
                    } else {
                        Occupancy::Other
                    },
                    property_value: amount * 8 / 5,
                    io_flag: k < io_count,
                    fixed_rate_flag: rng.gen_bool(0.8),
                    doc_type: match rng.gen_range(0..20) {
                        0 => DocType::Nina,
                        1..=3 => DocType::Low,
                        _ => DocType::Full,
                    },
                    lender_id: if rng.gen_bool(0.7) {
                        format!("B{}", rng.gen_range(0..8))
                    } else {
                        format!("N{}", rng.gen_range(0..3))
                    },
                    lender_kind: LenderKind::Bank,
                });
            }
        }
    }
    for l in &mut loans {
        if l.lender_id.starts_with('N') {
            l.lender_kind = LenderKind::NonBank;
        }
    }

    // Demographics for every zone (coastal water rows included, tiny pops).
    let mut demographics = Vec::new();
    for (zone_id, _, population) in &zones {
        demographics.push(DemographicRecord {
            zone_id: zone_id.clone(),
            population: *population,
            median_household_income: (40_000.0 + rng.gen_range(0.0..30_000.0f64)).round(),
            median_age: (32.0 + rng.gen_range(0.0..18.0f64)).round(),
            median_house_value: (150_000.0 + rng.gen_range(0.0..200_000.0f64)).round(),
            median_monthly_owner_cost: (1_000.0 + rng.gen_range(0.0..800.0f64)).round(),
            median_gross_rent: (700.0 + rng.gen_range(0.0..600.0f64)).round(),
            pct_owner_cost_share_income: 18.0 + rng.gen_range(0.0..12.0),
            pct_owner_occupied: 50.0 + rng.gen_range(0.0..35.0),
            pct_mobile_homes: rng.gen_range(0.0..12.0),
            pct_asian: rng.gen_range(0.0..8.0),
            pct_black: rng.gen_range(5.0..30.0),
            pct_white: rng.gen_range(40.0..80.0),
            pct_hispanic: rng.gen_range(2.0..25.0),
            pct_below_poverty: rng.gen_range(5.0..25.0),
            pct_no_health_coverage: rng.gen_range(4.0..18.0),
        });
    }

    // Monthly price/rent panel: common +1%/yr price trend, extra drift in
    // the surge-prone band.
    let mut panel = Vec::new();
    for zone_id in &land_zones {
        let prone = surge_prone.contains(zone_id);
        let rent0 = rng.gen_range(90.0..110.0);
        let ratio0 = rng.gen_range(16.0..20.0);
        for year in PANEL_YEARS {
            let t = (year - PANEL_YEARS.start) as f64;
            let drift = if prone { cfg.drift_per_year * t } else { 0.0 };
            for month in 1..=12u32 {
                let noise = rng.gen_range(-0.002..0.002);
                let rent_index = rent0 * (0.002 * t).exp();
                let price_index = rent_index * ratio0 * (0.01 * t + drift + noise).exp();
                panel.push(PanelRow {
                    zone_id: zone_id.clone(),
                    year,
                    month,
                    price_index,
                    rent_index,
                });
            }
        }
    }

    SynthBundle {
        basin,
        storms,
        dem,
        zones,
        sfha,
        loans,
        banks,
        demographics,
        panel,
        surge_prone,
    }
}

pub fn bundle_paths(dir: &Path) -> Vec<(&'static str, PathBuf)> {
    [
        ("basin", "basin.txt"),
        ("storms", "storms.csv"),
        ("dem", "dem.asc"),
        ("sea_mask", "sea_mask.asc"),
        ("zones", "zones.geojson"),
        ("sfha", "sfha.geojson"),
        ("loans", "loans.csv"),
        ("banks", "banks.csv"),
        ("demographics", "demographics.csv"),
        ("panel", "panel.csv"),
    ]
    .into_iter()
    .map(|(k, f)| (k, dir.join(f)))
    .collect()
}

/// Renders every bundle file to text, in the canonical write order.
pub fn render_bundle(bundle: &SynthBundle) -> Vec<(&'static str, String)> {
    vec![
        ("basin", basin::write_basin(&bundle.basin)),
        ("storms", storm::write_storms(&bundle.storms)),
        ("dem", dem::write_dem(&bundle.dem)),
        ("sea_mask", dem::write_sea_mask(&bundle.dem)),
        ("zones", geojsonio::write_zones(&bundle.zones)),
        ("sfha", geojsonio::write_sfha(&bundle.sfha)),
        ("loans", tables::write_loans(&bundle.loans)),
        ("banks", tables::write_banks(&bundle.banks)),
        ("demographics", tables::write_demographics(&bundle.demographics)),
        ("panel", tables::write_panel(&bundle.panel)),
    ]
}

pub fn write_bundle(bundle: &SynthBundle, dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).invalid(&format!("creating {}", dir.display()))?;
    let paths: std::collections::BTreeMap<&str, PathBuf> = bundle_paths(dir).into_iter().collect();
    let mut written = Vec::new();
    for (key, text) in render_bundle(bundle) {
        let path = &paths[key];
        std::fs::write(path, text).invalid(&format!("writing {}", path.display()))?;
        written.push(path.clone());
    }
    Ok(written)
}
