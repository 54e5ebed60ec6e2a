//! Sequential pipeline driver: parse → simulate → classify → exposure
//! tables → regression → manifest. Every stage is deterministic for a fixed
//! config, so a rerun writes byte-identical outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use floodrisk_core::econ::{
    build_design, national_trend, ols_fit, trend_series, twoway_clustered_cov, ClusterConfig,
    Family, Outcome, PanelObservation, RegressionResult, TrendPoint,
};
use floodrisk_core::exposure::{
    demographics_by_zone, feature_shares_by_zone, filter_loans_mcdash, lender_ratios_by_zone,
    originations_by_zone_year, BankRecord, DemographicRecord, FeatureTable, LoanRecord,
};
use floodrisk_core::geom::cells::all_cell_polygons;
use floodrisk_core::geom::join::{
    build_cell_index, surge_above_ground, zone_cell_join, zone_max_surge, ZoneRecord,
};
use floodrisk_core::geom::polygon::MultiPolygon;
use floodrisk_core::geom::sfha::{sfha_area_share, shared_projection};
use floodrisk_core::geom::slr::{slr_inundation, zone_slr_flags, DemRaster};
use floodrisk_core::surge::{
    compute_mom, run_storm_meow, BasinGrid, MomField, SimConfig, WindModel,
};
use floodrisk_core::zones::{classify, ClassifyConfig, Comparator, ZoneClassification, ZoneFlag};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::diag::Diagnostics;
use crate::errors::{numerical, validation, CliResult, Contextual};
use crate::formats::storm::StormRow;
use crate::formats::tables::PanelRow;
use crate::formats::{classification, dem, fmt_f64, geojsonio, grids, storm, tables};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub basin: PathBuf,
    pub storms: PathBuf,
    pub dem: PathBuf,
    pub sea_mask: PathBuf,
    pub zones: PathBuf,
    /// Optional: without it the floodplain tables are marked unavailable.
    pub sfha: Option<PathBuf>,
    pub loans: PathBuf,
    pub banks: PathBuf,
    pub demographics: PathBuf,
    pub panel: PathBuf,
    /// Ascending surge thresholds in feet.
    pub thresholds_ft: Vec<f64>,
    pub category: u8,
    pub tide_ft: f64,
    pub comparator: Comparator,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Decimal places for rendered percentage tables.
    pub decimals: u32,
    /// Balance-sheet snapshot used for the lender table.
    pub lender_year: i32,
    pub lender_quarter: String,
}

impl PipelineConfig {
    /// Config over a bundle directory laid out by [`crate::synth::write_bundle`].
    pub fn from_bundle_dir(dir: &Path, out_dir: &Path) -> Self {
        let paths: BTreeMap<&str, PathBuf> = crate::synth::bundle_paths(dir).into_iter().collect();
        PipelineConfig {
            basin: paths["basin"].clone(),
            storms: paths["storms"].clone(),
            dem: paths["dem"].clone(),
            sea_mask: paths["sea_mask"].clone(),
            zones: paths["zones"].clone(),
            sfha: Some(paths["sfha"].clone()),
            loans: paths["loans"].clone(),
            banks: paths["banks"].clone(),
            demographics: paths["demographics"].clone(),
            panel: paths["panel"].clone(),
            thresholds_ft: vec![5.0, 10.0, 15.0, 20.0],
            category: 4,
            tide_ft: 2.0,
            comparator: Comparator::Ge,
            out_dir: out_dir.to_path_buf(),
            seed: 7,
            decimals: 2,
            lender_year: 2012,
            lender_quarter: "2012Q1".into(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.thresholds_ft.is_empty() {
            return Err(validation(anyhow!("no surge thresholds configured")));
        }
        if !self.thresholds_ft.windows(2).all(|w| w[0] < w[1])
            || self.thresholds_ft[0] <= 0.0
        {
            return Err(validation(anyhow!(
                "thresholds must be positive and strictly ascending, got {:?}",
                self.thresholds_ft
            )));
        }
        if !(1..=5).contains(&self.category) {
            return Err(validation(anyhow!("category {} outside 1..=5", self.category)));
        }
        Ok(())
    }

    fn classify_config(&self) -> ClassifyConfig {
        ClassifyConfig {
            thresholds_ft: self.thresholds_ft.clone(),
            category: self.category,
            tide_offset_ft: self.tide_ft,
            comparator: self.comparator,
        }
    }

    /// Index of the headline surge band: the threshold closest to 15 ft.
    pub fn headline_threshold(&self) -> usize {
        self.thresholds_ft
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (*a - 15.0).abs().partial_cmp(&(*b - 15.0).abs()).expect("finite thresholds")
            })
            .map(|(k, _)| k)
            .expect("validated non-empty")
    }
}

/// Everything parsed from disk, before any computation.
#[derive(Debug)]
pub struct Dataset {
    pub basin: BasinGrid,
    pub storms: Vec<StormRow>,
    pub dem: DemRaster,
    pub zones: Vec<ZoneRecord>,
    pub populations: BTreeMap<String, f64>,
    pub sfha: Option<MultiPolygon>,
    pub loans: Vec<LoanRecord>,
    pub banks: Vec<BankRecord>,
    pub demographics: Vec<DemographicRecord>,
    pub panel: Vec<PanelRow>,
}

pub fn parse_inputs(config: &PipelineConfig, diags: &mut Diagnostics) -> CliResult<Dataset> {
    config.validate()?;
    let basin = crate::formats::basin::read_basin(&config.basin)?;
    let storms = storm::read_storms(&config.storms, diags)?;
    let dem = dem::read_dem(&config.dem, &config.sea_mask)?;
    let (zones, populations) = geojsonio::read_zones(&config.zones, diags)?;
    let sfha = match &config.sfha {
        Some(path) if path.exists() => Some(geojsonio::read_sfha(path, diags)?),
        _ => None,
    };
    let loans = tables::parse_loans(&tables::read_to_string(&config.loans)?, &config.loans.display().to_string(), diags)?;
    let banks = tables::parse_banks(&tables::read_to_string(&config.banks)?, &config.banks.display().to_string(), diags)?;
    let demographics = tables::parse_demographics(
        &tables::read_to_string(&config.demographics)?,
        &config.demographics.display().to_string(),
        diags,
    )?;
    let panel = tables::parse_panel(
        &tables::read_to_string(&config.panel)?,
        &config.panel.display().to_string(),
        diags,
    )?;
    Ok(Dataset { basin, storms, dem, zones, populations, sfha, loans, banks, demographics, panel })
}

/// Simulates the selected category/tide ensemble and reduces it to one MOM.
pub fn simulate_scenario(
    basin: &BasinGrid,
    storms: &[StormRow],
    category: u8,
    tide_ft: f64,
) -> CliResult<MomField> {
    let selected: Vec<&StormRow> = storms
        .iter()
        .filter(|s| s.category == category && s.tide_ft == tide_ft)
        .collect();
    if selected.is_empty() {
        return Err(validation(anyhow!(
            "no storms for category {category} at tide {tide_ft} ft"
        )));
    }
    let wind = WindModel::default();
    let sim = SimConfig::default();
    let meows: Result<Vec<_>, _> = selected
        .par_iter()
        .map(|row| run_storm_meow(basin, &row.to_params(), &wind, &sim))
        .collect();
    let meows = meows.map_err(numerical)?;
    compute_mom(&meows).map_err(numerical)
}

/// Joins a MOM, floodplain, and SLR layers onto the zone universe.
#[allow(clippy::too_many_arguments)]
pub fn classify_stage(
    basin: &BasinGrid,
    mom: &MomField,
    zones: &[ZoneRecord],
    populations: &BTreeMap<String, f64>,
    sfha: Option<&MultiPolygon>,
    dem: &DemRaster,
    cfg: &ClassifyConfig,
    zones_file: &str,
    diags: &mut Diagnostics,
) -> CliResult<Vec<ZoneClassification>> {
    let cells = all_cell_polygons(basin);
    let index = build_cell_index(&cells);
    let join = zone_cell_join(zones, &cells, &index);
    for e in &join.errors {
        diags.push(zones_file, 0, e.to_string());
    }
    let surge_ft = surge_above_ground(mom, &basin.cell_elevation);
    let surge = zone_max_surge(zones, &[(join, surge_ft)]);

    let proj = shared_projection(zones);
    let mut sfha_share = BTreeMap::new();
    if let Some(sfha) = sfha {
        for zone in zones {
            match sfha_area_share(zone, sfha, &proj) {
                Ok(v) => {
                    sfha_share.insert(zone.zone_id.clone(), v);
                }
                Err(e) => diags.push(zones_file, 0, e.to_string()),
            }
        }
    }

    let slr3 = zone_slr_flags(dem, &slr_inundation(dem, 3.0).map_err(numerical)?, zones);
    let slr6 = zone_slr_flags(dem, &slr_inundation(dem, 6.0).map_err(numerical)?, zones);
    Ok(classify(&surge, &sfha_share, &slr3, &slr6, populations, cfg))
}

/// Fitted regression plus its extracted series for one outcome.
#[derive(Debug, Clone)]
pub struct RegressionOutput {
    pub result: RegressionResult,
    pub surge_trend: Vec<TrendPoint>,
    pub sfha_trend: Vec<TrendPoint>,
    pub national: Vec<TrendPoint>,
}

pub fn fit_panel(observations: &[PanelObservation], outcome: Outcome) -> CliResult<RegressionOutput> {
    let base_year = observations
        .iter()
        .map(|o| o.year)
        .min()
        .ok_or_else(|| validation(anyhow!("empty panel")))?;
    let (design, y) = build_design(observations, base_year, outcome).map_err(numerical)?;
    let fit = ols_fit(&design.x, &y, &design.names).map_err(numerical)?;
    let cov = twoway_clustered_cov(
        &design.x,
        &fit.residuals,
        &design.zone_cluster,
        &design.year_cluster,
        &ClusterConfig::default(),
    )
    .map_err(numerical)?;
    let result = RegressionResult::new(&design, &fit, &cov);
    Ok(RegressionOutput {
        surge_trend: trend_series(&result, Family::Surge15),
        sfha_trend: trend_series(&result, Family::Sfha),
        national: national_trend(&result),
        result,
    })
}

#[derive(Debug)]
pub struct PipelineReport {
    pub outputs: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    pub diagnostics_path: PathBuf,
    pub classification: Vec<ZoneClassification>,
    /// McDash-filtered feature shares for the headline surge band.
    pub features_surge: FeatureTable,
    pub regression: RegressionOutput,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn hash_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).invalid(&format!("hashing {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

pub struct OutputWriter {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutputWriter {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).invalid(&format!("creating {}", dir.display()))?;
        Ok(OutputWriter { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, text: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).invalid(&format!("writing {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> CliResult<PipelineReport> {
    let mut diags = Diagnostics::default();
    let data = parse_inputs(config, &mut diags)?;
    std::fs::create_dir_all(&config.out_dir)
        .invalid(&format!("creating {}", config.out_dir.display()))?;
    let mut out = OutputWriter { dir: config.out_dir.clone(), written: Vec::new() };

    // Surge scenario: ensemble MOM, then per-zone maxima above ground.
    let mom = simulate_scenario(&data.basin, &data.storms, config.category, config.tide_ft)?;
    out.write(
        "mom.txt",
        &grids::write_mom(&mom, data.basin.radial_count(), data.basin.angular_count),
    )?;
    let cls_cfg = config.classify_config();
    let cls = classify_stage(
        &data.basin,
        &mom,
        &data.zones,
        &data.populations,
        data.sfha.as_ref(),
        &data.dem,
        &cls_cfg,
        &config.zones.display().to_string(),
        &mut diags,
    )?;
    out.write("classification.csv", &classification::write_classification(&cls, &cls_cfg))?;

    let surge_flag = ZoneFlag::Surge(config.headline_threshold());
    let features_surge = write_exposure_tables(
        &mut out,
        &data.loans,
        &data.banks,
        &data.demographics,
        &cls,
        surge_flag,
        data.sfha.is_some(),
        config.decimals,
        config.lender_year,
        &config.lender_quarter,
    )?;

    // Regression: panel rows joined with the classification's zone flags.
    let observations =
        panel_observations(&data.panel, &cls, surge_flag, &config.panel.display().to_string(), &mut diags);
    let regression = write_regression_outputs(&mut out, &observations)?;

    // Diagnostics, then the manifest over everything.
    let mut diag_bytes = Vec::new();
    diags.emit(&mut diag_bytes).invalid("serializing diagnostics")?;
    let diagnostics_path =
        out.write("diagnostics.jsonl", &String::from_utf8(diag_bytes).expect("utf8 json"))?;

    let mut inputs = BTreeMap::new();
    let mut input_paths = vec![
        &config.basin,
        &config.storms,
        &config.dem,
        &config.sea_mask,
        &config.zones,
        &config.loans,
        &config.banks,
        &config.demographics,
        &config.panel,
    ];
    if let Some(p) = &config.sfha {
        if p.exists() {
            input_paths.push(p);
        }
    }
    for p in input_paths {
        inputs.insert(
            p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            hash_file(p)?,
        );
    }
    let mut outputs = BTreeMap::new();
    for p in &out.written {
        outputs.insert(
            p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            hash_file(p)?,
        );
    }
    let manifest = serde_json::json!({
        "category": config.category,
        "tide_ft": config.tide_ft,
        "comparator": config.comparator.as_str(),
        "seed": config.seed,
        "inputs": inputs,
        "outputs": outputs,
    });
    let manifest_path = config.out_dir.join("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("serializable") + "\n",
    )
    .invalid(&format!("writing {}", manifest_path.display()))?;

    let mut all_outputs = out.written;
    all_outputs.push(manifest_path.clone());
    Ok(PipelineReport {
        outputs: all_outputs,
        manifest_path,
        diagnostics_path,
        classification: cls,
        features_surge,
        regression,
    })
}

/// Joins panel rows with the classification's time-invariant zone flags.
pub fn panel_observations(
    panel: &[PanelRow],
    cls: &[ZoneClassification],
    surge_flag: ZoneFlag,
    panel_file: &str,
    diags: &mut Diagnostics,
) -> Vec<PanelObservation> {
    let by_zone: BTreeMap<&str, &ZoneClassification> =
        cls.iter().map(|z| (z.zone_id.as_str(), z)).collect();
    let mut observations = Vec::new();
    for row in panel {
        match by_zone.get(row.zone_id.as_str()) {
            Some(z) => observations.push(row.to_observation(
                surge_flag.is_set(z),
                ZoneFlag::SfhaMajority.is_set(z),
            )),
            None => diags.push(
                panel_file,
                0,
                format!("panel zone {} not in the classification", row.zone_id),
            ),
        }
    }
    observations
}

/// Tables 1–4 plus the Figure-3 series. The origination panels run on
/// unfiltered loans; the product-feature panels use the serviced-loan filter.
#[allow(clippy::too_many_arguments)]
pub fn write_exposure_tables(
    out: &mut OutputWriter,
    loans: &[LoanRecord],
    banks: &[BankRecord],
    demographics: &[DemographicRecord],
    cls: &[ZoneClassification],
    surge_flag: ZoneFlag,
    sfha_available: bool,
    decimals: u32,
    lender_year: i32,
    lender_quarter: &str,
) -> CliResult<FeatureTable> {
    let panels: [(&str, ZoneFlag, bool); 4] = [
        ("table1_surge.csv", surge_flag, true),
        ("table1_sfha.csv", ZoneFlag::SfhaMajority, sfha_available),
        ("table1_slr3.csv", ZoneFlag::Slr3, true),
        ("table1_slr6.csv", ZoneFlag::Slr6, true),
    ];
    for (name, flag, available) in panels {
        let text = if available {
            tables::render_originations(&originations_by_zone_year(loans, cls, flag), decimals)
        } else {
            "unavailable,no floodplain input\n".to_string()
        };
        out.write(name, &text)?;
    }

    let filtered = filter_loans_mcdash(loans);
    let features_surge = feature_shares_by_zone(&filtered, cls, surge_flag);
    out.write("table2_surge.csv", &tables::render_features(&features_surge, decimals))?;
    let features_sfha_text = if sfha_available {
        tables::render_features(
            &feature_shares_by_zone(&filtered, cls, ZoneFlag::SfhaMajority),
            decimals,
        )
    } else {
        "unavailable,no floodplain input\n".to_string()
    };
    out.write("table2_sfha.csv", &features_sfha_text)?;

    let group_flags: Vec<(String, ZoneFlag)> = if sfha_available {
        vec![
            ("surge".into(), surge_flag),
            ("sfha".into(), ZoneFlag::SfhaMajority),
            ("slr6".into(), ZoneFlag::Slr6),
        ]
    } else {
        vec![("surge".into(), surge_flag), ("slr6".into(), ZoneFlag::Slr6)]
    };
    out.write(
        "table3_demographics.csv",
        &tables::render_demographics(&demographics_by_zone(demographics, cls, &group_flags)),
    )?;
    out.write(
        "table4_lenders.csv",
        &tables::render_lenders(&lender_ratios_by_zone(
            loans,
            banks,
            cls,
            &group_flags,
            lender_year,
            lender_quarter,
        )),
    )?;

    // Figure 3: per-year unfiltered feature shares, in vs out of the surge band.
    let figure3 = feature_shares_by_zone(loans, cls, surge_flag);
    let mut fig3 = String::from("year,feature,in_zone_pct,out_zone_pct\n");
    for row in &figure3.rows {
        let cells: [(&str, Option<f64>, Option<f64>); 4] = [
            ("io", row.in_zone.io_pct(), row.out_zone.io_pct()),
            ("fixed_rate", row.in_zone.fixed_rate_pct(), row.out_zone.fixed_rate_pct()),
            ("full_doc", row.in_zone.full_doc_pct(), row.out_zone.full_doc_pct()),
            ("nina", row.in_zone.nina_pct(), row.out_zone.nina_pct()),
        ];
        for (feature, inside, outside) in cells {
            let f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            fig3.push_str(&format!("{},{feature},{},{}\n", row.year, f(inside), f(outside)));
        }
    }
    out.write("figure3.csv", &fig3)?;
    Ok(features_surge)
}

/// Fits the price-to-rent regression and writes the coefficient table plus
/// the Figure-4 trend series.
pub fn write_regression_outputs(
    out: &mut OutputWriter,
    observations: &[PanelObservation],
) -> CliResult<RegressionOutput> {
    let regression = fit_panel(observations, Outcome::LogPriceToRent)?;
    let mut coef = String::from("name,estimate,std_error\n");
    for name in &regression.result.names {
        let (b, se) = regression.result.coefficient(name).expect("own name");
        coef.push_str(&format!("{name},{},{}\n", fmt_f64(b), fmt_f64(se)));
    }
    out.write("coefficients.csv", &coef)?;
    let mut fig4 = String::from("family,year,estimate,lower95,upper95\n");
    for (label, series) in [
        ("surge15", &regression.surge_trend),
        ("sfha", &regression.sfha_trend),
        ("national", &regression.national),
    ] {
        for p in series {
            fig4.push_str(&format!(
                "{label},{},{},{},{}\n",
                p.year,
                fmt_f64(p.estimate),
                fmt_f64(p.lower95),
                fmt_f64(p.upper95)
            ));
        }
    }
    out.write("figure4.csv", &fig4)?;
    Ok(regression)
}
