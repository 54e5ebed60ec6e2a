//! `floodrisk` — coastal flood-risk pipeline driver.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical failure.
//! Row-level diagnostics go to stderr as JSON lines; the `pipeline`
//! subcommand also persists them next to its outputs.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use floodrisk_cli::diag::Diagnostics;
use floodrisk_cli::errors::{validation, CliResult};
use floodrisk_cli::formats::{basin, classification, dem, geojsonio, grids, storm, tables};
use floodrisk_cli::pipeline::{
    classify_stage, panel_observations, run_pipeline, OutputWriter, PipelineConfig,
};
use floodrisk_cli::synth::{synth_generate, write_bundle, Scale, SynthConfig};
use floodrisk_core::surge::compute_mom;
use floodrisk_core::zones::{ClassifyConfig, Comparator, ZoneFlag};

/// Overrides every `--out` when set.
const OUT_DIR_ENV: &str = "FLOODRISK_OUT_DIR";

#[derive(Parser)]
#[command(name = "floodrisk", version, about = "Coastal flood-risk pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ComparatorArg {
    Ge,
    Gt,
}

impl From<ComparatorArg> for Comparator {
    fn from(c: ComparatorArg) -> Comparator {
        match c {
            ComparatorArg::Ge => Comparator::Ge,
            ComparatorArg::Gt => Comparator::Gt,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScaleArg {
    Small,
    Medium,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Storm category of the scenario.
    #[arg(long, default_value_t = 4)]
    category: u8,
    /// Tide offset of the scenario, feet.
    #[arg(long, default_value_t = 2.0)]
    tide: f64,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output directory (overridden by FLOODRISK_OUT_DIR).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl OutArg {
    fn dir(&self) -> PathBuf {
        std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| self.out.clone())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one category/tide ensemble: a MEOW file per storm.
    Simulate {
        #[arg(long)]
        basin: PathBuf,
        #[arg(long)]
        storms: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Reduce MEOW files of one scenario to their pointwise maximum.
    Mom {
        /// MEOW files produced by `simulate`.
        #[arg(required = true)]
        meows: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Classify zones from a MOM, floodplain, and DEM.
    Classify {
        #[arg(long)]
        basin: PathBuf,
        /// MOM envelope file for the scenario.
        #[arg(long)]
        mom: PathBuf,
        #[arg(long)]
        zones: PathBuf,
        #[arg(long)]
        sfha: Option<PathBuf>,
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        sea_mask: PathBuf,
        /// Surge thresholds in feet, ascending (repeatable).
        #[arg(long = "threshold-ft", default_values_t = [5.0, 10.0, 15.0, 20.0])]
        thresholds_ft: Vec<f64>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = ComparatorArg::Ge)]
        comparator: ComparatorArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exposure tables 1–4 and the Figure-3 series from a classification.
    Exposure {
        #[arg(long)]
        classification: PathBuf,
        #[arg(long)]
        loans: PathBuf,
        #[arg(long)]
        banks: PathBuf,
        #[arg(long)]
        demographics: PathBuf,
        /// Treat the floodplain columns as unavailable.
        #[arg(long)]
        no_sfha: bool,
        #[arg(long, default_value_t = 2)]
        decimals: u32,
        #[arg(long, default_value_t = 2012)]
        lender_year: i32,
        #[arg(long, default_value = "2012Q1")]
        lender_quarter: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Price-to-rent regression and the Figure-4 trend series.
    Regress {
        #[arg(long)]
        classification: PathBuf,
        #[arg(long)]
        panel: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Generate a deterministic synthetic input bundle.
    Synth {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ScaleArg::Small)]
        scale: ScaleArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the full pipeline over a bundle directory.
    Pipeline {
        /// Directory laid out like a synthetic bundle.
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long = "threshold-ft", default_values_t = [5.0, 10.0, 15.0, 20.0])]
        thresholds_ft: Vec<f64>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = ComparatorArg::Ge)]
        comparator: ComparatorArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        decimals: u32,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() {
    let cli = Cli::parse();
    let mut diags = Diagnostics::default();
    let code = match run(cli.command, &mut diags) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.kind(), "message": e.to_string() })
            );
            e.exit_code()
        }
    };
    let _ = diags.emit(std::io::stderr().lock());
    std::process::exit(code);
}

fn run(command: Command, diags: &mut Diagnostics) -> CliResult<()> {
    match command {
        Command::Simulate { basin: basin_path, storms, scenario, out } => {
            let basin = basin::read_basin(&basin_path)?;
            let rows = storm::read_storms(&storms, diags)?;
            let selected: Vec<_> = rows
                .iter()
                .filter(|s| s.category == scenario.category && s.tide_ft == scenario.tide)
                .collect();
            if selected.is_empty() {
                return Err(validation(anyhow!(
                    "no storms for category {} at tide {} ft",
                    scenario.category,
                    scenario.tide
                )));
            }
            let mut writer = OutputWriter::new(&out.dir())?;
            let wind = floodrisk_core::surge::WindModel::default();
            let sim = floodrisk_core::surge::SimConfig::default();
            for row in selected {
                let meow =
                    floodrisk_core::surge::run_storm_meow(&basin, &row.to_params(), &wind, &sim)
                        .map_err(floodrisk_cli::errors::numerical)?;
                let path = writer.write(
                    &format!("meow_{}.txt", row.storm_id),
                    &grids::write_meow(&meow, basin.radial_count(), basin.angular_count),
                )?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Mom { meows, out } => {
            let fields: Vec<_> =
                meows.iter().map(|p| grids::read_meow(p)).collect::<CliResult<_>>()?;
            let mom = compute_mom(&fields).map_err(floodrisk_cli::errors::numerical)?;
            // Envelope files do not carry the basin's (nr, na) split, so the
            // reduced grid is written as one row; readers treat the shape as
            // layout only.
            let n = mom.max_eta_m.len();
            let mut writer = OutputWriter::new(&out.dir())?;
            let path = writer.write("mom.txt", &grids::write_mom(&mom, 1, n))?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Classify {
            basin: basin_path,
            mom,
            zones,
            sfha,
            dem: dem_path,
            sea_mask,
            thresholds_ft,
            scenario,
            comparator,
            out,
        } => {
            let basin = basin::read_basin(&basin_path)?;
            let mom = grids::read_mom(&mom)?;
            let raster = dem::read_dem(&dem_path, &sea_mask)?;
            let (zone_records, populations) = geojsonio::read_zones(&zones, diags)?;
            let sfha_parts = match &sfha {
                Some(path) => Some(geojsonio::read_sfha(path, diags)?),
                None => None,
            };
            let cfg = ClassifyConfig {
                thresholds_ft,
                category: scenario.category,
                tide_offset_ft: scenario.tide,
                comparator: comparator.into(),
            };
            let cls = classify_stage(
                &basin,
                &mom,
                &zone_records,
                &populations,
                sfha_parts.as_ref(),
                &raster,
                &cfg,
                &zones.display().to_string(),
                diags,
            )?;
            let mut writer = OutputWriter::new(&out.dir())?;
            let path = writer
                .write("classification.csv", &classification::write_classification(&cls, &cfg))?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Exposure {
            classification: cls_path,
            loans,
            banks,
            demographics,
            no_sfha,
            decimals,
            lender_year,
            lender_quarter,
            out,
        } => {
            let (cls, cfg) = classification::read_classification(&cls_path, diags)?;
            let loans = tables::parse_loans(
                &tables::read_to_string(&loans)?,
                &loans.display().to_string(),
                diags,
            )?;
            let banks = tables::parse_banks(
                &tables::read_to_string(&banks)?,
                &banks.display().to_string(),
                diags,
            )?;
            let demo = tables::parse_demographics(
                &tables::read_to_string(&demographics)?,
                &demographics.display().to_string(),
                diags,
            )?;
            let surge_flag = ZoneFlag::Surge(headline_threshold(&cfg.thresholds_ft));
            let mut writer = OutputWriter::new(&out.dir())?;
            floodrisk_cli::pipeline::write_exposure_tables(
                &mut writer,
                &loans,
                &banks,
                &demo,
                &cls,
                surge_flag,
                !no_sfha,
                decimals,
                lender_year,
                &lender_quarter,
            )?;
            for p in &writer.written {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Regress { classification: cls_path, panel, out } => {
            let (cls, cfg) = classification::read_classification(&cls_path, diags)?;
            let rows = tables::parse_panel(
                &tables::read_to_string(&panel)?,
                &panel.display().to_string(),
                diags,
            )?;
            let surge_flag = ZoneFlag::Surge(headline_threshold(&cfg.thresholds_ft));
            let observations =
                panel_observations(&rows, &cls, surge_flag, &panel.display().to_string(), diags);
            let mut writer = OutputWriter::new(&out.dir())?;
            floodrisk_cli::pipeline::write_regression_outputs(&mut writer, &observations)?;
            for p in &writer.written {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Synth { seed, scale, out } => {
            let cfg = SynthConfig {
                seed,
                scale: match scale {
                    ScaleArg::Small => Scale::Small,
                    ScaleArg::Medium => Scale::Medium,
                },
                ..SynthConfig::default()
            };
            let bundle = synth_generate(&cfg);
            for p in write_bundle(&bundle, &out.dir())? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Pipeline { inputs, thresholds_ft, scenario, comparator, seed, decimals, out } => {
            let mut config = PipelineConfig::from_bundle_dir(&inputs, &out.dir());
            config.thresholds_ft = thresholds_ft;
            config.category = scenario.category;
            config.tide_ft = scenario.tide;
            config.comparator = comparator.into();
            config.seed = seed;
            config.decimals = decimals;
            let report = run_pipeline(&config)?;
            for p in &report.outputs {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

/// Index of the threshold closest to the 15 ft headline band.
fn headline_threshold(thresholds_ft: &[f64]) -> usize {
    thresholds_ft
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - 15.0).abs().partial_cmp(&(*b - 15.0).abs()).expect("finite thresholds")
        })
        .map(|(k, _)| k)
        .unwrap_or(0)
}

