//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for data or model errors, 2 for configuration
//! and usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::equilibrium::{simulate_equilibrium, SimConfig, SimError};
use crate::ingest::{self, IngestError, NetworkDaySeries};
use crate::pos::{closed_form, pos_bounds, PosError, PosParams, PosScenario};
use crate::pow::{annual_series_parallel, Bound, PowError, PowYearTables};
use crate::projection::{
    adoption_quantiles, crossing_year, fit_logistic, project_adoption_emissions,
    project_logistic_emissions, temperature_rise, EmissionTrajectory, ProjectionError,
};
use crate::report::{self, Crossings, Format, Report};
use crate::scenario::{ScenarioError, ScenarioFile};
use crate::units::EmissionFactor;
use crate::weighting::{weighted_factors, WeightedFactors, WeightingError};

#[derive(Debug, Parser)]
#[command(
    name = "chaincarbon",
    version,
    about = "Energy and carbon bounds for PoW and PoS blockchains"
)]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for evaluating years in parallel.
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annual lower/upper energy and carbon of a proof-of-work network.
    PowFootprint,
    /// Node count, energy and carbon of a proof-of-stake network.
    PosFootprint {
        /// Total tokens staked.
        #[arg(long)]
        stake: Option<f64>,
        /// Token price in USD.
        #[arg(long)]
        price: Option<f64>,
    },
    /// Emissions and warming projection.
    Project {
        #[arg(long, value_enum)]
        model: ProjectionModel,
    },
    /// Agent-based staker entry, compared with the closed-form node count.
    Equilibrium {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        bound: Option<BoundArg>,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        entry_batch: Option<u64>,
    },
    /// Fit a logistic growth curve to yearly transaction counts.
    FitLogistic {
        /// Transactions CSV (`year,transactions`); defaults to the scenario's dataset.
        #[arg(long, value_name = "PATH")]
        transactions: Option<PathBuf>,
        /// Carrying capacity in transactions per year.
        #[arg(long)]
        k: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectionModel {
    Adoption,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Lower,
    Upper,
}

impl From<BoundArg> for Bound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Lower => Bound::Lower,
            BoundArg::Upper => Bound::Upper,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 1,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Config(e.to_string())
    }
}

macro_rules! model_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Model(e.to_string())
            }
        }
    )*};
}

model_error!(IngestError, PowError, PosError, SimError, WeightingError);

impl From<ProjectionError> for CliError {
    fn from(e: ProjectionError) -> Self {
        match e {
            ProjectionError::CapacityBelowData { .. }
            | ProjectionError::InvalidQuantile(_)
            | ProjectionError::InvalidLogistic { .. }
            | ProjectionError::InvalidClimate => CliError::Config(e.to_string()),
            _ => CliError::Model(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".to_owned()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))?;
    let scenario = match &cli.scenario {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::default(),
    };

    let (report, summary) = pool.install(|| dispatch(cli, &scenario))?;
    if let Some(line) = summary {
        eprintln!("{line}");
    }
    write_output(cli.out.as_deref(), &report.render(cli.format))
}

fn dispatch(cli: &Cli, scenario: &ScenarioFile) -> Result<(Report, Option<String>), CliError> {
    match &cli.command {
        Command::PowFootprint => {
            require_scenario(cli)?;
            Ok((pow_footprint(scenario)?, None))
        }
        Command::PosFootprint { stake, price } => {
            Ok((pos_footprint(scenario, *stake, *price)?, None))
        }
        Command::Project { model } => {
            require_scenario(cli)?;
            let (report, summary) = project(scenario, *model)?;
            Ok((report, Some(summary)))
        }
        Command::Equilibrium {
            seed,
            bound,
            max_steps,
            entry_batch,
        } => Ok((
            equilibrium(
                scenario,
                *seed,
                bound.map(Bound::from),
                *max_steps,
                *entry_batch,
            )?,
            None,
        )),
        Command::FitLogistic { transactions, k } => {
            let path = match transactions {
                Some(p) => p.clone(),
                None => scenario.datasets.transactions.clone().ok_or_else(|| {
                    CliError::Config(
                        "give --transactions or a scenario with datasets.transactions".to_owned(),
                    )
                })?,
            };
            Ok((fit(&path, *k)?, None))
        }
    }
}

fn require_scenario(cli: &Cli) -> Result<(), CliError> {
    if cli.scenario.is_none() {
        return Err(CliError::Config("this command needs --scenario".to_owned()));
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Model(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Model(format!("cannot write output: {e}")))
        }
    }
}

fn dataset<'a>(path: &'a Option<PathBuf>, key: &'static str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::from(ScenarioError::MissingDatasetPath(key)))
}

/// Per-year factor tables for the years in `series`. Explicit per-bound
/// values win over shared ones, which win over the weighted country table.
fn pow_tables(
    scenario: &ScenarioFile,
    series: &NetworkDaySeries,
) -> Result<PowYearTables, CliError> {
    let weighted = match &scenario.datasets.country_profiles_pow {
        Some(path) => Some(weighted_factors(&ingest::load_country_profiles(path)?)?),
        None => None,
    };
    let pow = &scenario.pow;
    let lookup = |specific: &Option<BTreeMap<i32, f64>>,
                  shared: &Option<BTreeMap<i32, f64>>,
                  fallback: Option<f64>,
                  year: i32,
                  what: &str|
     -> Result<f64, CliError> {
        specific
            .as_ref()
            .and_then(|m| m.get(&year))
            .or_else(|| shared.as_ref().and_then(|m| m.get(&year)))
            .copied()
            .or(fallback)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "no {what} for {year}: set it under \"pow\" or give datasets.country_profiles_pow"
                ))
            })
    };
    let factor = |v: f64| EmissionFactor::new(v).map_err(|e| CliError::Config(e.to_string()));

    let mut tables = PowYearTables::default();
    for year in series.years() {
        let ef = weighted.map(|w| w.emission_factor_kgco2_per_kwh);
        let lower = lookup(
            &pow.lower_emission_factor,
            &pow.emission_factor,
            ef,
            year,
            "emission factor",
        )?;
        let upper = lookup(
            &pow.upper_emission_factor,
            &pow.emission_factor,
            ef,
            year,
            "emission factor",
        )?;
        let price = lookup(
            &pow.electricity_price,
            &None,
            weighted.map(|w| w.electricity_price_usd_per_kwh),
            year,
            "electricity price",
        )?;
        tables.lower_factor.insert(year, factor(lower)?);
        tables.upper_factor.insert(year, factor(upper)?);
        tables.electricity_price.insert(year, price);
    }
    Ok(tables)
}

fn pow_footprint(scenario: &ScenarioFile) -> Result<Report, CliError> {
    let series = ingest::load_network_series(dataset(
        &scenario.datasets.network_series,
        "network_series",
    )?)?;
    let catalog = ingest::load_hardware_catalog(dataset(&scenario.datasets.hardware, "hardware")?)?;
    let tables = pow_tables(scenario, &series)?;
    let annual = annual_series_parallel(&series, &catalog, &tables)?;
    Ok(report::pow_report(&annual))
}

fn pos_weighted(scenario: &ScenarioFile) -> Result<WeightedFactors, CliError> {
    if let Some(w) = scenario.pos.weighted {
        return Ok(w);
    }
    match &scenario.datasets.country_profiles_pos {
        Some(path) => Ok(weighted_factors(&ingest::load_country_profiles(path)?)?),
        None => Ok(WeightedFactors::POS_DEFAULT),
    }
}

fn pos_params(scenario: &ScenarioFile) -> Result<PosParams, CliError> {
    Ok(scenario.pos.params(pos_weighted(scenario)?))
}

fn pos_footprint(
    scenario: &ScenarioFile,
    stake: Option<f64>,
    price: Option<f64>,
) -> Result<Report, CliError> {
    let mut params = pos_params(scenario)?;
    if let Some(s) = stake {
        params.total_stake = s;
    }
    if let Some(p) = price {
        params.token_price = p;
    }
    let (lower_hw, upper_hw) = (&scenario.pos.lower_hardware, &scenario.pos.upper_hardware);
    let bounds = pos_bounds(lower_hw, upper_hw, &params)?;
    Ok(report::pos_report(&bounds, &lower_hw.name, &upper_hw.name))
}

fn project(scenario: &ScenarioFile, model: ProjectionModel) -> Result<(Report, String), CliError> {
    let proj = &scenario.projection;
    let trajectory: EmissionTrajectory = match model {
        ProjectionModel::Adoption => {
            let section = proj
                .adoption
                .as_ref()
                .ok_or(ScenarioError::MissingSection("projection.adoption"))?;
            let curves =
                ingest::load_adoption_curves(dataset(&scenario.datasets.adoption, "adoption")?)?;
            let elapsed =
                u32::try_from(proj.start_year - section.introduction_year).map_err(|_| {
                    CliError::Config("introduction_year is after start_year".to_owned())
                })?;
            let adoption = adoption_quantiles(&curves, section.quantile)?.shifted(elapsed);
            project_adoption_emissions(
                section.baseline_annual_mtco2,
                section.current_fraction,
                &adoption,
                proj.start_year,
                proj.horizon_years,
            )?
        }
        ProjectionModel::Logistic => {
            let section = proj
                .logistic
                .as_ref()
                .ok_or(ScenarioError::MissingSection("projection.logistic"))?;
            project_logistic_emissions(
                section.baseline_annual_mtco2,
                section.baseline_tx,
                &section.params,
                proj.start_year,
                proj.horizon_years,
            )?
        }
    };
    let bands = temperature_rise(&trajectory, &scenario.climate);
    let crossings = Crossings {
        threshold_c: proj.threshold_c,
        low: crossing_year(&bands.low, proj.start_year, proj.threshold_c),
        mean: crossing_year(&bands.mean, proj.start_year, proj.threshold_c),
        high: crossing_year(&bands.high, proj.start_year, proj.threshold_c),
    };
    Ok((
        report::projection_report(&trajectory, &bands, &crossings),
        crossings.summary(),
    ))
}

fn equilibrium(
    scenario: &ScenarioFile,
    seed: u64,
    bound: Option<Bound>,
    max_steps: Option<u64>,
    entry_batch: Option<u64>,
) -> Result<Report, CliError> {
    let section = &scenario.equilibrium;
    let bound = bound.unwrap_or(section.bound);
    let pos_scenario =
        PosScenario::new(pos_params(scenario)?, scenario.pos.hardware(bound).clone())?;
    let closed = closed_form::node_count(&pos_scenario);
    let config = SimConfig {
        scenario: pos_scenario,
        entry_batch: entry_batch.unwrap_or(section.entry_batch),
        max_steps: max_steps.unwrap_or(section.max_steps),
        seed,
    };
    let outcome = simulate_equilibrium(&config).map_err(|e| match e {
        SimError::InvalidConfig => CliError::Config(e.to_string()),
        other => other.into(),
    })?;
    Ok(report::equilibrium_report(bound, seed, &outcome, closed))
}

fn fit(path: &Path, k: f64) -> Result<Report, CliError> {
    if !path.exists() {
        return Err(CliError::Config(format!(
            "transactions file not found: {}",
            path.display()
        )));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(CliError::Config(format!("--k must be positive, got {k}")));
    }
    let series = ingest::load_transaction_series(path)?;
    let fit = fit_logistic(&series, k)?;
    Ok(report::fit_report(&fit))
}
