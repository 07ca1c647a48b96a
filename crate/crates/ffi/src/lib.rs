//! C ABI over the `chaincarbon` models.
//!
//! Every fallible function returns a [`CcStatus`] and writes its result
//! through an out-pointer. On failure a description of the last error on the
//! calling thread is available from [`cc_last_error_message`].
//!
//! Objects behind opaque handles (`CcPosScenario`, `CcCountryTable`,
//! `CcTrajectory`) are created by `cc_*_new`/`cc_*_load`/`cc_project_*` and
//! must be released with the matching `cc_*_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chaincarbon::equilibrium::{
    simulate_equilibrium, SimConfig, SimError, DEFAULT_ENTRY_BATCH, DEFAULT_MAX_STEPS,
};
use chaincarbon::ingest::{
    self, CountryProfileTable, IngestError, TransactionRecord, TransactionSeries,
};
use chaincarbon::pos::{self, PosError, PosParams, PosScenario};
use chaincarbon::pow::{self, DailyRewards};
use chaincarbon::projection::{
    self, adoption_quantiles, project_adoption_emissions, project_logistic_emissions,
    EmissionTrajectory, LogisticParams, ProjectionError,
};
use chaincarbon::weighting::{weighted_factors, WeightedFactors};
use chaincarbon::{HardwareSpec, MoneyRate, UnitError};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Data = 4,
    ZeroReturn = 5,
    NonConvergence = 6,
    InsufficientData = 7,
    FitDivergence = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(CcStatus, String);

impl From<UnitError> for Failure {
    fn from(e: UnitError) -> Self {
        Failure(CcStatus::InvalidArgument, e.to_string())
    }
}

impl From<pow::PowError> for Failure {
    fn from(e: pow::PowError) -> Self {
        Failure(CcStatus::InvalidArgument, e.to_string())
    }
}

impl From<PosError> for Failure {
    fn from(e: PosError) -> Self {
        let status = match e {
            PosError::ZeroReturn => CcStatus::ZeroReturn,
            PosError::Invalid(_) => CcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NonConvergence { .. } => Failure(CcStatus::NonConvergence, e.to_string()),
            SimError::InvalidConfig => Failure(CcStatus::InvalidArgument, e.to_string()),
            SimError::Model(m) => m.into(),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        let status = match e {
            IngestError::Io { .. } => CcStatus::Io,
            _ => CcStatus::Data,
        };
        Failure(status, e.to_string())
    }
}

impl From<ProjectionError> for Failure {
    fn from(e: ProjectionError) -> Self {
        let status = match e {
            ProjectionError::InsufficientData(_) => CcStatus::InsufficientData,
            ProjectionError::FitDivergence(_) => CcStatus::FitDivergence,
            ProjectionError::EmptySet | ProjectionError::NonPositiveObservation { .. } => {
                CcStatus::Data
            }
            _ => CcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<chaincarbon::weighting::WeightingError> for Failure {
    fn from(e: chaincarbon::weighting::WeightingError) -> Self {
        Failure(CcStatus::Data, e.to_string())
    }
}

fn null() -> Failure {
    Failure(CcStatus::NullPointer, "null pointer argument".to_owned())
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CcStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map(str::to_owned).map_err(|_| {
        Failure(
            CcStatus::InvalidArgument,
            "path is not valid UTF-8".to_owned(),
        )
    })
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
#[no_mangle]
pub unsafe extern "C" fn cc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

// ---------------------------------------------------------------------------
// Proof of work

/// Lower-bound energy of one day, MWh.
#[no_mangle]
pub unsafe extern "C" fn cc_pow_lower_daily_energy(
    hash_rate_ghs: f64,
    efficiency_j_per_mh: f64,
    out_mwh: *mut f64,
) -> CcStatus {
    guard(|| {
        let out_mwh = out(out_mwh)?;
        *out_mwh = pow::lower_limit_daily_energy(hash_rate_ghs, efficiency_j_per_mh)?.value();
        Ok(())
    })
}

/// Upper-bound energy of one day, MWh. Rewards are in tokens, prices in USD
/// per token and USD/kWh.
#[no_mangle]
pub unsafe extern "C" fn cc_pow_upper_daily_energy(
    block_reward: f64,
    tx_fees: f64,
    uncle_reward: f64,
    uncle_incl_reward: f64,
    market_price_usd: f64,
    electricity_price_usd_per_kwh: f64,
    out_mwh: *mut f64,
) -> CcStatus {
    guard(|| {
        let out_mwh = out(out_mwh)?;
        let rewards = DailyRewards {
            block: block_reward,
            tx_fees,
            uncle: uncle_reward,
            uncle_incl: uncle_incl_reward,
        };
        *out_mwh = pow::upper_limit_daily_energy(
            &rewards,
            MoneyRate::usd_per_token(market_price_usd)?,
            MoneyRate::usd_per_kwh(electricity_price_usd_per_kwh)?,
        )?
        .value();
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Country profiles

pub struct CcCountryTable(CountryProfileTable);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CcWeightedFactors {
    pub electricity_price_usd_per_kwh: f64,
    pub internet_price_usd_per_month: f64,
    pub emission_factor_kgco2_per_kwh: f64,
}

impl From<WeightedFactors> for CcWeightedFactors {
    fn from(w: WeightedFactors) -> Self {
        Self {
            electricity_price_usd_per_kwh: w.electricity_price_usd_per_kwh,
            internet_price_usd_per_month: w.internet_price_usd_per_month,
            emission_factor_kgco2_per_kwh: w.emission_factor_kgco2_per_kwh,
        }
    }
}

impl From<CcWeightedFactors> for WeightedFactors {
    fn from(w: CcWeightedFactors) -> Self {
        Self {
            electricity_price_usd_per_kwh: w.electricity_price_usd_per_kwh,
            internet_price_usd_per_month: w.internet_price_usd_per_month,
            emission_factor_kgco2_per_kwh: w.emission_factor_kgco2_per_kwh,
        }
    }
}

/// Loads a country profile CSV.
#[no_mangle]
pub unsafe extern "C" fn cc_country_table_load(
    path: *const c_char,
    out_table: *mut *mut CcCountryTable,
) -> CcStatus {
    guard(|| {
        let out_table = out(out_table)?;
        let table = ingest::load_country_profiles(path_arg(path)?)?;
        *out_table = Box::into_raw(Box::new(CcCountryTable(table)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cc_country_table_len(table: *const CcCountryTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn cc_country_table_weighted(
    table: *const CcCountryTable,
    out_factors: *mut CcWeightedFactors,
) -> CcStatus {
    guard(|| {
        let table = borrow(table)?;
        *out(out_factors)? = weighted_factors(&table.0)?.into();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cc_country_table_free(table: *mut CcCountryTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

// ---------------------------------------------------------------------------
// Proof of stake

pub struct CcPosScenario(PosScenario);

/// Reference hardware for `cc_pos_scenario_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcHardware {
    /// Low-power single-board host (lower bound).
    LowPower = 0,
    /// Rack server (upper bound).
    Server = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CcPosParams {
    pub total_stake: f64,
    pub stake_per_validator: f64,
    pub token_price: f64,
    pub reward_constant: f64,
    pub depreciation_years: f64,
    pub weighted: CcWeightedFactors,
}

impl From<CcPosParams> for PosParams {
    fn from(p: CcPosParams) -> Self {
        Self {
            total_stake: p.total_stake,
            stake_per_validator: p.stake_per_validator,
            token_price: p.token_price,
            reward_constant: p.reward_constant,
            depreciation_years: p.depreciation_years,
            weighted: p.weighted.into(),
        }
    }
}

impl From<PosParams> for CcPosParams {
    fn from(p: PosParams) -> Self {
        Self {
            total_stake: p.total_stake,
            stake_per_validator: p.stake_per_validator,
            token_price: p.token_price,
            reward_constant: p.reward_constant,
            depreciation_years: p.depreciation_years,
            weighted: p.weighted.into(),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CcPosResult {
    pub validator_count: f64,
    pub annual_return_per_validator: f64,
    pub staker_annual_cost: f64,
    pub validators_per_node: f64,
    pub node_count: f64,
    pub annual_energy_twh: f64,
    pub annual_carbon_mtco2: f64,
}

/// Writes the reference staking parameters to `out_params`.
#[no_mangle]
pub unsafe extern "C" fn cc_pos_params_default(out_params: *mut CcPosParams) -> CcStatus {
    guard(|| {
        *out(out_params)? = PosParams::default().into();
        Ok(())
    })
}

/// Reference parameters with one of the two reference hosts.
#[no_mangle]
pub unsafe extern "C" fn cc_pos_scenario_default(hardware: CcHardware) -> *mut CcPosScenario {
    let scenario = match hardware {
        CcHardware::LowPower => PosScenario::low_power_default(),
        CcHardware::Server => PosScenario::server_default(),
    };
    Box::into_raw(Box::new(CcPosScenario(scenario)))
}

/// Scenario with custom parameters and host hardware.
#[no_mangle]
pub unsafe extern "C" fn cc_pos_scenario_new(
    params: *const CcPosParams,
    hardware_power_w: f64,
    hardware_price_usd: f64,
    out_scenario: *mut *mut CcPosScenario,
) -> CcStatus {
    guard(|| {
        let params = *borrow(params)?;
        let out_scenario = out(out_scenario)?;
        let hardware = HardwareSpec::new("custom", hardware_power_w, hardware_price_usd, None, 0)?;
        let scenario = PosScenario::new(params.into(), hardware)?;
        *out_scenario = Box::into_raw(Box::new(CcPosScenario(scenario)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cc_pos_scenario_params(
    scenario: *const CcPosScenario,
    out_params: *mut CcPosParams,
) -> CcStatus {
    guard(|| {
        *out(out_params)? = borrow(scenario)?.0.params.into();
        Ok(())
    })
}

/// Replaces the parameters, keeping the hardware.
#[no_mangle]
pub unsafe extern "C" fn cc_pos_scenario_set_params(
    scenario: *mut CcPosScenario,
    params: *const CcPosParams,
) -> CcStatus {
    guard(|| {
        let params: PosParams = (*borrow(params)?).into();
        let scenario = out(scenario)?;
        params.validate()?;
        scenario.0.params = params;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cc_pos_scenario_free(scenario: *mut CcPosScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cc_pos_model(
    scenario: *const CcPosScenario,
    out_result: *mut CcPosResult,
) -> CcStatus {
    guard(|| {
        let r = pos::pos_model(&borrow(scenario)?.0)?;
        *out(out_result)? = CcPosResult {
            validator_count: r.validator_count,
            annual_return_per_validator: r.annual_return_per_validator,
            staker_annual_cost: r.staker_annual_cost,
            validators_per_node: r.validators_per_node,
            node_count: r.node_count,
            annual_energy_twh: r.annual_energy_twh,
            annual_carbon_mtco2: r.annual_carbon_mtco2,
        };
        Ok(())
    })
}

/// Node count from the single-expression form of the model.
#[no_mangle]
pub unsafe extern "C" fn cc_pos_closed_form_node_count(
    scenario: *const CcPosScenario,
    out_nodes: *mut f64,
) -> CcStatus {
    guard(|| {
        let s = &borrow(scenario)?.0;
        s.params.validate()?;
        *out(out_nodes)? = pos::closed_form::node_count(s);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CcSimOutcome {
    pub node_count: u64,
    pub validators_assigned: f64,
    pub total_energy_twh: f64,
    pub converged: bool,
    pub steps_used: u64,
}

/// Agent-based entry simulation. Zero `entry_batch` or `max_steps` selects
/// the defaults.
#[no_mangle]
pub unsafe extern "C" fn cc_equilibrium_simulate(
    scenario: *const CcPosScenario,
    seed: u64,
    entry_batch: u64,
    max_steps: u64,
    out_outcome: *mut CcSimOutcome,
) -> CcStatus {
    guard(|| {
        let scenario = borrow(scenario)?.0.clone();
        let out_outcome = out(out_outcome)?;
        let config = SimConfig {
            scenario,
            entry_batch: if entry_batch == 0 {
                DEFAULT_ENTRY_BATCH
            } else {
                entry_batch
            },
            max_steps: if max_steps == 0 {
                DEFAULT_MAX_STEPS
            } else {
                max_steps
            },
            seed,
        };
        let o = simulate_equilibrium(&config)?;
        *out_outcome = CcSimOutcome {
            node_count: o.node_count,
            validators_assigned: o.validators_assigned,
            total_energy_twh: o.total_energy,
            converged: o.converged,
            steps_used: o.steps_used,
        };
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Projections

pub struct CcTrajectory(EmissionTrajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CcLogisticParams {
    pub k: f64,
    pub p0: f64,
    pub r0: f64,
    pub t0_year: i32,
}

impl From<CcLogisticParams> for LogisticParams {
    fn from(p: CcLogisticParams) -> Self {
        Self {
            k: p.k,
            p0: p.p0,
            r0: p.r0,
            t0_year: p.t0_year,
        }
    }
}

impl From<LogisticParams> for CcLogisticParams {
    fn from(p: LogisticParams) -> Self {
        Self {
            k: p.k,
            p0: p.p0,
            r0: p.r0,
            t0_year: p.t0_year,
        }
    }
}

/// Transaction growth parameters for the Bitcoin network.
#[no_mangle]
pub extern "C" fn cc_logistic_bitcoin_default() -> CcLogisticParams {
    LogisticParams::bitcoin_default().into()
}

/// Logistic value `t` years after `t0_year`.
#[no_mangle]
pub unsafe extern "C" fn cc_logistic_value(
    params: *const CcLogisticParams,
    t: f64,
    out_value: *mut f64,
) -> CcStatus {
    guard(|| {
        let p: LogisticParams = (*borrow(params)?).into();
        p.validate()?;
        *out(out_value)? = projection::logistic_value(t, &p);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CcLogisticFit {
    pub params: CcLogisticParams,
    pub residual_ss: f64,
    pub iterations: u32,
}

/// Fits P0 and r0 to `len` (year, transactions) pairs for a fixed `k`.
#[no_mangle]
pub unsafe extern "C" fn cc_fit_logistic(
    years: *const i32,
    transactions: *const f64,
    len: usize,
    k: f64,
    out_fit: *mut CcLogisticFit,
) -> CcStatus {
    guard(|| {
        if len > 0 && (years.is_null() || transactions.is_null()) {
            return Err(null());
        }
        let out_fit = out(out_fit)?;
        let rows = if len == 0 {
            Vec::new()
        } else {
            let years = std::slice::from_raw_parts(years, len);
            let tx = std::slice::from_raw_parts(transactions, len);
            years
                .iter()
                .zip(tx)
                .map(|(&year, &transactions)| TransactionRecord { year, transactions })
                .collect()
        };
        let series = TransactionSeries::new(rows)?;
        let fit = projection::fit_logistic(&series, k)?;
        *out_fit = CcLogisticFit {
            params: fit.params.into(),
            residual_ss: fit.residual_ss,
            iterations: fit.iterations,
        };
        Ok(())
    })
}

/// Emissions growing with transaction volume along a logistic curve.
#[no_mangle]
pub unsafe extern "C" fn cc_project_logistic(
    baseline_annual_mtco2: f64,
    baseline_tx: f64,
    params: *const CcLogisticParams,
    start_year: i32,
    horizon_years: u32,
    out_trajectory: *mut *mut CcTrajectory,
) -> CcStatus {
    guard(|| {
        let params: LogisticParams = (*borrow(params)?).into();
        let out_trajectory = out(out_trajectory)?;
        let t = project_logistic_emissions(
            baseline_annual_mtco2,
            baseline_tx,
            &params,
            start_year,
            horizon_years,
        )?;
        *out_trajectory = Box::into_raw(Box::new(CcTrajectory(t)));
        Ok(())
    })
}

/// Emissions following the `quantile` adoption curve of the CSV at
/// `curves_path`, `years_since_introduction` years into adoption.
#[no_mangle]
pub unsafe extern "C" fn cc_project_adoption(
    curves_path: *const c_char,
    quantile: f64,
    years_since_introduction: u32,
    baseline_annual_mtco2: f64,
    current_fraction: f64,
    start_year: i32,
    horizon_years: u32,
    out_trajectory: *mut *mut CcTrajectory,
) -> CcStatus {
    guard(|| {
        let curves = ingest::load_adoption_curves(path_arg(curves_path)?)?;
        let out_trajectory = out(out_trajectory)?;
        let adoption = adoption_quantiles(&curves, quantile)?.shifted(years_since_introduction);
        let t = project_adoption_emissions(
            baseline_annual_mtco2,
            current_fraction,
            &adoption,
            start_year,
            horizon_years,
        )?;
        *out_trajectory = Box::into_raw(Box::new(CcTrajectory(t)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cc_trajectory_len(trajectory: *const CcTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn cc_trajectory_start_year(trajectory: *const CcTrajectory) -> i32 {
    trajectory.as_ref().map_or(0, |t| t.0.start_year)
}

unsafe fn copy_series(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure(
            CcStatus::InvalidArgument,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Copies annual emissions (MtCO₂) into `buf`, which must hold
/// `cc_trajectory_len` values.
#[no_mangle]
pub unsafe extern "C" fn cc_trajectory_annual(
    trajectory: *const CcTrajectory,
    buf: *mut f64,
    len: usize,
) -> CcStatus {
    guard(|| copy_series(&borrow(trajectory)?.0.annual, buf, len))
}

/// Copies cumulative emissions (GtCO₂) into `buf`.
#[no_mangle]
pub unsafe extern "C" fn cc_trajectory_cumulative(
    trajectory: *const CcTrajectory,
    buf: *mut f64,
    len: usize,
) -> CcStatus {
    guard(|| copy_series(&borrow(trajectory)?.0.cumulative, buf, len))
}

/// First year in which `lambda` (°C per GtCO₂) times cumulative emissions
/// reaches `threshold_c`. `out_found` is false when it never does.
#[no_mangle]
pub unsafe extern "C" fn cc_trajectory_crossing_year(
    trajectory: *const CcTrajectory,
    lambda: f64,
    threshold_c: f64,
    out_found: *mut bool,
    out_year: *mut i32,
) -> CcStatus {
    guard(|| {
        let t = &borrow(trajectory)?.0;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Failure(
                CcStatus::InvalidArgument,
                format!("lambda must be positive, got {lambda}"),
            ));
        }
        let delta_t: Vec<f64> = t.cumulative.iter().map(|c| lambda * c).collect();
        let crossing = projection::crossing_year(&delta_t, t.start_year, threshold_c);
        *out(out_found)? = crossing.is_some();
        *out(out_year)? = crossing.map_or(0, |c| c.year);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cc_trajectory_free(trajectory: *mut CcTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}
