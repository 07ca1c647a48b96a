//! Proof-of-stake network energy from staker break-even economics.
//!
//! Every staker runs one beacon node plus as many validators as it takes for
//! the validators' combined reward to pay for the host: hardware amortized
//! over its depreciation period, electricity, and a year of internet. The
//! network then holds `validators / validators_per_node` beacon nodes, and
//! the network's energy is that many hosts running all year. Validator
//! client programs themselves draw no modeled power and there is no
//! downtime.
//!
//! Node and validator counts are real-valued throughout; they are only
//! rounded when reported.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{check_positive, HardwareSpec, UnitError};
use crate::weighting::WeightedFactors;

pub const HOURS_PER_YEAR: f64 = 365.0 * 24.0;
pub const DEFAULT_TOTAL_STAKE: f64 = 110_030_966.0;
pub const STAKE_PER_VALIDATOR: f64 = 32.0;
pub const DEFAULT_TOKEN_PRICE: f64 = 307.5429;
pub const REWARD_CONSTANT: f64 = 5792.6176;
pub const DEPRECIATION_YEARS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PosError {
    #[error("validator return is zero (token price is zero); validators per node is undefined")]
    ZeroReturn,
    #[error(transparent)]
    Invalid(#[from] UnitError),
}

/// Everything in a staking scenario except the host hardware.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PosParams {
    /// Total tokens staked.
    pub total_stake: f64,
    pub stake_per_validator: f64,
    /// USD per token.
    pub token_price: f64,
    /// Annual validator reward is `reward_constant * token_price / sqrt(total_stake)`.
    pub reward_constant: f64,
    pub depreciation_years: f64,
    pub weighted: WeightedFactors,
}

impl Default for PosParams {
    fn default() -> Self {
        Self {
            total_stake: DEFAULT_TOTAL_STAKE,
            stake_per_validator: STAKE_PER_VALIDATOR,
            token_price: DEFAULT_TOKEN_PRICE,
            reward_constant: REWARD_CONSTANT,
            depreciation_years: DEPRECIATION_YEARS,
            weighted: WeightedFactors::POS_DEFAULT,
        }
    }
}

impl PosParams {
    pub fn validate(&self) -> Result<(), UnitError> {
        check_positive("total stake", self.total_stake)?;
        check_positive("stake per validator", self.stake_per_validator)?;
        crate::units::check_non_negative("token price", self.token_price)?;
        check_positive("reward constant", self.reward_constant)?;
        check_positive("depreciation period", self.depreciation_years)?;
        crate::units::check_non_negative(
            "electricity price",
            self.weighted.electricity_price_usd_per_kwh,
        )?;
        crate::units::check_non_negative(
            "internet price",
            self.weighted.internet_price_usd_per_month,
        )?;
        self.weighted.emission_factor()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosScenario {
    pub params: PosParams,
    pub hardware: HardwareSpec,
}

impl PosScenario {
    pub fn new(params: PosParams, hardware: HardwareSpec) -> Result<Self, PosError> {
        params.validate()?;
        hardware.validate()?;
        Ok(Self { params, hardware })
    }

    /// Reference network state (early 2020) with the low-power staking host.
    pub fn low_power_default() -> Self {
        Self {
            params: PosParams::default(),
            hardware: HardwareSpec::jetson_tx2(),
        }
    }

    /// Reference network state (early 2020) with the server-class staking host.
    pub fn server_default() -> Self {
        Self {
            params: PosParams::default(),
            hardware: HardwareSpec::xeon_server(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosResult {
    pub validator_count: f64,
    /// USD per validator per year.
    pub annual_return_per_validator: f64,
    /// USD per staking host per year.
    pub staker_annual_cost: f64,
    pub validators_per_node: f64,
    pub node_count: f64,
    pub annual_energy_twh: f64,
    pub annual_carbon_mtco2: f64,
}

pub fn validator_count(total_stake: f64, stake_per_validator: f64) -> Result<f64, PosError> {
    check_positive("total stake", total_stake)?;
    check_positive("stake per validator", stake_per_validator)?;
    Ok(total_stake / stake_per_validator)
}

/// USD earned per validator per year.
pub fn validator_annual_return(total_stake: f64, token_price: f64, reward_constant: f64) -> f64 {
    reward_constant * token_price / total_stake.sqrt()
}

/// USD per year to keep one staking host online.
pub fn staker_annual_cost(
    hardware: &HardwareSpec,
    weighted: &WeightedFactors,
    depreciation_years: f64,
) -> f64 {
    hardware.price_usd / depreciation_years
        + HOURS_PER_YEAR * hardware.power_w * weighted.electricity_price_usd_per_kwh / 1000.0
        + 12.0 * weighted.internet_price_usd_per_month
}

/// Runs the break-even chain step by step.
pub fn pos_model(scenario: &PosScenario) -> Result<PosResult, PosError> {
    let PosScenario { params, hardware } = scenario;
    params.validate()?;
    hardware.validate()?;

    let n_val = validator_count(params.total_stake, params.stake_per_validator)?;
    let g_val = validator_annual_return(
        params.total_stake,
        params.token_price,
        params.reward_constant,
    );
    if g_val <= 0.0 {
        return Err(PosError::ZeroReturn);
    }
    let c_stake = staker_annual_cost(hardware, &params.weighted, params.depreciation_years);
    let r_val = c_stake / g_val;
    let n_node = n_val / r_val;
    let energy_twh = HOURS_PER_YEAR * hardware.power_w * n_node / 1e12;
    let carbon_mtco2 = energy_twh * params.weighted.emission_factor_kgco2_per_kwh;

    Ok(PosResult {
        validator_count: n_val,
        annual_return_per_validator: g_val,
        staker_annual_cost: c_stake,
        validators_per_node: r_val,
        node_count: n_node,
        annual_energy_twh: energy_twh,
        annual_carbon_mtco2: carbon_mtco2,
    })
}

/// Single-expression forms of the chain's node count, energy and carbon.
pub mod closed_form {
    use super::*;

    fn denominator(s: &PosScenario) -> f64 {
        let w = &s.params.weighted;
        s.hardware.price_usd / s.params.depreciation_years
            + HOURS_PER_YEAR / 1000.0 * s.hardware.power_w * w.electricity_price_usd_per_kwh
            + 12.0 * w.internet_price_usd_per_month
    }

    fn numerator(s: &PosScenario) -> f64 {
        let p = &s.params;
        p.total_stake.sqrt() / p.stake_per_validator * p.reward_constant * p.token_price
    }

    pub fn node_count(s: &PosScenario) -> f64 {
        numerator(s) / denominator(s)
    }

    /// TWh per year.
    pub fn annual_energy(s: &PosScenario) -> f64 {
        HOURS_PER_YEAR * s.hardware.power_w * numerator(s) / (1e12 * denominator(s))
    }

    /// MtCO₂ per year.
    pub fn annual_carbon(s: &PosScenario) -> f64 {
        HOURS_PER_YEAR
            * s.hardware.power_w
            * numerator(s)
            * s.params.weighted.emission_factor_kgco2_per_kwh
            / (1e12 * denominator(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosBounds {
    pub lower: PosResult,
    pub upper: PosResult,
}

/// Evaluates the model once per hardware choice with otherwise shared parameters.
pub fn pos_bounds(
    lower_hw: &HardwareSpec,
    upper_hw: &HardwareSpec,
    params: &PosParams,
) -> Result<PosBounds, PosError> {
    let lower = pos_model(&PosScenario::new(*params, lower_hw.clone())?)?;
    let upper = pos_model(&PosScenario::new(*params, upper_hw.clone())?)?;
    Ok(PosBounds { lower, upper })
}
