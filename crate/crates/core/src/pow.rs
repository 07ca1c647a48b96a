//! Proof-of-work energy and carbon bounds.
//!
//! The lower bound assumes the whole network hash rate runs on the most
//! efficient hardware available that year. The upper bound is the
//! break-even point where miners' electricity bill equals their revenue
//! (block reward, fees and uncle rewards at market price). Both are
//! computed per day and summed into calendar-year totals.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{HardwareCatalog, NetworkDay, NetworkDaySeries};
use crate::units::{
    CarbonQuantity, CarbonUnit, EmissionFactor, EnergyQuantity, EnergyUnit, MoneyRate, MoneyUnit,
    UnitError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowError {
    #[error("mining efficiency must be positive, got {0} J/MH")]
    NonPositiveEfficiency(f64),
    #[error("electricity price must be positive")]
    ZeroElectricityPrice,
    #[error("no hardware with a known efficiency was released in or before {0}")]
    NoHardwareAvailable(i32),
    #[error("no {what} given for {year}")]
    MissingFactor { what: &'static str, year: i32 },
    #[error(transparent)]
    Unit(#[from] UnitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    pub fn as_str(self) -> &'static str {
        match self {
            Bound::Lower => "lower",
            Bound::Upper => "upper",
        }
    }
}

/// Token amounts paid to miners in one day.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DailyRewards {
    pub block: f64,
    pub tx_fees: f64,
    pub uncle: f64,
    pub uncle_incl: f64,
}

impl DailyRewards {
    pub fn total(&self) -> f64 {
        self.block + self.tx_fees + self.uncle + self.uncle_incl
    }
}

impl From<&NetworkDay> for DailyRewards {
    fn from(day: &NetworkDay) -> Self {
        Self {
            block: day.block_reward,
            tx_fees: day.tx_fees,
            uncle: day.uncle_reward,
            uncle_incl: day.uncle_incl_reward,
        }
    }
}

/// Daily energy if every hash is computed at `efficiency_j_per_mh`.
///
/// GH/s × J/MH is kW, so a day is `H * e * 1e-3 * 24` MWh.
pub fn lower_limit_daily_energy(
    hash_rate_ghs: f64,
    efficiency_j_per_mh: f64,
) -> Result<EnergyQuantity, PowError> {
    if !(efficiency_j_per_mh > 0.0 && efficiency_j_per_mh.is_finite()) {
        return Err(PowError::NonPositiveEfficiency(efficiency_j_per_mh));
    }
    let mwh = hash_rate_ghs * efficiency_j_per_mh * 1e-3 * 24.0;
    Ok(EnergyQuantity::new(mwh, EnergyUnit::MWh)?)
}

/// Daily energy whose electricity cost equals the day's mining revenue.
pub fn upper_limit_daily_energy(
    rewards: &DailyRewards,
    market_price: MoneyRate,
    electricity_price: MoneyRate,
) -> Result<EnergyQuantity, PowError> {
    let m = market_price.expect(MoneyUnit::UsdPerToken)?;
    let p = electricity_price.expect(MoneyUnit::UsdPerKwh)?;
    if p <= 0.0 {
        return Err(PowError::ZeroElectricityPrice);
    }
    let (rb, rt, ru, rui) = (
        rewards.block,
        rewards.tx_fees,
        rewards.uncle,
        rewards.uncle_incl,
    );
    let mwh = (rb + rt + ru + rui) * m / p / 1000.0;
    Ok(EnergyQuantity::new(mwh, EnergyUnit::MWh)?)
}

/// Lowest J/MH among catalog entries released in or before `year`.
pub fn best_efficiency_by_year(catalog: &HardwareCatalog, year: i32) -> Result<f64, PowError> {
    catalog
        .entries()
        .iter()
        .filter(|hw| hw.release_year <= year)
        .filter_map(|hw| hw.efficiency_j_per_mh)
        .min_by(f64::total_cmp)
        .ok_or(PowError::NoHardwareAvailable(year))
}

pub fn carbon_from_energy(
    energy: EnergyQuantity,
    factor: EmissionFactor,
    unit: CarbonUnit,
) -> CarbonQuantity {
    let kg = energy.in_unit(EnergyUnit::KWh) * factor.kg_per_kwh();
    CarbonQuantity::new(kg, CarbonUnit::KgCo2)
        .expect("non-negative energy times non-negative factor")
        .to(unit)
}

/// Per-year inputs for [`annual_series`]. The two bounds may use different
/// emission factors because the miner populations behind them can differ.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowYearTables {
    pub lower_factor: BTreeMap<i32, EmissionFactor>,
    pub upper_factor: BTreeMap<i32, EmissionFactor>,
    /// USD/kWh paid by miners.
    pub electricity_price: BTreeMap<i32, f64>,
}

impl PowYearTables {
    /// Same emission factor for both bounds.
    pub fn uniform(
        factor: BTreeMap<i32, EmissionFactor>,
        electricity_price: BTreeMap<i32, f64>,
    ) -> Self {
        Self {
            lower_factor: factor.clone(),
            upper_factor: factor,
            electricity_price,
        }
    }

    fn factor(&self, bound: Bound, year: i32) -> Result<EmissionFactor, PowError> {
        let (map, what) = match bound {
            Bound::Lower => (&self.lower_factor, "lower-bound emission factor"),
            Bound::Upper => (&self.upper_factor, "upper-bound emission factor"),
        };
        map.get(&year)
            .copied()
            .ok_or(PowError::MissingFactor { what, year })
    }

    fn price(&self, year: i32) -> Result<MoneyRate, PowError> {
        let p = self
            .electricity_price
            .get(&year)
            .copied()
            .ok_or(PowError::MissingFactor {
                what: "electricity price",
                year,
            })?;
        Ok(MoneyRate::usd_per_kwh(p)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowDayEstimate {
    pub date: chrono::NaiveDate,
    pub lower_energy_mwh: f64,
    pub upper_energy_mwh: f64,
    pub lower_carbon_t: f64,
    pub upper_carbon_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnualFootprint {
    pub year: i32,
    pub bound: Bound,
    pub energy: EnergyQuantity,
    pub carbon: CarbonQuantity,
    pub emission_factor: EmissionFactor,
}

impl AnnualFootprint {
    pub fn energy_twh(&self) -> f64 {
        self.energy.in_unit(EnergyUnit::TWh)
    }

    pub fn carbon_mtco2(&self) -> f64 {
        self.carbon.in_unit(CarbonUnit::MtCo2)
    }
}

fn day_bounds(
    day: &NetworkDay,
    efficiency: f64,
    price: MoneyRate,
) -> Result<(EnergyQuantity, EnergyQuantity), PowError> {
    let lower = lower_limit_daily_energy(day.hash_rate_ghs, efficiency)?;
    let upper = upper_limit_daily_energy(
        &DailyRewards::from(day),
        MoneyRate::usd_per_token(day.market_price_usd)?,
        price,
    )?;
    Ok((lower, upper))
}

/// Day-by-day bounds, useful for plotting.
pub fn daily_estimates(
    series: &NetworkDaySeries,
    catalog: &HardwareCatalog,
    tables: &PowYearTables,
) -> Result<Vec<PowDayEstimate>, PowError> {
    let mut out = Vec::with_capacity(series.days().len());
    for year in series.years() {
        let efficiency = best_efficiency_by_year(catalog, year)?;
        let price = tables.price(year)?;
        let lower_factor = tables.factor(Bound::Lower, year)?;
        let upper_factor = tables.factor(Bound::Upper, year)?;
        for day in series.days_in_year(year) {
            let (lower, upper) = day_bounds(day, efficiency, price)?;
            out.push(PowDayEstimate {
                date: day.date,
                lower_energy_mwh: lower.value(),
                upper_energy_mwh: upper.value(),
                lower_carbon_t: carbon_from_energy(lower, lower_factor, CarbonUnit::TCo2).value(),
                upper_carbon_t: carbon_from_energy(upper, upper_factor, CarbonUnit::TCo2).value(),
            });
        }
    }
    Ok(out)
}

fn footprints_for_year(
    year: i32,
    days: &[NetworkDay],
    catalog: &HardwareCatalog,
    tables: &PowYearTables,
) -> Result<[AnnualFootprint; 2], PowError> {
    let efficiency = best_efficiency_by_year(catalog, year)?;
    let price = tables.price(year)?;
    let lower_factor = tables.factor(Bound::Lower, year)?;
    let upper_factor = tables.factor(Bound::Upper, year)?;

    let (mut lower_mwh, mut upper_mwh) = (0.0, 0.0);
    for day in days {
        let (lower, upper) = day_bounds(day, efficiency, price)?;
        lower_mwh += lower.value();
        upper_mwh += upper.value();
    }
    if lower_mwh > upper_mwh {
        log::warn!("{year}: lower bound {lower_mwh} MWh exceeds upper bound {upper_mwh} MWh");
    }

    let build = |bound, mwh: f64, factor| -> Result<AnnualFootprint, PowError> {
        let energy = EnergyQuantity::new(mwh, EnergyUnit::MWh)?.to(EnergyUnit::TWh);
        Ok(AnnualFootprint {
            year,
            bound,
            energy,
            carbon: carbon_from_energy(energy, factor, CarbonUnit::MtCo2),
            emission_factor: factor,
        })
    };
    Ok([
        build(Bound::Lower, lower_mwh, lower_factor)?,
        build(Bound::Upper, upper_mwh, upper_factor)?,
    ])
}

/// Yearly totals of both bounds, in TWh and MtCO₂, ordered by year then bound.
///
/// Each year is the plain sum of its daily values, not an annualized average.
pub fn annual_series(
    series: &NetworkDaySeries,
    catalog: &HardwareCatalog,
    tables: &PowYearTables,
) -> Result<Vec<AnnualFootprint>, PowError> {
    let mut out = Vec::new();
    for year in series.years() {
        out.extend(footprints_for_year(
            year,
            series.days_in_year(year),
            catalog,
            tables,
        )?);
    }
    Ok(out)
}

/// [`annual_series`] with years evaluated on the current rayon pool.
/// Output is identical to the sequential version.
pub fn annual_series_parallel(
    series: &NetworkDaySeries,
    catalog: &HardwareCatalog,
    tables: &PowYearTables,
) -> Result<Vec<AnnualFootprint>, PowError> {
    let per_year = series
        .years()
        .into_par_iter()
        .map(|year| footprints_for_year(year, series.days_in_year(year), catalog, tables))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_year.into_iter().flatten().collect())
}
