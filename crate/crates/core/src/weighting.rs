//! Node-share weighted electricity price, internet price and emission factor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::CountryProfileTable;
use crate::units::{EmissionFactor, UnitError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightingError {
    #[error("country profile table is empty")]
    EmptyTable,
}

/// Network-wide averages, each weighted by the share of nodes per country.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedFactors {
    pub electricity_price_usd_per_kwh: f64,
    pub internet_price_usd_per_month: f64,
    pub emission_factor_kgco2_per_kwh: f64,
}

impl WeightedFactors {
    /// Averages for the proof-of-stake node population.
    pub const POS_DEFAULT: WeightedFactors = WeightedFactors {
        electricity_price_usd_per_kwh: 0.1783,
        internet_price_usd_per_month: 39.5777,
        emission_factor_kgco2_per_kwh: 0.4323,
    };

    /// Emission factor of the proof-of-work Ethereum node population.
    pub const POW_ETH_EMISSION_FACTOR: f64 = 0.4592;

    pub fn emission_factor(&self) -> Result<EmissionFactor, UnitError> {
        EmissionFactor::new(self.emission_factor_kgco2_per_kwh)
    }
}

impl Default for WeightedFactors {
    fn default() -> Self {
        Self::POS_DEFAULT
    }
}

pub fn weighted_factors(table: &CountryProfileTable) -> Result<WeightedFactors, WeightingError> {
    if table.is_empty() {
        return Err(WeightingError::EmptyTable);
    }
    let mut out = WeightedFactors {
        electricity_price_usd_per_kwh: 0.0,
        internet_price_usd_per_month: 0.0,
        emission_factor_kgco2_per_kwh: 0.0,
    };
    for row in table.rows() {
        out.electricity_price_usd_per_kwh += row.node_share * row.electricity_price_usd_per_kwh;
        out.internet_price_usd_per_month += row.node_share * row.internet_price_usd_per_month;
        out.emission_factor_kgco2_per_kwh += row.node_share * row.emission_factor_kgco2_per_kwh;
    }
    Ok(out)
}
