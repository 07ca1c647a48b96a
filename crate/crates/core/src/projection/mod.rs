//! Emission projections and their warming.
//!
//! Two growth models drive annual emissions forward from a baseline year:
//! the spread of historical technology adoption curves ([`adoption`]) and a
//! logistic curve in transaction volume ([`logistic`]). Cumulative emissions
//! then map linearly to warming ([`climate`]).

pub mod adoption;
pub mod climate;
pub mod logistic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adoption::{adoption_quantiles, project_adoption_emissions, AdoptionProjection};
pub use climate::{crossing_year, temperature_rise, ClimateParams, Crossing, TemperatureBands};
pub use logistic::{
    fit_logistic, logistic_value, project_logistic_emissions, LogisticFit, LogisticParams,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("no adoption data to take quantiles of")]
    EmptySet,
    #[error("quantile {0} is outside [0, 1]")]
    InvalidQuantile(f64),
    #[error("current adoption fraction must be in (0, 1], got {0}")]
    ZeroCurrentFraction(f64),
    #[error("baseline transaction volume must be positive, got {0}")]
    ZeroBaselineTx(f64),
    #[error("baseline emissions must be non-negative, got {0}")]
    NegativeBaseline(f64),
    #[error("logistic parameters need K > P0 > 0 and r0 > 0 (K={k}, P0={p0}, r0={r0})")]
    InvalidLogistic { k: f64, p0: f64, r0: f64 },
    #[error("need at least 3 observations to fit, got {0}")]
    InsufficientData(usize),
    #[error("carrying capacity {k} must exceed the largest observation {max_observed}")]
    CapacityBelowData { k: f64, max_observed: f64 },
    #[error("observation for {year} must be positive to fit in log space")]
    NonPositiveObservation { year: i32 },
    #[error("logistic fit did not converge to a growing curve: {0}")]
    FitDivergence(String),
    #[error("climate coefficients must satisfy 0 < low <= mean <= high")]
    InvalidClimate,
}

/// Annual emissions (MtCO₂/yr) and their running total (GtCO₂), one entry per
/// calendar year from `start_year`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionTrajectory {
    pub start_year: i32,
    pub annual: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl EmissionTrajectory {
    pub fn from_annual(start_year: i32, annual: Vec<f64>) -> Self {
        let mut running_mt = 0.0;
        let cumulative = annual
            .iter()
            .map(|a| {
                running_mt += a;
                running_mt / 1000.0
            })
            .collect();
        Self {
            start_year,
            annual,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.annual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annual.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.annual.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn total_gtco2(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_is_prefix_sum() {
        let t = EmissionTrajectory::from_annual(2020, vec![1000.0, 500.0, 0.0, 250.0]);
        assert_eq!(t.cumulative, vec![1.0, 1.5, 1.5, 1.75]);
        assert_eq!(t.years().collect::<Vec<_>>(), vec![2020, 2021, 2022, 2023]);
        assert_eq!(t.total_gtco2(), 1.75);
    }

    #[test]
    fn empty_trajectory() {
        let t = EmissionTrajectory::from_annual(2020, vec![]);
        assert!(t.is_empty());
        assert_eq!(t.total_gtco2(), 0.0);
    }
}
