//! Warming from cumulative emissions.
//!
//! Warming is taken as linear in cumulative CO₂: `ΔT = λ × cumulative`, with
//! a low, central and high coefficient spanning model uncertainty.

use serde::{Deserialize, Serialize};

use super::{EmissionTrajectory, ProjectionError};

/// Coefficients in °C per GtCO₂ of cumulative emissions.
///
/// The defaults are calibration values (a central 0.45 °C per 1000 GtCO₂,
/// with the low and high bands at 0.6× and 1.6× of it), not measured data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClimateParams {
    pub lambda_low: f64,
    pub lambda_mean: f64,
    pub lambda_high: f64,
}

impl ClimateParams {
    pub const DEFAULT_LAMBDA_MEAN: f64 = 4.5e-4;

    pub fn new(
        lambda_low: f64,
        lambda_mean: f64,
        lambda_high: f64,
    ) -> Result<Self, ProjectionError> {
        let p = Self {
            lambda_low,
            lambda_mean,
            lambda_high,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        if self.lambda_low > 0.0
            && self.lambda_low <= self.lambda_mean
            && self.lambda_mean <= self.lambda_high
            && self.lambda_high.is_finite()
        {
            Ok(())
        } else {
            Err(ProjectionError::InvalidClimate)
        }
    }
}

impl Default for ClimateParams {
    fn default() -> Self {
        Self {
            lambda_low: 0.6 * Self::DEFAULT_LAMBDA_MEAN,
            lambda_mean: Self::DEFAULT_LAMBDA_MEAN,
            lambda_high: 1.6 * Self::DEFAULT_LAMBDA_MEAN,
        }
    }
}

/// Warming in °C per year for the three coefficient bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureBands {
    pub low: Vec<f64>,
    pub mean: Vec<f64>,
    pub high: Vec<f64>,
}

pub fn temperature_rise(traj: &EmissionTrajectory, climate: &ClimateParams) -> TemperatureBands {
    let band = |lambda: f64| traj.cumulative.iter().map(|c| lambda * c).collect();
    TemperatureBands {
        low: band(climate.lambda_low),
        mean: band(climate.lambda_mean),
        high: band(climate.lambda_high),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// First calendar year at or above the threshold.
    pub year: i32,
    /// Crossing time interpolated linearly between the surrounding years.
    pub fractional_year: f64,
}

/// When `delta_t` (entry `i` is year `start_year + i`) first reaches `threshold`.
pub fn crossing_year(delta_t: &[f64], start_year: i32, threshold: f64) -> Option<Crossing> {
    let idx = delta_t.iter().position(|&v| v >= threshold)?;
    let year = start_year + idx as i32;
    let fractional_year = if idx == 0 {
        f64::from(start_year)
    } else {
        let (before, after) = (delta_t[idx - 1], delta_t[idx]);
        f64::from(year - 1) + (threshold - before) / (after - before)
    };
    Some(Crossing {
        year,
        fractional_year,
    })
}
