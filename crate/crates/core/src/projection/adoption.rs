//! Adoption-curve projections.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EmissionTrajectory, ProjectionError};
use crate::ingest::AdoptionCurveSet;

/// Adoption fraction against years elapsed, either a single technology or a
/// quantile across many.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionProjection {
    pub label: String,
    pub years: Vec<u32>,
    pub fraction: Vec<f64>,
}

impl AdoptionProjection {
    /// Constant adoption over `0..len` years.
    pub fn flat(label: impl Into<String>, fraction: f64, len: u32) -> Self {
        Self {
            label: label.into(),
            years: (0..len).collect(),
            fraction: vec![fraction; len as usize],
        }
    }

    /// Re-bases the curve so that year `offset` becomes year 0; earlier
    /// points are dropped.
    pub fn shifted(&self, offset: u32) -> Self {
        let (years, fraction) = self
            .years
            .iter()
            .zip(&self.fraction)
            .filter(|(y, _)| **y >= offset)
            .map(|(y, f)| (y - offset, *f))
            .unzip();
        Self {
            label: self.label.clone(),
            years,
            fraction,
        }
    }

    /// Fraction at `year`: linear between known points, held flat before
    /// the first and after the last one.
    pub fn fraction_at(&self, year: u32) -> f64 {
        if self.years.is_empty() {
            return 0.0;
        }
        let idx = self.years.partition_point(|&y| y < year);
        if idx < self.years.len() && self.years[idx] == year {
            return self.fraction[idx];
        }
        if idx == 0 {
            return self.fraction[0];
        }
        if idx == self.years.len() {
            return self.fraction[idx - 1];
        }
        let (y0, y1) = (self.years[idx - 1] as f64, self.years[idx] as f64);
        let (f0, f1) = (self.fraction[idx - 1], self.fraction[idx]);
        f0 + (f1 - f0) * (year as f64 - y0) / (y1 - y0)
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (position `(n - 1) * q` in the sorted sample).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

/// The `q`-quantile across technologies, year by year. Each year uses only
/// the technologies that have data for it.
pub fn adoption_quantiles(
    curves: &AdoptionCurveSet,
    q: f64,
) -> Result<AdoptionProjection, ProjectionError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(ProjectionError::InvalidQuantile(q));
    }
    let mut by_year: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for points in curves.curves().values() {
        for p in points {
            by_year
                .entry(p.years_since_introduction)
                .or_default()
                .push(p.adoption_fraction);
        }
    }
    if by_year.is_empty() {
        return Err(ProjectionError::EmptySet);
    }
    let label = if curves.len() == 1 {
        curves.curves().keys().next().cloned().unwrap_or_default()
    } else {
        quantile_label(q)
    };
    let mut years = Vec::with_capacity(by_year.len());
    let mut fraction = Vec::with_capacity(by_year.len());
    for (year, mut values) in by_year {
        values.sort_by(f64::total_cmp);
        years.push(year);
        fraction.push(quantile_sorted(&values, q));
    }
    Ok(AdoptionProjection {
        label,
        years,
        fraction,
    })
}

fn quantile_label(q: f64) -> String {
    if q == 0.5 {
        "median".to_owned()
    } else {
        format!("p{}", (q * 100.0).round())
    }
}

/// Annual emissions if the technology follows `adoption` from today.
///
/// Today's emissions sit at `current_fraction` of full adoption, so full
/// adoption emits `baseline_annual / current_fraction`. Year `t` of the
/// projection uses `adoption.fraction_at(t)`.
pub fn project_adoption_emissions(
    baseline_annual: f64,
    current_fraction: f64,
    adoption: &AdoptionProjection,
    start_year: i32,
    horizon_years: u32,
) -> Result<EmissionTrajectory, ProjectionError> {
    if !(current_fraction > 0.0 && current_fraction <= 1.0) {
        return Err(ProjectionError::ZeroCurrentFraction(current_fraction));
    }
    if !(baseline_annual >= 0.0 && baseline_annual.is_finite()) {
        return Err(ProjectionError::NegativeBaseline(baseline_annual));
    }
    let full = baseline_annual / current_fraction;
    let annual = (0..horizon_years)
        .map(|t| full * adoption.fraction_at(t))
        .collect();
    Ok(EmissionTrajectory::from_annual(start_year, annual))
}
