//! Logistic growth of transaction volume.
//!
//! `P(t) = K P0 / (P0 + (K - P0) exp(-r0 t))`, with `t` in years since
//! `t0_year`. Emissions are taken as proportional to transaction volume.

use serde::{Deserialize, Serialize};

use super::{EmissionTrajectory, ProjectionError};
use crate::ingest::TransactionSeries;

/// Smallest growth rate a fit may return before it counts as "no growth".
const MIN_GROWTH_RATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticParams {
    /// Carrying capacity, transactions per year.
    pub k: f64,
    /// Value at `t0_year`, transactions per year.
    pub p0: f64,
    /// Intrinsic growth rate per year.
    pub r0: f64,
    pub t0_year: i32,
}

impl LogisticParams {
    pub fn new(k: f64, p0: f64, r0: f64, t0_year: i32) -> Result<Self, ProjectionError> {
        let params = Self { k, p0, r0, t0_year };
        params.validate()?;
        Ok(params)
    }

    /// Bitcoin transactions growing toward the world's cashless payment
    /// volume (779.1 billion a year), counted from 2009.
    pub fn bitcoin_default() -> Self {
        Self {
            k: 779.1e9,
            p0: 9_714_478.0,
            r0: 0.219,
            t0_year: 2009,
        }
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        let ok = self.p0 > 0.0
            && self.k > self.p0
            && self.r0 > 0.0
            && self.k.is_finite()
            && self.r0.is_finite();
        if ok {
            Ok(())
        } else {
            Err(ProjectionError::InvalidLogistic {
                k: self.k,
                p0: self.p0,
                r0: self.r0,
            })
        }
    }
}

pub fn logistic_value(t: f64, params: &LogisticParams) -> f64 {
    let LogisticParams { k, p0, r0, .. } = *params;
    // Denominator >= 1 keeps the rounded value at or below K.
    k / (1.0 + (k - p0) / p0 * (-r0 * t).exp())
}

/// dP/dt.
pub fn logistic_slope(t: f64, params: &LogisticParams) -> f64 {
    let p = logistic_value(t, params);
    params.r0 * p * (1.0 - p / params.k)
}

/// The time at which the curve reaches `p`, for `0 < p < K`.
pub fn logistic_time(p: f64, params: &LogisticParams) -> Option<f64> {
    let LogisticParams { k, p0, r0, .. } = *params;
    if !(p > 0.0 && p < k) {
        return None;
    }
    Some(-((k * p0 / p - p0) / (k - p0)).ln() / r0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub params: LogisticParams,
    /// Sum of squared log residuals at the optimum.
    pub residual_ss: f64,
    pub iterations: u32,
}

struct LogProblem {
    ln_k: f64,
    k: f64,
    t: Vec<f64>,
    ln_obs: Vec<f64>,
}

impl LogProblem {
    fn ln_model(&self, ln_p0: f64, r0: f64, t: f64) -> f64 {
        let p0 = ln_p0.exp();
        self.ln_k + ln_p0 - (p0 + (self.k - p0) * (-r0 * t).exp()).ln()
    }

    fn sse(&self, ln_p0: f64, r0: f64) -> f64 {
        self.t
            .iter()
            .zip(&self.ln_obs)
            .map(|(&t, &y)| {
                let r = self.ln_model(ln_p0, r0, t) - y;
                r * r
            })
            .sum()
    }

    /// Gauss-Newton normal equations `JᵀJ` and `Jᵀr` at (ln P0, r0).
    fn normal_equations(&self, ln_p0: f64, r0: f64) -> ([[f64; 2]; 2], [f64; 2]) {
        let p0 = ln_p0.exp();
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for (&t, &y) in self.t.iter().zip(&self.ln_obs) {
            let decay = (-r0 * t).exp();
            let d = p0 + (self.k - p0) * decay;
            let d_lnp0 = 1.0 - p0 * (1.0 - decay) / d;
            let d_r0 = (self.k - p0) * t * decay / d;
            let res = self.ln_model(ln_p0, r0, t) - y;
            let row = [d_lnp0, d_r0];
            for i in 0..2 {
                jtr[i] += row[i] * res;
                for j in 0..2 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        (jtj, jtr)
    }
}

/// Fits P0 and r0 to a transaction series with `K` held fixed, minimizing
/// squared error in log space.
///
/// Time runs from the series' first year. A coarse grid over
/// r0 ∈ [0.01, 1] and P0 ∈ [1, max observed] picks the start point, which
/// Levenberg-Marquardt then refines; the result depends only on the data.
pub fn fit_logistic(series: &TransactionSeries, k: f64) -> Result<LogisticFit, ProjectionError> {
    let rows = series.rows();
    if rows.len() < 3 {
        return Err(ProjectionError::InsufficientData(rows.len()));
    }
    let max_observed = series.max_transactions();
    if !(k.is_finite() && k > max_observed) {
        return Err(ProjectionError::CapacityBelowData { k, max_observed });
    }
    if let Some(bad) = rows.iter().find(|r| r.transactions <= 0.0) {
        return Err(ProjectionError::NonPositiveObservation { year: bad.year });
    }

    let t0_year = rows[0].year;
    let problem = LogProblem {
        ln_k: k.ln(),
        k,
        t: rows.iter().map(|r| f64::from(r.year - t0_year)).collect(),
        ln_obs: rows.iter().map(|r| r.transactions.ln()).collect(),
    };

    const GRID: usize = 100;
    let ln_max = max_observed.ln();
    let mut best = (0.0, 0.01, f64::INFINITY);
    for i in 0..GRID {
        let r0 = 0.01 + 0.99 * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let ln_p0 = ln_max * j as f64 / (GRID - 1) as f64;
            let sse = problem.sse(ln_p0, r0);
            if sse < best.2 {
                best = (ln_p0, r0, sse);
            }
        }
    }

    let (mut ln_p0, mut r0, mut sse) = best;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < 500 {
        iterations += 1;
        let (jtj, jtr) = problem.normal_equations(ln_p0, r0);
        let a = [
            [jtj[0][0] * (1.0 + lambda), jtj[0][1]],
            [jtj[1][0], jtj[1][1] * (1.0 + lambda)],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [
            -(a[1][1] * jtr[0] - a[0][1] * jtr[1]) / det,
            -(a[0][0] * jtr[1] - a[1][0] * jtr[0]) / det,
        ];
        let (cand_ln_p0, cand_r0) = (ln_p0 + step[0], r0 + step[1]);
        let cand_sse = if cand_ln_p0 < problem.ln_k {
            problem.sse(cand_ln_p0, cand_r0)
        } else {
            f64::INFINITY
        };
        if cand_sse.is_finite() && cand_sse <= sse {
            let small = step[0].abs() <= 1e-14 * (1.0 + ln_p0.abs())
                && step[1].abs() <= 1e-14 * (1.0 + r0.abs());
            ln_p0 = cand_ln_p0;
            r0 = cand_r0;
            sse = cand_sse;
            lambda = (lambda * 0.1).max(1e-12);
            if small || sse == 0.0 {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }

    if !(r0.is_finite() && ln_p0.is_finite()) {
        return Err(ProjectionError::FitDivergence(
            "non-finite parameters".to_owned(),
        ));
    }
    if r0 < MIN_GROWTH_RATE {
        return Err(ProjectionError::FitDivergence(format!(
            "growth rate collapsed to {r0:e}; the data show no growth"
        )));
    }
    let params = LogisticParams::new(k, ln_p0.exp(), r0, t0_year)
        .map_err(|e| ProjectionError::FitDivergence(e.to_string()))?;
    Ok(LogisticFit {
        params,
        residual_ss: sse,
        iterations,
    })
}

/// Annual emissions scaled by transaction volume relative to `baseline_tx`.
/// Entry `i` is calendar year `start_year + i`.
pub fn project_logistic_emissions(
    baseline_annual: f64,
    baseline_tx: f64,
    params: &LogisticParams,
    start_year: i32,
    horizon_years: u32,
) -> Result<EmissionTrajectory, ProjectionError> {
    params.validate()?;
    if !(baseline_tx > 0.0 && baseline_tx.is_finite()) {
        return Err(ProjectionError::ZeroBaselineTx(baseline_tx));
    }
    if !(baseline_annual >= 0.0 && baseline_annual.is_finite()) {
        return Err(ProjectionError::NegativeBaseline(baseline_annual));
    }
    let annual = (0..horizon_years)
        .map(|i| {
            let t = f64::from(start_year + i as i32 - params.t0_year);
            baseline_annual * logistic_value(t, params) / baseline_tx
        })
        .collect();
    Ok(EmissionTrajectory::from_annual(start_year, annual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TransactionRecord;

    fn series(points: &[(i32, f64)]) -> TransactionSeries {
        TransactionSeries::new(
            points
                .iter()
                .map(|&(year, transactions)| TransactionRecord { year, transactions })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn value_at_origin_and_limit() {
        let p = LogisticParams::bitcoin_default();
        assert_eq!(logistic_value(0.0, &p), 9_714_478.0);
        let far = logistic_value(1e4, &p);
        assert!((far - 779.1e9).abs() / 779.1e9 < 1e-12);
    }

    #[test]
    fn inverting_the_2020_volume() {
        let p = LogisticParams::bitcoin_default();
        let t = logistic_time(112_559_843.0, &p).unwrap();
        assert!((t - 11.187).abs() < 1e-3, "{t}");
        assert!((logistic_value(t, &p) - 112_559_843.0).abs() < 1e-3);
        assert_eq!(logistic_time(0.0, &p), None);
        assert_eq!(logistic_time(p.k, &p), None);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LogisticParams::new(10.0, 20.0, 0.1, 0).is_err());
        assert!(LogisticParams::new(10.0, 0.0, 0.1, 0).is_err());
        assert!(LogisticParams::new(10.0, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn fit_recovers_generator() {
        let truth = LogisticParams::new(1e6, 1e3, 0.3, 2000).unwrap();
        let pts: Vec<_> = (0..12)
            .map(|i| (2000 + i, logistic_value(f64::from(i), &truth)))
            .collect();
        let fit = fit_logistic(&series(&pts), 1e6).unwrap();
        assert!(((fit.params.p0 - 1e3) / 1e3).abs() < 1e-6, "{:?}", fit);
        assert!(((fit.params.r0 - 0.3) / 0.3).abs() < 1e-6, "{:?}", fit);
        assert_eq!(fit.params.t0_year, 2000);
        assert!(fit.residual_ss < 1e-20);
    }

    #[test]
    fn fit_needs_three_points() {
        assert_eq!(
            fit_logistic(&series(&[(2009, 31_332.0), (2020, 112_559_843.0)]), 779.1e9),
            Err(ProjectionError::InsufficientData(2))
        );
    }

    #[test]
    fn fit_without_growth_diverges() {
        let pts: Vec<_> = (0..8).map(|i| (2010 + i, 5000.0)).collect();
        let err = fit_logistic(&series(&pts), 1e6).unwrap_err();
        assert!(matches!(err, ProjectionError::FitDivergence(_)), "{err:?}");
    }

    #[test]
    fn fit_capacity_below_data() {
        let pts = [(2010, 1.0), (2011, 10.0), (2012, 100.0)];
        assert!(matches!(
            fit_logistic(&series(&pts), 50.0),
            Err(ProjectionError::CapacityBelowData { .. })
        ));
    }

    #[test]
    fn saturated_curve_gives_flat_emissions() {
        let p = LogisticParams::new(1e6, 1e3, 0.5, 2000).unwrap();
        // Hundreds of years past the midpoint P(t) equals K to machine precision.
        let t = project_logistic_emissions(12.0, 1e6, &p, 2500, 10).unwrap();
        assert!(t.annual.iter().all(|&a| (a - 12.0).abs() < 1e-12));
    }

    #[test]
    fn zero_baseline() {
        let t = project_logistic_emissions(0.0, 1e6, &LogisticParams::bitcoin_default(), 2020, 20)
            .unwrap();
        assert!(t.annual.iter().chain(&t.cumulative).all(|&v| v == 0.0));
        assert_eq!(
            project_logistic_emissions(1.0, 0.0, &LogisticParams::bitcoin_default(), 2020, 20),
            Err(ProjectionError::ZeroBaselineTx(0.0))
        );
    }
}
