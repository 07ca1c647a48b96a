//! CSV and JSON renderings of model results.
//!
//! Energies and carbon are printed to four decimals (TWh, MtCO₂), counts to
//! the nearest integer. Projection series keep six decimals since they are
//! meant for plotting. JSON output carries full precision.

use serde::Serialize;
use serde_json::{json, Value};

use crate::equilibrium::SimOutcome;
use crate::pos::{PosBounds, PosResult};
use crate::pow::{AnnualFootprint, Bound};
use crate::projection::{Crossing, EmissionTrajectory, LogisticFit, TemperatureBands};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A rendered result: a table plus its JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json: Value,
}

impl Report {
    pub fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }
}

fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    // Avoid "-0.0000" for tiny negatives.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_owned()
    } else {
        s
    }
}

fn count(x: f64) -> String {
    fixed(x.round(), 0)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn pow_report(series: &[AnnualFootprint]) -> Report {
    let rows = series
        .iter()
        .map(|f| {
            vec![
                f.year.to_string(),
                f.bound.as_str().to_owned(),
                fixed(f.energy_twh(), 4),
                fixed(f.carbon_mtco2(), 4),
                fixed(f.emission_factor.kg_per_kwh(), 4),
            ]
        })
        .collect();
    let json = series
        .iter()
        .map(|f| {
            json!({
                "year": f.year,
                "bound": f.bound,
                "energy_twh": f.energy_twh(),
                "carbon_mtco2": f.carbon_mtco2(),
                "emission_factor_kgco2_per_kwh": f.emission_factor.kg_per_kwh(),
            })
        })
        .collect();
    Report {
        header: vec![
            "year",
            "bound",
            "energy_twh",
            "carbon_mtco2",
            "emission_factor_kgco2_per_kwh",
        ],
        rows,
        json: Value::Array(json),
    }
}

pub fn pos_report(bounds: &PosBounds, lower_hardware: &str, upper_hardware: &str) -> Report {
    let row = |bound: Bound, hw: &str, r: &PosResult| {
        vec![
            bound.as_str().to_owned(),
            hw.to_owned(),
            count(r.validator_count),
            fixed(r.annual_return_per_validator, 4),
            fixed(r.staker_annual_cost, 4),
            fixed(r.validators_per_node, 4),
            count(r.node_count),
            fixed(r.annual_energy_twh, 4),
            fixed(r.annual_carbon_mtco2, 4),
        ]
    };
    let entry = |bound: Bound, hw: &str, r: &PosResult| {
        let mut v = to_value(r);
        v["bound"] = to_value(&bound);
        v["hardware"] = Value::from(hw);
        v
    };
    Report {
        header: vec![
            "bound",
            "hardware",
            "validator_count",
            "annual_return_per_validator_usd",
            "staker_annual_cost_usd",
            "validators_per_node",
            "node_count",
            "annual_energy_twh",
            "annual_carbon_mtco2",
        ],
        rows: vec![
            row(Bound::Lower, lower_hardware, &bounds.lower),
            row(Bound::Upper, upper_hardware, &bounds.upper),
        ],
        json: json!([
            entry(Bound::Lower, lower_hardware, &bounds.lower),
            entry(Bound::Upper, upper_hardware, &bounds.upper),
        ]),
    }
}

/// Crossing years of the low, mean and high bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossings {
    pub threshold_c: f64,
    pub low: Option<Crossing>,
    pub mean: Option<Crossing>,
    pub high: Option<Crossing>,
}

impl Crossings {
    /// One-line summary, e.g. `1.5 °C crossing: low=never mean=2071 high=2049`.
    pub fn summary(&self) -> String {
        let year =
            |c: &Option<Crossing>| c.map_or_else(|| "never".to_owned(), |c| c.year.to_string());
        format!(
            "{} °C crossing: low={} mean={} high={}",
            self.threshold_c,
            year(&self.low),
            year(&self.mean),
            year(&self.high)
        )
    }
}

pub fn projection_report(
    traj: &EmissionTrajectory,
    bands: &TemperatureBands,
    crossings: &Crossings,
) -> Report {
    let rows = traj
        .years()
        .enumerate()
        .map(|(i, year)| {
            vec![
                year.to_string(),
                fixed(traj.annual[i], 6),
                fixed(traj.cumulative[i], 6),
                fixed(bands.low[i], 6),
                fixed(bands.mean[i], 6),
                fixed(bands.high[i], 6),
            ]
        })
        .collect();
    let series: Vec<Value> = traj
        .years()
        .enumerate()
        .map(|(i, year)| {
            json!({
                "year": year,
                "annual_mtco2": traj.annual[i],
                "cumulative_gtco2": traj.cumulative[i],
                "dT_low_c": bands.low[i],
                "dT_mean_c": bands.mean[i],
                "dT_high_c": bands.high[i],
            })
        })
        .collect();
    Report {
        header: vec![
            "year",
            "annual_mtco2",
            "cumulative_gtco2",
            "dT_low_c",
            "dT_mean_c",
            "dT_high_c",
        ],
        rows,
        json: json!({ "series": series, "crossings": crossings }),
    }
}

pub fn equilibrium_report(
    bound: Bound,
    seed: u64,
    outcome: &SimOutcome,
    closed_form_nodes: f64,
) -> Report {
    let relative_error = (outcome.node_count as f64 - closed_form_nodes).abs() / closed_form_nodes;
    Report {
        header: vec![
            "bound",
            "seed",
            "node_count",
            "validators_assigned",
            "annual_energy_twh",
            "converged",
            "steps_used",
            "closed_form_node_count",
            "relative_error",
        ],
        rows: vec![vec![
            bound.as_str().to_owned(),
            seed.to_string(),
            outcome.node_count.to_string(),
            fixed(outcome.validators_assigned, 4),
            fixed(outcome.total_energy, 4),
            outcome.converged.to_string(),
            outcome.steps_used.to_string(),
            fixed(closed_form_nodes, 2),
            format!("{relative_error:.6e}"),
        ]],
        json: json!({
            "bound": bound,
            "seed": seed,
            "outcome": outcome,
            "closed_form_node_count": closed_form_nodes,
            "relative_error": relative_error,
        }),
    }
}

pub fn fit_report(fit: &LogisticFit) -> Report {
    let p = &fit.params;
    Report {
        header: vec!["k", "p0", "r0", "t0_year", "residual_ss", "iterations"],
        rows: vec![vec![
            p.k.to_string(),
            p.p0.to_string(),
            p.r0.to_string(),
            p.t0_year.to_string(),
            format!("{:e}", fit.residual_ss),
            fit.iterations.to_string(),
        ]],
        json: to_value(fit),
    }
}
