//! JSON scenario files.
//!
//! A scenario has up to six sections, all optional:
//!
//! ```json
//! {
//!   "datasets":    { "network_series": "eth.csv", "hardware": "hw.csv", ... },
//!   "pow":         { "emission_factor": { "2020": 0.4323 }, "electricity_price": { "2020": 0.1783 } },
//!   "pos":         { "total_stake": 110030966, "token_price": 307.5429, ... },
//!   "projection":  { "start_year": 2020, "horizon_years": 100, "logistic": { ... } },
//!   "climate":     { "lambda_low": 0.00027, "lambda_mean": 0.00045, "lambda_high": 0.00072 },
//!   "equilibrium": { "entry_batch": 100, "max_steps": 1000000, "bound": "lower" }
//! }
//! ```
//!
//! Unknown keys are errors. Dataset paths are relative to the scenario file
//! and must exist when the file is loaded. Omitted values take the reference
//! defaults of each model.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{DEFAULT_ENTRY_BATCH, DEFAULT_MAX_STEPS};
use crate::pos::PosParams;
use crate::pow::Bound;
use crate::projection::{ClimateParams, LogisticParams};
use crate::units::HardwareSpec;
use crate::weighting::WeightedFactors;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scenario {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("dataset {key} not found: {path}")]
    MissingDataset { key: &'static str, path: String },
    #[error("scenario has no {0} section")]
    MissingSection(&'static str),
    #[error("scenario does not name a {0} dataset")]
    MissingDatasetPath(&'static str),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub datasets: Datasets,
    #[serde(default)]
    pub pow: PowSection,
    #[serde(default)]
    pub pos: PosSection,
    #[serde(default)]
    pub projection: ProjectionSection,
    #[serde(default)]
    pub climate: ClimateParams,
    #[serde(default)]
    pub equilibrium: EquilibriumSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Datasets {
    pub country_profiles_pow: Option<PathBuf>,
    pub country_profiles_pos: Option<PathBuf>,
    pub network_series: Option<PathBuf>,
    pub hardware: Option<PathBuf>,
    pub adoption: Option<PathBuf>,
    pub transactions: Option<PathBuf>,
}

impl Datasets {
    fn entries_mut(&mut self) -> [(&'static str, &mut Option<PathBuf>); 6] {
        [
            ("country_profiles_pow", &mut self.country_profiles_pow),
            ("country_profiles_pos", &mut self.country_profiles_pos),
            ("network_series", &mut self.network_series),
            ("hardware", &mut self.hardware),
            ("adoption", &mut self.adoption),
            ("transactions", &mut self.transactions),
        ]
    }
}

/// Per-year tables for the proof-of-work bounds. Years missing here fall
/// back to `emission_factor`, then to the weighted PoW country table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowSection {
    pub emission_factor: Option<BTreeMap<i32, f64>>,
    pub lower_emission_factor: Option<BTreeMap<i32, f64>>,
    pub upper_emission_factor: Option<BTreeMap<i32, f64>>,
    pub electricity_price: Option<BTreeMap<i32, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PosSection {
    pub total_stake: f64,
    pub stake_per_validator: f64,
    pub token_price: f64,
    pub reward_constant: f64,
    pub depreciation_years: f64,
    /// Overrides the weighted PoS country table when given.
    pub weighted: Option<WeightedFactors>,
    pub lower_hardware: HardwareSpec,
    pub upper_hardware: HardwareSpec,
}

impl Default for PosSection {
    fn default() -> Self {
        let p = PosParams::default();
        Self {
            total_stake: p.total_stake,
            stake_per_validator: p.stake_per_validator,
            token_price: p.token_price,
            reward_constant: p.reward_constant,
            depreciation_years: p.depreciation_years,
            weighted: None,
            lower_hardware: HardwareSpec::jetson_tx2(),
            upper_hardware: HardwareSpec::xeon_server(),
        }
    }
}

impl PosSection {
    pub fn params(&self, weighted: WeightedFactors) -> PosParams {
        PosParams {
            total_stake: self.total_stake,
            stake_per_validator: self.stake_per_validator,
            token_price: self.token_price,
            reward_constant: self.reward_constant,
            depreciation_years: self.depreciation_years,
            weighted,
        }
    }

    pub fn hardware(&self, bound: Bound) -> &HardwareSpec {
        match bound {
            Bound::Lower => &self.lower_hardware,
            Bound::Upper => &self.upper_hardware,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectionSection {
    pub start_year: i32,
    pub horizon_years: u32,
    /// Warming threshold reported in the summary, °C.
    pub threshold_c: f64,
    pub adoption: Option<AdoptionSection>,
    pub logistic: Option<LogisticSection>,
}

impl Default for ProjectionSection {
    fn default() -> Self {
        Self {
            start_year: 2020,
            horizon_years: 100,
            threshold_c: 1.5,
            adoption: None,
            logistic: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdoptionSection {
    /// MtCO₂ per year at `start_year`.
    pub baseline_annual_mtco2: f64,
    /// Share of full adoption reached at `start_year`.
    pub current_fraction: f64,
    #[serde(default = "default_quantile")]
    pub quantile: f64,
    /// Year the technology was introduced; aligns it with the curves.
    #[serde(default = "default_introduction_year")]
    pub introduction_year: i32,
}

fn default_quantile() -> f64 {
    0.5
}

fn default_introduction_year() -> i32 {
    2015
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticSection {
    /// MtCO₂ per year at `start_year`.
    pub baseline_annual_mtco2: f64,
    /// Transactions per year that produce the baseline emissions.
    #[serde(default = "default_baseline_tx")]
    pub baseline_tx: f64,
    #[serde(default = "LogisticParams::bitcoin_default")]
    pub params: LogisticParams,
}

fn default_baseline_tx() -> f64 {
    112_559_843.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumSection {
    pub entry_batch: u64,
    pub max_steps: u64,
    pub bound: Bound,
}

impl Default for EquilibriumSection {
    fn default() -> Self {
        Self {
            entry_batch: DEFAULT_ENTRY_BATCH,
            max_steps: DEFAULT_MAX_STEPS,
            bound: Bound::Lower,
        }
    }
}

impl ScenarioFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut scenario = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        scenario.resolve_paths(base);
        scenario.check_datasets()?;
        Ok(scenario)
    }

    /// Parses without touching the filesystem.
    pub fn parse(text: &str, name: &str) -> Result<Self, ScenarioError> {
        let scenario: Self = serde_json::from_str(text).map_err(|source| ScenarioError::Parse {
            path: name.to_owned(),
            source,
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |e: &dyn std::fmt::Display| ScenarioError::Invalid(e.to_string());
        self.climate.validate().map_err(|e| invalid(&e))?;
        self.pos
            .lower_hardware
            .validate()
            .map_err(|e| invalid(&e))?;
        self.pos
            .upper_hardware
            .validate()
            .map_err(|e| invalid(&e))?;
        self.pos
            .params(self.pos.weighted.unwrap_or_default())
            .validate()
            .map_err(|e| invalid(&e))?;
        if let Some(l) = &self.projection.logistic {
            l.params.validate().map_err(|e| invalid(&e))?;
        }
        if let Some(a) = &self.projection.adoption {
            if !(0.0..=1.0).contains(&a.quantile) {
                return Err(ScenarioError::Invalid(format!(
                    "adoption quantile {} is outside [0, 1]",
                    a.quantile
                )));
            }
            if a.introduction_year > self.projection.start_year {
                return Err(ScenarioError::Invalid(
                    "introduction_year is after start_year".to_owned(),
                ));
            }
        }
        if self.equilibrium.entry_batch == 0 || self.equilibrium.max_steps == 0 {
            return Err(ScenarioError::Invalid(
                "entry_batch and max_steps must be at least 1".to_owned(),
            ));
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        for (_, path) in self.datasets.entries_mut() {
            if let Some(p) = path {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }

    fn check_datasets(&mut self) -> Result<(), ScenarioError> {
        for (key, path) in self.datasets.entries_mut() {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(ScenarioError::MissingDataset {
                        key,
                        path: p.display().to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_defaults() {
        let s = ScenarioFile::parse("{}", "t").unwrap();
        assert_eq!(s.pos.total_stake, 110_030_966.0);
        assert_eq!(s.pos.lower_hardware, HardwareSpec::jetson_tx2());
        assert_eq!(s.projection.horizon_years, 100);
        assert_eq!(s.climate, ClimateParams::default());
        assert!(s.projection.logistic.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            ScenarioFile::parse(r#"{"pos": {"stake": 1}}"#, "t"),
            Err(ScenarioError::Parse { .. })
        ));
        assert!(matches!(
            ScenarioFile::parse(r#"{"weather": {}}"#, "t"),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn year_keyed_maps() {
        let s = ScenarioFile::parse(
            r#"{"pow": {"emission_factor": {"2016": 0.48, "2020": 0.4323}}}"#,
            "t",
        )
        .unwrap();
        let f = s.pow.emission_factor.unwrap();
        assert_eq!(f[&2020], 0.4323);
    }

    #[test]
    fn logistic_section_defaults() {
        let s = ScenarioFile::parse(
            r#"{"projection": {"logistic": {"baseline_annual_mtco2": 43.76}}}"#,
            "t",
        )
        .unwrap();
        let l = s.projection.logistic.unwrap();
        assert_eq!(l.params, LogisticParams::bitcoin_default());
        assert_eq!(l.baseline_tx, 112_559_843.0);
    }

    #[test]
    fn invalid_values() {
        assert!(matches!(
            ScenarioFile::parse(
                r#"{"climate": {"lambda_low": 2, "lambda_mean": 1, "lambda_high": 3}}"#,
                "t"
            ),
            Err(ScenarioError::Invalid(_))
        ));
        assert!(matches!(
            ScenarioFile::parse(r#"{"pos": {"total_stake": -5}}"#, "t"),
            Err(ScenarioError::Invalid(_))
        ));
    }

    #[test]
    fn missing_dataset_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        std::fs::write(&path, r#"{"datasets": {"hardware": "nope.csv"}}"#).unwrap();
        let err = ScenarioFile::load(&path).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::MissingDataset {
                key: "hardware",
                ..
            }
        ));
        assert!(err.to_string().contains("nope.csv"));
    }
}
