//! Physical and monetary quantities shared by every model.
//!
//! Energy and carbon quantities carry their unit with them. Conversions
//! between units are exact powers of 10³, applied as a single multiply or
//! divide by a power of ten so that a round trip is exact to one ulp.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("{what} must be non-negative and finite, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("emission factor {0} kgCO2/kWh is outside the accepted range [0, 2]")]
    EmissionFactorOutOfRange(f64),
    #[error("expected a rate in {expected:?}, got {found:?}")]
    UnitMismatch {
        expected: MoneyUnit,
        found: MoneyUnit,
    },
}

pub(crate) fn check_non_negative(what: &'static str, value: f64) -> Result<f64, UnitError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(UnitError::Negative { what, value })
    }
}

pub(crate) fn check_positive(what: &'static str, value: f64) -> Result<f64, UnitError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(UnitError::NonPositive { what, value })
    }
}

/// Rescale `value` from 10^`from` to 10^`to` base units with one rounding.
fn rescale(value: f64, from: i32, to: i32) -> f64 {
    let shift = from - to;
    if shift >= 0 {
        value * 10f64.powi(shift)
    } else {
        value / 10f64.powi(-shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyUnit {
    Wh,
    KWh,
    MWh,
    TWh,
}

impl EnergyUnit {
    pub const ALL: [EnergyUnit; 4] = [
        EnergyUnit::Wh,
        EnergyUnit::KWh,
        EnergyUnit::MWh,
        EnergyUnit::TWh,
    ];

    fn exponent(self) -> i32 {
        match self {
            EnergyUnit::Wh => 0,
            EnergyUnit::KWh => 3,
            EnergyUnit::MWh => 6,
            EnergyUnit::TWh => 12,
        }
    }
}

/// A non-negative amount of electrical energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyQuantity {
    value: f64,
    unit: EnergyUnit,
}

impl EnergyQuantity {
    pub fn new(value: f64, unit: EnergyUnit) -> Result<Self, UnitError> {
        check_non_negative("energy", value)?;
        Ok(Self { value, unit })
    }

    pub fn zero(unit: EnergyUnit) -> Self {
        Self { value: 0.0, unit }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> EnergyUnit {
        self.unit
    }

    /// The same quantity expressed in `target`.
    pub fn to(self, target: EnergyUnit) -> Self {
        Self {
            value: rescale(self.value, self.unit.exponent(), target.exponent()),
            unit: target,
        }
    }

    /// Numeric value in `target` units.
    pub fn in_unit(self, target: EnergyUnit) -> f64 {
        self.to(target).value
    }
}

pub fn convert_energy(q: EnergyQuantity, target: EnergyUnit) -> EnergyQuantity {
    q.to(target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CarbonUnit {
    KgCo2,
    TCo2,
    MtCo2,
    GtCo2,
}

impl CarbonUnit {
    pub const ALL: [CarbonUnit; 4] = [
        CarbonUnit::KgCo2,
        CarbonUnit::TCo2,
        CarbonUnit::MtCo2,
        CarbonUnit::GtCo2,
    ];

    fn exponent(self) -> i32 {
        match self {
            CarbonUnit::KgCo2 => 0,
            CarbonUnit::TCo2 => 3,
            CarbonUnit::MtCo2 => 9,
            CarbonUnit::GtCo2 => 12,
        }
    }
}

/// A non-negative mass of emitted CO₂(-equivalent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarbonQuantity {
    value: f64,
    unit: CarbonUnit,
}

impl CarbonQuantity {
    pub fn new(value: f64, unit: CarbonUnit) -> Result<Self, UnitError> {
        check_non_negative("carbon", value)?;
        Ok(Self { value, unit })
    }

    pub fn zero(unit: CarbonUnit) -> Self {
        Self { value: 0.0, unit }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> CarbonUnit {
        self.unit
    }

    pub fn to(self, target: CarbonUnit) -> Self {
        Self {
            value: rescale(self.value, self.unit.exponent(), target.exponent()),
            unit: target,
        }
    }

    pub fn in_unit(self, target: CarbonUnit) -> f64 {
        self.to(target).value
    }
}

pub fn convert_carbon(q: CarbonQuantity, target: CarbonUnit) -> CarbonQuantity {
    q.to(target)
}

/// Grid emission intensity in kgCO₂eq per kWh.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EmissionFactor(f64);

impl EmissionFactor {
    /// Upper sanity bound; the dirtiest coal grids stay below 1.2.
    pub const MAX: f64 = 2.0;

    pub fn new(kg_per_kwh: f64) -> Result<Self, UnitError> {
        check_non_negative("emission factor", kg_per_kwh)?;
        if kg_per_kwh > Self::MAX {
            return Err(UnitError::EmissionFactorOutOfRange(kg_per_kwh));
        }
        Ok(Self(kg_per_kwh))
    }

    pub fn kg_per_kwh(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EmissionFactor {
    type Error = UnitError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<EmissionFactor> for f64 {
    fn from(f: EmissionFactor) -> f64 {
        f.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoneyUnit {
    UsdPerKwh,
    UsdPerMonth,
    Usd,
    UsdPerToken,
}

/// A non-negative USD amount or price. All money in the models is USD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoneyRate {
    value: f64,
    unit: MoneyUnit,
}

impl MoneyRate {
    pub fn new(value: f64, unit: MoneyUnit) -> Result<Self, UnitError> {
        check_non_negative("money amount", value)?;
        Ok(Self { value, unit })
    }

    pub fn usd_per_kwh(value: f64) -> Result<Self, UnitError> {
        Self::new(value, MoneyUnit::UsdPerKwh)
    }

    pub fn usd_per_month(value: f64) -> Result<Self, UnitError> {
        Self::new(value, MoneyUnit::UsdPerMonth)
    }

    pub fn usd(value: f64) -> Result<Self, UnitError> {
        Self::new(value, MoneyUnit::Usd)
    }

    pub fn usd_per_token(value: f64) -> Result<Self, UnitError> {
        Self::new(value, MoneyUnit::UsdPerToken)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> MoneyUnit {
        self.unit
    }

    /// The numeric value, provided the rate is denominated in `expected`.
    pub fn expect(&self, expected: MoneyUnit) -> Result<f64, UnitError> {
        if self.unit == expected {
            Ok(self.value)
        } else {
            Err(UnitError::UnitMismatch {
                expected,
                found: self.unit,
            })
        }
    }
}

/// A piece of computing hardware: a staking host or a mining rig.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareSpec {
    pub name: String,
    /// Wall power draw in W.
    pub power_w: f64,
    pub price_usd: f64,
    /// Mining efficiency in J/MH; absent for non-mining hosts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency_j_per_mh: Option<f64>,
    pub release_year: i32,
}

impl HardwareSpec {
    pub fn new(
        name: impl Into<String>,
        power_w: f64,
        price_usd: f64,
        efficiency_j_per_mh: Option<f64>,
        release_year: i32,
    ) -> Result<Self, UnitError> {
        let spec = Self {
            name: name.into(),
            power_w,
            price_usd,
            efficiency_j_per_mh,
            release_year,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), UnitError> {
        check_positive("hardware power", self.power_w)?;
        check_positive("hardware price", self.price_usd)?;
        if let Some(e) = self.efficiency_j_per_mh {
            check_positive("hardware efficiency", e)?;
        }
        Ok(())
    }

    /// NVIDIA Jetson TX2 module running a beacon node: the low-power staking host.
    pub fn jetson_tx2() -> Self {
        Self {
            name: "Jetson TX2".to_owned(),
            power_w: 5.0,
            price_usd: 490.64,
            efficiency_j_per_mh: None,
            release_year: 2017,
        }
    }

    /// Intel Xeon E-2246G server: the high-performance staking host.
    pub fn xeon_server() -> Self {
        Self {
            name: "Intel Xeon server".to_owned(),
            power_w: 81.0,
            price_usd: 2181.72,
            efficiency_j_per_mh: None,
            release_year: 2019,
        }
    }
}
