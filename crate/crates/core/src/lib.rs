//! Energy use, carbon footprint and projected warming of proof-of-work and
//! proof-of-stake blockchains.
//!
//! * [`pow`]: daily and annual lower/upper energy bounds for mining networks.
//! * [`pos`]: staker break-even model for proof-of-stake networks, with an
//!   agent-based cross-check in [`equilibrium`].
//! * [`weighting`]: node-share weighted prices and emission factors.
//! * [`projection`]: adoption and logistic emission projections and the
//!   warming they imply.
//! * [`ingest`] and [`scenario`]: CSV datasets and JSON scenario files.

pub mod cli;
pub mod equilibrium;
pub mod ingest;
pub mod pos;
pub mod pow;
pub mod projection;
pub mod report;
pub mod scenario;
pub mod units;
pub mod weighting;

pub use units::{
    convert_carbon, convert_energy, CarbonQuantity, CarbonUnit, EmissionFactor, EnergyQuantity,
    EnergyUnit, HardwareSpec, MoneyRate, MoneyUnit, UnitError,
};
