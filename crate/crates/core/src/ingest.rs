//! CSV loaders for the model inputs.
//!
//! Every file has a header row; columns are matched by name, so column order
//! is free. Files are UTF-8 with `.` as decimal separator and no thousands
//! separators. Each loader has a `read_*` twin that takes any reader, and a
//! `write_*` counterpart producing a file the loader accepts unchanged.
//!
//! | file | columns |
//! |---|---|
//! | country profiles | `country_code,node_share[,node_count],electricity_price_usd_per_kwh,internet_price_usd_per_month,emission_factor_kgco2_per_kwh` |
//! | network series | `date,hash_rate_ghs,block_reward,tx_fees[,uncle_reward][,uncle_incl_reward],market_price_usd` |
//! | hardware | `name,power_w,price_usd,efficiency_j_per_mh,release_year` |
//! | adoption | `technology,years_since_introduction,adoption_fraction` |
//! | transactions | `year,transactions` |

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::HardwareSpec;

/// Relative slack on the raw node-share sum before a table is rejected.
pub const SHARE_SUM_TOLERANCE: f64 = 0.01;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}: {message}")]
    Schema {
        source_name: String,
        message: String,
    },
    #[error("{source_name}: node shares sum to {sum}, more than 1% away from 1")]
    ShareSum { source_name: String, sum: f64 },
    #[error("{source_name}: duplicate country code {code}")]
    DuplicateCountry { source_name: String, code: String },
    #[error("{source_name}: duplicate hardware name {name}")]
    DuplicateHardware { source_name: String, name: String },
    #[error("{source_name}: line {line}: date {date} does not follow {previous}")]
    NonMonotoneDate {
        source_name: String,
        line: usize,
        previous: NaiveDate,
        date: NaiveDate,
    },
    #[error("{source_name}: line {line}: {key} {value} does not follow {previous}")]
    NonMonotoneYear {
        source_name: String,
        line: usize,
        key: String,
        previous: i64,
        value: i64,
    },
    #[error("{source_name}: line {line}: {column} is negative ({value})")]
    NegativeValue {
        source_name: String,
        line: usize,
        column: String,
        value: f64,
    },
    #[error("{source_name}: line {line}: {column} = {value} is outside {range}")]
    Range {
        source_name: String,
        line: usize,
        column: String,
        value: f64,
        range: &'static str,
    },
}

// ---------------------------------------------------------------------------
// Data types

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryProfile {
    /// ISO 3166 alpha-2 code; user-assigned codes (e.g. `ZZ`) are accepted.
    pub country_code: String,
    pub node_share: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<f64>,
    pub electricity_price_usd_per_kwh: f64,
    pub internet_price_usd_per_month: f64,
    pub emission_factor_kgco2_per_kwh: f64,
}

/// Per-country node shares, prices and grid emission factors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CountryProfileTable {
    rows: Vec<CountryProfile>,
}

impl CountryProfileTable {
    /// Validates and, when the raw shares are within 1% of 1, renormalizes them.
    pub fn new(rows: Vec<CountryProfile>) -> Result<Self, IngestError> {
        Self::build("<table>", rows)
    }

    fn build(source_name: &str, mut rows: Vec<CountryProfile>) -> Result<Self, IngestError> {
        let mut seen = HashSet::new();
        for (i, row) in rows.iter().enumerate() {
            let line = i + 2;
            if !seen.insert(row.country_code.clone()) {
                return Err(IngestError::DuplicateCountry {
                    source_name: source_name.to_owned(),
                    code: row.country_code.clone(),
                });
            }
            check_code(source_name, line, &row.country_code)?;
            for (column, value) in [
                ("node_share", row.node_share),
                (
                    "electricity_price_usd_per_kwh",
                    row.electricity_price_usd_per_kwh,
                ),
                (
                    "internet_price_usd_per_month",
                    row.internet_price_usd_per_month,
                ),
                (
                    "emission_factor_kgco2_per_kwh",
                    row.emission_factor_kgco2_per_kwh,
                ),
            ] {
                non_negative(source_name, line, column, value)?;
            }
            if let Some(count) = row.node_count {
                non_negative(source_name, line, "node_count", count)?;
            }
            in_unit_interval(source_name, line, "node_share", row.node_share)?;
            if row.emission_factor_kgco2_per_kwh > crate::units::EmissionFactor::MAX {
                return Err(IngestError::Range {
                    source_name: source_name.to_owned(),
                    line,
                    column: "emission_factor_kgco2_per_kwh".to_owned(),
                    value: row.emission_factor_kgco2_per_kwh,
                    range: "[0, 2]",
                });
            }
        }
        if rows.is_empty() {
            return Ok(Self { rows });
        }
        let sum: f64 = rows.iter().map(|r| r.node_share).sum();
        if (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
            return Err(IngestError::ShareSum {
                source_name: source_name.to_owned(),
                sum,
            });
        }
        // Sums already equal to 1 up to rounding are left untouched so that a
        // written table reloads bit-identically.
        if (sum - 1.0).abs() > 1e-12 {
            for row in &mut rows {
                row.node_share /= sum;
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[CountryProfile] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn share_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.node_share).sum()
    }
}

/// Daily network totals. Rewards are token amounts per day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkDay {
    pub date: NaiveDate,
    pub hash_rate_ghs: f64,
    pub block_reward: f64,
    pub tx_fees: f64,
    pub uncle_reward: f64,
    pub uncle_incl_reward: f64,
    pub market_price_usd: f64,
}

impl NetworkDay {
    pub fn year(&self) -> i32 {
        self.date.year()
    }

    pub fn total_reward(&self) -> f64 {
        self.block_reward + self.tx_fees + self.uncle_reward + self.uncle_incl_reward
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NetworkDaySeries {
    days: Vec<NetworkDay>,
}

impl NetworkDaySeries {
    pub fn new(days: Vec<NetworkDay>) -> Result<Self, IngestError> {
        Self::build("<series>", days)
    }

    fn build(source_name: &str, days: Vec<NetworkDay>) -> Result<Self, IngestError> {
        for (i, day) in days.iter().enumerate() {
            let line = i + 2;
            for (column, value) in [
                ("hash_rate_ghs", day.hash_rate_ghs),
                ("block_reward", day.block_reward),
                ("tx_fees", day.tx_fees),
                ("uncle_reward", day.uncle_reward),
                ("uncle_incl_reward", day.uncle_incl_reward),
                ("market_price_usd", day.market_price_usd),
            ] {
                non_negative(source_name, line, column, value)?;
            }
            if i > 0 && days[i - 1].date >= day.date {
                return Err(IngestError::NonMonotoneDate {
                    source_name: source_name.to_owned(),
                    line,
                    previous: days[i - 1].date,
                    date: day.date,
                });
            }
        }
        Ok(Self { days })
    }

    pub fn days(&self) -> &[NetworkDay] {
        &self.days
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Distinct calendar years present, ascending.
    pub fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.days.iter().map(NetworkDay::year).collect();
        years.dedup();
        years
    }

    /// The days falling in `year`, in date order.
    pub fn days_in_year(&self, year: i32) -> &[NetworkDay] {
        let start = self.days.partition_point(|d| d.year() < year);
        let end = self.days.partition_point(|d| d.year() <= year);
        &self.days[start..end]
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HardwareCatalog {
    entries: Vec<HardwareSpec>,
}

impl HardwareCatalog {
    pub fn new(entries: Vec<HardwareSpec>) -> Result<Self, IngestError> {
        Self::build("<catalog>", entries)
    }

    fn build(source_name: &str, entries: Vec<HardwareSpec>) -> Result<Self, IngestError> {
        let mut names = HashSet::new();
        for (i, hw) in entries.iter().enumerate() {
            let line = i + 2;
            if !names.insert(hw.name.clone()) {
                return Err(IngestError::DuplicateHardware {
                    source_name: source_name.to_owned(),
                    name: hw.name.clone(),
                });
            }
            positive(source_name, line, "power_w", hw.power_w)?;
            positive(source_name, line, "price_usd", hw.price_usd)?;
            if let Some(e) = hw.efficiency_j_per_mh {
                positive(source_name, line, "efficiency_j_per_mh", e)?;
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[HardwareSpec] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdoptionPoint {
    pub years_since_introduction: u32,
    pub adoption_fraction: f64,
}

/// Historical adoption curves keyed by technology name.
///
/// Curves may dip; only the [0, 1] range and increasing years are enforced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AdoptionCurveSet {
    curves: BTreeMap<String, Vec<AdoptionPoint>>,
}

impl AdoptionCurveSet {
    pub fn new(curves: BTreeMap<String, Vec<AdoptionPoint>>) -> Result<Self, IngestError> {
        let source_name = "<curves>";
        for (tech, points) in &curves {
            for (i, p) in points.iter().enumerate() {
                in_unit_interval(source_name, i + 2, "adoption_fraction", p.adoption_fraction)?;
                if i > 0 && points[i - 1].years_since_introduction >= p.years_since_introduction {
                    return Err(IngestError::NonMonotoneYear {
                        source_name: source_name.to_owned(),
                        line: i + 2,
                        key: format!("{tech} years_since_introduction"),
                        previous: points[i - 1].years_since_introduction.into(),
                        value: p.years_since_introduction.into(),
                    });
                }
            }
        }
        Ok(Self { curves })
    }

    pub fn curves(&self) -> &BTreeMap<String, Vec<AdoptionPoint>> {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransactionRecord {
    pub year: i32,
    pub transactions: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransactionSeries {
    rows: Vec<TransactionRecord>,
}

impl TransactionSeries {
    pub fn new(rows: Vec<TransactionRecord>) -> Result<Self, IngestError> {
        Self::build("<transactions>", rows)
    }

    fn build(source_name: &str, rows: Vec<TransactionRecord>) -> Result<Self, IngestError> {
        for (i, row) in rows.iter().enumerate() {
            let line = i + 2;
            non_negative(source_name, line, "transactions", row.transactions)?;
            if i > 0 && rows[i - 1].year >= row.year {
                return Err(IngestError::NonMonotoneYear {
                    source_name: source_name.to_owned(),
                    line,
                    key: "year".to_owned(),
                    previous: rows[i - 1].year.into(),
                    value: row.year.into(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[TransactionRecord] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_transactions(&self) -> f64 {
        self.rows.iter().map(|r| r.transactions).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Validation helpers

fn check_code(source_name: &str, line: usize, code: &str) -> Result<(), IngestError> {
    if code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase()) {
        Ok(())
    } else {
        Err(schema(
            source_name,
            format!("line {line}: country_code {code:?} is not an alpha-2 code"),
        ))
    }
}

fn non_negative(
    source_name: &str,
    line: usize,
    column: &str,
    value: f64,
) -> Result<(), IngestError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else if value < 0.0 {
        Err(IngestError::NegativeValue {
            source_name: source_name.to_owned(),
            line,
            column: column.to_owned(),
            value,
        })
    } else {
        Err(schema(
            source_name,
            format!("line {line}: {column} is not finite"),
        ))
    }
}

fn positive(source_name: &str, line: usize, column: &str, value: f64) -> Result<(), IngestError> {
    non_negative(source_name, line, column, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(IngestError::Range {
            source_name: source_name.to_owned(),
            line,
            column: column.to_owned(),
            value,
            range: "(0, inf)",
        })
    }
}

fn in_unit_interval(
    source_name: &str,
    line: usize,
    column: &str,
    value: f64,
) -> Result<(), IngestError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(IngestError::Range {
            source_name: source_name.to_owned(),
            line,
            column: column.to_owned(),
            value,
            range: "[0, 1]",
        })
    }
}

fn schema(source_name: &str, message: impl Into<String>) -> IngestError {
    IngestError::Schema {
        source_name: source_name.to_owned(),
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Generic sheet reader

struct Sheet {
    source_name: String,
    columns: HashMap<String, usize>,
    records: Vec<csv::StringRecord>,
}

impl Sheet {
    fn read<R: Read>(reader: R, source_name: &str) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let csv_err = |e: csv::Error| schema(source_name, e.to_string());
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let mut columns = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if columns.insert(h.to_owned(), i).is_some() {
                return Err(schema(source_name, format!("duplicate column {h}")));
            }
        }
        let records = rdr
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(csv_err)?;
        Ok(Self {
            source_name: source_name.to_owned(),
            columns,
            records,
        })
    }

    fn column(&self, name: &str) -> Result<usize, IngestError> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| schema(&self.source_name, format!("missing column {name}")))
    }

    fn optional_column(&self, name: &str) -> Option<usize> {
        self.columns.get(name).copied()
    }

    /// Data rows paired with their 1-based line number in the file.
    fn rows(&self) -> impl Iterator<Item = (usize, &csv::StringRecord)> {
        self.records.iter().enumerate().map(|(i, r)| (i + 2, r))
    }

    fn text<'a>(
        &self,
        record: &'a csv::StringRecord,
        line: usize,
        idx: usize,
    ) -> Result<&'a str, IngestError> {
        record
            .get(idx)
            .ok_or_else(|| schema(&self.source_name, format!("line {line}: too few fields")))
    }

    fn number(
        &self,
        record: &csv::StringRecord,
        line: usize,
        idx: usize,
        name: &str,
    ) -> Result<f64, IngestError> {
        let raw = self.text(record, line, idx)?;
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                schema(
                    &self.source_name,
                    format!("line {line}: {name} = {raw:?} is not a number"),
                )
            })
    }

    fn optional_number(
        &self,
        record: &csv::StringRecord,
        line: usize,
        idx: Option<usize>,
        name: &str,
    ) -> Result<Option<f64>, IngestError> {
        match idx {
            Some(i) if !self.text(record, line, i)?.is_empty() => {
                self.number(record, line, i, name).map(Some)
            }
            _ => Ok(None),
        }
    }

    fn integer<T: std::str::FromStr>(
        &self,
        record: &csv::StringRecord,
        line: usize,
        idx: usize,
        name: &str,
    ) -> Result<T, IngestError> {
        let raw = self.text(record, line, idx)?;
        raw.parse::<T>().map_err(|_| {
            schema(
                &self.source_name,
                format!("line {line}: {name} = {raw:?} is not an integer"),
            )
        })
    }
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn io_err(name: &str) -> impl Fn(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: name.to_owned(),
        source,
    }
}

fn csv_write_err(name: &str) -> impl Fn(csv::Error) -> IngestError + '_ {
    move |e| schema(name, e.to_string())
}

// ---------------------------------------------------------------------------
// Country profiles

pub fn load_country_profiles(path: impl AsRef<Path>) -> Result<CountryProfileTable, IngestError> {
    let path = path.as_ref();
    read_country_profiles(open(path)?, &path.display().to_string())
}

/// Reads a country table. Shares come from `node_share` when every row has
/// one, otherwise from `node_count` normalized by the total.
pub fn read_country_profiles<R: Read>(
    reader: R,
    source_name: &str,
) -> Result<CountryProfileTable, IngestError> {
    let sheet = Sheet::read(reader, source_name)?;
    let code_col = sheet.column("country_code")?;
    let share_col = sheet.optional_column("node_share");
    let count_col = sheet.optional_column("node_count");
    if share_col.is_none() && count_col.is_none() {
        return Err(schema(
            source_name,
            "missing column node_share (or node_count)",
        ));
    }
    let ele_col = sheet.column("electricity_price_usd_per_kwh")?;
    let int_col = sheet.column("internet_price_usd_per_month")?;
    let ef_col = sheet.column("emission_factor_kgco2_per_kwh")?;

    let mut rows = Vec::with_capacity(sheet.records.len());
    let mut shares = Vec::with_capacity(sheet.records.len());
    for (line, rec) in sheet.rows() {
        shares.push(sheet.optional_number(rec, line, share_col, "node_share")?);
        rows.push(CountryProfile {
            country_code: sheet.text(rec, line, code_col)?.to_owned(),
            node_share: 0.0,
            node_count: sheet.optional_number(rec, line, count_col, "node_count")?,
            electricity_price_usd_per_kwh: sheet.number(
                rec,
                line,
                ele_col,
                "electricity_price_usd_per_kwh",
            )?,
            internet_price_usd_per_month: sheet.number(
                rec,
                line,
                int_col,
                "internet_price_usd_per_month",
            )?,
            emission_factor_kgco2_per_kwh: sheet.number(
                rec,
                line,
                ef_col,
                "emission_factor_kgco2_per_kwh",
            )?,
        });
    }

    if shares.iter().all(Option::is_some) {
        for (row, share) in rows.iter_mut().zip(&shares) {
            row.node_share = share.unwrap_or_default();
        }
    } else if rows.iter().all(|r| r.node_count.is_some()) {
        for (i, row) in rows.iter().enumerate() {
            non_negative(
                source_name,
                i + 2,
                "node_count",
                row.node_count.unwrap_or_default(),
            )?;
        }
        let total: f64 = rows.iter().filter_map(|r| r.node_count).sum();
        if total <= 0.0 {
            return Err(IngestError::ShareSum {
                source_name: source_name.to_owned(),
                sum: 0.0,
            });
        }
        for row in &mut rows {
            row.node_share = row.node_count.unwrap_or_default() / total;
        }
    } else {
        return Err(schema(
            source_name,
            "every row needs node_share or every row needs node_count",
        ));
    }
    CountryProfileTable::build(source_name, rows)
}

pub fn write_country_profiles<W: Write>(
    table: &CountryProfileTable,
    writer: W,
) -> Result<(), IngestError> {
    let name = "<country profiles>";
    let with_counts = table.rows.iter().any(|r| r.node_count.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["country_code", "node_share"];
    if with_counts {
        header.push("node_count");
    }
    header.extend([
        "electricity_price_usd_per_kwh",
        "internet_price_usd_per_month",
        "emission_factor_kgco2_per_kwh",
    ]);
    w.write_record(&header).map_err(csv_write_err(name))?;
    for r in &table.rows {
        let mut fields = vec![r.country_code.clone(), r.node_share.to_string()];
        if with_counts {
            fields.push(r.node_count.map(|c| c.to_string()).unwrap_or_default());
        }
        fields.extend([
            r.electricity_price_usd_per_kwh.to_string(),
            r.internet_price_usd_per_month.to_string(),
            r.emission_factor_kgco2_per_kwh.to_string(),
        ]);
        w.write_record(&fields).map_err(csv_write_err(name))?;
    }
    w.flush().map_err(io_err(name))
}

// ---------------------------------------------------------------------------
// Network day series

pub fn load_network_series(path: impl AsRef<Path>) -> Result<NetworkDaySeries, IngestError> {
    let path = path.as_ref();
    read_network_series(open(path)?, &path.display().to_string())
}

/// Reads a network series. Missing uncle columns read as zero.
pub fn read_network_series<R: Read>(
    reader: R,
    source_name: &str,
) -> Result<NetworkDaySeries, IngestError> {
    let sheet = Sheet::read(reader, source_name)?;
    let date_col = sheet.column("date")?;
    let hash_col = sheet.column("hash_rate_ghs")?;
    let block_col = sheet.column("block_reward")?;
    let fee_col = sheet.column("tx_fees")?;
    let uncle_col = sheet.optional_column("uncle_reward");
    let incl_col = sheet.optional_column("uncle_incl_reward");
    let price_col = sheet.column("market_price_usd")?;

    let mut days = Vec::with_capacity(sheet.records.len());
    for (line, rec) in sheet.rows() {
        let raw_date = sheet.text(rec, line, date_col)?;
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| {
            schema(
                source_name,
                format!("line {line}: date {raw_date:?} is not YYYY-MM-DD"),
            )
        })?;
        days.push(NetworkDay {
            date,
            hash_rate_ghs: sheet.number(rec, line, hash_col, "hash_rate_ghs")?,
            block_reward: sheet.number(rec, line, block_col, "block_reward")?,
            tx_fees: sheet.number(rec, line, fee_col, "tx_fees")?,
            uncle_reward: sheet
                .optional_number(rec, line, uncle_col, "uncle_reward")?
                .unwrap_or(0.0),
            uncle_incl_reward: sheet
                .optional_number(rec, line, incl_col, "uncle_incl_reward")?
                .unwrap_or(0.0),
            market_price_usd: sheet.number(rec, line, price_col, "market_price_usd")?,
        });
    }
    NetworkDaySeries::build(source_name, days)
}

pub fn write_network_series<W: Write>(
    series: &NetworkDaySeries,
    writer: W,
) -> Result<(), IngestError> {
    let name = "<network series>";
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "date",
        "hash_rate_ghs",
        "block_reward",
        "tx_fees",
        "uncle_reward",
        "uncle_incl_reward",
        "market_price_usd",
    ])
    .map_err(csv_write_err(name))?;
    for d in &series.days {
        w.write_record([
            d.date.format("%Y-%m-%d").to_string(),
            d.hash_rate_ghs.to_string(),
            d.block_reward.to_string(),
            d.tx_fees.to_string(),
            d.uncle_reward.to_string(),
            d.uncle_incl_reward.to_string(),
            d.market_price_usd.to_string(),
        ])
        .map_err(csv_write_err(name))?;
    }
    w.flush().map_err(io_err(name))
}

// ---------------------------------------------------------------------------
// Hardware catalog

pub fn load_hardware_catalog(path: impl AsRef<Path>) -> Result<HardwareCatalog, IngestError> {
    let path = path.as_ref();
    read_hardware_catalog(open(path)?, &path.display().to_string())
}

pub fn read_hardware_catalog<R: Read>(
    reader: R,
    source_name: &str,
) -> Result<HardwareCatalog, IngestError> {
    let sheet = Sheet::read(reader, source_name)?;
    let name_col = sheet.column("name")?;
    let power_col = sheet.column("power_w")?;
    let price_col = sheet.column("price_usd")?;
    let eff_col = sheet.optional_column("efficiency_j_per_mh");
    let year_col = sheet.column("release_year")?;

    let mut entries = Vec::with_capacity(sheet.records.len());
    for (line, rec) in sheet.rows() {
        entries.push(HardwareSpec {
            name: sheet.text(rec, line, name_col)?.to_owned(),
            power_w: sheet.number(rec, line, power_col, "power_w")?,
            price_usd: sheet.number(rec, line, price_col, "price_usd")?,
            efficiency_j_per_mh: sheet.optional_number(
                rec,
                line,
                eff_col,
                "efficiency_j_per_mh",
            )?,
            release_year: sheet.integer(rec, line, year_col, "release_year")?,
        });
    }
    HardwareCatalog::build(source_name, entries)
}

pub fn write_hardware_catalog<W: Write>(
    catalog: &HardwareCatalog,
    writer: W,
) -> Result<(), IngestError> {
    let name = "<hardware>";
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "name",
        "power_w",
        "price_usd",
        "efficiency_j_per_mh",
        "release_year",
    ])
    .map_err(csv_write_err(name))?;
    for hw in &catalog.entries {
        w.write_record([
            hw.name.clone(),
            hw.power_w.to_string(),
            hw.price_usd.to_string(),
            hw.efficiency_j_per_mh
                .map(|e| e.to_string())
                .unwrap_or_default(),
            hw.release_year.to_string(),
        ])
        .map_err(csv_write_err(name))?;
    }
    w.flush().map_err(io_err(name))
}

// ---------------------------------------------------------------------------
// Adoption curves

pub fn load_adoption_curves(path: impl AsRef<Path>) -> Result<AdoptionCurveSet, IngestError> {
    let path = path.as_ref();
    read_adoption_curves(open(path)?, &path.display().to_string())
}

pub fn read_adoption_curves<R: Read>(
    reader: R,
    source_name: &str,
) -> Result<AdoptionCurveSet, IngestError> {
    let sheet = Sheet::read(reader, source_name)?;
    let tech_col = sheet.column("technology")?;
    let year_col = sheet.column("years_since_introduction")?;
    let frac_col = sheet.column("adoption_fraction")?;

    let mut curves: BTreeMap<String, Vec<AdoptionPoint>> = BTreeMap::new();
    for (line, rec) in sheet.rows() {
        let tech = sheet.text(rec, line, tech_col)?;
        if tech.is_empty() {
            return Err(schema(
                source_name,
                format!("line {line}: empty technology name"),
            ));
        }
        let point = AdoptionPoint {
            years_since_introduction: sheet.integer(
                rec,
                line,
                year_col,
                "years_since_introduction",
            )?,
            adoption_fraction: sheet.number(rec, line, frac_col, "adoption_fraction")?,
        };
        in_unit_interval(
            source_name,
            line,
            "adoption_fraction",
            point.adoption_fraction,
        )?;
        let curve = curves.entry(tech.to_owned()).or_default();
        if let Some(prev) = curve.last() {
            if prev.years_since_introduction >= point.years_since_introduction {
                return Err(IngestError::NonMonotoneYear {
                    source_name: source_name.to_owned(),
                    line,
                    key: format!("{tech} years_since_introduction"),
                    previous: prev.years_since_introduction.into(),
                    value: point.years_since_introduction.into(),
                });
            }
        }
        curve.push(point);
    }
    Ok(AdoptionCurveSet { curves })
}

pub fn write_adoption_curves<W: Write>(
    curves: &AdoptionCurveSet,
    writer: W,
) -> Result<(), IngestError> {
    let name = "<adoption>";
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "technology",
        "years_since_introduction",
        "adoption_fraction",
    ])
    .map_err(csv_write_err(name))?;
    for (tech, points) in &curves.curves {
        for p in points {
            w.write_record([
                tech.clone(),
                p.years_since_introduction.to_string(),
                p.adoption_fraction.to_string(),
            ])
            .map_err(csv_write_err(name))?;
        }
    }
    w.flush().map_err(io_err(name))
}

// ---------------------------------------------------------------------------
// Transactions

pub fn load_transaction_series(path: impl AsRef<Path>) -> Result<TransactionSeries, IngestError> {
    let path = path.as_ref();
    read_transaction_series(open(path)?, &path.display().to_string())
}

pub fn read_transaction_series<R: Read>(
    reader: R,
    source_name: &str,
) -> Result<TransactionSeries, IngestError> {
    let sheet = Sheet::read(reader, source_name)?;
    let year_col = sheet.column("year")?;
    let tx_col = sheet.column("transactions")?;
    let mut rows = Vec::with_capacity(sheet.records.len());
    for (line, rec) in sheet.rows() {
        rows.push(TransactionRecord {
            year: sheet.integer(rec, line, year_col, "year")?,
            transactions: sheet.number(rec, line, tx_col, "transactions")?,
        });
    }
    TransactionSeries::build(source_name, rows)
}

pub fn write_transaction_series<W: Write>(
    series: &TransactionSeries,
    writer: W,
) -> Result<(), IngestError> {
    let name = "<transactions>";
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["year", "transactions"])
        .map_err(csv_write_err(name))?;
    for r in &series.rows {
        w.write_record([r.year.to_string(), r.transactions.to_string()])
            .map_err(csv_write_err(name))?;
    }
    w.flush().map_err(io_err(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROFILE_HEADER: &str = "country_code,node_share,electricity_price_usd_per_kwh,internet_price_usd_per_month,emission_factor_kgco2_per_kwh\n";
    const SERIES_HEADER: &str =
        "date,hash_rate_ghs,block_reward,tx_fees,uncle_reward,uncle_incl_reward,market_price_usd\n";

    fn profiles(body: &str) -> Result<CountryProfileTable, IngestError> {
        read_country_profiles(format!("{PROFILE_HEADER}{body}").as_bytes(), "test")
    }

    fn series(body: &str) -> Result<NetworkDaySeries, IngestError> {
        read_network_series(format!("{SERIES_HEADER}{body}").as_bytes(), "test")
    }

    #[test]
    fn single_country_table() {
        let t = profiles("US,1.0,0.15,40,0.45\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.share_sum(), 1.0);
    }

    #[test]
    fn exact_two_country_table() {
        let t = profiles("US,0.6,0.15,40,0.45\nDE,0.4,0.30,30,0.35\n").unwrap();
        assert_eq!(t.len(), 2);
        assert!((t.share_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shares_far_from_one_are_rejected() {
        let err = profiles("US,0.6,0.15,40,0.45\nDE,0.6,0.30,30,0.35\n").unwrap_err();
        assert!(matches!(err, IngestError::ShareSum { .. }), "{err}");
    }

    #[test]
    fn shares_close_to_one_are_renormalized() {
        let t = profiles("US,0.604,0.15,40,0.45\nDE,0.4,0.30,30,0.35\n").unwrap();
        assert!((t.share_sum() - 1.0).abs() <= 1e-6);
        assert!((t.rows()[0].node_share - 0.604 / 1.004).abs() < 1e-15);
    }

    #[test]
    fn duplicate_country() {
        let err = profiles("US,0.5,0.15,40,0.45\nUS,0.5,0.30,30,0.35\n").unwrap_err();
        assert!(matches!(err, IngestError::DuplicateCountry { .. }));
    }

    #[test]
    fn negative_price_and_bad_type() {
        let err = profiles("US,1.0,-0.15,40,0.45\n").unwrap_err();
        assert!(matches!(err, IngestError::NegativeValue { .. }));
        let err = profiles("US,1.0,cheap,40,0.45\n").unwrap_err();
        assert!(matches!(err, IngestError::Schema { .. }));
    }

    #[test]
    fn missing_column_is_schema_error() {
        let err =
            read_country_profiles("country_code,node_share\nUS,1\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, IngestError::Schema { .. }));
    }

    #[test]
    fn node_counts_become_shares() {
        let csv = "country_code,node_share,node_count,electricity_price_usd_per_kwh,internet_price_usd_per_month,emission_factor_kgco2_per_kwh\n\
                   US,,300,0.15,40,0.45\nDE,,100,0.30,30,0.35\n";
        let t = read_country_profiles(csv.as_bytes(), "t").unwrap();
        assert_eq!(t.rows()[0].node_share, 0.75);
        assert_eq!(t.rows()[1].node_share, 0.25);
    }

    #[test]
    fn empty_series_is_valid() {
        assert!(series("").unwrap().is_empty());
    }

    #[test]
    fn all_zero_day_is_accepted() {
        let s = series("2020-01-01,0,0,0,0,0,0\n").unwrap();
        assert_eq!(s.days().len(), 1);
    }

    #[test]
    fn dates_must_increase() {
        let err = series("2020-01-02,1,1,1,0,0,1\n2020-01-01,1,1,1,0,0,1\n").unwrap_err();
        assert!(matches!(err, IngestError::NonMonotoneDate { .. }));
        let err = series("2020-01-01,1,1,1,0,0,1\n2020-01-01,1,1,1,0,0,1\n").unwrap_err();
        assert!(matches!(err, IngestError::NonMonotoneDate { .. }));
    }

    #[test]
    fn negative_reward_rejected() {
        let err = series("2020-01-01,1,-1,1,0,0,1\n").unwrap_err();
        assert!(matches!(err, IngestError::NegativeValue { .. }));
    }

    #[test]
    fn uncle_columns_default_to_zero() {
        let csv =
            "date,hash_rate_ghs,block_reward,tx_fees,market_price_usd\n2020-01-01,5,900,3,9000\n";
        let s = read_network_series(csv.as_bytes(), "btc").unwrap();
        assert_eq!(s.days()[0].uncle_reward, 0.0);
        assert_eq!(s.days()[0].uncle_incl_reward, 0.0);
        assert_eq!(s.days()[0].total_reward(), 903.0);
    }

    #[test]
    fn days_are_grouped_by_year() {
        let s = series("2019-12-31,1,1,0,0,0,1\n2020-01-01,2,1,0,0,0,1\n2020-06-01,3,1,0,0,0,1\n")
            .unwrap();
        assert_eq!(s.years(), vec![2019, 2020]);
        assert_eq!(s.days_in_year(2020).len(), 2);
        assert!(s.days_in_year(2021).is_empty());
    }

    #[test]
    fn hardware_pass_through() {
        let csv = "name,power_w,price_usd,efficiency_j_per_mh,release_year\nAntminerX,1500,2000,0.10,2020\n";
        let c = read_hardware_catalog(csv.as_bytes(), "t").unwrap();
        assert_eq!(c.entries().len(), 1);
        assert_eq!(c.entries()[0].efficiency_j_per_mh, Some(0.10));
        assert_eq!(c.entries()[0].release_year, 2020);
    }

    #[test]
    fn hardware_duplicates_and_zero_power() {
        let csv = "name,power_w,price_usd,efficiency_j_per_mh,release_year\nA,1,1,0.1,2020\nA,1,1,0.1,2021\n";
        assert!(matches!(
            read_hardware_catalog(csv.as_bytes(), "t").unwrap_err(),
            IngestError::DuplicateHardware { .. }
        ));
        let csv = "name,power_w,price_usd,efficiency_j_per_mh,release_year\nA,0,1,0.1,2020\n";
        assert!(matches!(
            read_hardware_catalog(csv.as_bytes(), "t").unwrap_err(),
            IngestError::Range { .. }
        ));
    }

    #[test]
    fn adoption_fraction_out_of_range() {
        let csv = "technology,years_since_introduction,adoption_fraction\nradio,3,1.2\n";
        let err = read_adoption_curves(csv.as_bytes(), "t").unwrap_err();
        assert!(matches!(err, IngestError::Range { .. }));
    }

    #[test]
    fn adoption_curves_may_dip() {
        let csv = "technology,years_since_introduction,adoption_fraction\nradio,0,0.1\nradio,1,0.3\nradio,2,0.2\ntv,0,0.05\n";
        let set = read_adoption_curves(csv.as_bytes(), "t").unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.curves()["radio"].len(), 3);
    }

    #[test]
    fn transaction_endpoints() {
        let csv = "year,transactions\n2009,31332\n2020,112559843\n";
        let s = read_transaction_series(csv.as_bytes(), "t").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.rows()[1].transactions, 112_559_843.0);
        let csv = "year,transactions\n2010,1\n2009,2\n";
        assert!(matches!(
            read_transaction_series(csv.as_bytes(), "t").unwrap_err(),
            IngestError::NonMonotoneYear { .. }
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_transaction_series("/definitely/not/here.csv").unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
        assert!(err.to_string().contains("/definitely/not/here.csv"));
    }
}
