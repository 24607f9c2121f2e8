//! Material permittivity records at 30 GHz.
//!
//! Values are stored as `ε = ε′ − j ε″` with the loss magnitude `ε″` kept
//! nonnegative. The minus sign is applied only when a refractive index is
//! formed (see [`crate::em_model::refractive_index`]).
//!
//! The built-in table is compiled from published mm-wave measurements. Two
//! sand rows list the denser sample with the lower `ε′`; they are kept as
//! printed in the source table.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Frequency at which every built-in value applies.
pub const DATABASE_FREQUENCY_GHZ: f64 = 30.0;

/// Column header of the material CSV format.
pub const CSV_HEADER: [&str; 5] = ["name", "eps_real", "eps_imag", "source", "category"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PermittivityError {
    #[error("permittivity components must be finite (got {real}, {loss})")]
    NotFinite { real: f64, loss: f64 },
    #[error("real permittivity {0} is below the vacuum bound of 1")]
    RealBelowVacuum(f64),
    #[error("loss magnitude {0} is negative")]
    NegativeLoss(f64),
    #[error("loss tangent undefined for real part {0} <= 0")]
    NonPositiveReal(f64),
}

/// Relative complex permittivity `ε′ − j ε″` of a passive bulk material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPermittivity", into = "RawPermittivity")]
pub struct ComplexPermittivity {
    real: f64,
    loss: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPermittivity {
    real: f64,
    loss: f64,
}

impl TryFrom<RawPermittivity> for ComplexPermittivity {
    type Error = PermittivityError;

    fn try_from(raw: RawPermittivity) -> Result<Self, Self::Error> {
        Self::new(raw.real, raw.loss)
    }
}

impl From<ComplexPermittivity> for RawPermittivity {
    fn from(p: ComplexPermittivity) -> Self {
        RawPermittivity {
            real: p.real,
            loss: p.loss,
        }
    }
}

impl ComplexPermittivity {
    pub const VACUUM: ComplexPermittivity = ComplexPermittivity {
        real: 1.0,
        loss: 0.0,
    };

    /// Dry skin at 30 GHz, the default backing and reflectivity reference.
    pub const DRY_SKIN: ComplexPermittivity = ComplexPermittivity {
        real: 20.0,
        loss: 16.0,
    };

    pub fn new(real: f64, loss: f64) -> Result<Self, PermittivityError> {
        if !real.is_finite() || !loss.is_finite() {
            return Err(PermittivityError::NotFinite { real, loss });
        }
        if real < 1.0 {
            return Err(PermittivityError::RealBelowVacuum(real));
        }
        if loss < 0.0 {
            return Err(PermittivityError::NegativeLoss(loss));
        }
        Ok(ComplexPermittivity { real, loss })
    }

    pub fn lossless(real: f64) -> Result<Self, PermittivityError> {
        Self::new(real, 0.0)
    }

    /// `ε′`
    pub fn real(&self) -> f64 {
        self.real
    }

    /// `ε″` (nonnegative magnitude)
    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn loss_tangent(&self) -> f64 {
        self.loss / self.real
    }
}

impl fmt::Display for ComplexPermittivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - j {}", self.real, self.loss)
    }
}

/// Loss tangent `ε″ / ε′` for raw components.
pub fn loss_tangent(real: f64, loss: f64) -> Result<f64, PermittivityError> {
    if !(real > 0.0) {
        return Err(PermittivityError::NonPositiveReal(real));
    }
    Ok(loss / real)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialRecord {
    pub name: String,
    pub permittivity: ComplexPermittivity,
    pub source: String,
    pub category: Option<String>,
}

impl MaterialRecord {
    pub fn new(
        name: impl Into<String>,
        permittivity: ComplexPermittivity,
        source: impl Into<String>,
        category: Option<String>,
    ) -> Result<Self, DbError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(DbError::EmptyName { line: None });
        }
        Ok(MaterialRecord {
            name,
            permittivity,
            source: source.into(),
            category: category.filter(|c| !c.trim().is_empty()),
        })
    }
}

#[derive(Debug, Error)]
pub enum DbError {
    #[error("{}malformed row: {detail}", line_prefix(*.line))]
    MalformedRow { line: Option<u64>, detail: String },
    #[error("{}duplicate material name {name:?}", line_prefix(*.line))]
    DuplicateName { line: Option<u64>, name: String },
    #[error("{}non-physical permittivity for {name:?}: {source}", line_prefix(*.line))]
    NonPhysicalValue {
        line: Option<u64>,
        name: String,
        source: PermittivityError,
    },
    #[error("{}material name is empty", line_prefix(*.line))]
    EmptyName { line: Option<u64> },
    #[error("material file contains no records")]
    EmptyFile,
    #[error("cannot read material file: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn line_prefix(line: Option<u64>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl DbError {
    /// 1-based line in the source file, when the error came from a file.
    pub fn line(&self) -> Option<u64> {
        match self {
            DbError::MalformedRow { line, .. }
            | DbError::DuplicateName { line, .. }
            | DbError::NonPhysicalValue { line, .. }
            | DbError::EmptyName { line } => *line,
            _ => None,
        }
    }
}

/// ASCII case-fold plus whitespace trim.
pub fn normalize_name(name: &str) -> String {
    name.trim().to_ascii_lowercase()
}

/// Immutable collection of materials with unique normalized names.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialDatabase {
    records: Vec<MaterialRecord>,
    frequency_ghz: f64,
    index: HashMap<String, usize>,
}

impl MaterialDatabase {
    pub fn new(records: Vec<MaterialRecord>) -> Result<Self, DbError> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, record) in records.iter().enumerate() {
            if index.insert(normalize_name(&record.name), i).is_some() {
                return Err(DbError::DuplicateName {
                    line: None,
                    name: record.name.clone(),
                });
            }
        }
        Ok(MaterialDatabase {
            records,
            frequency_ghz: DATABASE_FREQUENCY_GHZ,
            index,
        })
    }

    pub fn records(&self) -> &[MaterialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn frequency_ghz(&self) -> f64 {
        self.frequency_ghz
    }

    pub fn find(&self, name: &str) -> Option<&MaterialRecord> {
        self.index
            .get(&normalize_name(name))
            .map(|&i| &self.records[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaterialRecord> {
        self.records.iter()
    }

    /// Records whose category matches `category` (case-insensitive).
    pub fn in_category<'a>(
        &'a self,
        category: &'a str,
    ) -> impl Iterator<Item = &'a MaterialRecord> + 'a {
        let wanted = normalize_name(category);
        self.records.iter().filter(move |r| {
            r.category
                .as_deref()
                .is_some_and(|c| normalize_name(c) == wanted)
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DbError> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(CSV_HEADER)?;
        for r in &self.records {
            out.write_record([
                r.name.as_str(),
                &r.permittivity.real().to_string(),
                &r.permittivity.loss().to_string(),
                r.source.as_str(),
                r.category.as_deref().unwrap_or(""),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn find_material<'a>(db: &'a MaterialDatabase, name: &str) -> Option<&'a MaterialRecord> {
    db.find(name)
}

/// Loads a material CSV, stopping at the first violation.
pub fn load_database(path: impl AsRef<Path>) -> Result<MaterialDatabase, DbError> {
    let file = std::fs::File::open(path)?;
    read_database(file)
}

pub fn read_database<R: Read>(reader: R) -> Result<MaterialDatabase, DbError> {
    let mut records = Vec::new();
    let mut first_error = None;
    scan_csv(reader, |item| match item {
        Ok(record) => {
            records.push(record);
            true
        }
        Err(e) => {
            first_error = Some(e);
            false
        }
    })?;
    if let Some(e) = first_error {
        return Err(e);
    }
    if records.is_empty() {
        return Err(DbError::EmptyFile);
    }
    MaterialDatabase::new(records)
}

/// Checks every row of a material CSV and returns all violations found.
pub fn audit_database<R: Read>(reader: R) -> Vec<DbError> {
    let mut problems = Vec::new();
    let mut rows = 0usize;
    let outcome = scan_csv(reader, |item| {
        match item {
            Ok(_) => rows += 1,
            Err(e) => {
                rows += 1;
                problems.push(e);
            }
        }
        true
    });
    if let Err(e) = outcome {
        problems.push(e);
    } else if rows == 0 {
        problems.push(DbError::EmptyFile);
    }
    problems
}

/// Walks the CSV rows, handing validated records (or row errors) to `visit`.
/// Duplicate detection happens here so that audits report every clash.
/// Returns `Err` only for failures that stop the scan (I/O, header).
fn scan_csv<R: Read>(
    reader: R,
    mut visit: impl FnMut(Result<MaterialRecord, DbError>) -> bool,
) -> Result<(), DbError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = rdr.records();

    let header = match rows.next() {
        None => return Err(DbError::EmptyFile),
        Some(h) => h?,
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != CSV_HEADER {
        return Err(DbError::MalformedRow {
            line: Some(1),
            detail: format!("expected header {:?}, found {:?}", CSV_HEADER.join(","), names.join(",")),
        });
    }

    let mut seen: HashMap<String, u64> = HashMap::new();
    for row in rows {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let item = parse_row(&row, line).and_then(|record| {
            match seen.insert(normalize_name(&record.name), line) {
                Some(_) => Err(DbError::DuplicateName {
                    line: Some(line),
                    name: record.name,
                }),
                None => Ok(record),
            }
        });
        if !visit(item) {
            break;
        }
    }
    Ok(())
}

fn parse_row(row: &csv::StringRecord, line: u64) -> Result<MaterialRecord, DbError> {
    if row.len() != CSV_HEADER.len() {
        return Err(DbError::MalformedRow {
            line: Some(line),
            detail: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
        });
    }
    let name = row[0].trim();
    if name.is_empty() {
        return Err(DbError::EmptyName { line: Some(line) });
    }
    let number = |idx: usize| -> Result<f64, DbError> {
        let text = row[idx].trim();
        text.parse::<f64>().map_err(|_| DbError::MalformedRow {
            line: Some(line),
            detail: format!("{} is not a number: {text:?}", CSV_HEADER[idx]),
        })
    };
    let real = number(1)?;
    let loss = number(2)?;
    let permittivity =
        ComplexPermittivity::new(real, loss).map_err(|source| DbError::NonPhysicalValue {
            line: Some(line),
            name: name.to_string(),
            source,
        })?;
    let category = Some(row[4].trim().to_string()).filter(|c| !c.is_empty());
    Ok(MaterialRecord {
        name: name.to_string(),
        permittivity,
        source: row[3].trim().to_string(),
        category,
    })
}

// (name, ε′, ε″, source, category), in table reading order.
const BUILTIN: [(&str, f64, f64, &str, &str); 28] = [
    ("Silicone rubber", 3.0, 0.001, "[5]", "benign"),
    ("Flour", 1.9, 0.075, "[9]", "benign"),
    ("Petroleum Jelly", 2.15, 0.0007, "[6]", "benign"),
    ("Soap", 2.75, 0.225, "[9]", "benign"),
    ("Jujube Honey", 8.7, 4.8, "[7]", "water-based"),
    ("Wood", 2.55, 0.14, "[9]", "benign"),
    ("Baking Soda", 2.5, 0.025, "[8]", "surrogate"),
    ("Salt", 3.05, 0.015, "[9]", "surrogate"),
    ("Sugar", 3.5, 0.0025, "[9]", "surrogate"),
    ("Sand 1.9 gr/cm³", 4.5, 0.04, "[10]", "benign"),
    ("Powdered Sugar", 2.05, 0.004, "[10]", "benign"),
    ("Sand 1.8 gr/cm³", 5.9, 0.01, "[10]", "benign"),
    ("Talc", 1.75, 0.01, "[8]", "benign"),
    ("Plexiglass", 2.51, 0.01, "[15]", "benign"),
    ("Sheet glass (heated to 1737 F)", 5.29, 0.125, "[11]", "benign"),
    ("Glass, High Purity Fused Silica", 3.75, 0.0035, "[11]", "benign"),
    ("Denim", 1.6, 0.015, "[12]", "benign"),
    ("Red Leather", 2.2, 0.09, "[12]", "benign"),
    ("TNT", 2.84, 0.005, "[13]", "explosive"),
    ("PETN", 2.38, 0.02, "[13]", "explosive"),
    ("RDX", 2.60, 0.01, "[13]", "explosive"),
    ("C4", 3.28, 0.04, "[13]", "explosive"),
    ("Cocaine", 3.0, 0.01, "[13]", "contraband"),
    ("Ethanol", 4.5, 1.5, "[14]", "water-based"),
    ("Methanol 0.6 Mol Solution", 7.0, 7.0, "[14]", "water-based"),
    ("Water", 20.0, 30.0, "[16]", "water-based"),
    ("Paper", 2.35, 0.11, "[9]", "benign"),
    ("Dry Skin", 20.0, 16.0, "[17]", "tissue"),
];

/// The compiled 30 GHz material table.
pub fn builtin_database() -> MaterialDatabase {
    let records = BUILTIN
        .iter()
        .map(|&(name, real, loss, source, category)| MaterialRecord {
            name: name.to_string(),
            permittivity: ComplexPermittivity::new(real, loss)
                .expect("built-in permittivity is physical"),
            source: source.to_string(),
            category: Some(category.to_string()),
        })
        .collect();
    MaterialDatabase::new(records).expect("built-in names are unique")
}
