//! Screening regions on the permittivity plane and their TOML file format.
//!
//! ```toml
//! id = "default-30ghz"
//!
//! [[region]]
//! name = "LowerHazard"
//! semantics = "hazard"      # or "safe"
//! real_min = 2.2
//! real_max = 3.7
//! loss_min = 0.0005
//! loss_max = 0.055
//! tags = ["surrogate"]      # optional
//! ```

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{PlanePoint, Rect};
use crate::material_db::ComplexPermittivity;

/// Tag carried by hazard regions that also hold benign look-alike materials.
pub const SURROGATE_TAG: &str = "surrogate";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Hazard,
    Safe,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Hazard => "hazard",
            Semantics::Safe => "safe",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("region {location}: {detail}")]
    InvalidRegion { location: String, detail: String },
    #[error("duplicate region name {0:?}")]
    DuplicateName(String),
    #[error("region set has no hazard region")]
    NoHazard,
    #[error("region file is not valid: {0}")]
    Parse(String),
}

/// Closed rectangle `[real_min, real_max] × [loss_min, loss_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionSpec", into = "RegionSpec")]
pub struct Region {
    name: String,
    rect: Rect,
    semantics: Semantics,
    tags: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionSpec {
    name: String,
    semantics: Semantics,
    real_min: f64,
    real_max: f64,
    loss_min: f64,
    loss_max: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tags: Vec<String>,
}

impl TryFrom<RegionSpec> for Region {
    type Error = RegionError;

    fn try_from(s: RegionSpec) -> Result<Self, Self::Error> {
        Region::new(s.name, s.semantics, (s.real_min, s.real_max), (s.loss_min, s.loss_max))
            .map(|r| r.with_tags(s.tags))
    }
}

impl From<Region> for RegionSpec {
    fn from(r: Region) -> Self {
        RegionSpec {
            name: r.name,
            semantics: r.semantics,
            real_min: r.rect.real_min,
            real_max: r.rect.real_max,
            loss_min: r.rect.loss_min,
            loss_max: r.rect.loss_max,
            tags: r.tags,
        }
    }
}

impl Region {
    pub fn new(
        name: impl Into<String>,
        semantics: Semantics,
        (real_min, real_max): (f64, f64),
        (loss_min, loss_max): (f64, f64),
    ) -> Result<Self, RegionError> {
        let name = name.into();
        let fail = |detail: String| RegionError::InvalidRegion {
            location: format!("{name:?}"),
            detail,
        };
        if name.trim().is_empty() {
            return Err(fail("name is empty".into()));
        }
        let bounds = [real_min, real_max, loss_min, loss_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(fail(format!("bounds must be finite, got {bounds:?}")));
        }
        if real_min < 1.0 {
            return Err(fail(format!("real_min {real_min} is below 1")));
        }
        if real_min >= real_max {
            return Err(fail(format!("real_min {real_min} must be below real_max {real_max}")));
        }
        if loss_min < 0.0 {
            return Err(fail(format!("loss_min {loss_min} is negative")));
        }
        if loss_min >= loss_max {
            return Err(fail(format!("loss_min {loss_min} must be below loss_max {loss_max}")));
        }
        Ok(Region {
            name,
            rect: Rect {
                real_min,
                real_max,
                loss_min,
                loss_max,
            },
            semantics,
            tags: Vec::new(),
        })
    }

    pub fn with_tags(mut self, tags: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.tags = tags.into_iter().map(Into::into).collect();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn is_hazard(&self) -> bool {
        self.semantics == Semantics::Hazard
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn real_bounds(&self) -> (f64, f64) {
        (self.rect.real_min, self.rect.real_max)
    }

    pub fn loss_bounds(&self) -> (f64, f64) {
        (self.rect.loss_min, self.rect.loss_max)
    }

    pub fn contains(&self, p: ComplexPermittivity) -> bool {
        self.rect.contains(PlanePoint {
            real: p.real(),
            loss: p.loss(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSet {
    id: String,
    regions: Vec<Region>,
}

#[derive(Serialize, Deserialize)]
struct RegionFile {
    #[serde(default = "unnamed_id")]
    id: String,
    #[serde(default, rename = "region")]
    regions: Vec<toml::Value>,
}

fn unnamed_id() -> String {
    "unnamed".to_string()
}

impl RegionSet {
    /// Requires at least one hazard region and unique region names.
    pub fn new(id: impl Into<String>, regions: Vec<Region>) -> Result<Self, RegionError> {
        let mut names = HashSet::new();
        for r in &regions {
            if !names.insert(r.name.to_ascii_lowercase()) {
                return Err(RegionError::DuplicateName(r.name.clone()));
            }
        }
        if !regions.iter().any(Region::is_hazard) {
            return Err(RegionError::NoHazard);
        }
        Ok(RegionSet {
            id: id.into(),
            regions,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn get(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name == name)
    }

    pub fn hazards(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.is_hazard())
    }

    pub fn safes(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| !r.is_hazard())
    }

    /// Same set with one more region appended (names must stay unique).
    pub fn with_region(&self, region: Region) -> Result<Self, RegionError> {
        let mut regions = self.regions.clone();
        regions.push(region);
        RegionSet::new(self.id.clone(), regions)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, RegionError> {
        let file: RegionFile = toml::from_str(text).map_err(|e| RegionError::Parse(e.to_string()))?;
        let regions = file
            .regions
            .into_iter()
            .enumerate()
            .map(|(i, v)| parse_region(i, v))
            .collect::<Result<Vec<_>, _>>()?;
        RegionSet::new(file.id, regions)
    }

    pub fn to_toml_string(&self) -> String {
        let file = RegionFile {
            id: self.id.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| toml::Value::try_from(r).expect("region serializes"))
                .collect(),
        };
        toml::to_string(&file).expect("region set serializes")
    }
}

fn parse_region(index: usize, value: toml::Value) -> Result<Region, RegionError> {
    let label = value
        .get("name")
        .and_then(|n| n.as_str())
        .map(|n| format!("#{} ({n:?})", index + 1))
        .unwrap_or_else(|| format!("#{}", index + 1));
    let spec: RegionSpec = value.try_into().map_err(|e: toml::de::Error| RegionError::InvalidRegion {
        location: label.clone(),
        detail: e.message().to_string(),
    })?;
    Region::try_from(spec).map_err(|e| match e {
        RegionError::InvalidRegion { detail, .. } => RegionError::InvalidRegion {
            location: label,
            detail,
        },
        other => other,
    })
}

/// Every problem in a region file, rather than only the first.
pub fn audit_regions(text: &str) -> Vec<RegionError> {
    let file: RegionFile = match toml::from_str(text) {
        Ok(f) => f,
        Err(e) => return vec![RegionError::Parse(e.to_string())],
    };
    let mut problems = Vec::new();
    let mut names = HashSet::new();
    let mut any_hazard = false;
    for (i, value) in file.regions.into_iter().enumerate() {
        match parse_region(i, value) {
            Ok(region) => {
                any_hazard |= region.is_hazard();
                if !names.insert(region.name.to_ascii_lowercase()) {
                    problems.push(RegionError::DuplicateName(region.name));
                }
            }
            Err(e) => problems.push(e),
        }
    }
    if !any_hazard {
        problems.push(RegionError::NoHazard);
    }
    problems
}

/// Default 30 GHz screening boxes.
///
/// The bounds are round-number rectangles that hold the named materials of
/// each box: explosives and look-alike powders in `LowerHazard`, ordinary
/// low-loss solids in `Safe`, water-based liquids in `UpperHazard`.
pub fn default_regions() -> RegionSet {
    let regions = vec![
        Region::new("LowerHazard", Semantics::Hazard, (2.2, 3.7), (0.0005, 0.055))
            .expect("valid default")
            .with_tags([SURROGATE_TAG]),
        Region::new("Safe", Semantics::Safe, (1.3, 3.2), (0.06, 0.5)).expect("valid default"),
        Region::new("UpperHazard", Semantics::Hazard, (3.8, 60.0), (0.8, 60.0))
            .expect("valid default")
            .with_tags([SURROGATE_TAG]),
    ];
    RegionSet::new("default-30ghz", regions).expect("valid default set")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_bounds_validated() {
        assert!(Region::new("x", Semantics::Safe, (3.0, 2.0), (0.0, 1.0)).is_err());
        assert!(Region::new("x", Semantics::Safe, (2.0, 2.0), (0.0, 1.0)).is_err());
        assert!(Region::new("x", Semantics::Safe, (0.5, 2.0), (0.0, 1.0)).is_err());
        assert!(Region::new("x", Semantics::Safe, (1.0, 2.0), (-0.1, 1.0)).is_err());
        assert!(Region::new("x", Semantics::Safe, (1.0, f64::INFINITY), (0.0, 1.0)).is_err());
        assert!(Region::new(" ", Semantics::Safe, (1.0, 2.0), (0.0, 1.0)).is_err());
        assert!(Region::new("x", Semantics::Safe, (1.0, 2.0), (0.0, 1.0)).is_ok());
    }

    #[test]
    fn set_needs_hazard_and_unique_names() {
        let safe = Region::new("S", Semantics::Safe, (1.0, 2.0), (0.0, 1.0)).unwrap();
        assert_eq!(RegionSet::new("t", vec![safe.clone()]), Err(RegionError::NoHazard));
        let hz = Region::new("s", Semantics::Hazard, (1.0, 2.0), (0.0, 1.0)).unwrap();
        assert_eq!(
            RegionSet::new("t", vec![safe, hz]),
            Err(RegionError::DuplicateName("s".into()))
        );
    }

    #[test]
    fn toml_round_trip() {
        let set = default_regions();
        let text = set.to_toml_string();
        assert_eq!(RegionSet::from_toml_str(&text).unwrap(), set);
        assert!(audit_regions(&text).is_empty());
    }

    #[test]
    fn shipped_file_matches_defaults() {
        let text = include_str!("../../../../data/default_regions.toml");
        assert_eq!(RegionSet::from_toml_str(text).unwrap(), default_regions());
    }

    #[test]
    fn audit_reports_each_bad_region() {
        let text = r#"
            [[region]]
            name = "Backwards"
            semantics = "hazard"
            real_min = 5.0
            real_max = 2.0
            loss_min = 0.0
            loss_max = 1.0

            [[region]]
            name = "NoLoss"
            semantics = "safe"
            real_min = 1.0
            real_max = 2.0
        "#;
        let problems = audit_regions(text);
        assert_eq!(problems.len(), 3, "{problems:?}");
        assert!(problems[0].to_string().contains("Backwards"));
        assert!(problems[0].to_string().contains("real_min"));
        assert!(matches!(problems[1], RegionError::InvalidRegion { .. }));
        assert_eq!(problems[2], RegionError::NoHazard);
        assert!(RegionSet::from_toml_str(text).is_err());
    }

    #[test]
    fn unparseable_file() {
        assert!(matches!(audit_regions("[[region]\n")[0], RegionError::Parse(_)));
    }
}
