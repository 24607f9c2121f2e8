//! Threat / safe / pat-down decisions from permittivity evidence.
//!
//! Evidence comes in three shapes: an exact point, a real part with the
//! loss known only to lie in a low-loss band, and a locus curve from an
//! intensity-only measurement. Points are tested for containment; bands and
//! curves are treated as polylines in linear `(ε′, ε″)` coordinates.
//!
//! Precedence is the same for all three: touching any hazard region means
//! `Threat`; lying entirely within safe regions means `Safe`; anything else
//! is `PatDown`.

pub mod geometry;
mod regions;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::regions::{
    audit_regions, default_regions, Region, RegionError, RegionSet, Semantics, SURROGATE_TAG,
};
use self::geometry::{segment_covered, PlanePoint};
use crate::locus::{solve_locus_with, LocusConfig, LocusCurve, LocusError};
use crate::material_db::ComplexPermittivity;

/// Loss interval assumed for an object whose back surface is visible.
pub const DEFAULT_LOSSLESS_BAND: LossBand = LossBand {
    min: 0.0005,
    max: 0.055,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBand {
    pub min: f64,
    pub max: f64,
}

impl Default for LossBand {
    fn default() -> Self {
        DEFAULT_LOSSLESS_BAND
    }
}

impl LossBand {
    pub fn new(min: f64, max: f64) -> Result<Self, ClassifyError> {
        if !min.is_finite() || !max.is_finite() || min < 0.0 || max < min {
            return Err(ClassifyError::InvalidBand { min, max });
        }
        Ok(LossBand { min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PermittivityEvidence {
    Point { permittivity: ComplexPermittivity },
    LosslessBand {
        real: f64,
        #[serde(default)]
        band: LossBand,
    },
    Locus { curve: LocusCurve },
}

impl PermittivityEvidence {
    pub fn kind(&self) -> EvidenceKind {
        match self {
            PermittivityEvidence::Point { .. } => EvidenceKind::Point,
            PermittivityEvidence::LosslessBand { .. } => EvidenceKind::LosslessBand,
            PermittivityEvidence::Locus { .. } => EvidenceKind::Locus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    Point,
    LosslessBand,
    Locus,
}

impl EvidenceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvidenceKind::Point => "point",
            EvidenceKind::LosslessBand => "lossless_band",
            EvidenceKind::Locus => "locus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Threat,
    Safe,
    PatDown,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Threat => "threat",
            Outcome::Safe => "safe",
            Outcome::PatDown => "pat_down",
        }
    }
}

/// Which decision rule produced the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Evidence touches a hazard region.
    HazardContact,
    /// Evidence lies entirely within safe regions.
    InsideSafe,
    /// Evidence is partly or wholly outside every region.
    Inconclusive,
    /// No permittivity reproduces the measured reflectivity.
    UnresolvableReflectivity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rationale {
    /// `None` when no evidence could be formed.
    pub evidence: Option<EvidenceKind>,
    pub rule: Rule,
    /// Tags of the hazard regions that fired, sorted.
    pub tags: Vec<String>,
}

impl Rationale {
    pub fn is_surrogate(&self) -> bool {
        self.tags.iter().any(|t| t == SURROGATE_TAG)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Names of every region the evidence touches, in region-set order.
    pub touched_regions: Vec<String>,
    pub rationale: Rationale,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("locus curve has no points")]
    EmptyCurve,
    #[error("missing input: {0}")]
    MissingInput(&'static str),
    #[error("real permittivity must be finite and >= 1, got {0}")]
    InvalidReal(f64),
    #[error("invalid loss band [{min}, {max}]")]
    InvalidBand { min: f64, max: f64 },
    #[error(transparent)]
    Locus(#[from] LocusError),
}

fn plane(p: ComplexPermittivity) -> PlanePoint {
    PlanePoint {
        real: p.real(),
        loss: p.loss(),
    }
}

/// Applies the precedence rules to a polyline (a single vertex is a point).
fn classify_polyline(vertices: &[PlanePoint], rs: &RegionSet, evidence: EvidenceKind) -> Verdict {
    debug_assert!(!vertices.is_empty());
    let segments: Vec<(PlanePoint, PlanePoint)> = if vertices.len() == 1 {
        vec![(vertices[0], vertices[0])]
    } else {
        vertices.windows(2).map(|w| (w[0], w[1])).collect()
    };

    let touches = |r: &Region| segments.iter().any(|&(a, b)| r.rect().intersects_segment(a, b));
    let touched: Vec<&Region> = rs.regions().iter().filter(|r| touches(r)).collect();
    let touched_regions: Vec<String> = touched.iter().map(|r| r.name().to_string()).collect();

    let hazards: Vec<&Region> = touched.iter().copied().filter(|r| r.is_hazard()).collect();
    if !hazards.is_empty() {
        let mut tags: Vec<String> = hazards.iter().flat_map(|r| r.tags().iter().cloned()).collect();
        tags.sort();
        tags.dedup();
        return Verdict {
            outcome: Outcome::Threat,
            touched_regions,
            rationale: Rationale {
                evidence: Some(evidence),
                rule: Rule::HazardContact,
                tags,
            },
        };
    }

    let safe_rects: Vec<_> = rs.safes().map(|r| *r.rect()).collect();
    let all_safe = segments
        .iter()
        .all(|&(a, b)| segment_covered(a, b, &safe_rects));
    let (outcome, rule) = if all_safe {
        (Outcome::Safe, Rule::InsideSafe)
    } else {
        (Outcome::PatDown, Rule::Inconclusive)
    };
    Verdict {
        outcome,
        touched_regions,
        rationale: Rationale {
            evidence: Some(evidence),
            rule,
            tags: Vec::new(),
        },
    }
}

pub fn classify_point(p: ComplexPermittivity, rs: &RegionSet) -> Verdict {
    classify_polyline(&[plane(p)], rs, EvidenceKind::Point)
}

/// Classifies the vertical segment `{real} × band`.
pub fn classify_lossless_band(real: f64, rs: &RegionSet, band: LossBand) -> Result<Verdict, ClassifyError> {
    if !real.is_finite() || real < 1.0 {
        return Err(ClassifyError::InvalidReal(real));
    }
    let band = LossBand::new(band.min, band.max)?;
    let ends = [
        PlanePoint {
            real,
            loss: band.min,
        },
        PlanePoint {
            real,
            loss: band.max,
        },
    ];
    let vertices = if band.min == band.max { &ends[..1] } else { &ends[..] };
    Ok(classify_polyline(vertices, rs, EvidenceKind::LosslessBand))
}

pub fn classify_locus(curve: &LocusCurve, rs: &RegionSet) -> Result<Verdict, ClassifyError> {
    if curve.points.is_empty() {
        return Err(ClassifyError::EmptyCurve);
    }
    let vertices: Vec<PlanePoint> = curve.points.iter().copied().map(plane).collect();
    Ok(classify_polyline(&vertices, rs, EvidenceKind::Locus))
}

pub fn classify_evidence(e: &PermittivityEvidence, rs: &RegionSet) -> Result<Verdict, ClassifyError> {
    match e {
        PermittivityEvidence::Point { permittivity } => Ok(classify_point(*permittivity, rs)),
        PermittivityEvidence::LosslessBand { real, band } => classify_lossless_band(*real, rs, *band),
        PermittivityEvidence::Locus { curve } => classify_locus(curve, rs),
    }
}

/// What the upstream imaging stage reports about an object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub back_surface_visible: bool,
    /// Real permittivity estimated from the front and back echoes.
    pub predicted_real: Option<f64>,
    /// Front-surface reflectivity relative to the bare-skin return (power).
    pub skin_relative_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObservationConfig {
    pub locus: LocusConfig,
    pub band: LossBand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationOutcome {
    pub verdict: Verdict,
    /// Evidence the verdict was drawn from; `None` when the ratio could not
    /// be inverted.
    pub evidence: Option<PermittivityEvidence>,
}

/// Routes an observation through the lossless-band rule (back face seen)
/// or through locus inversion (front face only).
pub fn classify_observation(
    obs: &Observation,
    rs: &RegionSet,
    config: &ObservationConfig,
) -> Result<ObservationOutcome, ClassifyError> {
    let evidence = if obs.back_surface_visible {
        let real = obs
            .predicted_real
            .ok_or(ClassifyError::MissingInput("predicted real permittivity"))?;
        PermittivityEvidence::LosslessBand {
            real,
            band: config.band,
        }
    } else {
        let ratio = obs
            .skin_relative_ratio
            .ok_or(ClassifyError::MissingInput("skin-relative reflectivity ratio"))?;
        match solve_locus_with(ratio, &config.locus) {
            Ok(curve) => PermittivityEvidence::Locus { curve },
            Err(LocusError::NoSolution { .. }) => {
                return Ok(ObservationOutcome {
                    verdict: Verdict {
                        outcome: Outcome::PatDown,
                        touched_regions: Vec::new(),
                        rationale: Rationale {
                            evidence: None,
                            rule: Rule::UnresolvableReflectivity,
                            tags: Vec::new(),
                        },
                    },
                    evidence: None,
                })
            }
            Err(e) => return Err(e.into()),
        }
    };
    let verdict = classify_evidence(&evidence, rs)?;
    Ok(ObservationOutcome {
        verdict,
        evidence: Some(evidence),
    })
}
