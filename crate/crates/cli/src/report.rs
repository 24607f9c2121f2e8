//! Machine-readable record of a `classify` run.
//!
//! JSON with fixed field order. Timings are wall-clock and therefore only
//! written when asked for, so that reports for identical inputs are
//! byte-identical by default.

use permscreen_core::{ComplexPermittivity, LocusCurve, LossBand, Verdict};
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "permscreen.run-report.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub inputs: ReportInputs,
    pub verdict: Verdict,
    /// Locus samples as `[eps_real, eps_loss]` pairs, for `--ratio` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<Vec<[f64; 2]>>,
    pub artifacts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<StageTiming>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub evidence: EvidenceInput,
    pub region_set: RegionSetRef,
    pub solver: SolverEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceInput {
    Point { eps_real: f64, eps_imag: f64 },
    Real { eps_real: f64 },
    /// Power ratio as used by the solver, after any amplitude conversion.
    Ratio { ratio: f64, amplitude_input: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSetRef {
    pub id: String,
    /// `None` for the built-in defaults.
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEcho {
    pub reference: ComplexPermittivity,
    pub loss_grid_min: f64,
    pub loss_grid_max: f64,
    pub loss_grid_len: usize,
    pub lossless_band: LossBand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

pub fn locus_pairs(curve: &LocusCurve) -> Vec<[f64; 2]> {
    curve.points.iter().map(|p| [p.real(), p.loss()]).collect()
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
