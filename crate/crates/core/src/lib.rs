//! Threat screening of body-worn dielectric objects from their complex
//! permittivity at 30 GHz.
//!
//! - [`material_db`]: the compiled material table and CSV ingestion.
//! - [`em_model`]: normal-incidence reflection, attenuation, slab echoes.
//! - [`locus`]: reflectivity-ratio inversion into a permittivity locus.
//! - [`classifier`]: regions on the permittivity plane and the decision rules.
//! - [`screening`]: forward model plus classifier for a known material.

pub mod classifier;
pub mod em_model;
pub mod locus;
pub mod material_db;
pub mod screening;

pub use classifier::{
    classify_evidence, classify_locus, classify_lossless_band, classify_observation, classify_point,
    default_regions, EvidenceKind, LossBand, Observation, ObservationConfig, Outcome, PermittivityEvidence,
    Region, RegionSet, Semantics, Verdict,
};
pub use em_model::{halfspace_reflection, refractive_index, slab_response, EchoSummary, SlabScene};
pub use locus::{default_loss_grid, solve_locus, LocusConfig, LocusCurve, LossGrid};
pub use material_db::{builtin_database, load_database, ComplexPermittivity, MaterialDatabase, MaterialRecord};
pub use num_complex::Complex64;
