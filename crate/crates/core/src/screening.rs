//! End-to-end screening of a known material worn as a slab on skin.
//!
//! The forward model stands in for the imaging stage: it decides whether the
//! back face would be seen and what front-surface ratio would be measured.
//! Visible objects report their real permittivity; the rest report only the
//! ratio.

use serde::{Deserialize, Serialize};

use crate::classifier::{
    classify_observation, ClassifyError, Observation, ObservationConfig, ObservationOutcome, RegionSet,
};
use crate::em_model::{slab_response, EchoSummary, EmError, SlabScene, VisibilityConfig};
use crate::material_db::MaterialRecord;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScreeningConfig {
    pub visibility: VisibilityConfig,
    pub observation: ObservationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screening {
    pub echo: EchoSummary,
    pub observation: Observation,
    pub outcome: ObservationOutcome,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScreeningError {
    #[error(transparent)]
    Scene(#[from] EmError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Observation the scanner would report for `scene`.
pub fn observe(scene: &SlabScene, visibility: &VisibilityConfig) -> (EchoSummary, Observation) {
    let echo = slab_response(scene, visibility);
    let observation = if echo.back_surface_visible {
        Observation {
            back_surface_visible: true,
            predicted_real: Some(scene.slab().real()),
            skin_relative_ratio: None,
        }
    } else {
        Observation {
            back_surface_visible: false,
            predicted_real: None,
            skin_relative_ratio: Some(echo.skin_relative_ratio),
        }
    };
    (echo, observation)
}

/// Simulates `record` as a slab of `thickness_mm` on dry skin and classifies it.
pub fn screen_material(
    record: &MaterialRecord,
    thickness_mm: f64,
    regions: &RegionSet,
    config: &ScreeningConfig,
) -> Result<Screening, ScreeningError> {
    let scene = SlabScene::new(
        record.permittivity,
        thickness_mm,
        config.observation.locus.reference,
        crate::em_model::DEFAULT_FREQUENCY_GHZ,
    )?;
    let (echo, observation) = observe(&scene, &config.visibility);
    let outcome = classify_observation(&observation, regions, &config.observation)?;
    Ok(Screening {
        echo,
        observation,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{default_regions, EvidenceKind, Outcome};
    use crate::material_db::builtin_database;

    #[test]
    fn tnt_and_water_at_ten_mm() {
        let db = builtin_database();
        let rs = default_regions();
        let cfg = ScreeningConfig::default();

        let tnt = screen_material(db.find("TNT").unwrap(), 10.0, &rs, &cfg).unwrap();
        assert!(tnt.echo.back_surface_visible);
        assert_eq!(tnt.outcome.verdict.outcome, Outcome::Threat);

        let water = screen_material(db.find("Water").unwrap(), 10.0, &rs, &cfg).unwrap();
        assert!(!water.echo.back_surface_visible);
        assert!(water.echo.two_way_loss_db > 100.0);
        assert_eq!(water.outcome.evidence.as_ref().unwrap().kind(), EvidenceKind::Locus);
        assert_eq!(water.outcome.verdict.outcome, Outcome::Threat);
    }

    #[test]
    fn bad_thickness_is_an_error() {
        let db = builtin_database();
        let err = screen_material(db.find("TNT").unwrap(), 0.0, &default_regions(), &ScreeningConfig::default());
        assert!(matches!(err, Err(ScreeningError::Scene(EmError::NonPositiveThickness(_)))));
    }
}
