//! Normal-incidence reflection and propagation for a dielectric slab worn on skin.
//!
//! Fields follow the `e^{+jωt}` convention, so a passive medium has
//! `ε = ε′ − j ε″` and a refractive index with nonpositive imaginary part.
//! The front and back echoes are treated as separately resolved returns:
//! one bounce per interface, no multiple reflections, no interference.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::material_db::ComplexPermittivity;

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 2.99792458e8;
pub const DEFAULT_FREQUENCY_GHZ: f64 = 30.0;
/// Back echo must be within this many dB of the bare-skin return to count as visible.
pub const DEFAULT_VISIBILITY_THRESHOLD_DB: f64 = 15.0;

/// dB per neper for a power quantity, `20 log10(e)`.
const DB_PER_NEPER: f64 = 20.0 / LN_10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmError {
    #[error("frequency must be positive, got {0} GHz")]
    NonPositiveFrequency(f64),
    #[error("slab thickness must be positive, got {0} mm")]
    NonPositiveThickness(f64),
    #[error("reference medium has zero reflectivity (vacuum)")]
    ZeroReferenceReflectivity,
    #[error("reflected power must be finite and nonnegative, got {0}")]
    InvalidPower(f64),
}

/// Complex refractive index `n = √(ε′ − j ε″)` on the decaying-wave branch.
pub fn refractive_index(p: ComplexPermittivity) -> Complex64 {
    // -0.0 keeps the principal branch on the lower half plane for lossless media.
    Complex64::new(p.real(), -p.loss()).sqrt()
}

/// Field reflection coefficient for a wave in a medium of index `from`
/// hitting a boundary with a medium of index `to`.
pub fn interface_reflection(from: Complex64, to: Complex64) -> Complex64 {
    (from - to) / (from + to)
}

/// Air-to-medium reflection coefficient `Γ = (1 − n)/(1 + n)`.
pub fn halfspace_reflection(p: ComplexPermittivity) -> Complex64 {
    interface_reflection(Complex64::new(1.0, 0.0), refractive_index(p))
}

/// `|Γ|²` of an air/medium interface.
pub fn halfspace_reflectivity(p: ComplexPermittivity) -> f64 {
    halfspace_reflection(p).norm_sqr()
}

/// One-way power attenuation of a plane wave, in dB per millimeter.
pub fn attenuation_db_per_mm(p: ComplexPermittivity, frequency_ghz: f64) -> Result<f64, EmError> {
    if !(frequency_ghz > 0.0) || !frequency_ghz.is_finite() {
        return Err(EmError::NonPositiveFrequency(frequency_ghz));
    }
    let k0 = 2.0 * PI * frequency_ghz * 1e9 / SPEED_OF_LIGHT_M_PER_S;
    let alpha_np_per_m = k0 * refractive_index(p).im.abs();
    Ok(DB_PER_NEPER * alpha_np_per_m * 1e-3)
}

/// Ratio of an object's front-surface reflectivity to that of `reference`.
pub fn skin_relative_ratio(front_power: f64, reference: ComplexPermittivity) -> Result<f64, EmError> {
    if !(front_power >= 0.0) || !front_power.is_finite() {
        return Err(EmError::InvalidPower(front_power));
    }
    let denom = halfspace_reflectivity(reference);
    if denom == 0.0 {
        return Err(EmError::ZeroReferenceReflectivity);
    }
    Ok(front_power / denom)
}

/// A uniform slab of known thickness lying on a backing medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabScene {
    slab: ComplexPermittivity,
    thickness_mm: f64,
    backing: ComplexPermittivity,
    frequency_ghz: f64,
}

impl SlabScene {
    /// Slab on dry skin at 30 GHz.
    pub fn on_skin(slab: ComplexPermittivity, thickness_mm: f64) -> Result<Self, EmError> {
        Self::new(
            slab,
            thickness_mm,
            ComplexPermittivity::DRY_SKIN,
            DEFAULT_FREQUENCY_GHZ,
        )
    }

    pub fn new(
        slab: ComplexPermittivity,
        thickness_mm: f64,
        backing: ComplexPermittivity,
        frequency_ghz: f64,
    ) -> Result<Self, EmError> {
        if !(thickness_mm > 0.0) || !thickness_mm.is_finite() {
            return Err(EmError::NonPositiveThickness(thickness_mm));
        }
        if !(frequency_ghz > 0.0) || !frequency_ghz.is_finite() {
            return Err(EmError::NonPositiveFrequency(frequency_ghz));
        }
        Ok(SlabScene {
            slab,
            thickness_mm,
            backing,
            frequency_ghz,
        })
    }

    pub fn slab(&self) -> ComplexPermittivity {
        self.slab
    }

    pub fn thickness_mm(&self) -> f64 {
        self.thickness_mm
    }

    pub fn backing(&self) -> ComplexPermittivity {
        self.backing
    }

    pub fn frequency_ghz(&self) -> f64 {
        self.frequency_ghz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityConfig {
    pub threshold_db: f64,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        VisibilityConfig {
            threshold_db: DEFAULT_VISIBILITY_THRESHOLD_DB,
        }
    }
}

impl VisibilityConfig {
    /// Smallest back-echo power that still counts as visible, relative to a
    /// reference return of `reference_power`.
    pub fn min_visible_power(&self, reference_power: f64) -> f64 {
        10f64.powf(-self.threshold_db / 10.0) * reference_power
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoSummary {
    pub front_reflectivity_power: f64,
    pub back_echo_power: f64,
    pub two_way_loss_db: f64,
    pub back_surface_visible: bool,
    pub skin_relative_ratio: f64,
}

/// Front and back echo powers of a slab scene.
///
/// The back echo is the slab/backing reflectivity, transmitted through the
/// front face twice and attenuated over the round trip. Visibility and the
/// skin-relative ratio are both referenced to the bare backing's return.
pub fn slab_response(scene: &SlabScene, visibility: &VisibilityConfig) -> EchoSummary {
    let air = Complex64::new(1.0, 0.0);
    let n_slab = refractive_index(scene.slab);
    let n_back = refractive_index(scene.backing);

    let front = interface_reflection(air, n_slab).norm_sqr();
    let back_face = interface_reflection(n_slab, n_back).norm_sqr();
    let one_way = attenuation_db_per_mm(scene.slab, scene.frequency_ghz)
        .expect("scene frequency validated at construction");
    let two_way_loss_db = 2.0 * scene.thickness_mm * one_way;
    let transmission = 1.0 - front;
    let back_echo_power = back_face * transmission * transmission * 10f64.powf(-two_way_loss_db / 10.0);

    let reference_power = halfspace_reflectivity(scene.backing);
    let skin_relative_ratio = if reference_power > 0.0 {
        front / reference_power
    } else {
        0.0
    };

    EchoSummary {
        front_reflectivity_power: front,
        back_echo_power,
        two_way_loss_db,
        back_surface_visible: back_echo_power >= visibility.min_visible_power(reference_power),
        skin_relative_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eps(real: f64, loss: f64) -> ComplexPermittivity {
        ComplexPermittivity::new(real, loss).unwrap()
    }

    /// Algebraic square root: `re = √((|ε| + ε′)/2)`, `im = −ε″ / (2 re)`.
    fn sqrt_oracle(real: f64, loss: f64) -> (f64, f64) {
        let modulus = real.hypot(loss);
        let re = ((modulus + real) / 2.0).sqrt();
        (re, -loss / (2.0 * re))
    }

    #[test]
    fn refractive_index_examples() {
        let n = refractive_index(eps(4.0, 0.0));
        assert_eq!((n.re, n.im), (2.0, 0.0));
        assert!(n.im.is_sign_negative() || n.im == 0.0);
        let n = refractive_index(ComplexPermittivity::VACUUM);
        assert_eq!(n, Complex64::new(1.0, 0.0));

        let n = refractive_index(ComplexPermittivity::DRY_SKIN);
        let (re, im) = sqrt_oracle(20.0, 16.0);
        assert_relative_eq!(n.re, re, max_relative = 1e-14);
        assert_relative_eq!(n.im, im, max_relative = 1e-14);
        assert!((n.re - 4.776).abs() < 5e-4 && (n.im + 1.675).abs() < 5e-4);
    }

    #[test]
    fn halfspace_examples() {
        assert_eq!(halfspace_reflection(ComplexPermittivity::VACUUM), Complex64::new(0.0, 0.0));
        let g = halfspace_reflection(eps(4.0, 0.0));
        assert!((g.re + 1.0 / 3.0).abs() < 1e-15 && g.im.abs() < 1e-15);

        let (re, im) = sqrt_oracle(20.0, 16.0);
        let num = (1.0 - re).hypot(-im);
        let den = (1.0 + re).hypot(im);
        let magnitude = halfspace_reflection(ComplexPermittivity::DRY_SKIN).norm();
        assert_relative_eq!(magnitude, num / den, max_relative = 1e-13);
        assert!((magnitude - 0.687).abs() < 5e-4);
        assert_relative_eq!(
            halfspace_reflectivity(ComplexPermittivity::DRY_SKIN),
            (num / den).powi(2),
            max_relative = 1e-13
        );
        assert!((halfspace_reflectivity(ComplexPermittivity::DRY_SKIN) - 0.472).abs() < 5e-4);
    }

    #[test]
    fn attenuation_examples() {
        assert_eq!(attenuation_db_per_mm(eps(4.0, 0.0), 30.0).unwrap(), 0.0);

        let (_, im) = sqrt_oracle(20.0, 16.0);
        let alpha = 2.0 * PI * 30e9 / 2.99792458e8 * im.abs();
        let expected = alpha * 8.685889638065037 / 1000.0;
        let got = attenuation_db_per_mm(ComplexPermittivity::DRY_SKIN, 30.0).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert!((got - 9.14).abs() < 0.02, "{got}");

        let doubled = attenuation_db_per_mm(ComplexPermittivity::DRY_SKIN, 60.0).unwrap();
        assert_relative_eq!(doubled, 2.0 * got, max_relative = 1e-12);
        assert!(attenuation_db_per_mm(ComplexPermittivity::DRY_SKIN, 0.0).is_err());
        assert!(attenuation_db_per_mm(ComplexPermittivity::DRY_SKIN, -1.0).is_err());
    }

    #[test]
    fn skin_ratio_examples() {
        let skin = ComplexPermittivity::DRY_SKIN;
        let own = halfspace_reflectivity(skin);
        assert_relative_eq!(skin_relative_ratio(own, skin).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(skin_relative_ratio(0.0, skin).unwrap(), 0.0);
        let r = skin_relative_ratio(1.0 / 9.0, skin).unwrap();
        assert_relative_eq!(r, (1.0 / 9.0) / own, max_relative = 1e-15);
        assert!((r - 0.2354).abs() < 5e-4, "{r}");
        assert_eq!(
            skin_relative_ratio(0.1, ComplexPermittivity::VACUUM),
            Err(EmError::ZeroReferenceReflectivity)
        );
        assert!(skin_relative_ratio(-0.1, skin).is_err());
    }

    #[test]
    fn transparent_slab_passes_skin_echo() {
        let scene = SlabScene::on_skin(ComplexPermittivity::VACUUM, 12.0).unwrap();
        let echo = slab_response(&scene, &VisibilityConfig::default());
        assert_eq!(echo.front_reflectivity_power, 0.0);
        assert_eq!(echo.two_way_loss_db, 0.0);
        assert_relative_eq!(
            echo.back_echo_power,
            halfspace_reflectivity(ComplexPermittivity::DRY_SKIN),
            max_relative = 1e-14
        );
        assert!(echo.back_surface_visible);
    }

    #[test]
    fn matched_backing_hides_back_face() {
        let scene = SlabScene::on_skin(ComplexPermittivity::DRY_SKIN, 3.0).unwrap();
        let echo = slab_response(&scene, &VisibilityConfig::default());
        assert_eq!(echo.back_echo_power, 0.0);
        assert!(!echo.back_surface_visible);
        assert_relative_eq!(echo.skin_relative_ratio, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn tnt_back_face_visible() {
        let tnt = eps(2.84, 0.005);
        let scene = SlabScene::on_skin(tnt, 10.0).unwrap();
        let echo = slab_response(&scene, &VisibilityConfig::default());

        // direct evaluation with the algebraic root
        let (re, im) = sqrt_oracle(2.84, 0.005);
        let (sre, sim) = sqrt_oracle(20.0, 16.0);
        let front = ((1.0 - re).powi(2) + im * im) / ((1.0 + re).powi(2) + im * im);
        let back = ((re - sre).powi(2) + (im - sim).powi(2)) / ((re + sre).powi(2) + (im + sim).powi(2));
        let loss_db = 2.0 * 10.0 * 2.0 * PI * 30e9 / 2.99792458e8 * im.abs() * 8.685889638065037e-3;
        let back_echo = back * (1.0 - front).powi(2) * 10f64.powf(-loss_db / 10.0);

        assert_relative_eq!(echo.front_reflectivity_power, front, max_relative = 1e-12);
        assert_relative_eq!(echo.two_way_loss_db, loss_db, max_relative = 1e-12);
        assert_relative_eq!(echo.back_echo_power, back_echo, max_relative = 1e-12);
        assert!(echo.two_way_loss_db < 0.5);
        assert!(echo.back_surface_visible);
    }

    #[test]
    fn scene_validation() {
        let tnt = eps(2.84, 0.005);
        assert_eq!(SlabScene::on_skin(tnt, 0.0), Err(EmError::NonPositiveThickness(0.0)));
        assert!(SlabScene::on_skin(tnt, f64::NAN).is_err());
        assert!(SlabScene::new(tnt, 1.0, ComplexPermittivity::DRY_SKIN, 0.0).is_err());
    }

    #[test]
    fn visibility_threshold_is_configurable() {
        let scene = SlabScene::on_skin(eps(4.5, 1.5), 1.0).unwrap();
        let strict = slab_response(&scene, &VisibilityConfig { threshold_db: 1.0 });
        let loose = slab_response(&scene, &VisibilityConfig { threshold_db: 60.0 });
        assert!(!strict.back_surface_visible);
        assert!(loose.back_surface_visible);
    }
}
