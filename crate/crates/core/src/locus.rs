//! Inversion of a skin-relative reflectivity ratio into a permittivity locus.
//!
//! An intensity-only measurement fixes `|Γ|²` but not the phase, so every
//! `(ε′, ε″)` pair with the right reflectivity is a candidate. The locus is
//! sampled on a grid of loss values; at each one the real part is solved
//! for by bisection.
//!
//! For fixed `ε″ > 0`, `|Γ(ε′ − jε″)|²` is not monotone on `ε′ ≥ 1`: it falls
//! to a minimum at some `ε′*` and rises from there on. The solver returns
//! the root on the rising side (`ε′ ≥ ε′*`). A root on the falling side, when
//! one exists, is reported as a [`SampleNote::SecondaryRoot`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::em_model::halfspace_reflectivity;
use crate::material_db::ComplexPermittivity;

/// Bracket searched for the real part.
pub const REAL_SEARCH_MIN: f64 = 1.0;
pub const REAL_SEARCH_MAX: f64 = 1e4;
/// Residual tolerance relative to the reference reflectivity.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
pub const MAX_BISECTION_STEPS: usize = 200;

const GOLDEN_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocusError {
    #[error("no permittivity with real part >= 1 reproduces ratio {target_ratio}")]
    NoSolution { target_ratio: f64 },
    #[error("invalid loss grid: {0}")]
    InvalidGrid(String),
    #[error("target ratio must be finite and nonnegative, got {0}")]
    InvalidTarget(f64),
    #[error("reference medium has zero reflectivity")]
    ZeroReference,
    #[error("ratio tolerance must be finite and nonnegative, got {0}")]
    InvalidTolerance(f64),
}

/// Strictly increasing, nonnegative loss samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LossGrid(Vec<f64>);

impl LossGrid {
    pub fn new(values: Vec<f64>) -> Result<Self, LocusError> {
        if values.is_empty() {
            return Err(LocusError::InvalidGrid("grid is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(LocusError::InvalidGrid(format!(
                "loss values must be finite and >= 0, found {bad}"
            )));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(LocusError::InvalidGrid(format!(
                "loss values must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(LossGrid(values))
    }

    /// `intervals + 1` log-spaced samples from `min` to `max`, endpoints exact.
    pub fn log_spaced(min: f64, max: f64, intervals: usize) -> Result<Self, LocusError> {
        if !(min > 0.0) || !(max > min) || intervals == 0 {
            return Err(LocusError::InvalidGrid(format!(
                "log grid needs 0 < min < max and at least one interval (min {min}, max {max}, intervals {intervals})"
            )));
        }
        let (lo, hi) = (min.log10(), max.log10());
        let mut values: Vec<f64> = (0..=intervals)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / intervals as f64))
            .collect();
        values[0] = min;
        values[intervals] = max;
        values.dedup();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for LossGrid {
    type Error = LocusError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<LossGrid> for Vec<f64> {
    fn from(grid: LossGrid) -> Self {
        grid.0
    }
}

/// 201 log-spaced loss values from 1e-4 to 100.
pub fn default_loss_grid() -> LossGrid {
    LossGrid::log_spaced(1e-4, 100.0, 200).expect("default grid parameters are valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusConfig {
    pub loss_grid: LossGrid,
    pub reference: ComplexPermittivity,
}

impl Default for LocusConfig {
    fn default() -> Self {
        LocusConfig {
            loss_grid: default_loss_grid(),
            reference: ComplexPermittivity::DRY_SKIN,
        }
    }
}

/// What happened at a grid sample besides (or instead of) a locus point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleNote {
    /// No root with `ε′` in the search bracket on the rising side.
    NoRoot { loss: f64 },
    /// A second root on the falling side of the reflectivity minimum.
    SecondaryRoot { loss: f64, real: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusCurve {
    pub target_ratio: f64,
    pub reference: ComplexPermittivity,
    /// Grid the curve was solved on (including samples without a root).
    pub loss_grid: LossGrid,
    /// Solutions ordered by increasing loss.
    pub points: Vec<ComplexPermittivity>,
    pub diagnostics: Vec<SampleNote>,
}

impl LocusCurve {
    /// A curve made of the given points, for classification of externally
    /// produced loci. Points must have strictly increasing loss.
    pub fn from_points(
        points: Vec<ComplexPermittivity>,
        target_ratio: f64,
        reference: ComplexPermittivity,
    ) -> Result<Self, LocusError> {
        let loss_grid = LossGrid::new(points.iter().map(|p| p.loss()).collect())?;
        Ok(LocusCurve {
            target_ratio,
            reference,
            loss_grid,
            points,
            diagnostics: Vec::new(),
        })
    }

    pub fn point_at(&self, loss: f64) -> Option<ComplexPermittivity> {
        self.points.iter().copied().find(|p| p.loss() == loss)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Root of `|Γ(ε′ − jε″)|² = target_power` at one loss value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceRoots {
    pub primary: Option<f64>,
    pub secondary: Option<f64>,
}

/// Real part minimizing `|Γ(ε′ − jε″)|²` over the search bracket.
pub fn reflectivity_minimum(loss: f64) -> f64 {
    if loss == 0.0 {
        // lossless Γ = (1 − √ε′)/(1 + √ε′) grows with ε′
        return REAL_SEARCH_MIN;
    }
    let f = |real: f64| reflectivity_at(real, loss);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (REAL_SEARCH_MIN, REAL_SEARCH_MAX);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if b - a <= 4.0 * f64::EPSILON * b {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    if f(REAL_SEARCH_MIN) <= f(mid) {
        REAL_SEARCH_MIN
    } else {
        mid
    }
}

fn reflectivity_at(real: f64, loss: f64) -> f64 {
    // real >= 1 and loss >= 0 throughout the solver
    halfspace_reflectivity(ComplexPermittivity::new(real, loss).expect("search stays physical"))
}

/// Bisection on `[lo, hi]` for a sign change of `g`, run to float resolution.
fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    if g_lo.abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Solves one fixed-loss slice for `|Γ|² = target_power`.
pub fn solve_slice(loss: f64, target_power: f64, tolerance: f64) -> SliceRoots {
    let residual = |real: f64| reflectivity_at(real, loss) - target_power;
    let accept = |real: f64| residual(real).abs() <= tolerance;

    let turn = reflectivity_minimum(loss);
    let r_turn = residual(turn);
    let r_top = residual(REAL_SEARCH_MAX);

    let primary = if r_turn.abs() <= tolerance {
        Some(turn)
    } else if r_turn < 0.0 && r_top >= 0.0 {
        Some(bisect(turn, REAL_SEARCH_MAX, residual)).filter(|&x| accept(x))
    } else {
        None
    };

    let secondary = if turn > REAL_SEARCH_MIN && r_turn < 0.0 && residual(REAL_SEARCH_MIN) > 0.0 {
        Some(bisect(REAL_SEARCH_MIN, turn, residual)).filter(|&x| accept(x))
    } else {
        None
    };

    SliceRoots { primary, secondary }
}

/// Locus of permittivities whose reflectivity is `target_ratio` times that
/// of `reference`, sampled on `loss_grid`.
pub fn solve_locus(
    target_ratio: f64,
    loss_grid: &LossGrid,
    reference: ComplexPermittivity,
) -> Result<LocusCurve, LocusError> {
    if !target_ratio.is_finite() || target_ratio < 0.0 {
        return Err(LocusError::InvalidTarget(target_ratio));
    }
    let reference_power = halfspace_reflectivity(reference);
    if reference_power == 0.0 {
        return Err(LocusError::ZeroReference);
    }
    let target_power = target_ratio * reference_power;
    let tolerance = RESIDUAL_TOLERANCE * reference_power;

    let mut points = Vec::new();
    let mut diagnostics = Vec::new();
    for &loss in loss_grid.values() {
        let roots = solve_slice(loss, target_power, tolerance);
        match roots.primary {
            Some(real) => points.push(ComplexPermittivity::new(real, loss).expect("root is physical")),
            None => diagnostics.push(SampleNote::NoRoot { loss }),
        }
        if let Some(real) = roots.secondary {
            diagnostics.push(SampleNote::SecondaryRoot { loss, real });
        }
    }

    if points.is_empty() {
        return Err(LocusError::NoSolution { target_ratio });
    }
    Ok(LocusCurve {
        target_ratio,
        reference,
        loss_grid: loss_grid.clone(),
        points,
        diagnostics,
    })
}

pub fn solve_locus_with(target_ratio: f64, config: &LocusConfig) -> Result<LocusCurve, LocusError> {
    solve_locus(target_ratio, &config.loss_grid, config.reference)
}

/// Loci for the target ratio scaled by `1 ± ratio_tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyBand {
    pub lower: Result<LocusCurve, LocusError>,
    pub upper: Result<LocusCurve, LocusError>,
}

pub fn uncertainty_band(curve: &LocusCurve, ratio_tolerance: f64) -> Result<UncertaintyBand, LocusError> {
    if !ratio_tolerance.is_finite() || ratio_tolerance < 0.0 {
        return Err(LocusError::InvalidTolerance(ratio_tolerance));
    }
    let side = |scale: f64| {
        let target = (curve.target_ratio * scale).max(0.0);
        solve_locus(target, &curve.loss_grid, curve.reference)
    };
    Ok(UncertaintyBand {
        lower: side(1.0 - ratio_tolerance),
        upper: side(1.0 + ratio_tolerance),
    })
}
