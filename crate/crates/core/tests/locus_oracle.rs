mod support;

use permscreen_core::em_model::halfspace_reflectivity;
use permscreen_core::locus::{reflectivity_minimum, solve_locus, LossGrid, RESIDUAL_TOLERANCE};
use permscreen_core::{builtin_database, default_loss_grid, ComplexPermittivity};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

fn skin_power() -> f64 {
    halfspace_reflectivity(ComplexPermittivity::DRY_SKIN)
}

#[test]
fn oracle_matches_library_reflectivity() {
    for &(r, l) in &[(1.0, 0.0), (4.0, 0.0), (20.0, 16.0), (2.84, 0.005), (1.0, 100.0)] {
        let lib = halfspace_reflectivity(ComplexPermittivity::new(r, l).unwrap());
        assert!((lib - oracle::reflectivity(r, l)).abs() <= 1e-14, "({r}, {l})");
    }
}

#[test]
fn unit_ratio_full_plane_scan_finds_skin() {
    let target = skin_power();
    let hits = oracle::scan_plane(target);
    let row = (16.0f64 / oracle::STEP).round() as usize;
    let cells: Vec<usize> = hits.iter().filter(|(k, _)| *k == row).map(|(_, i)| *i).collect();
    assert_eq!(cells.len(), 1);
    let (lo, hi) = (oracle::real_at(cells[0]), oracle::real_at(cells[0] + 1));
    assert!(lo <= 20.0 + 1e-9 && 20.0 - 1e-9 <= hi + oracle::STEP, "[{lo}, {hi}]");

    let grid = LossGrid::new(vec![16.0]).unwrap();
    let curve = solve_locus(1.0, &grid, ComplexPermittivity::DRY_SKIN).unwrap();
    oracle::agrees(curve.point_at(16.0).map(|p| p.real()), 16.0, target).unwrap();
}

#[test]
fn coarse_grid_agrees_with_scan_for_random_ratios() {
    let grid = LossGrid::new(vec![0.0, 0.01, 0.1, 1.0, 10.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let ratio: f64 = 1.5 * (1.0 - rng.gen::<f64>());
        let target = ratio * skin_power();
        let curve = solve_locus(ratio, &grid, ComplexPermittivity::DRY_SKIN);
        for &loss in grid.values() {
            let root = curve.as_ref().ok().and_then(|c| c.point_at(loss)).map(|p| p.real());
            oracle::agrees(root, loss, target).unwrap_or_else(|e| panic!("ratio {ratio}: {e}"));
        }
    }
}

#[test]
fn residuals_within_tolerance_on_default_grid() {
    let power = skin_power();
    for ratio in [1e-6, 0.01, 0.1, 0.3, 0.7, 1.0, 1.2, 1.5] {
        let curve = solve_locus(ratio, &default_loss_grid(), ComplexPermittivity::DRY_SKIN).unwrap();
        assert!(curve.points.windows(2).all(|w| w[1].loss() > w[0].loss()));
        for p in &curve.points {
            assert!(p.real() >= 1.0);
            let residual = (halfspace_reflectivity(*p) - ratio * power).abs();
            assert!(residual <= RESIDUAL_TOLERANCE * power, "ratio {ratio} at {p}: {residual}");
        }
    }
}

#[test]
fn table_materials_round_trip() {
    let power = skin_power();
    for m in builtin_database().iter() {
        let p = m.permittivity;
        let ratio = halfspace_reflectivity(p) / power;
        let grid = LossGrid::new(vec![p.loss()]).unwrap();
        let curve = solve_locus(ratio, &grid, ComplexPermittivity::DRY_SKIN).unwrap();
        let got = curve.point_at(p.loss()).unwrap();
        assert!((got.real() - p.real()).abs() <= 1e-6, "{}: {} vs {}", m.name, got.real(), p.real());
    }
}

#[test]
fn reflectivity_dips_before_rising_for_lossy_slices() {
    // |Γ|² is not monotone on ε′ ≥ 1 once ε″ > 0
    for loss in [0.01, 1.0, 10.0, 100.0] {
        let turn = reflectivity_minimum(loss);
        assert!(turn > 1.0, "loss {loss}: {turn}");
        assert!(oracle::reflectivity(turn, loss) < oracle::reflectivity(1.0, loss));
    }
    assert_eq!(reflectivity_minimum(0.0), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// On each fixed-loss slice the reflectivity falls to one minimum and then
    /// rises strictly; the solver's turning point sits at that minimum.
    #[test]
    fn slices_are_unimodal(log_loss in -4.0f64..2.0) {
        let loss = 10f64.powf(log_loss);
        let xs: Vec<f64> = (0..=4000).map(|i| 10f64.powf(4.0 * i as f64 / 4000.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| oracle::reflectivity(x, loss)).collect();
        let sign_changes = ys
            .windows(3)
            .filter(|w| ((w[1] - w[0]) < 0.0) != ((w[2] - w[1]) < 0.0))
            .count();
        prop_assert!(sign_changes <= 1);
        let (argmin, _) = ys.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &y)| if y < acc.1 { (i, y) } else { acc });
        let lo = xs[argmin.saturating_sub(1)];
        let hi = xs[(argmin + 1).min(xs.len() - 1)];
        let turn = reflectivity_minimum(loss);
        prop_assert!(lo <= turn && turn <= hi, "turn {} not in [{}, {}]", turn, lo, hi);
        // strictly rising beyond the turning point
        let mut prev = oracle::reflectivity(turn, loss);
        for x in xs.iter().filter(|&&x| x > turn * 1.001) {
            let y = oracle::reflectivity(*x, loss);
            prop_assert!(y > prev);
            prev = y;
        }
    }

    #[test]
    fn band_brackets_nominal_curve(ratio in 0.01f64..1.3, tol in 0.0f64..0.15) {
        let grid = LossGrid::new(vec![0.0, 0.01, 0.1, 1.0]).unwrap();
        let curve = solve_locus(ratio, &grid, ComplexPermittivity::DRY_SKIN).unwrap();
        let band = permscreen_core::locus::uncertainty_band(&curve, tol).unwrap();
        for p in &curve.points {
            if let Ok(lower) = &band.lower {
                if let Some(q) = lower.point_at(p.loss()) {
                    prop_assert!(q.real() <= p.real());
                }
            }
            if let Ok(upper) = &band.upper {
                if let Some(q) = upper.point_at(p.loss()) {
                    prop_assert!(q.real() >= p.real());
                }
            }
        }
    }
}
