//! Brute-force reference for the locus solver.
//!
//! Reflectivity is computed from the algebraic square root, not through the
//! library, and roots are located by scanning a fixed 0.01 grid.

#![allow(dead_code)]

pub const STEP: f64 = 0.01;
pub const REAL_MIN: f64 = 1.0;
pub const REAL_MAX: f64 = 100.0;
pub const LOSS_MAX: f64 = 100.0;
pub const REAL_CELLS: usize = 9900;
pub const LOSS_ROWS: usize = 10000;

/// `|(1 − n)/(1 + n)|²` with `n = √(ε′ − jε″)` from `re = √((|ε| + ε′)/2)`.
pub fn reflectivity(real: f64, loss: f64) -> f64 {
    let modulus = real.hypot(loss);
    let re = ((modulus + real) / 2.0).sqrt();
    let im = if re > 0.0 { -loss / (2.0 * re) } else { 0.0 };
    ((1.0 - re).powi(2) + im * im) / ((1.0 + re).powi(2) + im * im)
}

pub fn real_at(i: usize) -> f64 {
    REAL_MIN + i as f64 * STEP
}

pub fn loss_at(k: usize) -> f64 {
    k as f64 * STEP
}

/// Cells `[real_at(i), real_at(i + 1)]` of one loss row where the residual
/// crosses zero going upward in ε′.
pub fn rising_cells(loss: f64, target_power: f64) -> Vec<usize> {
    let mut cells = Vec::new();
    let mut prev = reflectivity(real_at(0), loss) - target_power;
    for i in 0..REAL_CELLS {
        let next = reflectivity(real_at(i + 1), loss) - target_power;
        if prev < 0.0 && next >= 0.0 {
            cells.push(i);
        }
        prev = next;
    }
    cells
}

/// Cells where the residual crosses zero going downward in ε′.
pub fn falling_cells(loss: f64, target_power: f64) -> Vec<usize> {
    let mut cells = Vec::new();
    let mut prev = reflectivity(real_at(0), loss) - target_power;
    for i in 0..REAL_CELLS {
        let next = reflectivity(real_at(i + 1), loss) - target_power;
        if prev >= 0.0 && next < 0.0 {
            cells.push(i);
        }
        prev = next;
    }
    cells
}

/// Whether a solver root (or its absence) agrees with the scanned row to
/// within one grid cell.
pub fn agrees(root: Option<f64>, loss: f64, target_power: f64) -> Result<(), String> {
    let cells = rising_cells(loss, target_power);
    match (root, cells.as_slice()) {
        (Some(r), [i]) => {
            let (lo, hi) = (real_at(*i) - STEP, real_at(*i + 1) + STEP);
            if (lo..=hi).contains(&r) {
                Ok(())
            } else {
                Err(format!("root {r} outside oracle cell [{}, {}] at loss {loss}", real_at(*i), real_at(*i + 1)))
            }
        }
        (Some(r), []) if r > REAL_MAX - STEP => Ok(()),
        (None, []) => {
            // the rising side may only start beyond the scanned domain
            Ok(())
        }
        (root, cells) => Err(format!("solver {root:?} vs oracle cells {cells:?} at loss {loss}")),
    }
}

/// Full 2-D scan: every (row, cell) on `[1, 100] × [0, 100]` where the
/// residual rises through zero.
pub fn scan_plane(target_power: f64) -> Vec<(usize, usize)> {
    (0..=LOSS_ROWS)
        .flat_map(|k| rising_cells(loss_at(k), target_power).into_iter().map(move |i| (k, i)))
        .collect()
}
