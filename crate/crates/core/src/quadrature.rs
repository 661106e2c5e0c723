//! Product trapezoid rule on the torus `[-π, π)²` and the `n` integral.
//!
//! The integrand of `n` is smooth and doubly periodic once the diagonal is
//! filled with its continuous extension, so equal-weight uniform grids
//! converge faster than any power of the spacing. Refinement is by grid
//! doubling only.
//!
//! Sums are formed row by row with compensated summation and the row sums are
//! then combined in index order, so results do not depend on the number of
//! worker threads.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{check_simple, sample_params, Curve, CurveJet};
use crate::kernel::{diagonal_raw, kernel_near_diagonal, transverse_raw, NEAR_DIAGONAL_SWITCH};

/// Curves whose normalized chord ratio falls below this are rejected as
/// self-intersecting.
pub const SIMPLICITY_THRESHOLD: f64 = 1e-6;
const SIMPLICITY_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub initial_grid: usize,
    pub max_grid: usize,
    pub rel_tol: f64,
    /// Parameter offsets below this use the near-diagonal kernel.
    pub near_diagonal_switch: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            initial_grid: 64,
            max_grid: 8192,
            rel_tol: 1e-10,
            near_diagonal_switch: NEAR_DIAGONAL_SWITCH,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_grid < 2 {
            return Err(Error::invalid(format!(
                "initial grid must be >= 2, got {}",
                self.initial_grid
            )));
        }
        if self.initial_grid > self.max_grid {
            return Err(Error::invalid(format!(
                "initial grid {} exceeds max grid {}",
                self.initial_grid, self.max_grid
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.near_diagonal_switch >= 0.0) {
            return Err(Error::invalid("near-diagonal switch must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub grid: usize,
    /// `(grid, value)` for every grid evaluated, coarsest first.
    pub history: Vec<(usize, f64)>,
    /// `|last - previous|`; infinite when only one grid was evaluated.
    pub error_estimate: f64,
    pub converged: bool,
}

/// `n = -2 ∬ g`, refined by grid doubling until successive values agree to
/// `rel_tol` or `max_grid` is reached. Non-convergence is reported through
/// `converged = false`.
pub fn integrate_n(curve: &Curve, config: &QuadratureConfig) -> Result<QuadratureResult> {
    config.validate()?;
    let screen = check_simple(curve, SIMPLICITY_SAMPLES)?;
    if !(screen.normalized_ratio >= SIMPLICITY_THRESHOLD) {
        return Err(Error::NotSimple {
            ratio: screen.normalized_ratio,
        });
    }
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut grid = config.initial_grid;
    loop {
        let value = n_on_grid(curve, grid, config.near_diagonal_switch);
        history.push((grid, value));
        if let [.., (_, prev), _] = history.as_slice() {
            if (value - prev).abs() <= config.rel_tol * value.abs() {
                return Ok(finish(history, true));
            }
        }
        if grid.saturating_mul(2) > config.max_grid {
            return Ok(finish(history, false));
        }
        grid *= 2;
    }
}

fn finish(history: Vec<(usize, f64)>, converged: bool) -> QuadratureResult {
    let (grid, value) = *history.last().expect("at least one grid evaluated");
    let error_estimate = match history.as_slice() {
        [.., (_, prev), (_, last)] => (last - prev).abs(),
        _ => f64::INFINITY,
    };
    QuadratureResult {
        value,
        grid,
        history,
        error_estimate,
        converged,
    }
}

/// Trapezoid estimate of `n` on a `grid × grid` torus grid.
///
/// Diagonal nodes take the continuous extension of the kernel, nodes whose
/// parameter offset (taken modulo 2π) is below `switch` take the
/// near-diagonal evaluation, all others the direct transverse formula.
pub fn n_on_grid(curve: &Curve, grid: usize, switch: f64) -> f64 {
    assert!(grid >= 2, "grid must be >= 2");
    let h = 2.0 * PI / grid as f64;
    let ts: Vec<f64> = sample_params(grid).collect();
    let jets: Vec<CurveJet> = ts.par_iter().map(|&t| curve.jet(t)).collect();
    let n = grid as i64;
    let rows: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let ji = &jets[i];
            let mut delta = vec![0.0; curve.dimension()];
            let mut acc = Neumaier::default();
            for (j, jj) in jets.iter().enumerate() {
                // offset j - i wrapped into (-grid/2, grid/2]
                let mut k = j as i64 - i as i64;
                if 2 * k > n {
                    k -= n;
                } else if 2 * k <= -n {
                    k += n;
                }
                let g = if k == 0 {
                    diagonal_raw(&ji.d1, &ji.d2)
                } else {
                    let eps = k as f64 * h;
                    if eps.abs() < switch {
                        kernel_near_diagonal(curve, ts[i], eps).value
                    } else {
                        for (d, (a, b)) in delta.iter_mut().zip(ji.x.iter().zip(&jj.x)) {
                            *d = a - b;
                        }
                        transverse_raw(&ji.d1, &jj.d1, &delta)
                    }
                };
                acc.add(g);
            }
            acc.total()
        })
        .collect();
    -2.0 * h * h * ordered_sum(&rows)
}

/// Equal-weight product trapezoid rule `h² Σ f(t_i, t_j)` over `[-π, π)²`.
pub fn integrate_torus<F>(f: F, grid: usize) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    assert!(grid >= 2, "grid must be >= 2");
    let h = 2.0 * PI / grid as f64;
    let ts: Vec<f64> = sample_params(grid).collect();
    let rows: Vec<f64> = ts
        .par_iter()
        .map(|&t1| {
            let mut acc = Neumaier::default();
            for &t2 in &ts {
                acc.add(f(t1, t2));
            }
            acc.total()
        })
        .collect();
    h * h * ordered_sum(&rows)
}

/// One-dimensional periodic trapezoid rule over `[-π, π)`.
pub fn integrate_circle<F>(f: F, grid: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let h = 2.0 * PI / grid as f64;
    let mut acc = Neumaier::default();
    for t in sample_params(grid) {
        acc.add(f(t));
    }
    h * acc.total()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum ConvergenceClass {
    /// Successive differences shrink by more than 10× per doubling until they
    /// reach the rounding floor.
    Spectral,
    /// Differences shrink like `grid^-order`.
    Algebraic { order: f64 },
    /// Differences do not shrink.
    Stalled,
    /// Fewer than three history entries.
    Indeterminate,
}

/// Ratio between successive differences that counts as spectral decay.
const SPECTRAL_RATIO: f64 = 10.0;
/// Differences below this times `|value|` are at the rounding floor.
const FLOOR: f64 = 1e-13;

/// Classifies the decay of successive differences in a doubling history.
pub fn convergence_order(history: &[(usize, f64)]) -> ConvergenceClass {
    if history.len() < 3 {
        return ConvergenceClass::Indeterminate;
    }
    let scale = history
        .iter()
        .fold(0.0f64, |m, &(_, v)| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let floor = FLOOR * scale;
    let diffs: Vec<f64> = history.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let above: Vec<f64> = diffs.iter().copied().take_while(|&d| d > floor).collect();
    let hit_floor = above.len() < diffs.len();
    if above.is_empty() {
        return ConvergenceClass::Spectral;
    }
    let ratios: Vec<f64> = above.windows(2).map(|w| w[0] / w[1]).collect();
    let fast = ratios.iter().all(|&r| r >= SPECTRAL_RATIO);
    // Without reaching the floor, one fast ratio is not enough evidence.
    if fast && (hit_floor || ratios.len() >= 2) {
        return ConvergenceClass::Spectral;
    }
    match ratios.last() {
        Some(&r) if r > 2f64.powf(0.5) => ConvergenceClass::Algebraic { order: r.log2() },
        Some(_) => ConvergenceClass::Stalled,
        None => ConvergenceClass::Indeterminate,
    }
}

/// Kahan–Babuška–Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn ordered_sum(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::default();
    for &x in xs {
        acc.add(x);
    }
    acc.total()
}
