//! Numerical checks of the invariances of `n`.
//!
//! Under the inversion `x ↦ x/|x|²` the kernel picks up an additive term,
//!
//! ```text
//! g ↦ g + I,   I = -f'(t1) f'(t2)/4 + (f'(t1) K₂ + f'(t2) K₁)/4,
//! ```
//!
//! with `f = ln(x·x)` and `K = ln S²`, so invariance under inversion is
//! equivalent to `∬ I = 0`. The two singular pieces `f'(t1) K₂` and
//! `f'(t2) K₁` cancel on the diagonal; their sum extends continuously with
//! diagonal value `-2 f'' + 2 f' (ẋ·ẍ)/(ẋ·ẋ)`, which the quadrature uses there.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dot, invert, sample_params, Curve, CurveJet, InversionCenter, Transform, CLEARANCE_FACTOR};
use crate::kernel::kernel_at;
use crate::quadrature::{integrate_n, ordered_sum, Neumaier, QuadratureConfig, QuadratureResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub transform: String,
    pub n_before: f64,
    pub n_after: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub pass: bool,
}

impl InvarianceReport {
    pub fn new(transform: String, n_before: f64, n_after: f64, tol: f64) -> Self {
        let abs_dev = (n_after - n_before).abs();
        let rel_dev = abs_dev / n_before.abs();
        Self {
            transform,
            n_before,
            n_after,
            abs_dev,
            rel_dev,
            pass: rel_dev <= tol,
        }
    }
}

/// Evaluates `n` before and after `transform` and compares at relative
/// tolerance `tol`.
pub fn check_invariance(
    curve: &Curve,
    transform: &Transform,
    tol: f64,
    config: &QuadratureConfig,
) -> Result<InvarianceReport> {
    let (report, _, _) = check_invariance_detailed(curve, transform, tol, config)?;
    Ok(report)
}

/// Like [`check_invariance`] but also returns both quadrature results.
pub fn check_invariance_detailed(
    curve: &Curve,
    transform: &Transform,
    tol: f64,
    config: &QuadratureConfig,
) -> Result<(InvarianceReport, QuadratureResult, QuadratureResult)> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let image = curve.apply(transform)?;
    let before = integrate_n(curve, config)?;
    let after = integrate_n(&image, config)?;
    let report = InvarianceReport::new(transform.describe(), before.value, after.value, tol);
    Ok((report, before, after))
}

/// `f = ln(x·x)` and its first two derivatives along the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IIntegrandContext {
    pub f: f64,
    pub f_prime: f64,
    pub f_second: f64,
}

impl IIntegrandContext {
    pub fn from_jet(j: &CurveJet) -> Self {
        let q = dot(&j.x, &j.x);
        let f_prime = 2.0 * dot(&j.x, &j.d1) / q;
        let f_second = 2.0 * (dot(&j.d1, &j.d1) + dot(&j.x, &j.d2)) / q - f_prime * f_prime;
        Self {
            f: q.ln(),
            f_prime,
            f_second,
        }
    }

    /// Continuous extension of `f'(t1) K₂ + f'(t2) K₁` onto the diagonal.
    pub fn diagonal_remainder(&self, j: &CurveJet) -> f64 {
        -2.0 * self.f_second + 2.0 * self.f_prime * dot(&j.d1, &j.d2) / dot(&j.d1, &j.d1)
    }
}

/// Breakdown of the I-integral into its product and singular parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IIntegralTerms {
    /// `∬ -f'(t1) f'(t2) / 4`
    pub product_term: f64,
    /// `∬ (f'(t1) K₂ + f'(t2) K₁) / 4`
    pub singular_term: f64,
    pub total: f64,
}

/// Offsets below this use the cancellation-free chord.
const CHORD_BAND: f64 = 0.25;

fn ensure_off_origin(curve: &Curve) -> Result<()> {
    let origin = vec![0.0; curve.dimension()];
    let diameter = curve.diameter(256);
    let clearance = curve.min_distance_to(&origin);
    if clearance < CLEARANCE_FACTOR * diameter {
        return Err(Error::domain(format!(
            "curve passes within {clearance:.3e} of the origin (diameter {diameter:.3e})"
        )));
    }
    Ok(())
}

/// Trapezoid rule for the I-integral on a `grid × grid` torus grid.
pub fn i_integral_terms(curve: &Curve, grid: usize) -> Result<IIntegralTerms> {
    if grid < 2 {
        return Err(Error::invalid(format!("grid must be >= 2, got {grid}")));
    }
    ensure_off_origin(curve)?;
    let h = 2.0 * PI / grid as f64;
    let ts: Vec<f64> = sample_params(grid).collect();
    let jets: Vec<CurveJet> = ts.iter().map(|&t| curve.jet(t)).collect();
    let ctx: Vec<IIntegrandContext> = jets.iter().map(IIntegrandContext::from_jet).collect();
    let n = grid as i64;
    let rows: Vec<(f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let mut prod = Neumaier::default();
            let mut sing = Neumaier::default();
            for j in 0..grid {
                prod.add(-0.25 * ctx[i].f_prime * ctx[j].f_prime);
                let mut k = j as i64 - i as i64;
                if 2 * k > n {
                    k -= n;
                } else if 2 * k <= -n {
                    k += n;
                }
                let r = if k == 0 {
                    ctx[i].diagonal_remainder(&jets[i])
                } else {
                    let eps = k as f64 * h;
                    let delta = if eps.abs() < CHORD_BAND {
                        curve.chord(ts[i], eps)
                    } else {
                        jets[i].x.iter().zip(&jets[j].x).map(|(a, b)| a - b).collect()
                    };
                    remainder(&jets[i], &jets[j], ctx[i].f_prime, ctx[j].f_prime, &delta)
                };
                sing.add(0.25 * r);
            }
            (prod.total(), sing.total())
        })
        .collect();
    let w = h * h;
    let product_term = w * ordered_sum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let singular_term = w * ordered_sum(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(IIntegralTerms {
        product_term,
        singular_term,
        total: product_term + singular_term,
    })
}

/// `∬ I(t1, t2) dt1 dt2`; vanishes for curves that avoid the origin.
pub fn i_integral(curve: &Curve, grid: usize) -> Result<f64> {
    Ok(i_integral_terms(curve, grid)?.total)
}

/// `f'(t1) K₂ + f'(t2) K₁` with `K₁ = 2(Δ·ẋ1)/S²`, `K₂ = -2(Δ·ẋ2)/S²`.
fn remainder(j1: &CurveJet, j2: &CurveJet, fp1: f64, fp2: f64, delta: &[f64]) -> f64 {
    let s2 = dot(delta, delta);
    let k1 = 2.0 * dot(delta, &j1.d1) / s2;
    let k2 = -2.0 * dot(delta, &j2.d1) / s2;
    fp1 * k2 + fp2 * k1
}

/// Pointwise value of `I(t1, t2)` for `t1 ≠ t2`.
pub fn i_integrand(curve: &Curve, t1: f64, t2: f64) -> Result<f64> {
    let (j1, j2) = (curve.jet(t1), curve.jet(t2));
    if dot(&j1.x, &j1.x) == 0.0 || dot(&j2.x, &j2.x) == 0.0 {
        return Err(Error::domain("I integrand undefined at the origin"));
    }
    let delta = curve.chord(t1, t2 - t1);
    if !(dot(&delta, &delta) > 0.0) {
        return Err(Error::domain("I integrand evaluated at coincident points"));
    }
    let (c1, c2) = (IIntegrandContext::from_jet(&j1), IIntegrandContext::from_jet(&j2));
    Ok(-0.25 * c1.f_prime * c2.f_prime + 0.25 * remainder(&j1, &j2, c1.f_prime, c2.f_prime, &delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelShift {
    pub g_original: f64,
    pub g_inverted: f64,
    pub i_value: f64,
}

/// Kernel before and after inversion about the origin, together with the
/// predicted shift `I`, at one parameter pair.
pub fn kernel_shift_under_inversion(curve: &Curve, t1: f64, t2: f64) -> Result<KernelShift> {
    let image = invert(curve, &InversionCenter::origin(curve.dimension()))?;
    let g_original = kernel_at(curve, t1, t2).value;
    let g_inverted = kernel_at(&image, t1, t2).value;
    let i_value = i_integrand(curve, t1, t2)?;
    Ok(KernelShift {
        g_original,
        g_inverted,
        i_value,
    })
}
