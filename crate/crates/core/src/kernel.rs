//! The integrand `g(t1, t2) = (ẋᵀ1 · ẋᵀ2) / S²` in several equivalent forms.
//!
//! Off the diagonal, the transverse, cross-product and log-derivative forms
//! agree algebraically and serve as cross-checks of one another. On the
//! diagonal the integrand extends continuously to
//!
//! ```text
//! g(t, t) = ((ẋ·ẍ)² - |ẋ|²|ẍ|²) / (4|ẋ|⁴) = -κ² |ẋ|² / 4
//! ```
//!
//! and close to it [`kernel_near_diagonal`] avoids the cancellation that
//! affects the direct formula.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{dot, sub, Curve, CurveJet};

/// Offset below which the quadrature switches from the direct formula to
/// [`kernel_near_diagonal`].
pub const NEAR_DIAGONAL_SWITCH: f64 = 1e-3 * 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    Transverse,
    CrossProduct,
    LogDerivative,
    DiagonalLimit,
    NearDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub form: KernelForm,
}

impl KernelValue {
    fn new(value: f64, form: KernelForm) -> Self {
        Self { value, form }
    }
}

/// Chord `Δ = x1 - x2` and its squared length.
pub fn delta_and_s2(j1: &CurveJet, j2: &CurveJet) -> (Vec<f64>, f64) {
    let delta = sub(&j1.x, &j2.x);
    let s2 = dot(&delta, &delta);
    (delta, s2)
}

/// Tangent with its component along `Δ` projected out.
pub fn transverse_tangent(j: &CurveJet, delta: &[f64], s2: f64) -> Result<Vec<f64>> {
    if !(s2 > 0.0) {
        return Err(Error::domain("transverse tangent undefined for coincident points"));
    }
    let along = dot(&j.d1, delta) / s2;
    Ok(j.d1.iter().zip(delta).map(|(v, d)| v - along * d).collect())
}

/// `((ẋ1·ẋ2) S² - (ẋ1·Δ)(ẋ2·Δ)) / S⁴` from raw slices; no checks.
#[inline]
pub(crate) fn transverse_raw(v1: &[f64], v2: &[f64], delta: &[f64]) -> f64 {
    let mut vv = 0.0;
    let mut v1d = 0.0;
    let mut v2d = 0.0;
    let mut s2 = 0.0;
    for i in 0..delta.len() {
        vv += v1[i] * v2[i];
        v1d += v1[i] * delta[i];
        v2d += v2[i] * delta[i];
        s2 += delta[i] * delta[i];
    }
    (vv * s2 - v1d * v2d) / (s2 * s2)
}

pub fn kernel_transverse(j1: &CurveJet, j2: &CurveJet) -> Result<KernelValue> {
    check_dims(j1, j2)?;
    let (delta, s2) = delta_and_s2(j1, j2);
    if !(s2 > 0.0) {
        return Err(Error::domain("kernel evaluated at coincident points"));
    }
    Ok(KernelValue::new(
        transverse_raw(&j1.d1, &j2.d1, &delta),
        KernelForm::Transverse,
    ))
}

/// `(ẋ1 × Δ)·(ẋ2 × Δ) / S⁴`; plane curves are embedded with `z = 0`.
pub fn kernel_cross(j1: &CurveJet, j2: &CurveJet) -> Result<KernelValue> {
    check_dims(j1, j2)?;
    if j1.dimension() > 3 {
        return Err(Error::Unsupported(format!(
            "cross-product kernel needs dimension <= 3, got {}",
            j1.dimension()
        )));
    }
    let (delta, s2) = delta_and_s2(j1, j2);
    if !(s2 > 0.0) {
        return Err(Error::domain("kernel evaluated at coincident points"));
    }
    let d = embed3(&delta);
    let c1 = cross(&embed3(&j1.d1), &d);
    let c2 = cross(&embed3(&j2.d1), &d);
    Ok(KernelValue::new(dot(&c1, &c2) / (s2 * s2), KernelForm::CrossProduct))
}

/// `-∂₁∂₂ ln S - (∂₁ ln S)(∂₂ ln S)` from the analytic partials of `ln S`.
pub fn kernel_log_form(curve: &Curve, t1: f64, t2: f64) -> Result<KernelValue> {
    let h = t2 - t1;
    if (h / (2.0 * PI)).fract() == 0.0 {
        return Err(Error::domain(
            "log-derivative kernel undefined at coincident parameters",
        ));
    }
    let (j1, j2) = (curve.jet(t1), curve.jet(t2));
    let delta = curve.chord(t1, h);
    let s2 = dot(&delta, &delta);
    if !(s2 > 0.0) {
        return Err(Error::domain("log-derivative kernel undefined at coincident points"));
    }
    let (p1, p2) = log_partials(&j1, &j2, &delta, s2);
    let mixed = log_mixed_partial(&j1, &j2, &delta, s2);
    Ok(KernelValue::new(-mixed - p1 * p2, KernelForm::LogDerivative))
}

/// `(∂₁ ln S, ∂₂ ln S)` at a pair of jets with chord `delta`.
pub(crate) fn log_partials(j1: &CurveJet, j2: &CurveJet, delta: &[f64], s2: f64) -> (f64, f64) {
    (dot(delta, &j1.d1) / s2, -dot(delta, &j2.d1) / s2)
}

/// `∂₁∂₂ ln S = -(ẋ1·ẋ2)/S² + 2(Δ·ẋ1)(Δ·ẋ2)/S⁴`.
pub(crate) fn log_mixed_partial(j1: &CurveJet, j2: &CurveJet, delta: &[f64], s2: f64) -> f64 {
    -dot(&j1.d1, &j2.d1) / s2 + 2.0 * dot(delta, &j1.d1) * dot(delta, &j2.d1) / (s2 * s2)
}

/// Continuous extension of the kernel onto the diagonal.
pub fn kernel_diagonal(j: &CurveJet) -> Result<KernelValue> {
    let vv = j.speed_squared();
    if !(vv > 0.0) {
        return Err(Error::domain("diagonal kernel needs a regular jet (ẋ = 0)"));
    }
    Ok(KernelValue::new(diagonal_raw(&j.d1, &j.d2), KernelForm::DiagonalLimit))
}

#[inline]
pub(crate) fn diagonal_raw(v: &[f64], a: &[f64]) -> f64 {
    let vv = dot(v, v);
    let va = dot(v, a);
    let aa = dot(a, a);
    (va * va - vv * aa) / (4.0 * vv * vv)
}

/// Offsets below this use the midpoint diagonal value in
/// [`kernel_near_diagonal`].
pub const MIDPOINT_SWITCH: f64 = 1e-5;

/// `g(t, t + eps)` for small offsets.
///
/// The chord comes from [`Curve::chord`], which keeps full relative accuracy
/// as `eps → 0`, and the numerator is assembled as a sum of products of 2×2
/// minors `Σ_{i<k} (ẋ1 ∧ Δ)_{ik} (ẋ2 ∧ Δ)_{ik}`. Each minor still cancels to
/// `O(eps²)` from `O(eps)` products, so the relative error is about
/// `1e-16 / |eps|`. Since `g` is symmetric, `g(t, t + eps)` equals the
/// diagonal value at `t + eps/2` up to `O(eps²)`; that value is used when
/// `|eps| <` [`MIDPOINT_SWITCH`], keeping the relative error near `1e-10` or
/// better for all offsets. `eps = 0` returns the diagonal limit.
pub fn kernel_near_diagonal(curve: &Curve, t: f64, eps: f64) -> KernelValue {
    if eps == 0.0 {
        let j = curve.jet(t);
        return KernelValue::new(diagonal_raw(&j.d1, &j.d2), KernelForm::DiagonalLimit);
    }
    if eps.abs() < MIDPOINT_SWITCH {
        let j = curve.jet(t + 0.5 * eps);
        return KernelValue::new(diagonal_raw(&j.d1, &j.d2), KernelForm::NearDiagonal);
    }
    let j1 = curve.jet(t);
    let j2 = curve.jet(t + eps);
    let delta = curve.chord(t, eps);
    KernelValue::new(wedge_raw(&j1.d1, &j2.d1, &delta), KernelForm::NearDiagonal)
}

/// `g(t1, t2)` with the evaluation the quadrature uses: the diagonal limit
/// on the diagonal, [`kernel_near_diagonal`] for offsets (modulo 2π) below
/// [`NEAR_DIAGONAL_SWITCH`], the transverse formula otherwise.
pub fn kernel_at(curve: &Curve, t1: f64, t2: f64) -> KernelValue {
    let mut h = (t2 - t1).rem_euclid(2.0 * PI);
    if h > PI {
        h -= 2.0 * PI;
    }
    if h.abs() < NEAR_DIAGONAL_SWITCH {
        return kernel_near_diagonal(curve, t1, h);
    }
    let (j1, j2) = (curve.jet(t1), curve.jet(t2));
    KernelValue::new(
        transverse_raw(&j1.d1, &j2.d1, &curve.chord(t1, h)),
        KernelForm::Transverse,
    )
}

#[inline]
pub(crate) fn wedge_raw(v1: &[f64], v2: &[f64], delta: &[f64]) -> f64 {
    let n = delta.len();
    let mut num = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            let w1 = v1[i] * delta[k] - v1[k] * delta[i];
            let w2 = v2[i] * delta[k] - v2[k] * delta[i];
            num += w1 * w2;
        }
    }
    let s2 = dot(delta, delta);
    num / (s2 * s2)
}

fn check_dims(j1: &CurveJet, j2: &CurveJet) -> Result<()> {
    if j1.dimension() != j2.dimension() {
        return Err(Error::invalid(format!(
            "jets of different dimension ({} vs {})",
            j1.dimension(),
            j2.dimension()
        )));
    }
    Ok(())
}

fn embed3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], if v.len() > 2 { v[2] } else { 0.0 }]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{invert, sample_params, FourierCurve, InversionCenter};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn jet(x: &[f64], d1: &[f64], d2: &[f64]) -> CurveJet {
        CurveJet::new(x.to_vec(), d1.to_vec(), d2.to_vec()).unwrap()
    }

    /// Symmetric Richardson extrapolation of `g(t, t ± eps)` to `eps = 0`.
    fn richardson_diagonal(curve: &Curve, t: f64) -> f64 {
        let levels = 5;
        let mut table: Vec<f64> = (0..levels)
            .map(|k| {
                let eps = 0.05 / f64::powi(2.0, k as i32);
                let j0 = curve.jet(t);
                let plus = kernel_transverse(&j0, &curve.jet(t + eps)).unwrap().value;
                let minus = kernel_transverse(&j0, &curve.jet(t - eps)).unwrap().value;
                0.5 * (plus + minus)
            })
            .collect();
        // The symmetric average is even in eps.
        for col in 1..levels {
            let f = f64::powi(4.0, col as i32);
            for row in (col..levels).rev() {
                table[row] = (f * table[row] - table[row - 1]) / (f - 1.0);
            }
        }
        table[levels - 1]
    }

    fn ellipse_s2(a: f64, b: f64, t1: f64, t2: f64) -> f64 {
        let (d, s) = (0.5 * (t1 - t2), 0.5 * (t1 + t2));
        4.0 * d.sin().powi(2) * (a * a * s.sin().powi(2) + b * b * s.cos().powi(2))
    }

    #[test]
    fn delta_examples() {
        let j = jet(&[1.0, 2.0], &[1.0, 0.0], &[0.0, 0.0]);
        let (d, s2) = delta_and_s2(&j, &j);
        assert_eq!(d, vec![0.0, 0.0]);
        assert_eq!(s2, 0.0);

        let c = Curve::circle(1.0).unwrap();
        let (_, s2) = delta_and_s2(&c.jet(0.4), &c.jet(0.4 - PI));
        assert_relative_eq!(s2, 4.0, max_relative = 1e-15);

        let e = Curve::ellipse(2.0, 0.7).unwrap();
        for &(t1, t2) in &[(0.1, 2.3), (-3.0, 1.0), (2.9, -2.9)] {
            let (_, s2) = delta_and_s2(&e.jet(t1), &e.jet(t2));
            assert_relative_eq!(s2, ellipse_s2(2.0, 0.7, t1, t2), max_relative = 1e-13);
        }
    }

    #[test]
    fn transverse_tangent_examples() {
        let par = jet(&[0.0, 0.0], &[2.0, 0.0], &[0.0, 0.0]);
        let t = transverse_tangent(&par, &[3.0, 0.0], 9.0).unwrap();
        assert_eq!(t, vec![0.0, 0.0]);
        let orth = jet(&[0.0, 0.0], &[0.0, 1.5], &[0.0, 0.0]);
        let t = transverse_tangent(&orth, &[3.0, 0.0], 9.0).unwrap();
        assert_eq!(t, vec![0.0, 1.5]);
        assert!(matches!(
            transverse_tangent(&orth, &[0.0, 0.0], 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unit_circle_kernel_is_constant() {
        let c = Curve::circle(1.0).unwrap();
        for &(t1, t2) in &[(0.0, 1.0), (-2.0, 2.5), (3.0, -3.1), (0.2, 0.2 + PI)] {
            let g = kernel_transverse(&c.jet(t1), &c.jet(t2)).unwrap();
            assert_relative_eq!(g.value, -0.25, max_relative = 1e-13);
            assert_eq!(g.form, KernelForm::Transverse);
            assert_relative_eq!(kernel_log_form(&c, t1, t2).unwrap().value, -0.25, max_relative = 1e-13);
        }
    }

    #[test]
    fn ellipse_kernel_matches_reduced_integrand() {
        // -2 g = a²b² / (2 (a² sin² σ + b² cos² σ)²), σ = (t1 + t2)/2
        let (a, b) = (2.0, 1.0);
        let e = Curve::ellipse(a, b).unwrap();
        for &(t1, t2) in &[(0.3, 1.9), (-2.0, 0.5), (3.0, -2.0)] {
            let g = kernel_transverse(&e.jet(t1), &e.jet(t2)).unwrap().value;
            let s: f64 = 0.5 * (t1 + t2);
            let den = a * a * s.sin().powi(2) + b * b * s.cos().powi(2);
            assert_relative_eq!(-2.0 * g, a * a * b * b / (2.0 * den * den), max_relative = 1e-12);
        }
    }

    #[test]
    fn orthogonal_tangents_give_zero() {
        let j1 = jet(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0; 3]);
        let j2 = jet(&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[0.0; 3]);
        assert_eq!(kernel_transverse(&j1, &j2).unwrap().value, 0.0);
        assert_eq!(kernel_cross(&j1, &j2).unwrap().value, 0.0);
    }

    #[test]
    fn ellipse_cross_products() {
        let (a, b) = (2.0, 1.0);
        let e = Curve::ellipse(a, b).unwrap();
        let (t1, t2): (f64, f64) = (0.4, 2.2);
        let (j1, j2) = (e.jet(t1), e.jet(t2));
        let d = embed3(&sub(&j1.x, &j2.x));
        let c1 = cross(&embed3(&j1.d1), &d);
        let c2 = cross(&embed3(&j2.d1), &d);
        let k = a * b * (1.0 - (t1 - t2).cos());
        assert_relative_eq!(c1[2], -k, max_relative = 1e-13);
        assert_relative_eq!(c2[2], k, max_relative = 1e-13);
        assert_relative_eq!(
            dot(&c1, &c2),
            -4.0 * a * a * b * b * (0.5 * (t1 - t2)).sin().powi(4),
            max_relative = 1e-13
        );
    }

    #[test]
    fn cross_form_rejects_high_dimension() {
        let j = jet(&[0.0; 4], &[1.0, 0.0, 0.0, 0.0], &[0.0; 4]);
        let k = jet(&[1.0, 1.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0; 4]);
        assert!(matches!(kernel_cross(&j, &k), Err(Error::Unsupported(_))));
        assert!(kernel_transverse(&j, &k).is_ok());
    }

    #[test]
    fn coincident_points_are_domain_errors() {
        let c = Curve::circle(1.0).unwrap();
        let j = c.jet(0.3);
        assert!(matches!(kernel_transverse(&j, &j), Err(Error::Domain(_))));
        assert!(matches!(kernel_cross(&j, &j), Err(Error::Domain(_))));
        assert!(matches!(kernel_log_form(&c, 0.3, 0.3), Err(Error::Domain(_))));
        assert!(matches!(kernel_log_form(&c, -PI, PI), Err(Error::Domain(_))));
        let still = jet(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]);
        assert!(matches!(kernel_diagonal(&still), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_partial_matches_finite_differences() {
        let e = Curve::ellipse(2.0, 1.0).unwrap();
        let ln_s = |t1: f64, t2: f64| {
            let d = sub(&e.position(t1), &e.position(t2));
            0.5 * dot(&d, &d).ln()
        };
        let (t1, t2) = (0.3, 1.8);
        let (j1, j2) = (e.jet(t1), e.jet(t2));
        let delta = sub(&j1.x, &j2.x);
        let exact = log_mixed_partial(&j1, &j2, &delta, dot(&delta, &delta));
        let fd = |h: f64| {
            (ln_s(t1 + h, t2 + h) - ln_s(t1 + h, t2 - h) - ln_s(t1 - h, t2 + h) + ln_s(t1 - h, t2 - h)) / (4.0 * h * h)
        };
        let (e1, e2) = ((fd(1e-2) - exact).abs(), (fd(1e-3) - exact).abs());
        assert!(e1 < 1e-3 && e2 < e1 / 50.0, "{e1} {e2}");
    }

    #[test]
    fn diagonal_examples() {
        let line = jet(&[0.0, 0.0], &[1.0, 2.0], &[0.0, 0.0]);
        assert_eq!(kernel_diagonal(&line).unwrap().value, 0.0);
        let c = Curve::circle(1.0).unwrap();
        assert_relative_eq!(kernel_diagonal(&c.jet(0.7)).unwrap().value, -0.25, max_relative = 1e-15);
        let e = Curve::ellipse(2.0, 1.0).unwrap();
        assert_relative_eq!(kernel_diagonal(&e.jet(0.0)).unwrap().value, -1.0, max_relative = 1e-15);
        assert_eq!(kernel_diagonal(&e.jet(0.0)).unwrap().form, KernelForm::DiagonalLimit);
    }

    #[test]
    fn diagonal_matches_richardson_oracle() {
        let wobble = Curve::fourier(
            FourierCurve::new(
                vec![vec![0.0, 1.0, 0.1], vec![0.0, 0.0, 0.0, 0.05], vec![0.0, 0.2]],
                vec![vec![0.0, 0.0, 0.0, 0.07], vec![0.0, 1.3, -0.1], vec![0.0, 0.0, 0.3]],
            )
            .unwrap(),
        );
        let curves = [Curve::circle(1.0).unwrap(), Curve::ellipse(2.0, 1.0).unwrap(), wobble];
        for c in &curves {
            for &t in &[0.0, 0.9, -2.2] {
                let exact = kernel_diagonal(&c.jet(t)).unwrap().value;
                assert!((richardson_diagonal(c, t) - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn near_diagonal_examples() {
        let e = Curve::ellipse(2.0, 1.0).unwrap();
        let d = kernel_near_diagonal(&e, 0.4, 0.0);
        assert_eq!(d.value, kernel_diagonal(&e.jet(0.4)).unwrap().value);

        let c = Curve::circle(1.0).unwrap();
        for &eps in &[1e-12, 1e-8, 1e-5, 1e-3, 6e-3, -2e-3] {
            assert_relative_eq!(kernel_near_diagonal(&c, 1.3, eps).value, -0.25, max_relative = 1e-10);
        }

        for &t in &[0.0, 0.7, -2.0, 3.1] {
            let near = kernel_near_diagonal(&e, t, 1e-2).value;
            let direct = kernel_transverse(&e.jet(t), &e.jet(t + 1e-2)).unwrap().value;
            assert!((near - direct).abs() <= 1e-7 * direct.abs());
        }
    }

    #[test]
    fn near_diagonal_is_accurate_where_direct_loses_digits() {
        // On the ellipse the exact value is known in closed form.
        let (a, b) = (2.0, 1.0);
        let e = Curve::ellipse(a, b).unwrap();
        let exact = |t1: f64, t2: f64| {
            let s: f64 = 0.5 * (t1 + t2);
            let den = a * a * s.sin().powi(2) + b * b * s.cos().powi(2);
            -a * a * b * b / (4.0 * den * den)
        };
        let t = 0.9;
        for &eps in &[1e-4, 1e-6, 1e-8] {
            let near = kernel_near_diagonal(&e, t, eps).value;
            assert_relative_eq!(near, exact(t, t + eps), max_relative = 1e-9);
        }
    }

    #[test]
    fn near_diagonal_stays_accurate_on_general_curve() {
        // Reference: g(t, t + eps) = g_diag(t + eps/2) + c eps² + d eps⁴ + O(eps⁶),
        // with c, d fitted at offsets where the direct formula is well conditioned.
        let f = Curve::fourier(
            FourierCurve::new(
                vec![
                    vec![0.0, 1.0, 0.2, 0.0, 0.05],
                    vec![0.0, 0.0, 0.1],
                    vec![0.0, 0.0, 0.0, 0.3],
                ],
                vec![vec![0.0, 0.0, 0.0, 0.1], vec![0.0, 1.0, 0.0, 0.2], vec![0.0, 0.3]],
            )
            .unwrap(),
        );
        for &m in &[0.3, 2.0, -1.1] {
            // Offsets are centered on m so the expansion is even in eps.
            let g0 = kernel_diagonal(&f.jet(m)).unwrap().value;
            let rest = |h: f64| {
                let direct = kernel_transverse(&f.jet(m - 0.5 * h), &f.jet(m + 0.5 * h))
                    .unwrap()
                    .value;
                (direct - g0) / (h * h)
            };
            let (h1, h2) = (1.6e-2, 8e-3);
            let (r1, r2) = (rest(h1), rest(h2));
            let d = (r1 - r2) / (h1 * h1 - h2 * h2);
            let c = r2 - d * h2 * h2;
            for k in 4..=26 {
                let eps = 6e-3 * 0.6f64.powi(k - 4) * if k % 2 == 0 { 1.0 } else { -1.0 };
                let model = g0 + (c + d * eps * eps) * eps * eps;
                let near = kernel_near_diagonal(&f, m - 0.5 * eps, eps).value;
                assert!(
                    (near - model).abs() <= 1e-9 * model.abs(),
                    "m={m} eps={eps:e}: {near} vs {model}"
                );
            }
        }
    }

    #[test]
    fn diagonal_continuity_is_linear() {
        let e = Curve::ellipse(2.0, 1.0).unwrap();
        let t = 0.7;
        let g0 = kernel_diagonal(&e.jet(t)).unwrap().value;
        let dev: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&eps| (kernel_transverse(&e.jet(t), &e.jet(t + eps)).unwrap().value - g0).abs())
            .collect();
        let c = dev[0] / 1e-1;
        assert!(dev[1] <= 1.2 * c * 1e-2 && dev[2] <= 1.2 * c * 1e-3, "{dev:?}");
        assert!(dev[2] > 0.05 * c * 1e-3, "decay faster than linear: {dev:?}");
    }

    #[test]
    fn forms_agree_on_inverted_ellipse() {
        let lim = invert(&Curve::ellipse(2.0, 1.0).unwrap(), &InversionCenter::origin(2)).unwrap();
        for t1 in sample_params(9) {
            for t2 in sample_params(7) {
                let gap = (t1 - t2 - 0.1).rem_euclid(2.0 * PI);
                if gap.min(2.0 * PI - gap) < 0.1 {
                    continue;
                }
                let (j1, j2) = (lim.jet(t1), lim.jet(t2 + 0.1));
                let tr = kernel_transverse(&j1, &j2).unwrap().value;
                let cr = kernel_cross(&j1, &j2).unwrap().value;
                let lg = kernel_log_form(&lim, t1, t2 + 0.1).unwrap().value;
                assert_relative_eq!(tr, cr, max_relative = 1e-9);
                assert_relative_eq!(tr, lg, max_relative = 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn kernel_is_symmetric(a in 0.3f64..3.0, b in 0.3f64..3.0, t1 in -PI..PI, t2 in -PI..PI) {
            let e = Curve::ellipse(a, b).unwrap();
            prop_assume!((t1 - t2).abs() > 1e-3);
            let (j1, j2) = (e.jet(t1), e.jet(t2));
            let g12 = kernel_transverse(&j1, &j2).unwrap().value;
            let g21 = kernel_transverse(&j2, &j1).unwrap().value;
            prop_assert_eq!(g12, g21);
        }

        #[test]
        fn transverse_tangent_is_orthogonal_to_chord(
            x in proptest::collection::vec(-5.0f64..5.0, 3),
            v in proptest::collection::vec(-5.0f64..5.0, 3),
            d in proptest::collection::vec(-5.0f64..5.0, 3),
        ) {
            let s2 = dot(&d, &d);
            prop_assume!(s2 > 1e-6);
            let j = jet(&x, &v, &[0.0; 3]);
            let t = transverse_tangent(&j, &d, s2).unwrap();
            let scale = dot(&v, &v).sqrt() * s2.sqrt();
            prop_assert!(dot(&t, &d).abs() <= 1e-14 * scale);
        }
    }
}
