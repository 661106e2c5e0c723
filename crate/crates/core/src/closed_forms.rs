//! Exact reference values.
//!
//! These are evaluated straight from their formulas so they can serve as
//! oracles for the quadrature.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Semi-axes of an ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseShape {
    pub a: f64,
    pub b: f64,
}

impl EllipseShape {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!("ellipse axes must be positive (a={a}, b={b})")));
        }
        Ok(Self { a, b })
    }

    /// Minor over major axis, in `(0, 1]`.
    pub fn xi(&self) -> f64 {
        self.a.min(self.b) / self.a.max(self.b)
    }

    pub fn angular_params(&self) -> AngularIntegralParams {
        AngularIntegralParams::from_axes(self.a, self.b)
    }
}

/// `α = (a² - b²)/2`, `β = (a² + b²)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularIntegralParams {
    pub alpha: f64,
    pub beta: f64,
}

impl AngularIntegralParams {
    pub fn from_axes(a: f64, b: f64) -> Self {
        Self {
            alpha: 0.5 * (a * a - b * b),
            beta: 0.5 * (a * a + b * b),
        }
    }
}

pub fn n_circle() -> f64 {
    2.0 * PI * PI
}

/// `(ξ + 1/ξ) π²`. Values `ξ > 1` are accepted and give the same result as
/// `1/ξ` (the ellipse rotated by 90°).
pub fn n_ellipse(xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::invalid(format!("axis ratio must be positive, got {xi}")));
    }
    Ok((xi + 1.0 / xi) * PI * PI)
}

/// `T = ∫₀^{2π} du / (β - α cos u) = 2π (β² - α²)^{-1/2}` for `β > |α|`.
#[allow(non_snake_case)]
pub fn T_integral(beta: f64, alpha: f64) -> Result<f64> {
    if !(beta > alpha.abs()) {
        return Err(Error::domain(format!("T integral needs β > |α| (β={beta}, α={alpha})")));
    }
    Ok(2.0 * PI / (beta * beta - alpha * alpha).sqrt())
}

/// `J = ∫_{-π}^{π} dx / (a² sin² x + b² cos² x)² = π (a² + b²) / (a³ b³)`.
#[allow(non_snake_case)]
pub fn J_integral(a: f64, b: f64) -> Result<f64> {
    let s = EllipseShape::new(a, b)?;
    Ok(PI * (s.a * s.a + s.b * s.b) / (s.a * s.b).powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoteKind {
    /// `I ~ c / μ`
    Pole,
    /// `I ~ c ln(1/μ)`
    Log,
    /// `I ≡ 0`
    Zero,
}

impl AsymptoteKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AsymptoteKind::Pole => "pole",
            AsymptoteKind::Log => "log",
            AsymptoteKind::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptote {
    pub kind: AsymptoteKind,
    pub coefficient: f64,
}

/// `|sin φ|` below this selects the pole model.
pub const POLE_SIN_THRESHOLD: f64 = 1e-6;
/// `|cos φ|` below this selects the identically-zero model.
pub const ZERO_COS_THRESHOLD: f64 = 1e-12;

/// Small-μ behavior of the local contribution of two straight pieces meeting
/// at angle `φ`.
pub fn intersection_asymptote(phi: f64) -> Asymptote {
    let (s, c) = phi.sin_cos();
    if s.abs() < POLE_SIN_THRESHOLD {
        Asymptote {
            kind: AsymptoteKind::Pole,
            coefficient: c.signum() * PI / 2f64.sqrt(),
        }
    } else if c.abs() < ZERO_COS_THRESHOLD {
        Asymptote {
            kind: AsymptoteKind::Zero,
            coefficient: 0.0,
        }
    } else {
        Asymptote {
            kind: AsymptoteKind::Log,
            coefficient: PI * c / s.abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_circle;
    use approx::assert_relative_eq;

    #[test]
    fn circle_value() {
        assert_eq!(n_circle(), 19.739208802178716);
        assert_eq!(n_ellipse(1.0).unwrap(), n_circle());
    }

    #[test]
    fn ellipse_values() {
        assert_relative_eq!(n_ellipse(0.5).unwrap(), 24.674011002723395, max_relative = 1e-15);
        assert_relative_eq!(n_ellipse(0.2).unwrap(), 5.2 * PI * PI, max_relative = 1e-15);
        assert!(matches!(n_ellipse(0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(n_ellipse(-0.3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eccentricity_parametrization() {
        // ξ = (1 - ε²)^{1/2}
        for &ecc in &[0.0, 0.3, 0.6, 0.9] {
            let xi = (1.0f64 - ecc * ecc).sqrt();
            let s = EllipseShape::new(1.0, xi).unwrap();
            assert_relative_eq!(n_ellipse(s.xi()).unwrap(), n_ellipse(xi).unwrap());
        }
    }

    #[test]
    fn exchange_symmetry_and_minimum() {
        let mut xi = 0.05;
        while xi <= 1.0 {
            let n = n_ellipse(xi).unwrap();
            assert_relative_eq!(n, n_ellipse(1.0 / xi).unwrap(), max_relative = 1e-14);
            assert!(n >= n_circle());
            if (xi - 1.0f64).abs() > 1e-9 {
                assert!(n > n_circle());
            }
            xi += 0.05;
        }
    }

    #[test]
    fn t_integral_examples() {
        assert_relative_eq!(T_integral(2.0, 0.0).unwrap(), PI, max_relative = 1e-15);
        let p = AngularIntegralParams::from_axes(2.0, 1.0);
        assert_eq!((p.alpha, p.beta), (1.5, 2.5));
        assert_relative_eq!(T_integral(p.beta, p.alpha).unwrap(), PI, max_relative = 1e-15);
        assert!(matches!(T_integral(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(T_integral(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn t_integral_matches_trapezoid() {
        for &(beta, alpha) in &[(2.5, 1.5), (1.0, -0.6), (3.0, 0.1), (1.0, 0.9)] {
            let direct = integrate_circle(|u: f64| 1.0 / (beta - alpha * u.cos()), 512);
            assert_relative_eq!(direct, T_integral(beta, alpha).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn j_integral_examples() {
        assert_relative_eq!(J_integral(1.0, 1.0).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(J_integral(2.0, 1.0).unwrap(), 5.0 * PI / 8.0, max_relative = 1e-15);
        assert!(J_integral(0.0, 1.0).is_err());
        for &(a, b) in &[(2.0, 1.0), (1.0, 0.3), (0.7, 1.9)] {
            let n = a * a * b * b * PI * J_integral(a, b).unwrap();
            assert_relative_eq!(n, n_ellipse(b / a).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn j_is_minus_beta_derivative_of_t() {
        let (a, b) = (2.0, 1.0);
        let p = AngularIntegralParams::from_axes(a, b);
        let j = J_integral(a, b).unwrap();
        let fd =
            |h: f64| -(T_integral(p.beta + h, p.alpha).unwrap() - T_integral(p.beta - h, p.alpha).unwrap()) / (2.0 * h);
        let (e1, e2) = ((fd(1e-2) - j).abs(), (fd(1e-3) - j).abs());
        assert!(e1 < 1e-3 && e2 < e1 / 50.0, "{e1} {e2}");
    }

    #[test]
    fn asymptote_examples() {
        let a = intersection_asymptote(PI);
        assert_eq!(a.kind, AsymptoteKind::Pole);
        assert_relative_eq!(a.coefficient, -2.221441469079183, max_relative = 1e-12);
        let a = intersection_asymptote(0.0);
        assert_eq!(a.kind, AsymptoteKind::Pole);
        assert!(a.coefficient > 0.0);
        let a = intersection_asymptote(PI / 4.0);
        assert_eq!(a.kind, AsymptoteKind::Log);
        assert_relative_eq!(a.coefficient, PI, max_relative = 1e-14);
        let a = intersection_asymptote(-3.0 * PI / 4.0);
        assert_relative_eq!(a.coefficient, -PI, max_relative = 1e-14);
        let a = intersection_asymptote(PI / 2.0);
        assert_eq!(
            a,
            Asymptote {
                kind: AsymptoteKind::Zero,
                coefficient: 0.0
            }
        );
    }
}
