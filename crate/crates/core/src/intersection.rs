//! Local contribution of two nearly intersecting straight pieces.
//!
//! Two segments of half-length `t0` in `R³`, at distance `d` and with
//! tangents at angle `φ`, contribute (after rescaling by `t0`) the integral of
//!
//! ```text
//! M(t, t') = (t t' sin²φ + μ² cos φ) / (t² + t'² - 2 t t' cos φ + μ²)²,   μ = d / t0
//! ```
//!
//! Over the unit disk the angular integral is elementary,
//! `A(r) = π cos φ [L^{-1/2} + μ⁴ L^{-3/2}]` with
//! `L = r⁴ sin²φ + 2μ² r² + μ⁴`, and the substitution `u = r²/μ²` leaves
//!
//! ```text
//! I(μ, φ) = (π/2) cos φ ∫₀^{1/μ²} [P^{-1/2} + P^{-3/2}] du,   P = u² sin²φ + 2u + 1.
//! ```
//!
//! The u-form is the production path; [`disk_integral_polar`] and
//! [`radial_integral`] evaluate earlier stages of the reduction and serve as
//! validation.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::closed_forms::{intersection_asymptote, AsymptoteKind, ZERO_COS_THRESHOLD};
use crate::error::{Error, Result};

pub fn m_integrand(t: f64, tp: f64, mu: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let den = t * t + tp * tp - 2.0 * t * tp * c + mu * mu;
    (t * tp * s * s + mu * mu * c) / (den * den)
}

/// Coefficients of the angular integral at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKernel {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub l: f64,
}

impl RadialKernel {
    pub fn new(r: f64, mu: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (r2, m2) = (r * r, mu * mu);
        Self {
            p: r2 * s * s,
            q: 2.0 * m2 * c,
            alpha: r2 * c,
            beta: r2 + m2,
            l: r2 * r2 * s * s + 2.0 * m2 * r2 + m2 * m2,
        }
    }
}

/// `A(r) = ∫₀^{2π} M(r cos θ, r sin θ) dθ` in closed form.
pub fn angular_reduction(r: f64, mu: f64, phi: f64) -> f64 {
    let l = RadialKernel::new(r, mu, phi).l;
    let m4 = mu.powi(4);
    PI * phi.cos() * (1.0 / l.sqrt() + m4 / (l * l.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionConfig {
    pub mu: f64,
    pub phi: f64,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Panel width in the stretched variable `w = ln(1 + u)`.
    pub panel_width: f64,
    pub max_panels: usize,
}

impl IntersectionConfig {
    pub fn new(mu: f64, phi: f64) -> Result<Self> {
        let cfg = Self {
            mu,
            phi,
            order: 20,
            panel_width: 0.5,
            max_panels: 2000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("μ must be positive, got {}", self.mu)));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("φ must be finite"));
        }
        if self.order < 2 || !(self.panel_width > 0.0) || self.max_panels == 0 {
            return Err(Error::invalid("invalid quadrature resolution"));
        }
        Ok(())
    }

    /// `I(μ, φ)` from the one-dimensional u-form.
    ///
    /// Exactly zero when `|cos φ|` is below [`ZERO_COS_THRESHOLD`].
    ///
    /// The substitution `u = e^w - 1` spreads the scales `u ~ 1` and
    /// `u ~ 1/sin²φ` evenly, so the panel count grows like `ln(1/μ)`.
    pub fn disk_integral(&self) -> Result<f64> {
        self.validate()?;
        let upper = 1.0 / (self.mu * self.mu);
        if !upper.is_finite() {
            return Err(Error::domain(format!("μ = {} too small: 1/μ² overflows", self.mu)));
        }
        let (s, c) = self.phi.sin_cos();
        // I is proportional to cos φ; below the threshold the residue is the
        // rounding of φ itself.
        if c.abs() < ZERO_COS_THRESHOLD {
            return Ok(0.0);
        }
        let s2 = s * s;
        let w_max = upper.ln_1p();
        let panels = (w_max / self.panel_width).ceil().max(1.0);
        if panels > self.max_panels as f64 {
            return Err(Error::domain(format!(
                "μ = {} needs {panels} panels, budget is {}",
                self.mu, self.max_panels
            )));
        }
        let panels = panels as usize;
        let rule = gauss_legendre(self.order)?;
        let width = w_max / panels as f64;
        let integrand = |w: f64| {
            let u = w.exp_m1();
            let p = (u * s2 + 2.0) * u + 1.0;
            let rp = p.sqrt();
            (u + 1.0) * (1.0 / rp + 1.0 / (p * rp))
        };
        let total: f64 = (0..panels)
            .map(|k| {
                let a = k as f64 * width;
                let b = if k + 1 == panels { w_max } else { a + width };
                rule.integrate(a, b, integrand)
            })
            .sum();
        Ok(0.5 * PI * c * total)
    }
}

/// `I(μ, φ)` over the unit disk, from the u-form with default resolution.
pub fn disk_integral(mu: f64, phi: f64) -> Result<f64> {
    IntersectionConfig::new(mu, phi)?.disk_integral()
}

/// Panels in `r ∈ [0, 1]`, geometrically graded toward `r = 0` on the scale `μ`.
fn radial_panels(mu: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut r = (mu / 16.0).min(0.5);
    while r < 1.0 {
        edges.push(r);
        r *= 2.0;
    }
    edges.push(1.0);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `∫₀¹ r A(r) dr` with the closed-form angular integral.
pub fn radial_integral(mu: f64, phi: f64) -> Result<f64> {
    IntersectionConfig::new(mu, phi)?;
    let rule = gauss_legendre(24)?;
    Ok(radial_panels(mu)
        .into_iter()
        .map(|(a, b)| rule.integrate(a, b, |r| r * angular_reduction(r, mu, phi)))
        .sum())
}

/// Brute-force polar quadrature of `M` over the unit disk: graded
/// Gauss–Legendre panels in `r`, periodic trapezoid with `n_theta` nodes in `θ`.
pub fn disk_integral_polar(mu: f64, phi: f64, n_theta: usize) -> Result<f64> {
    IntersectionConfig::new(mu, phi)?;
    if n_theta < 4 {
        return Err(Error::invalid("need at least 4 angular nodes"));
    }
    let rule = gauss_legendre(24)?;
    let h = 2.0 * PI / n_theta as f64;
    let ring = |r: f64| {
        let sum: f64 = (0..n_theta)
            .map(|k| {
                let (s, c) = (k as f64 * h).sin_cos();
                m_integrand(r * c, r * s, mu, phi)
            })
            .sum();
        r * h * sum
    };
    Ok(radial_panels(mu)
        .into_iter()
        .map(|(a, b)| rule.integrate(a, b, ring))
        .sum())
}

fn gauss_legendre(order: usize) -> Result<GaussLegendre> {
    GaussLegendre::new(order).map_err(|e| Error::invalid(format!("gauss-legendre rule: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub phi: f64,
    pub model: AsymptoteKind,
    pub coefficient_fit: f64,
    pub coefficient_exact: f64,
    /// Relative error of the fitted coefficient; absolute for the zero model.
    pub rel_err: f64,
    pub intercept: f64,
    /// `(μ, I(μ, φ))` pairs in the order given.
    pub samples: Vec<(f64, f64)>,
}

/// Fits `I ≈ c/μ + d` (pole model, `cos φ = ±1`) or `I ≈ c ln(1/μ) + d`
/// (log model) by least squares over the μ sequence and compares `c` with
/// the exact asymptotic coefficient.
pub fn asymptotic_fit(phi: f64, mus: &[f64]) -> Result<AsymptoticFit> {
    if mus.len() < 3 {
        return Err(Error::invalid("asymptotic fit needs at least 3 values of μ"));
    }
    let (lo, hi) = mus
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &m| (l.min(m), h.max(m)));
    if !(lo > 0.0) {
        return Err(Error::invalid("μ values must be positive"));
    }
    if hi / lo < 100.0 {
        return Err(Error::invalid(format!(
            "μ range [{lo:e}, {hi:e}] spans less than two decades; fit is indeterminate"
        )));
    }
    let exact = intersection_asymptote(phi);
    let samples: Vec<(f64, f64)> = mus
        .iter()
        .map(|&m| disk_integral(m, phi).map(|v| (m, v)))
        .collect::<Result<_>>()?;
    let basis = |m: f64| match exact.kind {
        AsymptoteKind::Pole => 1.0 / m,
        AsymptoteKind::Log | AsymptoteKind::Zero => (1.0 / m).ln(),
    };
    let xs: Vec<f64> = samples.iter().map(|&(m, _)| basis(m)).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let (slope, intercept) = least_squares_line(&xs, &ys);
    let rel_err = match exact.kind {
        AsymptoteKind::Zero => slope.abs(),
        _ => (slope - exact.coefficient).abs() / exact.coefficient.abs(),
    };
    Ok(AsymptoticFit {
        phi,
        model: exact.kind,
        coefficient_fit: slope,
        coefficient_exact: exact.coefficient,
        rel_err,
        intercept,
        samples,
    })
}

fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// `n` logarithmically spaced values from `hi` down to `lo`.
pub fn log_spaced(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}
