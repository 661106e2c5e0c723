//! Parametric closed curves and the transforms that act on them.
//!
//! Every curve is a 2π-periodic map `t ↦ x(t) ∈ R^N` that evaluates its
//! position, first and second derivative exactly (no internal finite
//! differencing). Transformed curves compose jets by the chain rule.
//!
//! Besides jets, curves expose [`Curve::chord`], the difference
//! `x(t) - x(t + h)` evaluated without subtracting two nearby positions. The
//! near-diagonal kernel relies on it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Position and first two derivatives of a curve at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub x: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl CurveJet {
    pub fn new(x: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != d1.len() || x.len() != d2.len() {
            return Err(Error::invalid(format!(
                "jet vectors must share a dimension >= 2 (got {}, {}, {})",
                x.len(),
                d1.len(),
                d2.len()
            )));
        }
        Ok(Self { x, d1, d2 })
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    pub fn speed_squared(&self) -> f64 {
        dot(&self.d1, &self.d1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Circle,
    Ellipse,
    Fourier,
    Transformed,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveKind::Circle => "circle",
            CurveKind::Ellipse => "ellipse",
            CurveKind::Fourier => "fourier",
            CurveKind::Transformed => "transformed",
        };
        f.write_str(s)
    }
}

/// Truncated Fourier series per coordinate.
///
/// `cos[j][k]` multiplies `cos(k t)` and `sin[j][k]` multiplies `sin(k t)` in
/// coordinate `j`; `sin[j][0]` has no effect.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl FourierCurve {
    pub fn new(cos: Vec<Vec<f64>>, sin: Vec<Vec<f64>>) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(Error::invalid(format!(
                "cosine and sine tables disagree on dimension ({} vs {})",
                cos.len(),
                sin.len()
            )));
        }
        if cos.len() < 2 {
            return Err(Error::invalid("fourier curve needs at least 2 coordinates"));
        }
        let finite = cos.iter().chain(sin.iter()).flatten().all(|c| c.is_finite());
        if !finite {
            return Err(Error::invalid("fourier coefficients must be finite"));
        }
        Ok(Self { cos, sin })
    }

    pub fn dimension(&self) -> usize {
        self.cos.len()
    }

    fn jet(&self, t: f64) -> CurveJet {
        let n = self.dimension();
        let mut x = vec![0.0; n];
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for j in 0..n {
            for (k, &c) in self.cos[j].iter().enumerate() {
                let kf = k as f64;
                let (s, co) = (kf * t).sin_cos();
                x[j] += c * co;
                d1[j] -= c * kf * s;
                d2[j] -= c * kf * kf * co;
            }
            for (k, &c) in self.sin[j].iter().enumerate().skip(1) {
                let kf = k as f64;
                let (s, co) = (kf * t).sin_cos();
                x[j] += c * s;
                d1[j] += c * kf * co;
                d2[j] -= c * kf * kf * s;
            }
        }
        CurveJet { x, d1, d2 }
    }

    fn chord(&self, t: f64, h: f64) -> Vec<f64> {
        // cos(ka) - cos(kb) = 2 sin(k(a+b)/2) sin(k(b-a)/2), likewise for sin.
        let mid = t + 0.5 * h;
        (0..self.dimension())
            .map(|j| {
                let mut acc = 0.0;
                for (k, &c) in self.cos[j].iter().enumerate().skip(1) {
                    let kf = k as f64;
                    acc += c * 2.0 * (kf * mid).sin() * (0.5 * kf * h).sin();
                }
                for (k, &c) in self.sin[j].iter().enumerate().skip(1) {
                    let kf = k as f64;
                    acc -= c * 2.0 * (kf * mid).cos() * (0.5 * kf * h).sin();
                }
                acc
            })
            .collect()
    }
}

/// Center `c` of the inversion `x ↦ (x - c) / |x - c|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionCenter(pub Vec<f64>);

impl InversionCenter {
    pub fn origin(dimension: usize) -> Self {
        Self(vec![0.0; dimension])
    }
}

/// A single geometric operation on a curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// `t ↦ t + amplitude · sin t`, a circle diffeomorphism for `|amplitude| < 1`.
    Reparam {
        amplitude: f64,
    },
    /// Row-major orthogonal matrix.
    Rotate(Vec<Vec<f64>>),
    Translate(Vec<f64>),
    Scale(f64),
    Invert(InversionCenter),
}

impl Transform {
    /// Rotation by `angle` in the plane of axes `i` and `j`.
    pub fn plane_rotation(dimension: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i >= dimension || j >= dimension || i == j {
            return Err(Error::invalid(format!(
                "rotation plane ({i}, {j}) invalid in dimension {dimension}"
            )));
        }
        let mut m = identity(dimension);
        let (s, c) = angle.sin_cos();
        m[i][i] = c;
        m[j][j] = c;
        m[i][j] = -s;
        m[j][i] = s;
        Ok(Transform::Rotate(m))
    }

    pub fn describe(&self) -> String {
        match self {
            Transform::Reparam { amplitude } => format!("reparam(amplitude={amplitude})"),
            Transform::Rotate(m) => format!("rotate({m:?})"),
            Transform::Translate(v) => format!("translate({v:?})"),
            Transform::Scale(s) => format!("scale({s})"),
            Transform::Invert(c) => format!("invert(center={:?})", c.0),
        }
    }
}

#[derive(Debug)]
enum Node {
    Ellipse {
        a: f64,
        b: f64,
        center: [f64; 2],
    },
    Fourier(FourierCurve),
    Affine {
        base: Curve,
        rotation: Vec<Vec<f64>>,
        scale: f64,
        translation: Vec<f64>,
    },
    Invert {
        base: Curve,
        center: Vec<f64>,
    },
    Reparam {
        base: Curve,
        amplitude: f64,
    },
}

/// A smooth closed curve in `R^N`, 2π-periodic in its parameter.
///
/// Cheap to clone; transformed curves share their base.
#[derive(Debug, Clone)]
pub struct Curve {
    dimension: usize,
    kind: CurveKind,
    node: Arc<Node>,
}

/// Samples used for the inversion clearance check and diameter estimates.
const CLEARANCE_SAMPLES: usize = 1024;
/// Reject an inversion if the curve comes closer to the center than this
/// fraction of its diameter.
pub const CLEARANCE_FACTOR: f64 = 1e-9;

impl Curve {
    pub fn circle(radius: f64) -> Result<Self> {
        Self::circle_at(radius, [0.0, 0.0])
    }

    pub fn circle_at(radius: f64, center: [f64; 2]) -> Result<Self> {
        let mut c = Self::ellipse_at(radius, radius, center)?;
        c.kind = CurveKind::Circle;
        Ok(c)
    }

    /// `t ↦ (a cos t, b sin t)`.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::ellipse_at(a, b, [0.0, 0.0])
    }

    pub fn ellipse_at(a: f64, b: f64, center: [f64; 2]) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!("ellipse axes must be positive (a={a}, b={b})")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("ellipse center must be finite"));
        }
        Ok(Self {
            dimension: 2,
            kind: CurveKind::Ellipse,
            node: Arc::new(Node::Ellipse { a, b, center }),
        })
    }

    pub fn fourier(series: FourierCurve) -> Self {
        Self {
            dimension: series.dimension(),
            kind: CurveKind::Fourier,
            node: Arc::new(Node::Fourier(series)),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Semi-axes `(a, b)` when the curve is an untransformed circle or ellipse.
    pub fn ellipse_axes(&self) -> Option<(f64, f64)> {
        match *self.node {
            Node::Ellipse { a, b, .. } => Some((a, b)),
            _ => None,
        }
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        match &*self.node {
            Node::Ellipse { a, b, center } => {
                let (s, c) = t.sin_cos();
                CurveJet {
                    x: vec![center[0] + a * c, center[1] + b * s],
                    d1: vec![-a * s, b * c],
                    d2: vec![-a * c, -b * s],
                }
            }
            Node::Fourier(f) => f.jet(t),
            Node::Affine {
                base,
                rotation,
                scale,
                translation,
            } => {
                let j = base.jet(t);
                let mut x = mat_vec(rotation, &j.x);
                for (xi, ti) in x.iter_mut().zip(translation) {
                    *xi = scale * *xi + ti;
                }
                CurveJet {
                    x,
                    d1: scaled(*scale, &mat_vec(rotation, &j.d1)),
                    d2: scaled(*scale, &mat_vec(rotation, &j.d2)),
                }
            }
            Node::Invert { base, center } => {
                let j = base.jet(t);
                let u = sub(&j.x, center);
                invert_jet(&u, &j.d1, &j.d2)
            }
            Node::Reparam { base, amplitude } => {
                let (s, c) = t.sin_cos();
                let phase = t + amplitude * s;
                let rate = 1.0 + amplitude * c;
                let accel = -amplitude * s;
                let j = base.jet(phase);
                let d2 =
                    j.d2.iter()
                        .zip(&j.d1)
                        .map(|(a2, a1)| a2 * rate * rate + a1 * accel)
                        .collect();
                CurveJet {
                    x: j.x,
                    d1: scaled(rate, &j.d1),
                    d2,
                }
            }
        }
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        self.jet(t).x
    }

    /// `x(t) - x(t + h)`, evaluated through sum/difference factorizations so
    /// that small `h` does not lose relative accuracy.
    pub fn chord(&self, t: f64, h: f64) -> Vec<f64> {
        match &*self.node {
            Node::Ellipse { a, b, .. } => {
                let mid = t + 0.5 * h;
                let half = (0.5 * h).sin();
                vec![2.0 * a * mid.sin() * half, -2.0 * b * mid.cos() * half]
            }
            Node::Fourier(f) => f.chord(t, h),
            Node::Affine {
                base, rotation, scale, ..
            } => scaled(*scale, &mat_vec(rotation, &base.chord(t, h))),
            Node::Invert { base, center } => {
                // y1 - y2 = (u1 q2 - u2 q1) / (q1 q2) with u2 = u1 - Δ; the
                // numerator expands to u1 (|Δ|² - 2 u1·Δ) + Δ q1.
                let delta = base.chord(t, h);
                let u1 = sub(&base.position(t), center);
                let u2 = sub(&u1, &delta);
                let q1 = dot(&u1, &u1);
                let q2 = dot(&u2, &u2);
                let coef = dot(&delta, &delta) - 2.0 * dot(&u1, &delta);
                u1.iter()
                    .zip(&delta)
                    .map(|(ui, di)| (ui * coef + di * q1) / (q1 * q2))
                    .collect()
            }
            Node::Reparam { base, amplitude } => {
                let phase = t + amplitude * t.sin();
                let dphase = h + 2.0 * amplitude * (t + 0.5 * h).cos() * (0.5 * h).sin();
                base.chord(phase, dphase)
            }
        }
    }

    pub fn apply(&self, transform: &Transform) -> Result<Curve> {
        match transform {
            Transform::Reparam { amplitude } => reparametrize(self, *amplitude),
            Transform::Rotate(m) => euclidean_transform(self, m, &vec![0.0; self.dimension], 1.0),
            Transform::Translate(v) => euclidean_transform(self, &identity(self.dimension), v, 1.0),
            Transform::Scale(s) => euclidean_transform(self, &identity(self.dimension), &vec![0.0; self.dimension], *s),
            Transform::Invert(c) => invert(self, c),
        }
    }

    /// Largest sampled distance between two curve points.
    pub fn diameter(&self, samples: usize) -> f64 {
        let pts: Vec<Vec<f64>> = sample_params(samples.max(2)).map(|t| self.position(t)).collect();
        let mut best: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                best = best.max(dist2(p, q));
            }
        }
        best.sqrt()
    }

    /// Minimum of `|x(t) - c|` over the curve: sampled, then polished by Newton
    /// steps on `|x(t) - c|²` around the closest samples.
    pub fn min_distance_to(&self, c: &[f64]) -> f64 {
        let ts: Vec<f64> = sample_params(CLEARANCE_SAMPLES).collect();
        let d: Vec<f64> = ts.iter().map(|&t| dist2(&self.position(t), c)).collect();
        let m = ts.len();
        let mut best = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let h = 2.0 * PI / m as f64;
        for i in 0..m {
            let prev = d[(i + m - 1) % m];
            let next = d[(i + 1) % m];
            if d[i] > prev || d[i] > next {
                continue;
            }
            let mut t = ts[i];
            for _ in 0..30 {
                let j = self.jet(t);
                let u = sub(&j.x, c);
                let g = dot(&u, &j.d1);
                let hess = dot(&j.d1, &j.d1) + dot(&u, &j.d2);
                if hess <= 0.0 {
                    break;
                }
                let step = (g / hess).clamp(-h, h);
                t -= step;
                best = best.min(dot(&u, &u));
                if step.abs() < 1e-15 {
                    break;
                }
            }
            best = best.min(dist2(&self.position(t), c));
        }
        best.sqrt()
    }
}

/// `t ↦ (a cos t, b sin t)`; both axes must be positive.
pub fn make_ellipse(a: f64, b: f64) -> Result<Curve> {
    Curve::ellipse(a, b)
}

/// Image of `curve` under `x ↦ (x - c)/|x - c|²`, with chain-rule jets.
pub fn invert(curve: &Curve, center: &InversionCenter) -> Result<Curve> {
    let c = &center.0;
    if c.len() != curve.dimension {
        return Err(Error::invalid(format!(
            "inversion center has dimension {}, curve has {}",
            c.len(),
            curve.dimension
        )));
    }
    if !c.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("inversion center must be finite"));
    }
    let diameter = curve.diameter(256);
    let clearance = curve.min_distance_to(c);
    if clearance < CLEARANCE_FACTOR * diameter {
        return Err(Error::domain(format!(
            "curve passes within {clearance:.3e} of the inversion center (diameter {diameter:.3e})"
        )));
    }
    Ok(Curve {
        dimension: curve.dimension,
        kind: CurveKind::Transformed,
        node: Arc::new(Node::Invert {
            base: curve.clone(),
            center: c.clone(),
        }),
    })
}

/// `t ↦ x(t + amplitude · sin t)`.
pub fn reparametrize(curve: &Curve, amplitude: f64) -> Result<Curve> {
    if !(amplitude.abs() < 1.0) {
        return Err(Error::invalid(format!(
            "reparametrization amplitude {amplitude} is not a circle diffeomorphism (need |a| < 1)"
        )));
    }
    Ok(Curve {
        dimension: curve.dimension,
        kind: CurveKind::Transformed,
        node: Arc::new(Node::Reparam {
            base: curve.clone(),
            amplitude,
        }),
    })
}

/// `x ↦ scale · R x + translation`.
pub fn euclidean_transform(curve: &Curve, rotation: &[Vec<f64>], translation: &[f64], scale: f64) -> Result<Curve> {
    let n = curve.dimension;
    if rotation.len() != n || rotation.iter().any(|row| row.len() != n) {
        return Err(Error::invalid(format!("rotation must be {n}x{n}")));
    }
    if translation.len() != n {
        return Err(Error::invalid(format!("translation must have {n} components")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {scale}")));
    }
    if !translation.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("translation must be finite"));
    }
    let defect = orthogonality_defect(rotation);
    if !(defect <= 1e-12) {
        return Err(Error::invalid(format!(
            "rotation is not orthogonal (|RᵀR - I| = {defect:.3e})"
        )));
    }
    Ok(Curve {
        dimension: n,
        kind: CurveKind::Transformed,
        node: Arc::new(Node::Affine {
            base: curve.clone(),
            rotation: rotation.to_vec(),
            scale,
            translation: translation.to_vec(),
        }),
    })
}

/// Result of the self-intersection screen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SimplicityReport {
    /// `min S(t1, t2) / dist_torus(t1, t2)` over sample pairs (length units).
    pub min_ratio: f64,
    /// Sampled diameter of the curve.
    pub diameter: f64,
    /// `min_ratio · π / diameter`; exactly 1 for a circle.
    pub normalized_ratio: f64,
    pub samples: usize,
}

/// Worst ratio of chordal distance to parameter distance over a uniform grid
/// of `samples` parameters. Thresholding is up to the caller.
pub fn check_simple(curve: &Curve, samples: usize) -> Result<SimplicityReport> {
    if samples < 16 {
        return Err(Error::invalid(format!(
            "check_simple needs >= 16 samples, got {samples}"
        )));
    }
    let h = 2.0 * PI / samples as f64;
    let ts: Vec<f64> = sample_params(samples).collect();
    let mut min_ratio = f64::INFINITY;
    let mut diam2: f64 = 0.0;
    for &t in &ts {
        for k in 1..=samples / 2 {
            let chord = curve.chord(t, k as f64 * h);
            let s2 = dot(&chord, &chord);
            diam2 = diam2.max(s2);
            min_ratio = min_ratio.min(s2.sqrt() / (k as f64 * h));
        }
    }
    let diameter = diam2.sqrt();
    let normalized_ratio = if diameter > 0.0 { min_ratio * PI / diameter } else { 0.0 };
    Ok(SimplicityReport {
        min_ratio,
        diameter,
        normalized_ratio,
        samples,
    })
}

fn invert_jet(u: &[f64], du: &[f64], ddu: &[f64]) -> CurveJet {
    let q = dot(u, u);
    let p = dot(u, du);
    let w = dot(du, du) + dot(u, ddu);
    let q2 = q * q;
    let q3 = q2 * q;
    let n = u.len();
    let mut x = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        x.push(u[i] / q);
        d1.push(du[i] / q - 2.0 * p * u[i] / q2);
        d2.push(ddu[i] / q - 4.0 * p * du[i] / q2 - 2.0 * w * u[i] / q2 + 8.0 * p * p * u[i] / q3);
    }
    CurveJet { x, d1, d2 }
}

/// `-π + 2π i / m` for `i = 0..m`.
pub fn sample_params(m: usize) -> impl Iterator<Item = f64> {
    let h = 2.0 * PI / m as f64;
    (0..m).map(move |i| -PI + i as f64 * h)
}

pub(crate) fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn orthogonality_defect(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| m[k][i] * m[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn scaled(s: f64, v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| s * x).collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}
