//! JSON description of curves and transforms.
//!
//! ```json
//! {"kind":"ellipse","a":2.0,"b":1.0}
//! {"kind":"circle","r":1.0,"center":[3.0,0.0]}
//! {"kind":"fourier","cos":[[0,1],[0]],"sin":[[],[0,1]]}
//! {"kind":"transformed","base":{"kind":"circle","r":1},
//!  "ops":[{"translate":[3,0]},{"invert":{"center":[0,0]}},{"rotate":{"angle":0.5}},
//!         {"scale":2.0},{"reparam":{"amplitude":0.3}}]}
//! ```
//!
//! `ops` are applied in the order listed. A rotation is either
//! `{"angle": θ}` (plane of the first two axes unless `"plane": [i, j]` is
//! given), a bare angle, or `{"matrix": [[...], ...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Curve, FourierCurve, InversionCenter, Transform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    Circle {
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    Fourier {
        #[serde(default)]
        cos: Vec<Vec<f64>>,
        #[serde(default)]
        sin: Vec<Vec<f64>>,
    },
    Transformed {
        base: Box<CurveSpec>,
        #[serde(default)]
        ops: Vec<OpSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum OpSpec {
    Invert { center: Vec<f64> },
    Rotate(RotateSpec),
    Scale(f64),
    Translate(Vec<f64>),
    Reparam { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RotateSpec {
    Angle {
        angle: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        plane: Option<[usize; 2]>,
    },
    Matrix {
        matrix: Vec<Vec<f64>>,
    },
    Bare(f64),
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad curve spec: {e}")))
    }

    pub fn build(&self) -> Result<Curve> {
        match self {
            CurveSpec::Circle { r, center } => Curve::circle_at(*r, center.unwrap_or([0.0, 0.0])),
            CurveSpec::Ellipse { a, b, center } => Curve::ellipse_at(*a, *b, center.unwrap_or([0.0, 0.0])),
            CurveSpec::Fourier { cos, sin } => {
                let dim = cos.len().max(sin.len());
                let pad = |v: &Vec<Vec<f64>>| if v.is_empty() { vec![Vec::new(); dim] } else { v.clone() };
                Ok(Curve::fourier(FourierCurve::new(pad(cos), pad(sin))?))
            }
            CurveSpec::Transformed { base, ops } => {
                let mut curve = base.build()?;
                for op in ops {
                    curve = curve.apply(&op.to_transform(curve.dimension())?)?;
                }
                Ok(curve)
            }
        }
    }
}

impl OpSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad transform spec: {e}")))
    }

    pub fn to_transform(&self, dimension: usize) -> Result<Transform> {
        Ok(match self {
            OpSpec::Invert { center } => Transform::Invert(InversionCenter(center.clone())),
            OpSpec::Rotate(RotateSpec::Angle { angle, plane }) => {
                let [i, j] = plane.unwrap_or([0, 1]);
                Transform::plane_rotation(dimension, i, j, *angle)?
            }
            OpSpec::Rotate(RotateSpec::Bare(angle)) => Transform::plane_rotation(dimension, 0, 1, *angle)?,
            OpSpec::Rotate(RotateSpec::Matrix { matrix }) => Transform::Rotate(matrix.clone()),
            OpSpec::Scale(s) => Transform::Scale(*s),
            OpSpec::Translate(v) => Transform::Translate(v.clone()),
            OpSpec::Reparam { amplitude } => Transform::Reparam { amplitude: *amplitude },
        })
    }
}
