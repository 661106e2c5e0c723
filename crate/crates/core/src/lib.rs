//! Numerical evaluation of the Euclidean photon-number integral
//!
//! For a smooth closed curve `x(t)` in `R^N`, parametrized over `[-π, π)`, the
//! integral is
//!
//! ```text
//! n = -2 ∬ (ẋᵀ(t1) · ẋᵀ(t2)) / |x(t1) - x(t2)|² dt1 dt2
//! ```
//!
//! where `ẋᵀ` is the tangent with its component along the chord removed. The
//! crate evaluates `n` with a doubly periodic trapezoid rule, provides exact
//! reference values for circles and ellipses, numerically checks the
//! invariances of `n` (reparametrization, Euclidean motions, scaling,
//! inversion), and studies the divergence of the local contribution of two
//! nearly intersecting straight pieces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_forms;
pub mod curve_spec;
pub mod error;
pub mod geometry;
pub mod intersection;
pub mod invariance;
pub mod kernel;
pub mod output;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{Curve, CurveJet, CurveKind, FourierCurve, InversionCenter, Transform};
pub use kernel::{KernelForm, KernelValue};
pub use quadrature::{QuadratureConfig, QuadratureResult};
