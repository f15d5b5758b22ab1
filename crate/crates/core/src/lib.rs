//! Elastic obstacle scattering in two dimensions.
//!
//! The rigid-obstacle Navier problem is reduced to a pair of coupled
//! Helmholtz problems for the potentials `phi` and `psi`, which are solved
//! with single-layer boundary integral equations discretized by a Nyström
//! scheme with logarithmic and Cauchy product quadrature. On top of the
//! forward solver sit regularized Newton iterations that recover a
//! star-shaped obstacle from phased far-field data, or from phaseless data
//! with a known reference ball in the scene.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod geometry;
pub mod inverse;
pub mod io;
pub mod kernels;
pub mod medium;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod validate;

pub use error::{Error, Result};
pub use forward::{DensityPair, ElasticFarField, FarField, PhaselessFarField, Scene};
pub use geometry::{
    builtin_shape, curve_l2_error, Boundary, CircleBoundary, CurveFrame, ExactShape, ShapeKind,
    ShapeUpdate, StarCurve, Vec2,
};
pub use medium::{ElasticMedium, IncidentWave, ModeFlags, WaveKind};
pub use quadrature::QuadratureWeights;
