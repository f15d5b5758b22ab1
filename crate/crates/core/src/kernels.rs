//! Parameterized boundary kernels.
//!
//! All kernels carry the factor 2 of the boundary equations and the
//! Jacobians of both the observation and the source frame, so with
//! `Delta = p(s) - p(t)` and `d = |Delta|`:
//!
//! * `K(t, s) = (i kappa / 2) n(t).Delta H_1(kappa d) / d`
//! * `H(t, s) = (i kappa / 2) n_perp(t).Delta H_1(kappa d) / d`
//!
//! On a single curve they split as
//! `K = K1 ln(4 sin^2((t-s)/2)) + K2` and
//! `H = H1 / sin(s-t) + H2 ln(4 sin^2((t-s)/2)) + H3`
//! with smooth `K1, K2, H1, H2, H3`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{CurveFrame, Vec2};
use crate::special::bessel01;

/// Below this distance two points are treated as coincident.
const COINCIDENT: f64 = 1e-300;

/// Coefficients of one kernel split at a node pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelSplit {
    /// Multiplies `ln(4 sin^2((t-s)/2))`.
    pub log_part: Complex64,
    /// Multiplies `1 / sin(s-t)`; zero for `K`.
    pub cauchy_part: Complex64,
    pub smooth_part: Complex64,
}

impl KernelSplit {
    /// Value of the full kernel at `t - s = diff`, `diff` not a multiple of `2 pi`.
    pub fn reassemble(&self, diff: f64) -> Complex64 {
        let log = log_factor(diff);
        self.cauchy_part / (-diff).sin() + self.log_part * log + self.smooth_part
    }
}

/// `ln(4 sin^2(x/2))`.
#[inline]
pub fn log_factor(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    (4.0 * s * s).ln()
}

#[inline]
fn i_half(kappa: f64) -> Complex64 {
    Complex64::new(0.0, 0.5 * kappa)
}

fn separation(obs: &CurveFrame, src: &CurveFrame) -> Result<(Vec2, f64)> {
    let delta = src.p - obs.p;
    let d = delta.norm();
    if !(d > COINCIDENT) {
        return Err(Error::CoincidentPoints { distance: d });
    }
    Ok((delta, d))
}

/// `K(t, s)` evaluated directly.
pub fn kernel_k(obs: &CurveFrame, src: &CurveFrame, kappa: f64) -> Result<Complex64> {
    let (delta, d) = separation(obs, src)?;
    let b = bessel01(kappa * d);
    Ok(i_half(kappa) * obs.normal().dot(&delta) * b.h1() / d)
}

/// `H(t, s)` evaluated directly.
pub fn kernel_h(obs: &CurveFrame, src: &CurveFrame, kappa: f64) -> Result<Complex64> {
    let (delta, d) = separation(obs, src)?;
    let b = bessel01(kappa * d);
    Ok(i_half(kappa) * obs.tangent().dot(&delta) * b.h1() / d)
}

/// `(i/2) H_0(kappa |x - y|)`.
pub fn single_layer_kernel(x: Vec2, y: Vec2, kappa: f64) -> Result<Complex64> {
    let d = (x - y).norm();
    if !(d > COINCIDENT) {
        return Err(Error::CoincidentPoints { distance: d });
    }
    Ok(Complex64::new(0.0, 0.5) * bessel01(kappa * d).h0())
}

/// Splits of `K` and `H` at one node pair of the same curve, sharing one
/// Bessel evaluation. The diagonal limits are used when `obs.t == src.t`.
pub fn split_pair(obs: &CurveFrame, src: &CurveFrame, kappa: f64) -> (KernelSplit, KernelSplit) {
    if obs.t == src.t {
        let g2 = obs.dp.norm_squared();
        let k = KernelSplit {
            smooth_part: Complex64::new(obs.normal().dot(&obs.ddp) / (2.0 * PI * g2), 0.0),
            ..Default::default()
        };
        let h = KernelSplit {
            cauchy_part: Complex64::new(1.0 / PI, 0.0),
            ..Default::default()
        };
        return (k, h);
    }
    let delta = src.p - obs.p;
    let d2 = delta.norm_squared();
    let d = d2.sqrt();
    let b = bessel01(kappa * d);
    let log = log_factor(obs.t - src.t);
    let n_dot = obs.normal().dot(&delta);
    let t_dot = obs.tangent().dot(&delta);
    let j1_over_d = b.j1 / d;
    let h1_over_d = b.h1() / d;

    let k_full = i_half(kappa) * n_dot * h1_over_d;
    let k1 = -kappa / (2.0 * PI) * n_dot * j1_over_d;
    let k = KernelSplit {
        log_part: Complex64::new(k1, 0.0),
        cauchy_part: Complex64::new(0.0, 0.0),
        smooth_part: k_full - k1 * log,
    };

    let h_full = i_half(kappa) * t_dot * h1_over_d;
    let cauchy = t_dot / (PI * d2);
    let h1 = cauchy * (src.t - obs.t).sin();
    let h2 = -kappa / (2.0 * PI) * t_dot * j1_over_d;
    let h = KernelSplit {
        log_part: Complex64::new(h2, 0.0),
        cauchy_part: Complex64::new(h1, 0.0),
        smooth_part: h_full - cauchy - h2 * log,
    };
    (k, h)
}

/// `(K1, K2)` at a node pair of the same curve.
pub fn kernel_k_split(obs: &CurveFrame, src: &CurveFrame, kappa: f64) -> (Complex64, Complex64) {
    let (k, _) = split_pair(obs, src, kappa);
    (k.log_part, k.smooth_part)
}

/// `(H1, H2, H3)` at a node pair of the same curve.
pub fn kernel_h_split(
    obs: &CurveFrame,
    src: &CurveFrame,
    kappa: f64,
) -> (Complex64, Complex64, Complex64) {
    let (_, h) = split_pair(obs, src, kappa);
    (h.cauchy_part, h.log_part, h.smooth_part)
}
