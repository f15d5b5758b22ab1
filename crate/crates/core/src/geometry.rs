//! Closed boundary curves parameterized over `[0, 2pi)`.
//!
//! Every curve here is star-shaped about a center `c`:
//! `p(t) = c + r(t) (cos t, sin t)` with `r > 0`, so the parametrization is
//! counterclockwise and `n(t) = (p_2'(t), -p_1'(t))` points outward.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Point and derivatives of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    pub t: f64,
    pub p: Vec2,
    pub dp: Vec2,
    pub ddp: Vec2,
}

impl CurveFrame {
    /// Unnormalized outward normal `n(t) = (p_2', -p_1')`, `|n| = G`.
    #[inline]
    pub fn normal(&self) -> Vec2 {
        Vec2::new(self.dp.y, -self.dp.x)
    }

    /// Unnormalized tangent `n(t)^perp = p'(t)`.
    #[inline]
    pub fn tangent(&self) -> Vec2 {
        self.dp
    }

    /// Jacobian `G(t) = |p'(t)|`.
    #[inline]
    pub fn jacobian(&self) -> f64 {
        self.dp.norm()
    }

    pub fn unit_normal(&self) -> Vec2 {
        self.normal() / self.jacobian()
    }

    pub fn unit_tangent(&self) -> Vec2 {
        self.dp / self.jacobian()
    }
}

/// A closed star-shaped curve given by its center and radial function.
pub trait Boundary: Send + Sync {
    fn center(&self) -> Vec2;

    /// `(r, r', r'')` at `t`.
    fn radial(&self, t: f64) -> (f64, f64, f64);

    fn point(&self, t: f64) -> Vec2 {
        let (r, _, _) = self.radial(t);
        self.center() + r * Vec2::new(t.cos(), t.sin())
    }

    fn frame_at(&self, t: f64) -> CurveFrame {
        let (r, dr, ddr) = self.radial(t);
        let (s, c) = t.sin_cos();
        let e = Vec2::new(c, s);
        let e_perp = Vec2::new(-s, c);
        CurveFrame {
            t,
            p: self.center() + r * e,
            dp: dr * e + r * e_perp,
            ddp: (ddr - r) * e + 2.0 * dr * e_perp,
        }
    }

    /// Frames at the `2n` grid nodes `pi j / n`.
    fn frames(&self, n: usize) -> Vec<CurveFrame> {
        (0..2 * n)
            .map(|j| self.frame_at(PI * j as f64 / n as f64))
            .collect()
    }

    /// Smallest and largest distance of the curve from `point`, sampled.
    fn distance_range(&self, point: Vec2, samples: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for j in 0..samples {
            let d = (self.point(2.0 * PI * j as f64 / samples as f64) - point).norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }
}

/// Star curve with a trigonometric radial function
/// `r(t) = sum_{m=0}^M alpha_m cos(mt) + sum_{m=1}^M beta_m sin(mt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarCurve {
    pub c1: f64,
    pub c2: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl StarCurve {
    pub fn new(center: Vec2, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let curve = Self {
            c1: center.x,
            c2: center.y,
            alpha,
            beta,
        };
        curve.validate()?;
        Ok(curve)
    }

    /// Circle of radius `radius` in the degree-`order` trigonometric space.
    pub fn circle(center: Vec2, radius: f64, order: usize) -> Result<Self> {
        let mut alpha = vec![0.0; order + 1];
        alpha[0] = radius;
        Self::new(center, alpha, vec![0.0; order])
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.len() != self.beta.len() + 1 {
            return Err(Error::InvalidCurve(format!(
                "expected {} cosine coefficients for {} sine coefficients, got {}",
                self.beta.len() + 1,
                self.beta.len(),
                self.alpha.len()
            )));
        }
        if !(self.c1.is_finite() && self.c2.is_finite())
            || self.alpha.iter().chain(&self.beta).any(|v| !v.is_finite())
        {
            return Err(Error::InvalidCurve("non-finite coefficient".into()));
        }
        let samples = (16 * self.order()).max(256);
        for j in 0..samples {
            let t = 2.0 * PI * j as f64 / samples as f64;
            let r = self.radius(t);
            if r <= 0.0 {
                return Err(Error::NonpositiveRadius { t, value: r });
            }
        }
        Ok(())
    }

    pub fn radius(&self, t: f64) -> f64 {
        self.radial(t).0
    }

    /// Returns `c + rho dc`, `alpha + rho dalpha`, `beta + rho dbeta`.
    pub fn apply_update(&self, update: &ShapeUpdate, rho: f64) -> Result<StarCurve> {
        if update.order() != self.order() {
            return Err(Error::Dimension(format!(
                "update of order {} applied to curve of order {}",
                update.order(),
                self.order()
            )));
        }
        let alpha = self
            .alpha
            .iter()
            .zip(&update.delta_alpha)
            .map(|(a, d)| a + rho * d)
            .collect();
        let beta = self
            .beta
            .iter()
            .zip(&update.delta_beta)
            .map(|(b, d)| b + rho * d)
            .collect();
        StarCurve::new(
            Vec2::new(
                self.c1 + rho * update.delta_c.x,
                self.c2 + rho * update.delta_c.y,
            ),
            alpha,
            beta,
        )
    }

    /// The same shape moved by `shift`.
    pub fn translated(&self, shift: Vec2) -> StarCurve {
        StarCurve {
            c1: self.c1 + shift.x,
            c2: self.c2 + shift.y,
            ..self.clone()
        }
    }

    /// Coefficient vector `(c1, c2, alpha_0..alpha_M, beta_1..beta_M)`.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut v = vec![self.c1, self.c2];
        v.extend_from_slice(&self.alpha);
        v.extend_from_slice(&self.beta);
        v
    }
}

impl Boundary for StarCurve {
    fn center(&self) -> Vec2 {
        Vec2::new(self.c1, self.c2)
    }

    fn radial(&self, t: f64) -> (f64, f64, f64) {
        let mut r = self.alpha[0];
        let mut dr = 0.0;
        let mut ddr = 0.0;
        for m in 1..self.alpha.len() {
            let mf = m as f64;
            let (s, c) = (mf * t).sin_cos();
            let a = self.alpha[m];
            let b = self.beta[m - 1];
            r += a * c + b * s;
            dr += mf * (b * c - a * s);
            ddr -= mf * mf * (a * c + b * s);
        }
        (r, dr, ddr)
    }
}

/// The reference ball: circle of radius `radius` about `(b1, b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleBoundary {
    pub b1: f64,
    pub b2: f64,
    pub radius: f64,
}

impl CircleBoundary {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidCurve(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            b1: center.x,
            b2: center.y,
            radius,
        })
    }
}

impl Boundary for CircleBoundary {
    fn center(&self) -> Vec2 {
        Vec2::new(self.b1, self.b2)
    }

    fn radial(&self, _t: f64) -> (f64, f64, f64) {
        (self.radius, 0.0, 0.0)
    }
}

/// Exact obstacle shapes used to synthesize data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Apple,
    Peanut,
}

/// Exact sampler of a built-in shape, optionally moved off the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactShape {
    pub kind: ShapeKind,
    pub offset: Vec2,
}

/// The exact sampler for `kind`, centered as tabulated.
pub fn builtin_shape(kind: ShapeKind) -> ExactShape {
    ExactShape {
        kind,
        offset: Vec2::zeros(),
    }
}

impl ExactShape {
    pub fn translated(&self, shift: Vec2) -> ExactShape {
        ExactShape {
            kind: self.kind,
            offset: self.offset + shift,
        }
    }
}

impl Boundary for ExactShape {
    fn center(&self) -> Vec2 {
        self.offset
    }

    fn radial(&self, t: f64) -> (f64, f64, f64) {
        match self.kind {
            ShapeKind::Apple => {
                // r = 0.55 (1 + 0.9 cos t + 0.1 sin 2t) / (1 + 0.75 cos t)
                let (s, c) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                let num = 0.55 * (1.0 + 0.9 * c + 0.1 * s2);
                let dnum = 0.55 * (-0.9 * s + 0.2 * c2);
                let ddnum = 0.55 * (-0.9 * c - 0.4 * s2);
                let den = 1.0 + 0.75 * c;
                let dden = -0.75 * s;
                let ddden = -0.75 * c;
                let r = num / den;
                let dr = (dnum - r * dden) / den;
                let ddr = (ddnum - 2.0 * dr * dden - r * ddden) / den;
                (r, dr, ddr)
            }
            ShapeKind::Peanut => {
                // r = 0.5 sqrt(0.25 cos^2 t + sin^2 t) = 0.5 sqrt(q)
                let q = 0.25 + 0.75 * t.sin().powi(2);
                let dq = 0.75 * (2.0 * t).sin();
                let ddq = 1.5 * (2.0 * t).cos();
                let sq = q.sqrt();
                let r = 0.5 * sq;
                let dr = 0.25 * dq / sq;
                let ddr = 0.25 * (ddq / sq - 0.5 * dq * dq / (q * sq));
                (r, dr, ddr)
            }
        }
    }
}

/// Boundary update `q(s) = (dc1, dc2) + dr(s) (cos s, sin s)` with a
/// trigonometric `dr` of order `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeUpdate {
    pub delta_c: Vec2,
    pub delta_alpha: Vec<f64>,
    pub delta_beta: Vec<f64>,
}

impl ShapeUpdate {
    pub fn zero(order: usize) -> Self {
        Self {
            delta_c: Vec2::zeros(),
            delta_alpha: vec![0.0; order + 1],
            delta_beta: vec![0.0; order],
        }
    }

    pub fn order(&self) -> usize {
        self.delta_beta.len()
    }

    /// Number of real unknowns `2M + 3`.
    pub fn len(&self) -> usize {
        2 * self.order() + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unpacks `xi = (dc1, dc2, alpha_0..alpha_M, beta_1..beta_M)`.
    pub fn from_vector(xi: &[f64], order: usize) -> Result<Self> {
        if xi.len() != 2 * order + 3 {
            return Err(Error::Dimension(format!(
                "update vector of length {} for order {order}",
                xi.len()
            )));
        }
        Ok(Self {
            delta_c: Vec2::new(xi[0], xi[1]),
            delta_alpha: xi[2..order + 3].to_vec(),
            delta_beta: xi[order + 3..].to_vec(),
        })
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = vec![self.delta_c.x, self.delta_c.y];
        v.extend_from_slice(&self.delta_alpha);
        v.extend_from_slice(&self.delta_beta);
        v
    }

    /// `dr(s)`.
    pub fn radius(&self, s: f64) -> f64 {
        let mut r = self.delta_alpha[0];
        for m in 1..self.delta_alpha.len() {
            let (sn, cs) = (m as f64 * s).sin_cos();
            r += self.delta_alpha[m] * cs + self.delta_beta[m - 1] * sn;
        }
        r
    }

    /// `q(s)`.
    pub fn displacement(&self, s: f64) -> Vec2 {
        self.delta_c + self.radius(s) * Vec2::new(s.cos(), s.sin())
    }
}

/// Points per curve used by [`curve_l2_error`].
pub const L2_ERROR_SAMPLES: usize = 512;

/// Relative `L^2` distance `||p_rec - p_exact|| / ||p_exact||` between two
/// parametrizations compared at equal parameter values, by the trapezoidal
/// rule on [`L2_ERROR_SAMPLES`] points.
pub fn curve_l2_error(reconstructed: &dyn Boundary, exact: &dyn Boundary) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..L2_ERROR_SAMPLES {
        let t = 2.0 * PI * j as f64 / L2_ERROR_SAMPLES as f64;
        let pe = exact.point(t);
        num += (reconstructed.point(t) - pe).norm_squared();
        den += pe.norm_squared();
    }
    (num / den).sqrt()
}

/// `count` points along the curve, starting at `t = 0`.
pub fn sample_polyline(curve: &dyn Boundary, count: usize) -> Vec<Vec2> {
    (0..count)
        .map(|j| curve.point(2.0 * PI * j as f64 / count as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::trapezoid;
    use proptest::prelude::*;

    fn unit_circle() -> StarCurve {
        StarCurve::circle(Vec2::zeros(), 1.0, 6).unwrap()
    }

    #[test]
    fn unit_circle_frame() {
        let f = unit_circle().frame_at(0.0);
        assert!((f.p - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.dp - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((f.normal() - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.jacobian() - 1.0).abs() < 1e-15);
        for k in 0..17 {
            let f = unit_circle().frame_at(0.37 * k as f64);
            assert!((f.normal().dot(&f.ddp) + 1.0).abs() < 1e-14);
            assert!((f.dp.norm_squared() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn table_shapes() {
        let apple = builtin_shape(ShapeKind::Apple);
        let p = apple.point(0.0);
        assert!((p.x - 0.55 * 1.9 / 1.75).abs() < 1e-15 && p.y.abs() < 1e-15);
        let p = apple.point(PI);
        assert!((p - Vec2::new(-0.22, 0.0)).norm() < 1e-14);
        let peanut = builtin_shape(ShapeKind::Peanut);
        assert!((peanut.point(0.0) - Vec2::new(0.25, 0.0)).norm() < 1e-15);
        assert!((peanut.point(PI / 2.0) - Vec2::new(0.0, 0.5)).norm() < 1e-15);
    }

    fn fd_errors(curve: &dyn Boundary, t: f64, h: f64) -> (f64, f64) {
        let f = curve.frame_at(t);
        let (a, b, c) = (curve.point(t - h), curve.point(t), curve.point(t + h));
        let d1 = (c - a) / (2.0 * h);
        let d2 = (c - 2.0 * b + a) / (h * h);
        ((d1 - f.dp).norm(), (d2 - f.ddp).norm())
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let star = StarCurve::new(
            Vec2::new(0.1, -0.2),
            vec![0.5, 0.05, -0.03, 0.01],
            vec![0.02, 0.04, -0.01],
        )
        .unwrap();
        let curves: Vec<Box<dyn Boundary>> = vec![
            Box::new(star),
            Box::new(builtin_shape(ShapeKind::Apple)),
            Box::new(builtin_shape(ShapeKind::Peanut)),
            Box::new(CircleBoundary::new(Vec2::new(5.0, 0.0), 0.5).unwrap()),
        ];
        for curve in &curves {
            for &t in &[0.0, 0.7, 2.1, 4.4] {
                let (e1a, e2a) = fd_errors(curve.as_ref(), t, 1e-2);
                let (e1b, e2b) = fd_errors(curve.as_ref(), t, 5e-3);
                // O(h^2): halving h cuts the error by ~4
                if e1a > 1e-9 {
                    assert!(e1a / e1b > 3.5, "first derivative ratio {}", e1a / e1b);
                }
                if e2a > 1e-9 {
                    assert!(e2a / e2b > 3.5, "second derivative ratio {}", e2a / e2b);
                }
                assert!(e1b < 1e-3 && e2b < 1e-2);
            }
        }
    }

    #[test]
    fn apply_update_examples() {
        let c = StarCurve::circle(Vec2::zeros(), 0.3, 6).unwrap();
        assert_eq!(c.apply_update(&ShapeUpdate::zero(6), 1.0).unwrap(), c);
        let mut u = ShapeUpdate::zero(6);
        u.delta_alpha[0] = 0.1;
        let full = c.apply_update(&u, 1.0).unwrap();
        assert!((full.alpha[0] - 0.4).abs() < 1e-15);
        let scaled = c.apply_update(&u, 0.9).unwrap();
        assert!((scaled.alpha[0] - 0.39).abs() < 1e-15);
    }

    #[test]
    fn apply_update_rejects_nonpositive_radius() {
        let c = StarCurve::circle(Vec2::zeros(), 0.3, 6).unwrap();
        let mut u = ShapeUpdate::zero(6);
        u.delta_alpha[1] = 0.5;
        assert!(matches!(
            c.apply_update(&u, 1.0),
            Err(Error::NonpositiveRadius { .. })
        ));
    }

    #[test]
    fn coefficient_count_is_checked() {
        assert!(StarCurve::new(Vec2::zeros(), vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn update_vector_roundtrip() {
        let xi: Vec<f64> = (0..15).map(|k| k as f64 * 0.1).collect();
        let u = ShapeUpdate::from_vector(&xi, 6).unwrap();
        assert_eq!(u.to_vector(), xi);
        assert!(ShapeUpdate::from_vector(&xi, 5).is_err());
    }

    #[test]
    fn l2_error_examples() {
        let a = StarCurve::circle(Vec2::zeros(), 1.0, 6).unwrap();
        assert_eq!(curve_l2_error(&a, &a), 0.0);
        let b = StarCurve::circle(Vec2::zeros(), 1.1, 6).unwrap();
        assert!((curve_l2_error(&b, &a) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn l2_error_of_shifted_circle() {
        // Independent evaluation: |p_h - p| = |h| pointwise and
        // ||p||^2 = 2 pi for the unit circle, so the ratio is |h|.
        let h = 0.3;
        let a = StarCurve::circle(Vec2::zeros(), 1.0, 6).unwrap();
        let b = a.translated(Vec2::new(h, 0.0));
        assert!((curve_l2_error(&b, &a) - h).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn closed_curve_normals_integrate_to_zero(
            c1 in -1.0f64..1.0, c2 in -1.0f64..1.0,
            a1 in -0.1f64..0.1, a2 in -0.1f64..0.1, b1 in -0.1f64..0.1, b2 in -0.1f64..0.1,
        ) {
            let curve = StarCurve::new(Vec2::new(c1, c2), vec![0.6, a1, a2], vec![b1, b2]).unwrap();
            let frames = curve.frames(32);
            let nx: Vec<f64> = frames.iter().map(|f| f.normal().x).collect();
            let ny: Vec<f64> = frames.iter().map(|f| f.normal().y).collect();
            prop_assert!(trapezoid(&nx).abs() < 1e-12);
            prop_assert!(trapezoid(&ny).abs() < 1e-12);
        }

        #[test]
        fn zero_scale_update_is_identity(
            d in proptest::collection::vec(-1.0f64..1.0, 15),
        ) {
            let curve = StarCurve::circle(Vec2::new(0.2, 0.1), 0.4, 6).unwrap();
            let u = ShapeUpdate::from_vector(&d, 6).unwrap();
            prop_assert_eq!(curve.apply_update(&u, 0.0).unwrap(), curve);
        }

        #[test]
        fn frame_normal_is_orthogonal(t in 0.0f64..(2.0 * PI)) {
            for curve in [builtin_shape(ShapeKind::Apple), builtin_shape(ShapeKind::Peanut)] {
                let f = curve.frame_at(t);
                prop_assert!(f.normal().dot(&f.dp).abs() < 1e-14);
                prop_assert!((f.normal().norm() - f.jacobian()).abs() < 1e-14);
            }
        }
    }
}
