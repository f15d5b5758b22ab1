//! Elastic medium, incident plane waves and the Dirichlet data they induce
//! on a rigid boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{CurveFrame, Vec2};

/// Homogeneous isotropic medium with unit mass density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticMedium {
    lambda: f64,
    mu: f64,
    omega: f64,
    kappa_p: f64,
    kappa_s: f64,
}

impl ElasticMedium {
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidMedium(format!("mu must be positive, got {mu}")));
        }
        if !(lambda + mu > 0.0) {
            return Err(Error::InvalidMedium(format!(
                "lambda + mu must be positive, got {}",
                lambda + mu
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidMedium(format!(
                "omega must be positive, got {omega}"
            )));
        }
        let (kappa_p, kappa_s) = wavenumbers(lambda, mu, omega);
        Ok(Self {
            lambda,
            mu,
            omega,
            kappa_p,
            kappa_s,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Compressional wavenumber `omega / sqrt(lambda + 2 mu)`.
    pub fn kappa_p(&self) -> f64 {
        self.kappa_p
    }

    /// Shear wavenumber `omega / sqrt(mu)`.
    pub fn kappa_s(&self) -> f64 {
        self.kappa_s
    }
}

/// `(kappa_p, kappa_s)` for Lamé constants `lambda`, `mu` and frequency `omega`.
pub fn wavenumbers(lambda: f64, mu: f64, omega: f64) -> (f64, f64) {
    (omega / (lambda + 2.0 * mu).sqrt(), omega / mu.sqrt())
}

/// Polarization of an incident plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    /// Compressional: `u = d exp(i kappa_p d.x)`.
    P,
    /// Shear: `u = d_perp exp(i kappa_s d.x)`.
    S,
}

/// Plane wave of unit amplitude unless scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave {
    pub kind: WaveKind,
    theta: f64,
    pub amplitude: f64,
}

impl IncidentWave {
    /// Incident angle is reduced modulo `2 pi`.
    pub fn new(kind: WaveKind, theta: f64) -> Self {
        Self {
            kind,
            theta: theta.rem_euclid(TAU),
            amplitude: 1.0,
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Propagation direction `d = (cos theta, sin theta)`.
    pub fn direction(&self) -> Vec2 {
        Vec2::new(self.theta.cos(), self.theta.sin())
    }

    /// `d_perp = (-sin theta, cos theta)`.
    pub fn direction_perp(&self) -> Vec2 {
        Vec2::new(-self.theta.sin(), self.theta.cos())
    }

    /// `(a_p^inc, a_s^inc)`.
    pub fn coefficients(&self) -> (f64, f64) {
        match self.kind {
            WaveKind::P => (1.0, 0.0),
            WaveKind::S => (0.0, 1.0),
        }
    }

    /// Wavenumber carried by the incident wave.
    pub fn wavenumber(&self, medium: &ElasticMedium) -> f64 {
        match self.kind {
            WaveKind::P => medium.kappa_p(),
            WaveKind::S => medium.kappa_s(),
        }
    }

    /// Displacement `u_inc(x)`.
    pub fn field(&self, medium: &ElasticMedium, x: Vec2) -> [Complex64; 2] {
        let d = self.direction();
        let phase = Complex64::from_polar(self.amplitude, self.wavenumber(medium) * d.dot(&x));
        let pol = match self.kind {
            WaveKind::P => d,
            WaveKind::S => self.direction_perp(),
        };
        [phase * pol.x, phase * pol.y]
    }
}

/// `u_inc(x)` for `wave` in `medium`.
pub fn incident_field(wave: &IncidentWave, medium: &ElasticMedium, x: Vec2) -> [Complex64; 2] {
    wave.field(medium, x)
}

/// Which far-field component drives the data equation, `(a_p, a_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFlags {
    /// `(1, 0)`: compressional far field `phi_inf`.
    Compressional,
    /// `(0, 1)`: shear far field `psi_inf`.
    Shear,
}

impl ModeFlags {
    pub fn a_p(&self) -> f64 {
        match self {
            ModeFlags::Compressional => 1.0,
            ModeFlags::Shear => 0.0,
        }
    }

    pub fn a_s(&self) -> f64 {
        match self {
            ModeFlags::Compressional => 0.0,
            ModeFlags::Shear => 1.0,
        }
    }
}

/// Right-hand sides `w_1 = 2 (f_1 o p) G` and `w_2 = 2 (f_2 o p) G` at the
/// given frames, where `f_1 = -nu.u_inc` and `f_2 = -tau.u_inc`.
pub fn boundary_data(
    wave: &IncidentWave,
    medium: &ElasticMedium,
    frames: &[CurveFrame],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut w1 = Vec::with_capacity(frames.len());
    let mut w2 = Vec::with_capacity(frames.len());
    for f in frames {
        if !(f.jacobian() > 0.0) {
            return Err(Error::DegenerateCurve { t: f.t });
        }
        // nu G = n and tau G = n_perp, so the Jacobian cancels.
        let u = wave.field(medium, f.p);
        let n = f.normal();
        let tau = f.tangent();
        w1.push(-2.0 * (u[0] * n.x + u[1] * n.y));
        w2.push(-2.0 * (u[0] * tau.x + u[1] * tau.y));
    }
    Ok((w1, w2))
}
