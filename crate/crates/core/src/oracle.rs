//! Fourier-Bessel solution for a rigid disk.
//!
//! Outside a disk of radius `R` the scattered potentials are
//! `phi = sum_m a_m H_m(kappa_p rho) e^{i m theta}` and
//! `psi = sum_m b_m H_m(kappa_s rho) e^{i m theta}`, and the boundary
//! conditions `d_nu phi + d_tau psi = f_1`, `d_tau phi - d_nu psi = f_2`
//! decouple into one 2x2 system per mode. The incident data are expanded
//! with the Jacobi-Anger identity. This path shares nothing with the
//! integral-equation solver beyond the Bessel functions.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::FarField;
use crate::geometry::Vec2;
use crate::medium::{ElasticMedium, IncidentWave, WaveKind};
use crate::special::{bessel_j_upto, hankel1_upto};

/// Coefficients below this fraction of the largest one count as converged.
pub const TAIL_TOLERANCE: f64 = 1e-14;
/// Extra modes beyond `ceil(kappa_s R)` in the first attempt.
const EXTRA_MODES: usize = 20;
const MAX_MODES: usize = 4096;

/// Modal coefficients for orders `-n_modes..=n_modes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSolution {
    pub center: Vec2,
    pub radius: f64,
    pub n_modes: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    /// `max(|J_N|, |J_{N+1}|)` at the incident wavenumber times `R`: the
    /// part of the incident boundary data beyond the truncation.
    pub incident_tail: f64,
}

impl ModalSolution {
    /// `a_m` for `|m| <= n_modes`.
    pub fn a(&self, m: i64) -> Complex64 {
        self.a[(m + self.n_modes as i64) as usize]
    }

    pub fn b(&self, m: i64) -> Complex64 {
        self.b[(m + self.n_modes as i64) as usize]
    }

    pub fn orders(&self) -> impl Iterator<Item = i64> {
        let n = self.n_modes as i64;
        -n..=n
    }

    /// Largest `|a_m|, |b_m|` at `|m| = n_modes`, relative to the largest
    /// coefficient overall.
    pub fn tail(&self) -> f64 {
        let n = self.n_modes as i64;
        let top = [self.a(n), self.a(-n), self.b(n), self.b(-n)]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let scale = self.a.iter().chain(&self.b).map(|v| v.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            top / scale
        } else {
            0.0
        }
    }
}

/// `i^m` for any integer `m`.
fn i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Integer-order Bessel data at one argument, extended to negative orders.
struct Orders {
    j: Vec<f64>,
    h: Vec<Complex64>,
    x: f64,
}

impl Orders {
    fn new(nmax: usize, x: f64) -> Self {
        Self {
            j: bessel_j_upto(nmax + 1, x),
            h: hankel1_upto(nmax + 1, x),
            x,
        }
    }

    fn j(&self, m: i64) -> f64 {
        sign(m.min(0)) * self.j[m.unsigned_abs() as usize]
    }

    fn h(&self, m: i64) -> Complex64 {
        sign(m.min(0)) * self.h[m.unsigned_abs() as usize]
    }

    /// `Z_m' = Z_{m-1} - (m/x) Z_m`.
    fn dj(&self, m: i64) -> f64 {
        self.j(m - 1) - m as f64 / self.x * self.j(m)
    }

    fn dh(&self, m: i64) -> Complex64 {
        self.h(m - 1) - self.h(m) * (m as f64 / self.x)
    }
}

fn solve_with_modes(
    center: Vec2,
    radius: f64,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    n_modes: usize,
) -> Result<ModalSolution> {
    let (kp, ks) = (medium.kappa_p(), medium.kappa_s());
    let hp = Orders::new(n_modes, kp * radius);
    let hs = Orders::new(n_modes, ks * radius);
    let kinc = wave.wavenumber(medium);
    let inc = match wave.kind {
        WaveKind::P => &hp,
        WaveKind::S => &hs,
    };
    let shift = Complex64::from_polar(wave.amplitude, kinc * wave.direction().dot(&center));
    let theta = wave.theta();
    let size = 2 * n_modes + 1;
    let mut a = Vec::with_capacity(size);
    let mut b = Vec::with_capacity(size);
    let i = Complex64::new(0.0, 1.0);
    for m in -(n_modes as i64)..=n_modes as i64 {
        let mf = m as f64;
        let common = shift * i_pow(m) * Complex64::from_polar(1.0, -mf * theta);
        let (f1, f2) = match wave.kind {
            WaveKind::P => (
                i * common * inc.dj(m),
                -common * (mf / inc.x * inc.j(m)),
            ),
            WaveKind::S => (
                common * (mf / inc.x * inc.j(m)),
                i * common * inc.dj(m),
            ),
        };
        let m11 = hp.dh(m) * kp;
        let m12 = i * (mf / radius) * hs.h(m);
        let m21 = i * (mf / radius) * hp.h(m);
        let m22 = -hs.dh(m) * ks;
        let det = m11 * m22 - m12 * m21;
        if !(det.norm() > 0.0) || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::ModalMatrixSingular { mode: m });
        }
        a.push((f1 * m22 - m12 * f2) / det);
        b.push((m11 * f2 - m21 * f1) / det);
    }
    let incident_tail = inc.j[n_modes].abs().max(inc.j[n_modes + 1].abs());
    Ok(ModalSolution {
        center,
        radius,
        n_modes,
        a,
        b,
        incident_tail,
    })
}

/// Modal solution for the disk of radius `radius` centered at the origin.
pub fn disk_modal_solve(
    radius: f64,
    medium: &ElasticMedium,
    wave: &IncidentWave,
) -> Result<ModalSolution> {
    disk_modal_solve_at(Vec2::zeros(), radius, medium, wave)
}

/// Modal solution for a disk centered at `center`; the incident phase at
/// the center is folded into the coefficients.
pub fn disk_modal_solve_at(
    center: Vec2,
    radius: f64,
    medium: &ElasticMedium,
    wave: &IncidentWave,
) -> Result<ModalSolution> {
    if !(radius > 0.0) {
        return Err(Error::InvalidCurve(format!("disk radius {radius} is not positive")));
    }
    let mut n_modes = (medium.kappa_s() * radius).ceil() as usize + EXTRA_MODES;
    loop {
        let sol = solve_with_modes(center, radius, medium, wave, n_modes)?;
        // the coefficients decay faster than the boundary data, so the
        // incident expansion must be converged as well
        if sol.tail() <= TAIL_TOLERANCE && sol.incident_tail <= TAIL_TOLERANCE {
            return Ok(sol);
        }
        n_modes *= 2;
        if n_modes > MAX_MODES {
            return Err(Error::TruncationNotConverged { modes: n_modes / 2 });
        }
    }
}

/// `sqrt(2/(pi kappa)) e^{-i pi/4} sum_m c_m e^{-i m pi/2} e^{i m theta}`,
/// shifted to the disk center.
fn modal_far_field(coeffs: &[Complex64], n_modes: usize, kappa: f64, center: Vec2, t: f64) -> Complex64 {
    let pre = Complex64::from_polar((2.0 / (PI * kappa)).sqrt(), -PI / 4.0);
    let sum: Complex64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let m = k as i64 - n_modes as i64;
            c * i_pow(-m) * Complex64::from_polar(1.0, m as f64 * t)
        })
        .sum();
    let xhat = Vec2::new(t.cos(), t.sin());
    pre * sum * Complex64::from_polar(1.0, -kappa * xhat.dot(&center))
}

/// Far-field patterns of the modal solution at the given angles.
pub fn disk_far_field(sol: &ModalSolution, medium: &ElasticMedium, directions: &[f64]) -> FarField {
    let phi_inf = directions
        .iter()
        .map(|&t| modal_far_field(&sol.a, sol.n_modes, medium.kappa_p(), sol.center, t))
        .collect();
    let psi_inf = directions
        .iter()
        .map(|&t| modal_far_field(&sol.b, sol.n_modes, medium.kappa_s(), sol.center, t))
        .collect();
    FarField {
        directions: directions.to_vec(),
        phi_inf,
        psi_inf,
    }
}

/// Largest boundary-condition residual of the modal solution over `samples`
/// points on the circle, relative to the incident amplitude.
pub fn disk_boundary_residual(
    sol: &ModalSolution,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    samples: usize,
) -> f64 {
    let (kp, ks) = (medium.kappa_p(), medium.kappa_s());
    let r = sol.radius;
    let hp = Orders::new(sol.n_modes, kp * r);
    let hs = Orders::new(sol.n_modes, ks * r);
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for l in 0..samples {
        let t = 2.0 * PI * l as f64 / samples as f64;
        let (mut dphi_r, mut dphi_t, mut dpsi_r, mut dpsi_t) =
            (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
        for m in sol.orders() {
            let e = Complex64::from_polar(1.0, m as f64 * t);
            let (a, b) = (sol.a(m) * e, sol.b(m) * e);
            dphi_r += a * hp.dh(m) * kp;
            dphi_t += a * i * m as f64 * hp.h(m);
            dpsi_r += b * hs.dh(m) * ks;
            dpsi_t += b * i * m as f64 * hs.h(m);
        }
        let (s, c) = t.sin_cos();
        let nu = Vec2::new(c, s);
        let tau = Vec2::new(-s, c);
        let u = wave.field(medium, sol.center + r * nu);
        let u_nu = u[0] * nu.x + u[1] * nu.y;
        let u_tau = u[0] * tau.x + u[1] * tau.y;
        let r1 = dphi_r + dpsi_t / r + u_nu;
        let r2 = dphi_t / r - dpsi_r + u_tau;
        worst = worst.max(r1.norm()).max(r2.norm());
    }
    worst / wave.amplitude.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::observation_directions;

    fn example1() -> ElasticMedium {
        ElasticMedium::new(3.88, 2.56, 0.7 * PI).unwrap()
    }

    #[test]
    fn zero_incidence_gives_zero_coefficients() {
        let m = example1();
        let w = IncidentWave::new(WaveKind::S, 0.3).with_amplitude(0.0);
        let sol = disk_modal_solve(1.0, &m, &w).unwrap();
        assert!(sol.a.iter().chain(&sol.b).all(|v| v.norm() == 0.0));
        let ff = disk_far_field(&sol, &m, &observation_directions(4));
        assert!(ff.phi_inf.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn reflection_symmetry_for_axial_incidence() {
        let m = example1();
        let sol = disk_modal_solve(1.0, &m, &IncidentWave::new(WaveKind::P, 0.0)).unwrap();
        let scale = sol.a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // phi even and psi odd in theta, with H_{-m} = (-1)^m H_m
        for k in 1..=sol.n_modes as i64 {
            assert!((sol.a(k) - sign(k) * sol.a(-k)).norm() <= 1e-14 * scale);
            assert!((sol.b(k) + sign(k) * sol.b(-k)).norm() <= 1e-14 * scale);
        }
        assert!(sol.b(0).norm() <= 1e-15 * scale);
    }

    #[test]
    fn tail_is_negligible_by_order_30() {
        let m = example1();
        for kind in [WaveKind::P, WaveKind::S] {
            let sol = disk_modal_solve(1.0, &m, &IncidentWave::new(kind, 0.7)).unwrap();
            assert_eq!(sol.n_modes, 22);
            let scale = sol.a.iter().chain(&sol.b).map(|v| v.norm()).fold(0.0, f64::max);
            let first_small = (0..=sol.n_modes as i64)
                .find(|&k| {
                    (k..=sol.n_modes as i64).all(|j| {
                        [sol.a(j), sol.a(-j), sol.b(j), sol.b(-j)]
                            .iter()
                            .all(|v| v.norm() <= TAIL_TOLERANCE * scale)
                    })
                })
                .unwrap();
            assert!(first_small <= 30, "{first_small}");
        }
    }

    #[test]
    fn parseval() {
        let m = example1();
        let sol = disk_modal_solve(1.0, &m, &IncidentWave::new(WaveKind::S, 1.2)).unwrap();
        let dirs = observation_directions(4 * sol.n_modes);
        let ff = disk_far_field(&sol, &m, &dirs);
        let h = 2.0 * PI / dirs.len() as f64;
        let lhs: f64 = ff.phi_inf.iter().map(|v| v.norm_sqr()).sum::<f64>() * h;
        let rhs = 4.0 / m.kappa_p() * sol.a.iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{lhs} {rhs}");
        let lhs: f64 = ff.psi_inf.iter().map(|v| v.norm_sqr()).sum::<f64>() * h;
        let rhs = 4.0 / m.kappa_s() * sol.b.iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn doubling_modes_does_not_move_the_far_field() {
        let m = example1();
        let w = IncidentWave::new(WaveKind::P, 2.0);
        let sol = disk_modal_solve(1.0, &m, &w).unwrap();
        let more = solve_with_modes(Vec2::zeros(), 1.0, &m, &w, 2 * sol.n_modes).unwrap();
        let dirs = observation_directions(16);
        let (a, b) = (disk_far_field(&sol, &m, &dirs), disk_far_field(&more, &m, &dirs));
        for l in 0..dirs.len() {
            assert!((a.phi_inf[l] - b.phi_inf[l]).norm() < 1e-13);
            assert!((a.psi_inf[l] - b.psi_inf[l]).norm() < 1e-13);
        }
    }

    #[test]
    fn boundary_condition_residual() {
        let m = example1();
        for (kind, theta) in [(WaveKind::P, 0.0), (WaveKind::S, 0.0), (WaveKind::S, 2.5)] {
            let w = IncidentWave::new(kind, theta);
            for (center, radius) in [(Vec2::zeros(), 1.0), (Vec2::new(0.4, -1.0), 0.5)] {
                let sol = disk_modal_solve_at(center, radius, &m, &w).unwrap();
                let res = disk_boundary_residual(&sol, &m, &w, 256);
                assert!(res <= 1e-12, "{kind:?} {res}");
            }
        }
    }

    #[test]
    fn larger_disks_need_more_modes() {
        let m = example1();
        let sol = disk_modal_solve(12.0, &m, &IncidentWave::new(WaveKind::S, 0.0)).unwrap();
        assert!(sol.n_modes > 37);
        assert!(sol.tail() <= TAIL_TOLERANCE);
        let res = disk_boundary_residual(&sol, &m, &IncidentWave::new(WaveKind::S, 0.0), 256);
        assert!(res < 1e-12, "{res}");
    }
}
