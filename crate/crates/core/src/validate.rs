//! Self-checks of the numerical building blocks against independent
//! references, with measured deviations for regression tracking.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

use crate::error::Result;
use crate::forward::{
    boundary_far_field, elastic_lift, far_field, near_field, observation_directions, simulate,
    solve_single, Scene,
};
use crate::geometry::{builtin_shape, CurveFrame, ShapeKind, ShapeUpdate, StarCurve, Vec2};
use crate::inverse::frechet_far_field;
use crate::medium::{ElasticMedium, IncidentWave, WaveKind};
use crate::oracle::{disk_far_field, disk_modal_solve};
use crate::quadrature::{nodes, QuadratureWeights};

/// Switches for negative controls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Perturbs one logarithmic weight so the quadrature identities fail.
    pub corrupt_quadrature: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.3e}, tolerance {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Medium of the phased experiments.
pub fn reference_medium() -> ElasticMedium {
    ElasticMedium::new(3.88, 2.56, 0.7 * PI).expect("valid constants")
}

fn max_relative(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    diff / scale
}

/// Largest relative deviation of the Nyström far fields (both components)
/// from the modal series on the unit disk.
pub fn disk_oracle_deviation(medium: &ElasticMedium, kind: WaveKind, n: usize) -> Result<f64> {
    let wave = IncidentWave::new(kind, 0.3);
    let disk = StarCurve::circle(Vec2::zeros(), 1.0, 1)?;
    let sol = disk_modal_solve(1.0, medium, &wave)?;
    let oracle = disk_far_field(&sol, medium, &observation_directions(32));
    let ff = simulate(Scene::single(&disk), medium, &wave, n, 32)?;
    let mut got = ff.phi_inf.clone();
    got.extend_from_slice(&ff.psi_inf);
    let mut want = oracle.phi_inf.clone();
    want.extend_from_slice(&oracle.psi_inf);
    Ok(max_relative(&got, &want))
}

/// Largest deviation from the moment identities of the logarithmic and
/// Cauchy weights at node 0.
pub fn quadrature_identity_deviation(weights: &QuadratureWeights) -> f64 {
    let n = weights.n();
    let s = nodes(n);
    let log = |f: &dyn Fn(f64) -> f64| (0..2 * n).map(|j| weights.log_weight(0, j) * f(s[j])).sum::<f64>();
    let cauchy = |f: &dyn Fn(f64) -> f64| (0..2 * n).map(|j| weights.cauchy_weight(0, j) * f(s[j])).sum::<f64>();
    let mut worst = log(&|_| 1.0).abs();
    for m in 1..n {
        let mf = m as f64;
        worst = worst.max((log(&|x| (mf * x).cos()) + 2.0 * PI / mf).abs());
        let sine = cauchy(&|x| (mf * x).sin());
        let want = if m % 2 == 1 { 2.0 * PI } else { 0.0 };
        worst = worst.max((sine - want).abs());
        worst = worst.max(cauchy(&|x| (mf * x).cos()).abs());
    }
    let table = weights.cauchy_table();
    for j in 1..2 * n {
        worst = worst.max((table[j] + table[2 * n - j]).abs());
    }
    worst
}

/// Relative mismatch between the scattered displacement at `radius` and its
/// far-field asymptotics built from the lifted patterns.
pub fn asymptotic_deviation(medium: &ElasticMedium, radius: f64) -> Result<f64> {
    let shape = builtin_shape(ShapeKind::Apple);
    let wave = IncidentWave::new(WaveKind::S, 5.0 * PI / 8.0);
    let densities = solve_single(&shape, medium, &wave, 64)?;
    let lifted = elastic_lift(&far_field(&densities, medium, 8), medium);
    let mut worst = 0.0f64;
    for (l, &t) in lifted.directions.iter().enumerate() {
        let x = radius * Vec2::new(t.cos(), t.sin());
        let u = near_field(&densities, medium, x)?.displacement();
        let ep = Complex64::from_polar(1.0 / radius.sqrt(), medium.kappa_p() * radius);
        let es = Complex64::from_polar(1.0 / radius.sqrt(), medium.kappa_s() * radius);
        let want = [
            ep * lifted.vp_inf[l][0] + es * lifted.vs_inf[l][0],
            ep * lifted.vp_inf[l][1] + es * lifted.vs_inf[l][1],
        ];
        let err = ((u[0] - want[0]).norm_sqr() + (u[1] - want[1]).norm_sqr()).sqrt();
        let scale = (want[0].norm_sqr() + want[1].norm_sqr()).sqrt();
        worst = worst.max(err / scale);
    }
    Ok(worst)
}

/// Deviations `(phased, phaseless)` of the far fields of the apple moved by
/// `shift` from the phase-shifted originals.
pub fn translation_deviation(medium: &ElasticMedium, shift: Vec2) -> Result<(f64, f64)> {
    let shape = builtin_shape(ShapeKind::Apple);
    let moved = shape.translated(shift);
    let mut phased = 0.0f64;
    let mut phaseless = 0.0f64;
    for wave in [IncidentWave::new(WaveKind::P, 0.9), IncidentWave::new(WaveKind::S, 5.0 * PI / 8.0)] {
        let a = simulate(Scene::single(&shape), medium, &wave, 64, 32)?;
        let b = simulate(Scene::single(&moved), medium, &wave, 64, 32)?;
        let incident = wave.wavenumber(medium) * wave.direction().dot(&shift);
        for (kappa, fa, fb) in [
            (medium.kappa_p(), &a.phi_inf, &b.phi_inf),
            (medium.kappa_s(), &a.psi_inf, &b.psi_inf),
        ] {
            let scale = fa.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (l, &t) in a.directions.iter().enumerate() {
                let xhat = Vec2::new(t.cos(), t.sin());
                let factor = Complex64::from_polar(1.0, incident - kappa * xhat.dot(&shift));
                phased = phased.max((fb[l] - factor * fa[l]).norm() / scale);
                phaseless = phaseless.max((fb[l].norm_sqr() - fa[l].norm_sqr()).abs() / (scale * scale));
            }
        }
    }
    Ok((phased, phaseless))
}

/// Worst relative error of central differences of the far-field operator
/// (density frozen) against the derivative formula, over `directions`
/// random updates, at steps `h` and `h / 2`.
pub fn frechet_deviation(medium: &ElasticMedium, h: f64, directions: usize, seed: u64) -> Result<(f64, f64)> {
    let curve = StarCurve::new(
        Vec2::new(0.1, -0.1),
        vec![0.5, 0.04, 0.06, -0.02, 0.01, 0.0, 0.005],
        vec![0.03, -0.02, 0.01, 0.0, 0.004, 0.0],
    )?;
    let wave = IncidentWave::new(WaveKind::S, 5.0 * PI / 8.0);
    let densities = solve_single(&curve, medium, &wave, 64)?;
    let block = densities.obstacle();
    let obs = observation_directions(32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..directions {
        let xi: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let q = ShapeUpdate::from_vector(&xi, 6)?;
        for (kappa, density) in [(medium.kappa_p(), &block.phi1), (medium.kappa_s(), &block.phi2)] {
            let exact = frechet_far_field(&block.frames, density, kappa, &q, &obs);
            let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let fd = |step: f64| {
                let moved = |s: f64| {
                    let frames: Vec<CurveFrame> = block
                        .frames
                        .iter()
                        .map(|f| CurveFrame { p: f.p + s * q.displacement(f.t), ..*f })
                        .collect();
                    boundary_far_field(&frames, density, kappa, &obs)
                };
                let (plus, minus) = (moved(step), moved(-step));
                (0..obs.len())
                    .map(|l| ((plus[l] - minus[l]) / (2.0 * step) - exact[l]).norm())
                    .fold(0.0, f64::max)
                    / scale
            };
            worst.0 = worst.0.max(fd(h));
            worst.1 = worst.1.max(fd(h / 2.0));
        }
    }
    Ok(worst)
}

/// Runs the full suite.
pub fn run_validation(options: ValidationOptions) -> Result<ValidationReport> {
    let medium = reference_medium();
    let mut report = ValidationReport::default();
    for (kind, label) in [(WaveKind::P, "P"), (WaveKind::S, "S")] {
        let e = disk_oracle_deviation(&medium, kind, 64)?;
        report.checks.push(Check::at_most(format!("disk oracle, {label} incidence, n = 64"), e, 1e-8));
    }
    for n in [16, 32, 64] {
        let weights = if options.corrupt_quadrature {
            let mut log = QuadratureWeights::new(n).log_table().to_vec();
            log[1] += 1e-6;
            QuadratureWeights::from_tables(log, QuadratureWeights::new(n).cauchy_table().to_vec())
        } else {
            QuadratureWeights::new(n)
        };
        let e = quadrature_identity_deviation(&weights);
        report.checks.push(Check::at_most(format!("quadrature identities, n = {n}"), e, 1e-12));
    }
    let e = asymptotic_deviation(&medium, 1e3)?;
    report.checks.push(Check::at_most("far-field asymptotics at |x| = 1000", e, 5e-3));
    let (phased, phaseless) = translation_deviation(&medium, Vec2::new(0.3, 0.2))?;
    report.checks.push(Check::at_most("translation relations, phased", phased, 1e-8));
    report.checks.push(Check::at_most("translation invariance, phaseless", phaseless, 1e-8));
    let (e1, e2) = frechet_deviation(&medium, 1e-5, 10, 11)?;
    report.checks.push(Check::at_most("Frechet derivative, step 1e-5", e1.max(e2), 1e-5));
    let (c1, c2) = frechet_deviation(&medium, 2e-2, 10, 11)?;
    report.checks.push(Check::at_most("Frechet difference order, |log2 ratio - 2|", ((c1 / c2).log2() - 2.0).abs(), 0.1));
    Ok(report)
}
