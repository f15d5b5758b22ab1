//! Shape reconstruction by regularized Newton iterations on the far-field
//! equations.
//!
//! Each step solves the forward problem on the current curve, linearizes the
//! data equation with densities held fixed, and moves the curve by a scaled
//! Tikhonov update of its center and radial Fourier coefficients.

pub mod linearize;
pub mod noise;
pub mod tikhonov;

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::{solve_single, solve_two_domain, FarField, PhaselessFarField};
use crate::geometry::{curve_l2_error, Boundary, CircleBoundary, ShapeUpdate, StarCurve};
use crate::medium::{ElasticMedium, IncidentWave, ModeFlags};

pub use linearize::{
    derivative_matrix, frechet_far_field, full_phased_matrix, full_phaseless_matrix,
    phased_jacobian, phaseless_jacobian, Linearization, PhasedSystem, PhaselessSystem,
};
pub use noise::{inject_noise, inject_noise_phaseless};
pub use tikhonov::{penalty_diagonal, tikhonov_update, tikhonov_update_real, Penalty};

/// Default iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 100;

/// Settings shared by both reconstruction algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionConfig {
    /// Trigonometric truncation `M` of the radial function.
    pub order: usize,
    /// Nyström half-count for the forward solves.
    pub n: usize,
    /// Newton step scale.
    pub rho: f64,
    /// Stop once the relative data misfit drops below this.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Which potential's far field is used as data.
    pub mode: ModeFlags,
    pub penalty: Penalty,
    pub linearization: Linearization,
    /// Fixed reference ball; required by the phaseless algorithm.
    pub reference_ball: Option<CircleBoundary>,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            order: 6,
            n: 64,
            rho: 0.9,
            epsilon: 0.01,
            max_iters: DEFAULT_MAX_ITERS,
            mode: ModeFlags::Compressional,
            penalty: Penalty::Sobolev,
            linearization: Linearization::Frozen,
            reference_ball: None,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::Config("truncation order must be at least 1".into()));
        }
        if self.n < 4 {
            return Err(Error::Config(format!("n = {} is too small", self.n)));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::Config(format!("rho = {} is outside (0, 1]", self.rho)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        Ok(())
    }

    fn check_data_size(&self, samples: usize) -> Result<()> {
        let unknowns = 2 * self.order + 3;
        if samples < unknowns {
            return Err(Error::Config(format!(
                "{samples} data samples cannot determine {unknowns} unknowns"
            )));
        }
        Ok(())
    }
}

/// One recorded iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub k: usize,
    pub curve: StarCurve,
    /// Relative data misfit.
    pub e_k: f64,
    /// Relative curve error against the exact shape, when one is known.
    pub err_k: Option<f64>,
    /// Regularization parameter of the step that produced this iterate; for
    /// `k = 0` the value the first step will use.
    pub lambda_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceStatus {
    Converged,
    MaxIterations,
    Aborted(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub entries: Vec<TraceEntry>,
    pub status: TraceStatus,
}

impl IterationTrace {
    pub fn last(&self) -> &TraceEntry {
        self.entries.last().expect("trace always holds the initial iterate")
    }

    pub fn final_curve(&self) -> &StarCurve {
        &self.last().curve
    }

    pub fn converged(&self) -> bool {
        self.status == TraceStatus::Converged
    }

    pub fn iterations(&self) -> usize {
        self.last().k
    }
}

/// `sqrt(2pi/N sum |v|^2)`.
pub fn discrete_l2_norm(values: &[Complex64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    (2.0 * PI / values.len() as f64 * sum).sqrt()
}

/// Real counterpart of [`discrete_l2_norm`].
pub fn discrete_l2_norm_real(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| v * v).sum();
    (2.0 * PI / values.len() as f64 * sum).sqrt()
}

/// The regularization parameter for the next step: the data residual norm
/// of the current iterate.
pub fn lambda_schedule(residual_norm: f64) -> Result<f64> {
    if !(residual_norm > 0.0) || !residual_norm.is_finite() {
        return Err(Error::ZeroResidual);
    }
    Ok(residual_norm)
}

fn check_same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("data has {a} samples, model has {b}")));
    }
    Ok(())
}

/// `||data - model|| / ||data||` on the component selected by `mode`.
pub fn stopping_error_phased(data: &FarField, model: &FarField, mode: ModeFlags) -> Result<f64> {
    let d = data.component(mode);
    let m = model.component(mode);
    check_same_size(d.len(), m.len())?;
    let den = discrete_l2_norm(d);
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let diff: Vec<Complex64> = d.iter().zip(m).map(|(a, b)| a - b).collect();
    Ok(discrete_l2_norm(&diff) / den)
}

/// `|| |data|^2 - |model|^2 || / || |data|^2 ||`, where `model` is the total
/// far field of the scene.
pub fn stopping_error_phaseless(
    data: &PhaselessFarField,
    model: &FarField,
    mode: ModeFlags,
) -> Result<f64> {
    let d = data.component(mode);
    let m = model.component(mode);
    check_same_size(d.len(), m.len())?;
    let den = discrete_l2_norm_real(d);
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let diff: Vec<f64> = d.iter().zip(m).map(|(a, b)| a - b.norm_sqr()).collect();
    Ok(discrete_l2_norm_real(&diff) / den)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_correlation(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let n = a.len().min(b.len());
    if n < 2 {
        return f64::NAN;
    }
    let (ra, rb) = (ranks(&a[..n]), ranks(&b[..n]));
    let mean = (n as f64 - 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean) * (x - mean);
        sbb += (y - mean) * (y - mean);
    }
    sab / (saa * sbb).sqrt()
}

/// A linearized data equation at one iterate.
trait LinearStep {
    fn misfit(&self) -> f64;
    fn residual_norm(&self) -> f64;
    fn step(&self, lambda: f64, config: &ReconstructionConfig) -> Result<ShapeUpdate>;
}

struct Phased {
    system: PhasedSystem,
    misfit: f64,
}

impl LinearStep for Phased {
    fn misfit(&self) -> f64 {
        self.misfit
    }

    fn residual_norm(&self) -> f64 {
        discrete_l2_norm(self.system.residual.as_slice())
    }

    fn step(&self, lambda: f64, config: &ReconstructionConfig) -> Result<ShapeUpdate> {
        tikhonov_update(&self.system.matrix, &self.system.residual, lambda, config.order, config.penalty)
    }
}

struct Phaseless {
    system: PhaselessSystem,
    misfit: f64,
}

impl LinearStep for Phaseless {
    fn misfit(&self) -> f64 {
        self.misfit
    }

    fn residual_norm(&self) -> f64 {
        discrete_l2_norm_real(self.system.residual.as_slice())
    }

    fn step(&self, lambda: f64, config: &ReconstructionConfig) -> Result<ShapeUpdate> {
        tikhonov_update_real(&self.system.matrix, &self.system.residual, lambda, config.order, config.penalty)
    }
}

fn iterate<L: LinearStep>(
    config: &ReconstructionConfig,
    initial: &StarCurve,
    exact: Option<&dyn Boundary>,
    linearize: impl Fn(&StarCurve) -> Result<L>,
) -> Result<IterationTrace> {
    config.validate()?;
    if initial.order() != config.order {
        return Err(Error::Config(format!(
            "initial curve has order {}, configuration asks for {}",
            initial.order(),
            config.order
        )));
    }
    initial.validate()?;
    let err_of = |c: &StarCurve| exact.map(|e| curve_l2_error(c, e));

    let mut curve = initial.clone();
    let mut state = linearize(&curve)?;
    let mut entries = vec![TraceEntry {
        k: 0,
        curve: curve.clone(),
        e_k: state.misfit(),
        err_k: err_of(&curve),
        lambda_k: state.residual_norm(),
    }];
    let finish = |entries, status| Ok(IterationTrace { entries, status });
    if state.misfit() < config.epsilon {
        return finish(entries, TraceStatus::Converged);
    }

    for k in 1..=config.max_iters {
        let lambda = match lambda_schedule(state.residual_norm()) {
            Ok(l) => l,
            Err(_) => return finish(entries, TraceStatus::Converged),
        };
        let update = match state.step(lambda, config) {
            Ok(u) => u,
            Err(e) => return finish(entries, TraceStatus::Aborted(e.to_string())),
        };
        let mut rho = config.rho;
        let mut retried = false;
        let (next, next_state) = loop {
            let attempt = curve
                .apply_update(&update, rho)
                .and_then(|c| linearize(&c).map(|s| (c, s)));
            match attempt {
                Ok(pair) => break pair,
                Err(Error::NonpositiveRadius { .. }) if !retried => {
                    retried = true;
                    rho *= 0.5;
                }
                Err(e) => {
                    let msg = if retried {
                        Error::RejectedStep(format!("iteration {k} with rho = {rho}: {e}")).to_string()
                    } else {
                        format!("iteration {k}: {e}")
                    };
                    return finish(entries, TraceStatus::Aborted(msg));
                }
            }
        };
        curve = next;
        state = next_state;
        entries.push(TraceEntry {
            k,
            curve: curve.clone(),
            e_k: state.misfit(),
            err_k: err_of(&curve),
            lambda_k: lambda,
        });
        if state.misfit() < config.epsilon {
            return finish(entries, TraceStatus::Converged);
        }
    }
    finish(entries, TraceStatus::MaxIterations)
}

/// Reconstruction from phased far-field data of a single obstacle.
///
/// Setup problems (bad configuration, an invalid initial guess, a failing
/// first forward solve) are returned as errors; failures after the first
/// step end the trace with [`TraceStatus::Aborted`].
pub fn run_algorithm_i(
    config: &ReconstructionConfig,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    data: &FarField,
    initial: &StarCurve,
    exact: Option<&dyn Boundary>,
) -> Result<IterationTrace> {
    config.check_data_size(data.len())?;
    iterate(config, initial, exact, |curve| {
        let densities = solve_single(curve, medium, wave, config.n)?;
        let mut system = phased_jacobian(&densities, medium, config.mode, data, config.order)?;
        if config.linearization == Linearization::Full {
            system.matrix =
                full_phased_matrix(curve, None, medium, wave, config.mode, config.n, data.n_bar())?;
        }
        let misfit = stopping_error_phased(data, &system.model, config.mode)?;
        Ok(Phased { system, misfit })
    })
}

/// Reconstruction from phaseless far-field data of the obstacle together
/// with the fixed reference ball in `config`.
pub fn run_algorithm_ii(
    config: &ReconstructionConfig,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    data: &PhaselessFarField,
    initial: &StarCurve,
    exact: Option<&dyn Boundary>,
) -> Result<IterationTrace> {
    let ball = config.reference_ball.ok_or_else(|| {
        Error::Config("phaseless reconstruction needs a reference ball".into())
    })?;
    config.check_data_size(data.len())?;
    let data_sq = data.component(config.mode).to_vec();
    iterate(config, initial, exact, |curve| {
        let densities = solve_two_domain(curve, &ball, medium, wave, config.n)?;
        let mut system = phaseless_jacobian(&densities, medium, config.mode, &data_sq, config.order)?;
        if config.linearization == Linearization::Full {
            system.matrix = full_phaseless_matrix(
                curve,
                Some(&ball),
                medium,
                wave,
                config.mode,
                config.n,
                data.n_bar(),
            )?;
        }
        let misfit = stopping_error_phaseless(data, &system.model, config.mode)?;
        Ok(Phaseless { system, misfit })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{far_field, observation_directions, simulate, Scene};
    use crate::geometry::Vec2;
    use crate::medium::WaveKind;

    fn sample() -> FarField {
        let directions = observation_directions(8);
        let phi_inf = directions.iter().map(|t| Complex64::from_polar(1.0, *t)).collect();
        let psi_inf = directions.iter().map(|t| Complex64::new(0.5, t.cos())).collect();
        FarField { directions, phi_inf, psi_inf }
    }

    #[test]
    fn discrete_norm_of_constant() {
        let v = vec![Complex64::new(3.0, 4.0); 10];
        assert!((discrete_l2_norm(&v) - 5.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
        assert!((discrete_l2_norm_real(&[2.0; 7]) - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn lambda_is_the_residual_norm() {
        assert_eq!(lambda_schedule(0.25).unwrap(), 0.25);
        assert!(matches!(lambda_schedule(0.0), Err(Error::ZeroResidual)));
        assert!(lambda_schedule(0.1).unwrap() < lambda_schedule(0.2).unwrap());
    }

    #[test]
    fn phased_stopping_error_structure() {
        let d = sample();
        for mode in [ModeFlags::Compressional, ModeFlags::Shear] {
            assert_eq!(stopping_error_phased(&d, &d, mode).unwrap(), 0.0);
            let zero = FarField::zeros(8);
            assert!((stopping_error_phased(&d, &zero, mode).unwrap() - 1.0).abs() < 1e-15);
            let mut scaled = d.clone();
            scaled.phi_inf.iter_mut().chain(scaled.psi_inf.iter_mut()).for_each(|v| *v *= 1.01);
            assert!((stopping_error_phased(&d, &scaled, mode).unwrap() - 0.01).abs() < 1e-13);
        }
        let zero = FarField::zeros(8);
        assert!(matches!(
            stopping_error_phased(&zero, &d, ModeFlags::Shear),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn phaseless_stopping_error_structure() {
        let d = sample();
        let p = d.phaseless();
        for mode in [ModeFlags::Compressional, ModeFlags::Shear] {
            assert!(stopping_error_phaseless(&p, &d, mode).unwrap() < 1e-15);
            let zero = FarField::zeros(8);
            assert!((stopping_error_phaseless(&p, &zero, mode).unwrap() - 1.0).abs() < 1e-15);
            let mut scaled = d.clone();
            let s = 1.01f64.sqrt();
            scaled.phi_inf.iter_mut().chain(scaled.psi_inf.iter_mut()).for_each(|v| *v *= s);
            assert!((stopping_error_phaseless(&p, &scaled, mode).unwrap() - 0.01).abs() < 1e-13);
        }
    }

    #[test]
    fn spearman_basics() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman_correlation(&a, &[2.0, 4.0, 9.0, 16.0, 100.0]) - 1.0).abs() < 1e-15);
        assert!((spearman_correlation(&a, &[5.0, 4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        let tied = spearman_correlation(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert!((tied - 0.8660254037844387).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(ReconstructionConfig::default().validate().is_ok());
        let bad = ReconstructionConfig { rho: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ReconstructionConfig { epsilon: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    fn medium() -> ElasticMedium {
        ElasticMedium::new(3.88, 2.56, 0.7 * PI).unwrap()
    }

    #[test]
    fn initial_curve_as_truth_stops_immediately() {
        let m = medium();
        let wave = IncidentWave::new(WaveKind::S, 5.0 * PI / 8.0);
        let truth = StarCurve::circle(Vec2::new(0.2, -0.1), 0.4, 6).unwrap();
        let data = simulate(Scene::single(&truth), &m, &wave, 32, 16).unwrap();
        let config = ReconstructionConfig { n: 32, ..Default::default() };
        let trace = run_algorithm_i(&config, &m, &wave, &data, &truth, Some(&truth)).unwrap();
        assert!(trace.converged());
        assert_eq!(trace.entries.len(), 1);
        assert!(trace.last().e_k < 1e-12);
        assert_eq!(trace.last().err_k, Some(0.0));
    }

    #[test]
    fn phased_recovers_a_nearby_curve() {
        let m = medium();
        let wave = IncidentWave::new(WaveKind::S, 5.0 * PI / 8.0);
        let truth = StarCurve::new(
            Vec2::new(0.1, 0.05),
            vec![0.5, 0.0, 0.08, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.03, 0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let data = simulate(Scene::single(&truth), &m, &wave, 32, 16).unwrap();
        let initial = StarCurve::circle(Vec2::new(0.0, 0.0), 0.45, 6).unwrap();
        let config = ReconstructionConfig {
            n: 32,
            epsilon: 1e-4,
            max_iters: 40,
            linearization: Linearization::Full,
            ..Default::default()
        };
        let trace = run_algorithm_i(&config, &m, &wave, &data, &initial, Some(&truth)).unwrap();
        assert!(trace.converged(), "{:?}", trace.status);
        let first = trace.entries[0].err_k.unwrap();
        assert!(trace.last().err_k.unwrap() < 0.1 * first);
        assert!(trace.entries.iter().all(|e| e.lambda_k > 0.0));

        // the frozen-density step still decreases the misfit from here
        let config = ReconstructionConfig { n: 32, max_iters: 1, ..config };
        let config = ReconstructionConfig { linearization: Linearization::Frozen, ..config };
        let trace = run_algorithm_i(&config, &m, &wave, &data, &initial, Some(&truth)).unwrap();
        assert!(trace.entries[1].e_k < 0.6 * trace.entries[0].e_k);
    }

    #[test]
    fn phaseless_needs_a_ball() {
        let m = medium();
        let wave = IncidentWave::new(WaveKind::S, 0.3);
        let truth = StarCurve::circle(Vec2::zeros(), 0.4, 6).unwrap();
        let data = simulate(Scene::single(&truth), &m, &wave, 16, 16).unwrap().phaseless();
        let err = run_algorithm_ii(&ReconstructionConfig::default(), &m, &wave, &data, &truth, None);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn phaseless_exact_guess_stops_immediately() {
        let m = ElasticMedium::new(3.88, 2.56, 0.6 * PI).unwrap();
        let wave = IncidentWave::new(WaveKind::S, 11.0 * PI / 6.0);
        let truth = StarCurve::circle(Vec2::new(0.1, 0.2), 0.4, 6).unwrap();
        let ball = CircleBoundary::new(Vec2::new(5.0, 0.0), 0.5).unwrap();
        let densities = solve_two_domain(&truth, &ball, &m, &wave, 32).unwrap();
        let data = far_field(&densities, &m, 16).phaseless();
        let config = ReconstructionConfig { n: 32, epsilon: 0.005, reference_ball: Some(ball), ..Default::default() };
        let trace = run_algorithm_ii(&config, &m, &wave, &data, &truth, None).unwrap();
        assert!(trace.converged());
        assert_eq!(trace.entries.len(), 1);
        assert_eq!(trace.last().err_k, None);
    }

    #[test]
    fn ball_collision_aborts() {
        let m = ElasticMedium::new(3.88, 2.56, 0.6 * PI).unwrap();
        let wave = IncidentWave::new(WaveKind::S, 0.0);
        let truth = StarCurve::circle(Vec2::zeros(), 0.4, 6).unwrap();
        let ball = CircleBoundary::new(Vec2::new(2.0, 0.0), 0.3).unwrap();
        let data = far_field(&solve_two_domain(&truth, &ball, &m, &wave, 16).unwrap(), &m, 16).phaseless();
        let config = ReconstructionConfig { n: 16, reference_ball: Some(ball), ..Default::default() };
        let overlapping = StarCurve::circle(Vec2::new(1.3, 0.0), 0.4, 6).unwrap();
        let err = run_algorithm_ii(&config, &m, &wave, &data, &overlapping, None);
        assert!(matches!(err, Err(Error::OverlappingBoundaries { .. })));
    }
}
