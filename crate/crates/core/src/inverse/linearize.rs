//! Fréchet derivative of the far-field operator and the linearized data
//! equations.
//!
//! With `xhat = (cos t, sin t)` and the density held fixed,
//! `S'[p; phi] q (t) = -i kappa gamma_kappa int exp(-i kappa xhat.p(s)) (xhat.q(s)) phi(s) ds`
//! where `xhat.q(s) = dc1 cos t + dc2 sin t + dr(s) cos(t - s)`.
//!
//! Holding the density fixed drops the response of the density to the
//! boundary motion. [`Linearization::Full`] keeps it by differencing complete
//! forward solves instead.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::{
    far_field, far_field_constant, simulate, BoundaryDensity, DensityPair, FarField, Scene,
};
use crate::geometry::{Boundary, CurveFrame, ShapeUpdate, StarCurve, Vec2};
use crate::medium::{ElasticMedium, IncidentWave, ModeFlags};

/// How the data equation is linearized at each iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linearization {
    /// Derivative of the far-field operator with the densities held fixed.
    #[default]
    Frozen,
    /// Derivative of the complete forward map, densities re-solved, by
    /// central differences of step [`FULL_DERIVATIVE_STEP`].
    Full,
}

/// Coefficient step of the central differences behind [`Linearization::Full`].
pub const FULL_DERIVATIVE_STEP: f64 = 1e-6;

/// `S'[p; phi] q` at the given observation angles.
pub fn frechet_far_field(
    frames: &[CurveFrame],
    density: &[Complex64],
    kappa: f64,
    update: &ShapeUpdate,
    directions: &[f64],
) -> Vec<Complex64> {
    let n = frames.len() / 2;
    let scale = Complex64::new(0.0, -kappa) * far_field_constant(kappa) * (PI / n as f64);
    let dr: Vec<f64> = frames.iter().map(|f| update.radius(f.t)).collect();
    directions
        .iter()
        .map(|&t| {
            let (st, ct) = t.sin_cos();
            let xhat = Vec2::new(ct, st);
            let shift = update.delta_c.dot(&xhat);
            let sum: Complex64 = frames
                .iter()
                .zip(density)
                .zip(&dr)
                .map(|((f, &phi), &dr)| {
                    let proj = shift + dr * (t - f.t).cos();
                    Complex64::from_polar(proj, -kappa * xhat.dot(&f.p)) * phi
                })
                .sum();
            scale * sum
        })
        .collect()
}

/// Columns of the derivative for the unit updates in the order
/// `dc1, dc2, alpha_0..alpha_M, beta_1..beta_M`, as an `N x (2M+3)` matrix.
pub fn derivative_matrix(
    frames: &[CurveFrame],
    density: &[Complex64],
    kappa: f64,
    order: usize,
    directions: &[f64],
) -> DMatrix<Complex64> {
    let n = frames.len() / 2;
    let scale = Complex64::new(0.0, -kappa) * far_field_constant(kappa) * (PI / n as f64);
    let cols = 2 * order + 3;
    let mut b = DMatrix::from_element(directions.len(), cols, Complex64::default());
    // cos(m s), sin(m s) at the nodes
    let trig: Vec<Vec<(f64, f64)>> = frames
        .iter()
        .map(|f| (0..=order).map(|m| ((m as f64 * f.t).cos(), (m as f64 * f.t).sin())).collect())
        .collect();
    let mut row = vec![Complex64::default(); cols];
    for (l, &t) in directions.iter().enumerate() {
        let (st, ct) = t.sin_cos();
        let xhat = Vec2::new(ct, st);
        row.iter_mut().for_each(|v| *v = Complex64::default());
        let mut total = Complex64::default();
        for (j, f) in frames.iter().enumerate() {
            let e = Complex64::from_polar(1.0, -kappa * xhat.dot(&f.p)) * density[j];
            total += e;
            let radial = e * (t - f.t).cos();
            for m in 0..=order {
                row[2 + m] += radial * trig[j][m].0;
            }
            for m in 1..=order {
                row[2 + order + m] += radial * trig[j][m].1;
            }
        }
        row[0] = total * ct;
        row[1] = total * st;
        for (c, v) in row.iter().enumerate() {
            b[(l, c)] = scale * v;
        }
    }
    b
}

fn check_directions(expected: &[f64], got: &[f64]) -> Result<()> {
    if expected.len() != got.len() {
        return Err(Error::Dimension(format!(
            "data has {} directions, model has {}",
            got.len(),
            expected.len()
        )));
    }
    Ok(())
}

fn mode_kappa_density<'a>(
    mode: ModeFlags,
    medium: &ElasticMedium,
    block: &'a BoundaryDensity,
) -> (f64, &'a [Complex64]) {
    match mode {
        ModeFlags::Compressional => (medium.kappa_p(), &block.phi1),
        ModeFlags::Shear => (medium.kappa_s(), &block.phi2),
    }
}

/// Linearized phased data equation `B xi = w` at the current iterate.
#[derive(Debug, Clone)]
pub struct PhasedSystem {
    /// `N x (2M+3)` complex matrix.
    pub matrix: DMatrix<Complex64>,
    /// Data minus model for the selected component.
    pub residual: DVector<Complex64>,
    /// Far field of the current iterate.
    pub model: FarField,
}

/// Builds `B` and `w = data - S(p, phi)` for the component selected by
/// `mode`, from densities solved on the current obstacle.
pub fn phased_jacobian(
    densities: &DensityPair,
    medium: &ElasticMedium,
    mode: ModeFlags,
    data: &FarField,
    order: usize,
) -> Result<PhasedSystem> {
    let model = far_field(densities, medium, data.n_bar());
    check_directions(&model.directions, &data.directions)?;
    let block = densities.obstacle();
    let (kappa, density) = mode_kappa_density(mode, medium, block);
    let matrix = derivative_matrix(&block.frames, density, kappa, order, &model.directions);
    let residual = DVector::from_iterator(
        model.len(),
        data.component(mode)
            .iter()
            .zip(model.component(mode))
            .map(|(d, m)| d - m),
    );
    Ok(PhasedSystem {
        matrix,
        residual,
        model,
    })
}

/// Linearized phaseless data equation `A xi = w` at the current iterate.
#[derive(Debug, Clone)]
pub struct PhaselessSystem {
    /// `N x (2M+3)` real matrix.
    pub matrix: DMatrix<f64>,
    /// `|data|^2 - |S_total|^2` for the selected component.
    pub residual: DVector<f64>,
    /// Total far field (obstacle plus any other boundary) of the iterate.
    pub model: FarField,
}

/// Builds `A = 2 Re(conj(S_total) S'[p_D; phi_D])` and the phaseless
/// residual. Only the first boundary of `densities` is differentiated.
pub fn phaseless_jacobian(
    densities: &DensityPair,
    medium: &ElasticMedium,
    mode: ModeFlags,
    data_sq: &[f64],
    order: usize,
) -> Result<PhaselessSystem> {
    if !data_sq.len().is_multiple_of(2) || data_sq.is_empty() {
        return Err(Error::Dimension(format!(
            "phaseless data needs an even number of samples, got {}",
            data_sq.len()
        )));
    }
    let model = far_field(densities, medium, data_sq.len() / 2);
    let block = densities.obstacle();
    let (kappa, density) = mode_kappa_density(mode, medium, block);
    let derivative = derivative_matrix(&block.frames, density, kappa, order, &model.directions);
    let total = model.component(mode);
    let matrix = DMatrix::from_fn(derivative.nrows(), derivative.ncols(), |l, c| {
        2.0 * (total[l].conj() * derivative[(l, c)]).re
    });
    let residual = DVector::from_iterator(
        total.len(),
        data_sq.iter().zip(total).map(|(d, m)| d - m.norm_sqr()),
    );
    Ok(PhaselessSystem {
        matrix,
        residual,
        model,
    })
}

fn central_columns<T>(
    curve: &StarCurve,
    eval: impl Fn(&StarCurve) -> Result<Vec<T>>,
    combine: impl Fn(&T, &T) -> T,
) -> Result<Vec<Vec<T>>> {
    let order = curve.order();
    let unknowns = 2 * order + 3;
    (0..unknowns)
        .map(|c| {
            let mut xi = vec![0.0; unknowns];
            xi[c] = 1.0;
            let q = ShapeUpdate::from_vector(&xi, order)?;
            let plus = eval(&curve.apply_update(&q, FULL_DERIVATIVE_STEP)?)?;
            let minus = eval(&curve.apply_update(&q, -FULL_DERIVATIVE_STEP)?)?;
            Ok(plus.iter().zip(&minus).map(|(a, b)| combine(a, b)).collect())
        })
        .collect()
}

fn scene_of<'a>(curve: &'a StarCurve, ball: Option<&'a dyn Boundary>) -> Scene<'a> {
    match ball {
        Some(b) => Scene::with_ball(curve, b),
        None => Scene::single(curve),
    }
}

/// Derivative of the selected far-field component with respect to the
/// coefficients of `curve`, densities re-solved for every perturbation.
pub fn full_phased_matrix(
    curve: &StarCurve,
    ball: Option<&dyn Boundary>,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    mode: ModeFlags,
    n: usize,
    n_bar: usize,
) -> Result<DMatrix<Complex64>> {
    let h2 = 2.0 * FULL_DERIVATIVE_STEP;
    let cols = central_columns(
        curve,
        |c| Ok(simulate(scene_of(c, ball), medium, wave, n, n_bar)?.component(mode).to_vec()),
        |a, b| (a - b) / h2,
    )?;
    Ok(DMatrix::from_fn(2 * n_bar, cols.len(), |l, c| cols[c][l]))
}

/// Derivative of the squared modulus of the selected total far field, with
/// densities on every boundary re-solved for each perturbation.
pub fn full_phaseless_matrix(
    curve: &StarCurve,
    ball: Option<&dyn Boundary>,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    mode: ModeFlags,
    n: usize,
    n_bar: usize,
) -> Result<DMatrix<f64>> {
    let h2 = 2.0 * FULL_DERIVATIVE_STEP;
    let cols = central_columns(
        curve,
        |c| {
            let ff = simulate(scene_of(c, ball), medium, wave, n, n_bar)?;
            Ok(ff.component(mode).iter().map(|v| v.norm_sqr()).collect())
        },
        |a, b| (a - b) / h2,
    )?;
    Ok(DMatrix::from_fn(2 * n_bar, cols.len(), |l, c| cols[c][l]))
}
