//! Nyström solution of the boundary integral equations for one rigid
//! obstacle, or an obstacle together with a reference ball, and evaluation
//! of the resulting potentials.
//!
//! The scattered potentials are single layers
//! `phi = S_{kappa_p} g_1`, `psi = S_{kappa_s} g_2` summed over all
//! boundaries. Unknowns are the Jacobian-weighted densities
//! `phi_j(s) = G(s) g_j(p(s))` at the `2n` grid nodes, ordered boundary by
//! boundary as `(phi_1, phi_2)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, CurveFrame, Vec2};
use crate::kernels::{kernel_h, kernel_k, split_pair};
use crate::medium::{boundary_data, ElasticMedium, IncidentWave, ModeFlags};
use crate::quadrature::QuadratureWeights;
use crate::special::bessel01;

/// Systems whose pivot ratio exceeds this are reported as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative residual the direct solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Minimum gap between two boundaries, in shear wavelengths.
pub const SEPARATION_WAVELENGTHS: f64 = 0.1;
/// Samples per boundary used for the separation check.
const SEPARATION_SAMPLES: usize = 256;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Densities on one boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensity {
    pub frames: Vec<CurveFrame>,
    pub phi1: Vec<Complex64>,
    pub phi2: Vec<Complex64>,
}

/// Solved densities for every boundary of a scene, in scene order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    pub n: usize,
    pub blocks: Vec<BoundaryDensity>,
}

impl DensityPair {
    pub fn boundary_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn obstacle(&self) -> &BoundaryDensity {
        &self.blocks[0]
    }

    /// Densities scaled by a common factor.
    pub fn scaled(&self, factor: Complex64) -> DensityPair {
        let mut out = self.clone();
        for b in &mut out.blocks {
            b.phi1.iter_mut().for_each(|v| *v *= factor);
            b.phi2.iter_mut().for_each(|v| *v *= factor);
        }
        out
    }
}

/// Far-field patterns at `2 n_bar` uniform directions `pi l / n_bar`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub directions: Vec<f64>,
    pub phi_inf: Vec<Complex64>,
    pub psi_inf: Vec<Complex64>,
}

/// Squared moduli of the far-field patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaselessFarField {
    pub directions: Vec<f64>,
    pub phi_sq: Vec<f64>,
    pub psi_sq: Vec<f64>,
}

/// Far-field patterns of the elastic displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticFarField {
    pub directions: Vec<f64>,
    pub vp_inf: Vec<[Complex64; 2]>,
    pub vs_inf: Vec<[Complex64; 2]>,
}

/// Uniform observation angles `pi l / n_bar`, `l = 0..2 n_bar`.
pub fn observation_directions(n_bar: usize) -> Vec<f64> {
    (0..2 * n_bar)
        .map(|l| PI * l as f64 / n_bar as f64)
        .collect()
}

/// `gamma_kappa = exp(i pi/4) / sqrt(8 pi kappa)`.
pub fn far_field_constant(kappa: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (8.0 * PI * kappa).sqrt(), PI / 4.0)
}

impl FarField {
    pub fn zeros(n_bar: usize) -> Self {
        Self {
            directions: observation_directions(n_bar),
            phi_inf: vec![ZERO; 2 * n_bar],
            psi_inf: vec![ZERO; 2 * n_bar],
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn n_bar(&self) -> usize {
        self.directions.len() / 2
    }

    /// The component selected by `mode`.
    pub fn component(&self, mode: ModeFlags) -> &[Complex64] {
        match mode {
            ModeFlags::Compressional => &self.phi_inf,
            ModeFlags::Shear => &self.psi_inf,
        }
    }

    pub fn phaseless(&self) -> PhaselessFarField {
        PhaselessFarField {
            directions: self.directions.clone(),
            phi_sq: self.phi_inf.iter().map(|v| v.norm_sqr()).collect(),
            psi_sq: self.psi_inf.iter().map(|v| v.norm_sqr()).collect(),
        }
    }
}

impl PhaselessFarField {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn n_bar(&self) -> usize {
        self.directions.len() / 2
    }

    pub fn component(&self, mode: ModeFlags) -> &[f64] {
        match mode {
            ModeFlags::Compressional => &self.phi_sq,
            ModeFlags::Shear => &self.psi_sq,
        }
    }
}

/// The boundaries of a scattering scene. The first one is the obstacle;
/// an optional second one is the reference ball.
#[derive(Clone, Copy)]
pub struct Scene<'a> {
    boundaries: [Option<&'a dyn Boundary>; 2],
}

impl<'a> Scene<'a> {
    pub fn single(obstacle: &'a dyn Boundary) -> Self {
        Self {
            boundaries: [Some(obstacle), None],
        }
    }

    pub fn with_ball(obstacle: &'a dyn Boundary, ball: &'a dyn Boundary) -> Self {
        Self {
            boundaries: [Some(obstacle), Some(ball)],
        }
    }

    pub fn boundaries(&self) -> impl Iterator<Item = &'a dyn Boundary> + '_ {
        self.boundaries.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.boundaries().count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fails when two boundaries come closer than a tenth of the shear
    /// wavelength.
    pub fn check_separation(&self, medium: &ElasticMedium) -> Result<()> {
        let curves: Vec<_> = self.boundaries().collect();
        let required = SEPARATION_WAVELENGTHS * 2.0 * PI / medium.kappa_s();
        for a in 0..curves.len() {
            for b in a + 1..curves.len() {
                let gap = boundary_gap(curves[a], curves[b]);
                if !(gap >= required) {
                    return Err(Error::OverlappingBoundaries { gap, required });
                }
            }
        }
        Ok(())
    }
}

/// Sampled distance between two curves, negative when one center lies
/// inside the other curve.
pub fn boundary_gap(a: &dyn Boundary, b: &dyn Boundary) -> f64 {
    let m = SEPARATION_SAMPLES;
    let pa: Vec<Vec2> = (0..m).map(|j| a.point(2.0 * PI * j as f64 / m as f64)).collect();
    let pb: Vec<Vec2> = (0..m).map(|j| b.point(2.0 * PI * j as f64 / m as f64)).collect();
    let mut gap = f64::INFINITY;
    for x in &pa {
        for y in &pb {
            gap = gap.min((x - y).norm());
        }
    }
    if contains(a, b.center()) || contains(b, a.center()) {
        -gap
    } else {
        gap
    }
}

fn contains(curve: &dyn Boundary, x: Vec2) -> bool {
    let rel = x - curve.center();
    let t = rel.y.atan2(rel.x);
    rel.norm() < curve.radial(t).0
}

/// Dense Nyström matrix for the boundaries whose node frames are given.
///
/// Self blocks use the logarithmic and Cauchy product rules on the split
/// kernels; blocks coupling different boundaries use the trapezoidal rule.
pub fn assemble(
    frames: &[Vec<CurveFrame>],
    medium: &ElasticMedium,
    weights: &QuadratureWeights,
) -> DMatrix<Complex64> {
    let n = weights.n();
    let m = 2 * n;
    let size = 2 * m * frames.len();
    let (kp, ks) = (medium.kappa_p(), medium.kappa_s());
    let h = PI / n as f64;
    let mut a = DMatrix::from_element(size, size, ZERO);
    for (sigma, obs_frames) in frames.iter().enumerate() {
        assert_eq!(obs_frames.len(), m, "frame count does not match n");
        let row1 = 2 * m * sigma;
        let row2 = row1 + m;
        for (rho, src_frames) in frames.iter().enumerate() {
            let col1 = 2 * m * rho;
            let col2 = col1 + m;
            for (i, obs) in obs_frames.iter().enumerate() {
                for (j, src) in src_frames.iter().enumerate() {
                    if sigma == rho {
                        let r = weights.log_weight(i, j);
                        let c = weights.cauchy_weight(i, j);
                        let (k_p, h_p) = split_pair(obs, src, kp);
                        let (k_s, h_s) = split_pair(obs, src, ks);
                        let delta = if i == j { 1.0 } else { 0.0 };
                        a[(row1 + i, col1 + j)] =
                            k_p.log_part * r + k_p.smooth_part * h - delta;
                        a[(row1 + i, col2 + j)] =
                            h_s.cauchy_part * c + h_s.log_part * r + h_s.smooth_part * h;
                        a[(row2 + i, col1 + j)] =
                            h_p.cauchy_part * c + h_p.log_part * r + h_p.smooth_part * h;
                        a[(row2 + i, col2 + j)] =
                            -(k_s.log_part * r + k_s.smooth_part * h) + delta;
                    } else {
                        let (k_p, h_p, k_s, h_s) = cross_kernels(obs, src, kp, ks);
                        a[(row1 + i, col1 + j)] = k_p * h;
                        a[(row1 + i, col2 + j)] = h_s * h;
                        a[(row2 + i, col1 + j)] = h_p * h;
                        a[(row2 + i, col2 + j)] = -k_s * h;
                    }
                }
            }
        }
    }
    a
}

fn cross_kernels(
    obs: &CurveFrame,
    src: &CurveFrame,
    kp: f64,
    ks: f64,
) -> (Complex64, Complex64, Complex64, Complex64) {
    let unwrap = |r: Result<Complex64>| r.expect("boundaries were checked to be disjoint");
    (
        unwrap(kernel_k(obs, src, kp)),
        unwrap(kernel_h(obs, src, kp)),
        unwrap(kernel_k(obs, src, ks)),
        unwrap(kernel_h(obs, src, ks)),
    )
}

/// Single-obstacle matrix (`4n x 4n`) and its node frames.
pub fn assemble_single(
    curve: &dyn Boundary,
    medium: &ElasticMedium,
    n: usize,
) -> (DMatrix<Complex64>, Vec<CurveFrame>) {
    let frames = curve.frames(n);
    let weights = QuadratureWeights::cached(n);
    let a = assemble(std::slice::from_ref(&frames), medium, &weights);
    (a, frames)
}

/// Obstacle plus ball matrix (`8n x 8n`) and the node frames of both.
pub fn assemble_two_domain(
    curve: &dyn Boundary,
    ball: &dyn Boundary,
    medium: &ElasticMedium,
    n: usize,
) -> Result<(DMatrix<Complex64>, Vec<Vec<CurveFrame>>)> {
    Scene::with_ball(curve, ball).check_separation(medium)?;
    let frames = vec![curve.frames(n), ball.frames(n)];
    let weights = QuadratureWeights::cached(n);
    let a = assemble(&frames, medium, &weights);
    Ok((a, frames))
}

/// Ratio of the largest to the smallest pivot of an LU factorization.
fn pivot_ratio(lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let (lo, hi) = lu
        .lu_internal()
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v.norm()), hi.max(v.norm()))
        });
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Solves `a x = b` by LU with partial pivoting, checking the pivot ratio
/// and the relative residual.
pub fn solve_dense(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let lu = a.clone().lu();
    let condition = pivot_ratio(&lu);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    let x = lu.solve(b).ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let b_norm = b.norm();
    if b_norm > 0.0 {
        let residual = (a * &x - b).norm() / b_norm;
        if !(residual <= RESIDUAL_TOLERANCE) {
            return Err(Error::SingularSystem { condition });
        }
    }
    Ok(x)
}

/// Densities for every boundary of `scene` under incidence `wave`.
pub fn solve_scene(
    scene: Scene<'_>,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    n: usize,
) -> Result<DensityPair> {
    if scene.len() > 1 {
        scene.check_separation(medium)?;
    }
    let frames: Vec<Vec<CurveFrame>> = scene.boundaries().map(|b| b.frames(n)).collect();
    let weights = QuadratureWeights::cached(n);
    let a = assemble(&frames, medium, &weights);
    let m = 2 * n;
    let mut rhs = DVector::from_element(2 * m * frames.len(), ZERO);
    for (sigma, f) in frames.iter().enumerate() {
        let (w1, w2) = boundary_data(wave, medium, f)?;
        for i in 0..m {
            rhs[2 * m * sigma + i] = w1[i];
            rhs[2 * m * sigma + m + i] = w2[i];
        }
    }
    let x = solve_dense(&a, &rhs)?;
    let blocks = frames
        .into_iter()
        .enumerate()
        .map(|(sigma, frames)| {
            let base = 2 * m * sigma;
            BoundaryDensity {
                frames,
                phi1: x.rows(base, m).iter().copied().collect(),
                phi2: x.rows(base + m, m).iter().copied().collect(),
            }
        })
        .collect();
    Ok(DensityPair { n, blocks })
}

/// Densities on a single obstacle.
pub fn solve_single(
    curve: &dyn Boundary,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    n: usize,
) -> Result<DensityPair> {
    solve_scene(Scene::single(curve), medium, wave, n)
}

/// Densities on an obstacle and a reference ball.
pub fn solve_two_domain(
    curve: &dyn Boundary,
    ball: &dyn Boundary,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    n: usize,
) -> Result<DensityPair> {
    solve_scene(Scene::with_ball(curve, ball), medium, wave, n)
}

/// `gamma_kappa (pi/n) sum_j exp(-i kappa xhat.p_j) phi_j` for one boundary.
pub fn boundary_far_field(
    frames: &[CurveFrame],
    density: &[Complex64],
    kappa: f64,
    directions: &[f64],
) -> Vec<Complex64> {
    let n = frames.len() / 2;
    let scale = far_field_constant(kappa) * (PI / n as f64);
    directions
        .iter()
        .map(|&t| {
            let xhat = Vec2::new(t.cos(), t.sin());
            let sum: Complex64 = frames
                .iter()
                .zip(density)
                .map(|(f, &phi)| Complex64::from_polar(1.0, -kappa * xhat.dot(&f.p)) * phi)
                .sum();
            scale * sum
        })
        .collect()
}

/// Far-field patterns summed over all boundaries at `2 n_bar` directions.
pub fn far_field(densities: &DensityPair, medium: &ElasticMedium, n_bar: usize) -> FarField {
    let directions = observation_directions(n_bar);
    let mut out = FarField::zeros(n_bar);
    for b in &densities.blocks {
        let p = boundary_far_field(&b.frames, &b.phi1, medium.kappa_p(), &directions);
        let s = boundary_far_field(&b.frames, &b.phi2, medium.kappa_s(), &directions);
        for l in 0..directions.len() {
            out.phi_inf[l] += p[l];
            out.psi_inf[l] += s[l];
        }
    }
    out
}

/// Forward solve followed by far-field evaluation.
pub fn simulate(
    scene: Scene<'_>,
    medium: &ElasticMedium,
    wave: &IncidentWave,
    n: usize,
    n_bar: usize,
) -> Result<FarField> {
    let densities = solve_scene(scene, medium, wave, n)?;
    Ok(far_field(&densities, medium, n_bar))
}

/// `v_p = i kappa_p phi_inf xhat` and `v_s = -i kappa_s psi_inf xhat_perp`.
pub fn elastic_lift(ff: &FarField, medium: &ElasticMedium) -> ElasticFarField {
    let ip = Complex64::new(0.0, medium.kappa_p());
    let is = Complex64::new(0.0, -medium.kappa_s());
    let mut vp_inf = Vec::with_capacity(ff.len());
    let mut vs_inf = Vec::with_capacity(ff.len());
    for (l, &t) in ff.directions.iter().enumerate() {
        let (s, c) = t.sin_cos();
        let a = ip * ff.phi_inf[l];
        let b = is * ff.psi_inf[l];
        vp_inf.push([a * c, a * s]);
        vs_inf.push([-b * s, b * c]);
    }
    ElasticFarField {
        directions: ff.directions.clone(),
        vp_inf,
        vs_inf,
    }
}

/// Potentials and their gradients at one exterior point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearField {
    pub phi: Complex64,
    pub psi: Complex64,
    pub grad_phi: [Complex64; 2],
    pub grad_psi: [Complex64; 2],
    /// Distance to the nearest quadrature node.
    pub min_distance: f64,
    /// Set when the point is within a few node spacings of a boundary,
    /// where the trapezoidal rule loses accuracy.
    pub too_close: bool,
}

impl NearField {
    /// Scattered displacement `grad phi + curl psi`, with
    /// `curl psi = (d_2 psi, -d_1 psi)`.
    pub fn displacement(&self) -> [Complex64; 2] {
        [
            self.grad_phi[0] + self.grad_psi[1],
            self.grad_phi[1] - self.grad_psi[0],
        ]
    }
}

/// Single-layer potentials `phi`, `psi` and their gradients at `x`.
pub fn near_field(densities: &DensityPair, medium: &ElasticMedium, x: Vec2) -> Result<NearField> {
    let quarter = Complex64::new(0.0, 0.25);
    let mut out = NearField {
        phi: ZERO,
        psi: ZERO,
        grad_phi: [ZERO; 2],
        grad_psi: [ZERO; 2],
        min_distance: f64::INFINITY,
        too_close: false,
    };
    let h = PI / densities.n as f64;
    for b in &densities.blocks {
        let spacing = b.frames.iter().map(|f| f.jacobian()).fold(0.0, f64::max) * h;
        for (j, f) in b.frames.iter().enumerate() {
            let diff = x - f.p;
            let d = diff.norm();
            if !(d > 1e-300) {
                return Err(Error::CoincidentPoints { distance: d });
            }
            out.min_distance = out.min_distance.min(d);
            if d < 5.0 * spacing {
                out.too_close = true;
            }
            for (kappa, density, value, grad) in [
                (medium.kappa_p(), b.phi1[j], &mut out.phi, &mut out.grad_phi),
                (medium.kappa_s(), b.phi2[j], &mut out.psi, &mut out.grad_psi),
            ] {
                let bs = bessel01(kappa * d);
                let w = density * h;
                *value += quarter * bs.h0() * w;
                // grad_x H_0(kappa |x - y|) = -kappa H_1 (x - y) / |x - y|
                let g = -quarter * kappa * bs.h1() * w / d;
                grad[0] += g * diff.x;
                grad[1] += g * diff.y;
            }
        }
    }
    Ok(out)
}
