//! Tikhonov-regularized least squares for the real update coefficients.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::ShapeUpdate;

/// Weighting of the penalty term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    /// `diag(1, 1, 2pi, pi(1+m^2)^2 .., pi(1+m^2)^2 ..)`: the `H^2` norm of `dr`
    /// plus the squared center shift.
    #[default]
    Sobolev,
    /// Plain identity.
    Identity,
}

/// Penalty diagonal for order `M`, in the order of [`ShapeUpdate::to_vector`].
pub fn penalty_diagonal(order: usize, penalty: Penalty) -> Vec<f64> {
    match penalty {
        Penalty::Identity => vec![1.0; 2 * order + 3],
        Penalty::Sobolev => {
            let weight = |m: usize| PI * (1.0 + (m * m) as f64).powi(2);
            let mut d = vec![1.0, 1.0, 2.0 * PI];
            d.extend((1..=order).map(weight));
            d.extend((1..=order).map(weight));
            d
        }
    }
}

/// Solves `(lambda P + G) xi = g` for symmetric positive semidefinite `G`.
pub fn regularized_solve(
    gram: DMatrix<f64>,
    rhs: &DVector<f64>,
    lambda: f64,
    diagonal: &[f64],
) -> Result<DVector<f64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Dimension(format!(
            "regularization parameter must be positive, got {lambda}"
        )));
    }
    let size = diagonal.len();
    if gram.shape() != (size, size) || rhs.len() != size {
        return Err(Error::Dimension(format!(
            "normal matrix {:?} and right-hand side {} for {size} unknowns",
            gram.shape(),
            rhs.len()
        )));
    }
    let mut system = gram;
    for (k, &d) in diagonal.iter().enumerate() {
        system[(k, k)] += lambda * d;
    }
    let chol = system
        .cholesky()
        .ok_or(Error::SingularSystem { condition: f64::INFINITY })?;
    Ok(chol.solve(rhs))
}

/// Update minimizing `|B xi - w|^2 + lambda xi^T P xi` over real `xi`, i.e.
/// `(lambda P + Re(B^* B)) xi = Re(B^* w)`.
pub fn tikhonov_update(
    matrix: &DMatrix<Complex64>,
    residual: &DVector<Complex64>,
    lambda: f64,
    order: usize,
    penalty: Penalty,
) -> Result<ShapeUpdate> {
    let adjoint = matrix.adjoint();
    let gram = (&adjoint * matrix).map(|v| v.re);
    let rhs = (&adjoint * residual).map(|v| v.re);
    let xi = regularized_solve(gram, &rhs, lambda, &penalty_diagonal(order, penalty))?;
    ShapeUpdate::from_vector(xi.as_slice(), order)
}

/// Real-matrix variant: `(lambda P + A^T A) xi = A^T w`.
pub fn tikhonov_update_real(
    matrix: &DMatrix<f64>,
    residual: &DVector<f64>,
    lambda: f64,
    order: usize,
    penalty: Penalty,
) -> Result<ShapeUpdate> {
    let gram = matrix.transpose() * matrix;
    let rhs = matrix.transpose() * residual;
    let xi = regularized_solve(gram, &rhs, lambda, &penalty_diagonal(order, penalty))?;
    ShapeUpdate::from_vector(xi.as_slice(), order)
}

/// Value of the regularized functional at `xi`.
pub fn tikhonov_functional(
    matrix: &DMatrix<Complex64>,
    residual: &DVector<Complex64>,
    lambda: f64,
    diagonal: &[f64],
    xi: &[f64],
) -> f64 {
    let x = DVector::from_iterator(xi.len(), xi.iter().map(|&v| Complex64::new(v, 0.0)));
    let misfit = (matrix * x - residual).norm_squared();
    let penalty: f64 = xi.iter().zip(diagonal).map(|(v, d)| d * v * v).sum();
    misfit + lambda * penalty
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(seed: u64, rows: usize, order: usize) -> (DMatrix<Complex64>, DVector<Complex64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = 2 * order + 3;
        let b = DMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let w = DVector::from_fn(rows, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (b, w)
    }

    #[test]
    fn sobolev_diagonal() {
        let d = penalty_diagonal(2, Penalty::Sobolev);
        let want = [1.0, 1.0, 2.0 * PI, 4.0 * PI, 25.0 * PI, 4.0 * PI, 25.0 * PI];
        assert_eq!(d.len(), want.len());
        for (a, b) in d.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
        assert_eq!(penalty_diagonal(6, Penalty::Identity), vec![1.0; 15]);
    }

    #[test]
    fn zero_residual_gives_zero_update() {
        let (b, _) = random_system(3, 40, 6);
        let w = DVector::from_element(40, Complex64::default());
        let q = tikhonov_update(&b, &w, 0.5, 6, Penalty::Sobolev).unwrap();
        assert!(q.to_vector().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn large_lambda_bound() {
        let (b, w) = random_system(4, 40, 6);
        let rhs = (b.adjoint() * &w).map(|v| v.re);
        for lambda in [1e3, 1e6, 1e9] {
            let q = tikhonov_update(&b, &w, lambda, 6, Penalty::Sobolev).unwrap();
            let norm = DVector::from_vec(q.to_vector()).norm();
            assert!(norm <= rhs.norm() / lambda * (1.0 + 1e-12), "{lambda}");
        }
    }

    #[test]
    fn normal_equations_hold() {
        let (b, w) = random_system(5, 64, 6);
        for penalty in [Penalty::Sobolev, Penalty::Identity] {
            let lambda = 0.37;
            let xi = tikhonov_update(&b, &w, lambda, 6, penalty).unwrap().to_vector();
            let d = penalty_diagonal(6, penalty);
            let x = DVector::from_vec(xi.clone());
            let gram = (b.adjoint() * &b).map(|v| v.re);
            let rhs = (b.adjoint() * &w).map(|v| v.re);
            let lhs = &gram * &x + DVector::from_iterator(15, x.iter().zip(&d).map(|(v, d)| lambda * d * v));
            assert!((lhs - &rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn update_minimizes_the_functional() {
        let (b, w) = random_system(6, 64, 6);
        let lambda = 0.2;
        let d = penalty_diagonal(6, Penalty::Sobolev);
        let xi = tikhonov_update(&b, &w, lambda, 6, Penalty::Sobolev).unwrap().to_vector();
        let best = tikhonov_functional(&b, &w, lambda, &d, &xi);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let dir: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let trial: Vec<f64> = xi.iter().zip(&dir).map(|(x, e)| x + 1e-3 * e / norm).collect();
            assert!(tikhonov_functional(&b, &w, lambda, &d, &trial) >= best);
        }
    }

    #[test]
    fn real_variant_matches_complex_with_real_data() {
        let (b, w) = random_system(8, 30, 4);
        let br = b.map(|v| v.re);
        let wr = w.map(|v| v.re);
        let a = tikhonov_update_real(&br, &wr, 0.1, 4, Penalty::Sobolev).unwrap().to_vector();
        let c = tikhonov_update(&br.map(|v| Complex64::new(v, 0.0)), &wr.map(|v| Complex64::new(v, 0.0)), 0.1, 4, Penalty::Sobolev)
            .unwrap()
            .to_vector();
        for (x, y) in a.iter().zip(c) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_lambda_is_rejected() {
        let (b, w) = random_system(1, 20, 2);
        assert!(tikhonov_update(&b, &w, 0.0, 2, Penalty::Sobolev).is_err());
    }
}
