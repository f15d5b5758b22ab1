//! Quadrature on the uniform periodic grid `s_j = pi j / n`, `j = 0..2n`.
//!
//! Besides the trapezoidal rule there are two product rules obtained by
//! integrating the trigonometric interpolant exactly against a singular
//! weight:
//!
//! * logarithmic: `int_0^{2pi} ln(4 sin^2((t - s)/2)) f(s) ds ~ sum_j R(t - s_j) f(s_j)`
//! * Cauchy: `p.v. int_0^{2pi} f(s) / sin(s - t) ds ~ sum_j C(t - s_j) f(s_j)`
//!
//! On the grid both weights depend only on the index difference `k = i - j`,
//! so each rule is stored as a table of `2n` values indexed by `k mod 2n`.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Grid nodes `pi j / n` for `j = 0..2n`.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..2 * n).map(|j| PI * j as f64 / n as f64).collect()
}

/// Logarithmic weights `R_k`, `k = 0..2n`:
/// `R_k = -(2pi/n) sum_{m=1}^{n-1} cos(m k pi/n)/m - (-1)^k pi/n^2`.
pub fn log_weights(n: usize) -> Vec<f64> {
    assert!(n >= 1, "quadrature needs n >= 1");
    let nf = n as f64;
    let mut r = vec![0.0; 2 * n];
    for k in 0..=n {
        let mut sum = 0.0;
        for m in 1..n {
            sum += (m as f64 * k as f64 * PI / nf).cos() / m as f64;
        }
        let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
        r[k] = -2.0 * PI / nf * sum - alt * PI / (nf * nf);
    }
    // R is even in k and 2n-periodic
    for k in n + 1..2 * n {
        r[k] = r[2 * n - k];
    }
    r
}

/// Cauchy weights at index difference `k` (so `t - s_j = k pi / n`):
/// `C_k = -(2pi/n) sum_{m=0}^{m_max} sin((2m+1) k pi / n)`, with
/// `m_max = (n-3)/2` for odd `n` and `n/2 - 1` for even `n`.
///
/// The extra `-(pi/n) sin(n (t - s_j))` term of the odd-`n` rule vanishes on
/// the grid and is omitted.
pub fn cauchy_weights(n: usize) -> Vec<f64> {
    assert!(n >= 1, "quadrature needs n >= 1");
    let nf = n as f64;
    let terms: usize = if n % 2 == 1 { (n + 1) / 2 - 1 } else { n / 2 };
    let mut c = vec![0.0; 2 * n];
    for k in 1..n {
        let mut sum = 0.0;
        for m in 0..terms {
            sum += ((2 * m + 1) as f64 * k as f64 * PI / nf).sin();
        }
        c[k] = -2.0 * PI / nf * sum;
    }
    // odd in k: C_{-k} = C_{2n-k} = -C_k, and C_0 = C_n = 0
    for k in n + 1..2 * n {
        c[k] = -c[2 * n - k];
    }
    c
}

/// Trapezoidal rule `(pi/n) sum_j f(s_j)` over `2n` samples.
pub fn trapezoid<T>(samples: &[T]) -> T
where
    T: Copy + std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
{
    assert!(
        !samples.is_empty() && samples.len().is_multiple_of(2),
        "trapezoid needs 2n samples"
    );
    let n = samples.len() / 2;
    samples.iter().copied().sum::<T>() * (PI / n as f64)
}

/// Precomputed weight tables for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWeights {
    n: usize,
    log: Vec<f64>,
    cauchy: Vec<f64>,
}

impl QuadratureWeights {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            log: log_weights(n),
            cauchy: cauchy_weights(n),
        }
    }

    /// Shared tables from a process-wide cache.
    pub fn cached(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureWeights>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(n)
            .or_insert_with(|| Arc::new(QuadratureWeights::new(n)))
            .clone()
    }

    /// Builds tables from explicit values. Used to inject corrupted tables
    /// into the validation checks.
    pub fn from_tables(log: Vec<f64>, cauchy: Vec<f64>) -> Self {
        assert_eq!(log.len(), cauchy.len());
        assert!(log.len().is_multiple_of(2) && !log.is_empty());
        Self {
            n: log.len() / 2,
            log,
            cauchy,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log
    }

    pub fn cauchy_table(&self) -> &[f64] {
        &self.cauchy
    }

    /// `R` at index difference `i - j`.
    #[inline]
    pub fn log_weight(&self, i: usize, j: usize) -> f64 {
        self.log[self.index(i, j)]
    }

    /// `C` at index difference `i - j`.
    #[inline]
    pub fn cauchy_weight(&self, i: usize, j: usize) -> f64 {
        self.cauchy[self.index(i, j)]
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let m = 2 * self.n;
        (i + m - j % m) % m
    }

    /// Log-weighted integral at collocation node `i`.
    pub fn log_integral(&self, i: usize, samples: &[Complex64]) -> Complex64 {
        samples
            .iter()
            .enumerate()
            .map(|(j, &f)| f * self.log_weight(i, j))
            .sum()
    }

    /// Cauchy principal value integral at collocation node `i`.
    pub fn cauchy_integral(&self, i: usize, samples: &[Complex64]) -> Complex64 {
        samples
            .iter()
            .enumerate()
            .map(|(j, &f)| f * self.cauchy_weight(i, j))
            .sum()
    }
}
