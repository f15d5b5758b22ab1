//! Bessel, Neumann and Hankel functions of integer order and real argument.
//!
//! Three regimes, chosen by argument:
//!
//! * `x < 1`: power series. No cancellation, terms decay factorially.
//! * `1 <= x <= 25`: Miller's backward recurrence for `J_n`, normalized with
//!   `J_0 + 2 sum J_2k = 1`; `Y_0` and `Y_1` follow from Neumann's expansions
//!   in the same `J_n` values.
//! * `x > 25`: Hankel's asymptotic expansion for orders 0 and 1.
//!
//! Higher orders of `Y` use upward recurrence, which is stable for the
//! minimal-growth direction of `Y`. Higher orders of `J` always come from the
//! backward pass (or the series for small arguments).

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 1.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// `J_n(x)` for `x >= 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "bessel_j", x });
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if order <= 1 {
        let b = bessel01(x);
        return Ok(if order == 0 { b.j0 } else { b.j1 });
    }
    Ok(bessel_j_upto(order as usize, x)[order as usize])
}

/// `Y_n(x)` for `x > 0`.
pub fn bessel_y(order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "bessel_y", x });
    }
    let b = bessel01(x);
    Ok(match order {
        0 => b.y0,
        1 => b.y1,
        _ => upward_y(order as usize, x, b.y0, b.y1)[order as usize],
    })
}

/// `H_n^(1)(x) = J_n(x) + i Y_n(x)` for `x > 0`.
pub fn hankel1(order: u32, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "hankel1", x });
    }
    Ok(Complex64::new(bessel_j(order, x)?, bessel_y(order, x)?))
}

/// Values of `J_0, J_1, Y_0, Y_1` at one argument.
#[derive(Debug, Clone, Copy)]
pub struct Bessel01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bessel01 {
    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j1, self.y1)
    }
}

/// Orders 0 and 1 of `J` and `Y` together. Requires `x > 0`; this is the hot
/// path of the kernel assembly and does not validate its argument.
pub fn bessel01(x: f64) -> Bessel01 {
    debug_assert!(x > 0.0);
    if x < SERIES_MAX {
        series01(x)
    } else if x <= ASYMPTOTIC_MIN {
        let j = miller(1, x);
        neumann01(x, &j)
    } else {
        asymptotic01(x)
    }
}

/// `J_0(x), ..., J_nmax(x)`.
pub fn bessel_j_upto(nmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_MAX {
        return (0..=nmax).map(|n| series_j(n, x)).collect();
    }
    let mut j = miller(nmax, x);
    j.truncate(nmax + 1);
    j
}

/// `H_0^(1)(x), ..., H_nmax^(1)(x)` for `x > 0`.
pub fn hankel1_upto(nmax: usize, x: f64) -> Vec<Complex64> {
    let j = bessel_j_upto(nmax.max(1), x);
    let b = bessel01(x);
    let y = upward_y(nmax.max(1), x, b.y0, b.y1);
    (0..=nmax).map(|n| Complex64::new(j[n], y[n])).collect()
}

fn upward_y(nmax: usize, x: f64, y0: f64, y1: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    y.push(y1);
    for k in 1..nmax {
        let next = (2.0 * k as f64 / x) * y[k] - y[k - 1];
        y.push(next);
    }
    y.truncate(nmax + 1);
    y
}

fn series_j(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    for k in 1..60 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn series01(x: f64) -> Bessel01 {
    let half = 0.5 * x;
    let q = -half * half;
    let log_term = (half.ln() + EULER_GAMMA) * 2.0 / PI;

    // J0 and the harmonic-weighted companion sum for Y0.
    let mut t0 = 1.0;
    let mut j0 = 1.0;
    let mut s0 = 0.0;
    let mut harmonic = 0.0;
    // J1 and the Y1 companion, term k carries (x/2)^(2k+1)/(k!(k+1)!).
    let mut t1 = half;
    let mut j1 = half;
    let mut s1 = half; // psi(1) + psi(0) = 1
    for k in 1..40 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        harmonic += 1.0 / kf;
        j0 += t0;
        s0 -= harmonic * t0;
        t1 *= q / (kf * (kf + 1.0));
        j1 += t1;
        // psi(k+1) + psi(k) = 2 H_k + 1/(k+1)
        s1 += (2.0 * harmonic + 1.0 / (kf + 1.0)) * t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    let y0 = log_term * j0 + (2.0 / PI) * s0;
    let y1 = log_term * j1 - 2.0 / (PI * x) - s1 / PI;
    Bessel01 { j0, j1, y0, y1 }
}

/// Backward recurrence from a start order well above `max(nmax, x)`,
/// returning at least `nmax + 1` normalized values (and more when the
/// Neumann sums need them).
fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let top = nmax.max(x as usize);
    let mut start = top + 20 + (40.0 * top.max(1) as f64).sqrt() as usize;
    start += start % 2;
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300;
    const BIG: f64 = 1e250;
    for k in (1..=start).rev() {
        j[k - 1] = (2.0 * k as f64 / x) * j[k] - j[k + 1];
        if j[k - 1].abs() > BIG {
            for v in j[k - 1..].iter_mut() {
                *v /= BIG;
            }
        }
    }
    let mut norm = 0.0;
    for m in (1..=start / 2).rev() {
        norm += j[2 * m];
    }
    norm = j[0] + 2.0 * norm;
    for v in j.iter_mut() {
        *v /= norm;
    }
    j.truncate(start + 1);
    j
}

/// Neumann expansions of `Y_0` and `Y_1` in terms of `J_k`.
fn neumann01(x: f64, j: &[f64]) -> Bessel01 {
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let kmax = (j.len() - 2) / 2;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in (1..=kmax).rev() {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / kf;
        s1 += sign * (2.0 * kf + 1.0) * j[2 * k + 1] / (kf * (kf + 1.0));
    }
    let y0 = (2.0 / PI) * log_term * j[0] - (4.0 / PI) * s0;
    let y1 = -2.0 / (PI * x) * j[0] + (2.0 / PI) * (log_term - 1.0) * j[1] - (2.0 / PI) * s1;
    Bessel01 {
        j0: j[0],
        j1: j[1],
        y0,
        y1,
    }
}

fn asymptotic_pq(order: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // k odd contributes to Q, k even to P, with alternating signs.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn asymptotic01(x: f64) -> Bessel01 {
    let scale = (2.0 / (PI * x)).sqrt();
    let (p0, q0) = asymptotic_pq(0, x);
    let (p1, q1) = asymptotic_pq(1, x);
    let w0 = x - FRAC_PI_4;
    let w1 = x - FRAC_PI_2 - FRAC_PI_4;
    let (s0, c0) = w0.sin_cos();
    let (s1, c1) = w1.sin_cos();
    Bessel01 {
        j0: scale * (p0 * c0 - q0 * s0),
        j1: scale * (p1 * c1 - q1 * s1),
        y0: scale * (p0 * s0 + q0 * c0),
        y1: scale * (p1 * s1 + q1 * c1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent arbitrary-precision evaluation
    // (mpmath, 30 digits).
    const REF: &[(f64, f64, f64, f64, f64)] = &[
        // x, J0, J1, Y0, Y1
        (0.1, 0.99750156206604003, 0.049937526036242, -1.5342386513503668, -6.4589510947020266),
        (1.0, 0.76519768655796655, 0.44005058574493352, 0.088256964215676958, -0.78121282130028872),
        (5.0, -0.1775967713143383, -0.32757913759146522, -0.30851762524903378, 0.14786314339122684),
        (20.0, 0.16702466434058315, 0.066833124175850046, 0.062640596809383831, -0.1655116143625213),
        (60.0, -0.09147180408906187, 0.046598383758166318, 0.047358952209449399, 0.091869609369866895),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, j0, j1, y0, y1) in REF {
            let b = bessel01(x);
            for (got, want) in [(b.j0, j0), (b.j1, j1), (b.y0, y0), (b.y1, y1)] {
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1e-3),
                    "x={x}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_y(0, 0.0).is_err());
        assert!(bessel_y(1, -2.0).is_err());
        assert!(hankel1(0, 0.0).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
    }

    #[test]
    fn y1_small_argument_leading_term() {
        let z = 1e-6;
        let lead = bessel_y(1, z).unwrap() * z;
        assert!((lead + 2.0 / PI).abs() <= 1e-6 * 2.0 / PI);
    }

    #[test]
    fn wronskian() {
        for &x in &[0.5, 1.0, 5.0, 20.0] {
            let b = bessel01(x);
            let w = b.j1 * b.y0 - b.j0 * b.y1;
            assert!((w - 2.0 / (PI * x)).abs() <= 1e-12, "x={x}: {w}");
        }
    }

    #[test]
    fn wronskian_log_grid() {
        let mut x = 1e-3;
        while x < 100.0 {
            let b = bessel01(x);
            let w = b.j1 * b.y0 - b.j0 * b.y1;
            let want = 2.0 / (PI * x);
            assert!((w - want).abs() <= 1e-13 * want, "x={x}");
            x *= 1.13;
        }
    }

    #[test]
    fn regime_boundaries_are_continuous() {
        for &edge in &[SERIES_MAX, ASYMPTOTIC_MIN] {
            let lo = bessel01(edge * (1.0 - f64::EPSILON));
            let hi = bessel01(edge * (1.0 + f64::EPSILON));
            for (a, b) in [(lo.j0, hi.j0), (lo.j1, hi.j1), (lo.y0, hi.y0), (lo.y1, hi.y1)] {
                assert!((a - b).abs() < 1e-13, "edge {edge}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn first_zero_of_j0() {
        let x = 2.404825557695773;
        assert!(bessel_j(0, x).unwrap().abs() <= 1e-13);
    }

    #[test]
    fn first_zero_of_y0() {
        let x = 0.8935769662791675;
        assert!(bessel_y(0, x).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn hankel_large_argument_modulus() {
        let h = hankel1(0, 100.0).unwrap();
        let want = (2.0 / (PI * 100.0)).sqrt();
        assert!((h.norm() - want).abs() <= 5e-3 * want);
    }

    #[test]
    fn hankel1_is_minus_derivative_of_hankel0() {
        let x = 2.0;
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3] {
            let d = (hankel1(0, x + h).unwrap() - hankel1(0, x - h).unwrap()) / (2.0 * h);
            errs.push((d + hankel1(1, x).unwrap()).norm());
        }
        // central differences converge at second order
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
        assert!(errs[1] < 1e-5);
    }

    #[test]
    fn hankel_recurrence() {
        for &x in &[0.5, 1.0, 3.7, 12.0, 25.5, 50.0] {
            let h = hankel1_upto(31, x);
            for n in 1..=30 {
                let lhs = h[n + 1];
                let rhs = h[n] * (2.0 * n as f64 / x) - h[n - 1];
                assert!(
                    (lhs - rhs).norm() <= 1e-11 * lhs.norm(),
                    "x={x}, n={n}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn higher_order_j_matches_series() {
        for &x in &[1.5, 4.0, 9.0] {
            let j = bessel_j_upto(12, x);
            for n in 0..=12 {
                let s = series_j(n, x);
                // the series loses a few digits to cancellation at larger x
                let floor = if x > 5.0 { 1.0 } else { 1e-2 };
                assert!((j[n] - s).abs() <= 1e-13 * s.abs().max(floor), "x={x}, n={n}");
            }
        }
    }
}
