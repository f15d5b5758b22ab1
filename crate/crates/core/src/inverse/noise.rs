//! Multiplicative uniform noise on far-field data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forward::{FarField, PhaselessFarField};

fn check_level(delta: f64) -> Result<()> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Config(format!("noise level must be nonnegative, got {delta}")));
    }
    Ok(())
}

/// `u (1 + delta (eta1 + i eta2))` with `eta` uniform on `[-1, 1]`. Per
/// direction the `phi` sample is drawn before the `psi` sample.
pub fn inject_noise(data: &FarField, delta: f64, seed: u64) -> Result<FarField> {
    check_level(delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = data.clone();
    for l in 0..data.len() {
        for v in [&mut out.phi_inf[l], &mut out.psi_inf[l]] {
            let eta = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            *v *= Complex64::new(1.0, 0.0) + delta * eta;
        }
    }
    Ok(out)
}

/// `|u|^2 (1 + delta eta)` with `eta` uniform on `[-1, 1]`.
pub fn inject_noise_phaseless(
    data: &PhaselessFarField,
    delta: f64,
    seed: u64,
) -> Result<PhaselessFarField> {
    check_level(delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = data.clone();
    for l in 0..data.len() {
        for v in [&mut out.phi_sq[l], &mut out.psi_sq[l]] {
            *v *= 1.0 + delta * rng.random_range(-1.0..=1.0);
        }
    }
    Ok(out)
}
