//! Complex log-gamma: Lanczos approximation (g = 7, nine coefficients) for
//! moderate |z|, Stirling series beyond [`STIRLING_SWITCH`].
//!
//! The Lanczos formula with these coefficients drifts to ~2e-13 absolute
//! error in `ln Γ` once |Im z| reaches a few tens, while eight Stirling
//! terms are below 1e-16 for |z| ≥ 8. Together they keep the absolute error
//! of `ln Γ` (= relative error of `Γ`) near 1e-14 on `Re z > 0`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

/// Lanczos coefficients for g = 7, n = 9.
pub const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Fault injection for mutation testing: one coefficient scaled by (1 + delta).
static PERTURBED_INDEX: AtomicUsize = AtomicUsize::new(usize::MAX);
static PERTURBATION_BITS: AtomicU64 = AtomicU64::new(0);

/// Scales one Lanczos coefficient by `1 + relative` for the rest of the process.
///
/// Only meant for mutation tests of the verification suites; every gamma
/// evaluation after this call is deliberately wrong.
pub fn inject_coefficient_perturbation(index: usize, relative: f64) {
    assert!(index < LANCZOS_COEFFS.len(), "no Lanczos coefficient {index}");
    PERTURBATION_BITS.store(relative.to_bits(), Ordering::SeqCst);
    PERTURBED_INDEX.store(index, Ordering::SeqCst);
}

pub fn clear_coefficient_perturbation() {
    PERTURBED_INDEX.store(usize::MAX, Ordering::SeqCst);
}

#[inline]
fn coeff(i: usize, perturbed: usize) -> f64 {
    if i == perturbed {
        LANCZOS_COEFFS[i] * (1.0 + f64::from_bits(PERTURBATION_BITS.load(Ordering::Relaxed)))
    } else {
        LANCZOS_COEFFS[i]
    }
}

fn lanczos_ln(z: Complex64) -> Complex64 {
    // valid for Re z >= 1/2
    let perturbed = PERTURBED_INDEX.load(Ordering::Relaxed);
    let zm1 = z - 1.0;
    let mut series = Complex64::new(coeff(0, perturbed), 0.0);
    for i in 1..LANCZOS_COEFFS.len() {
        series += coeff(i, perturbed) / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t + series.ln()
}

pub const STIRLING_SWITCH: f64 = 8.0;

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling_ln(z: Complex64) -> Complex64 {
    let w = 1.0 / (z * z);
    let mut corr = Complex64::new(0.0, 0.0);
    for &c in STIRLING_COEFFS.iter().rev() {
        corr = corr * w + c;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr / z
}

/// `ln Γ(z)` for `Re z >= 1/2`.
fn ln_gamma_core(z: Complex64) -> Complex64 {
    if z.norm() >= STIRLING_SWITCH {
        stirling_ln(z)
    } else {
        lanczos_ln(z)
    }
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        ln_gamma_core(z)
    } else {
        ln_gamma_core(z + 1.0) - z.ln()
    }
}

/// Principal-branch `ln Γ(z)` for `Re z > 0`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::domain("log_gamma", format!("requires Re z > 0, got {z}")));
    }
    Ok(ln_gamma_right(z))
}

/// `Γ(z)` for `Re z > 0`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    log_gamma(Complex64::new(x, 0.0)).map(|l| l.re)
}

/// `Γ(x)` for real `x > 0`.
pub fn gamma_real(x: f64) -> Result<f64> {
    ln_gamma_real(x).map(f64::exp)
}

/// `|Γ(ν + ix)|²` for `ν > 0`.
pub fn abs_gamma_sq(nu: f64, x: f64) -> Result<f64> {
    log_gamma(Complex64::new(nu, x)).map(|l| (2.0 * l.re).exp())
}

/// `ln Γ(z)` modulo 2πi on the whole plane away from the poles.
///
/// Uses the reflection formula for `Re z < 1/2`.
pub(crate) fn ln_gamma_any(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        ln_gamma_core(z)
    } else {
        Complex64::new(PI.ln(), 0.0) - (PI * z).sin().ln() - ln_gamma_core(1.0 - z)
    }
}

/// `1/Γ(z)` on the whole plane; exactly zero at the poles.
pub(crate) fn recip_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma_any(z)).exp()
}
