//! Modified Bessel function of the first kind, real order and argument.
//!
//! Below [`BESSEL_ASYMPTOTIC_SWITCH`] the ascending series is used (all terms
//! positive, so it is cancellation-free); above it, the Hankel expansion
//! `e^z/√(2πz) Σ (−1)^k a_k(ν) z^{−k}` with the exponentially small branch
//! dropped. Values are carried as logarithms so large arguments never
//! overflow internally.

use super::ln_gamma_real;
use crate::error::{Error, Result};

pub const BESSEL_ASYMPTOTIC_SWITCH: f64 = 30.0;

/// `ln I_ν(z)` for `ν > −1`, `z > 0`.
pub fn ln_bessel_i(nu: f64, z: f64) -> Result<f64> {
    if !(nu > -1.0) || !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "bessel_i",
            format!("need nu > -1 and z > 0, got nu={nu}, z={z}"),
        ));
    }
    if z < BESSEL_ASYMPTOTIC_SWITCH {
        ln_series(nu, z)
    } else {
        Ok(ln_hankel(nu, z))
    }
}

fn ln_series(nu: f64, z: f64) -> Result<f64> {
    let s = reduced_sum(nu, z * z / 4.0)?;
    Ok(nu * (z / 2.0).ln() - ln_gamma_real(nu + 1.0)? + s.ln())
}

fn ln_hankel(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut sum = 1.0;
    let mut t = 1.0;
    let mut last = 1.0_f64;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -t * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= last || next == 0.0 {
            break;
        }
        t = next;
        last = t.abs();
        sum += t;
        if last < 1e-17 * sum.abs() {
            break;
        }
    }
    z - 0.5 * (2.0 * std::f64::consts::PI * z).ln() + sum.ln()
}

/// `I_ν(z)`; overflow is reported rather than returned as infinity.
pub fn bessel_i(nu: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let l = ln_bessel_i(nu, z)?;
    if l > 709.0 {
        return Err(Error::Overflow {
            func: "bessel_i",
            log_value: l,
        });
    }
    Ok(l.exp())
}

/// `Σ_k w^k / (k! Γ(ν+k+1)) = (z/2)^{−ν} I_ν(z)` with `w = z²/4`; finite at
/// `w = 0`, where it equals `1/Γ(ν+1)`.
pub fn bessel_i_reduced(nu: f64, w: f64) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(Error::domain("bessel_i_reduced", format!("w = {w} must be >= 0")));
    }
    let z = 2.0 * w.sqrt();
    if z < BESSEL_ASYMPTOTIC_SWITCH {
        Ok(reduced_sum(nu, w)? * (-ln_gamma_real(nu + 1.0)?).exp())
    } else {
        let l = ln_bessel_i(nu, z)? - nu * (z / 2.0).ln();
        if l > 709.0 {
            return Err(Error::Overflow {
                func: "bessel_i_reduced",
                log_value: l,
            });
        }
        Ok(l.exp())
    }
}

/// `Σ_k w^k / (k! (ν+1)_k)`.
fn reduced_sum(nu: f64, w: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut t = 1.0;
    for k in 1..2000 {
        let kf = k as f64;
        t *= w / (kf * (nu + kf));
        sum += t;
        if t < 1e-17 * sum && kf > w.sqrt() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        func: "bessel_i",
        terms: 2000,
        tail_bound: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_values_both_regimes() {
        // ln I_ν(z), 40-digit mpmath
        let table = [
            (0.8, 0.5, -1.003442099895986),
            (1.5, 10.0, 7.824408407159666),
            (0.8, 29.9, 27.275497847773554),
            (1.5, 30.5, 27.83886170472105),
            (0.8, 120.0, 116.68568377119145),
            (2.5, 800.0, 795.7350032592169),
        ];
        for (nu, z, want) in table {
            let got = ln_bessel_i(nu, z).unwrap();
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "nu={nu} z={z}: {got}"
            );
        }
    }

    #[test]
    fn switchover_is_continuous() {
        for &nu in &[0.0, 0.8, 1.3, 2.5] {
            let series = ln_series(nu, BESSEL_ASYMPTOTIC_SWITCH).unwrap();
            let hankel = ln_hankel(nu, BESSEL_ASYMPTOTIC_SWITCH);
            assert!(
                (series - hankel).abs() < 1e-13 * hankel,
                "nu={nu}: {series} vs {hankel}"
            );
        }
    }

    #[test]
    fn reduced_form() {
        let table = [
            (0.8, 0.0, 1.0736712740308343),
            (1.5, 2.25, 1.6871450967056874),
            (0.8, 200.0, 17194104965.1054),
        ];
        for (nu, w, want) in table {
            let got = bessel_i_reduced(nu, w).unwrap();
            assert!(((got - want) / want).abs() < 1e-13, "nu={nu} w={w}: {got}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(bessel_i(0.5, 1000.0), Err(Error::Overflow { .. })));
        assert!(bessel_i(0.5, -1.0).is_err());
    }
}
