//! Complex-parameter special functions.

mod bessel;
mod gamma;
mod generating;
mod hyp1f1;
mod hyp2f1;
mod laguerre;
mod meixner;

use num_complex::Complex64;

pub use bessel::{bessel_i, bessel_i_reduced, ln_bessel_i, BESSEL_ASYMPTOTIC_SWITCH};
pub use gamma::{
    abs_gamma_sq, clear_coefficient_perturbation, gamma, gamma_real, inject_coefficient_perturbation, ln_gamma_real,
    log_gamma, LANCZOS_COEFFS,
};
pub use generating::{laguerre_gen_closed, laguerre_gen_series, mp_bilinear_closed, mp_bilinear_series};
pub use hyp1f1::{hyp1f1, hyp1f1_tol};
pub use hyp2f1::{hyp2f1, hyp2f1_tol};
pub(crate) use laguerre::laguerre_all_dd;
pub use laguerre::{laguerre, laguerre_all};
pub use meixner::{mp_poly, mp_poly_all, mp_poly_hyp, MPPolyParams, MpHypValue};

pub(crate) use gamma::{ln_gamma_any, recip_gamma};

/// Complex unit.
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Rising factorial `(a)_m = a (a+1) ... (a+m-1)`, by direct product.
pub fn pochhammer(a: Complex64, m: usize) -> Complex64 {
    (0..m).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

/// Real rising factorial.
pub fn pochhammer_real(a: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Principal branch `base^exponent = exp(exponent · Log base)`.
pub fn cpow(base: Complex64, exponent: Complex64) -> Complex64 {
    if base == Complex64::new(0.0, 0.0) {
        return if exponent.re > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        };
    }
    (exponent * base.ln()).exp()
}

/// `Some(m)` when `z == -m` for a non-negative integer `m`.
pub(crate) fn nonpositive_integer(z: Complex64) -> Option<usize> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 && z.re > -1e9 {
        Some((-z.re) as usize)
    } else {
        None
    }
}
