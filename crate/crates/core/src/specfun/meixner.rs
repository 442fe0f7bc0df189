//! Meixner-Pollaczek polynomials `P_m^{(λ)}(x, θ)`.

use num_complex::Complex64;
use serde::Serialize;

use super::hyp2f1;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MPPolyParams {
    pub lambda: f64,
    pub theta: f64,
}

impl MPPolyParams {
    pub fn new(lambda: f64, theta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain("MPPolyParams", format!("lambda = {lambda} must be > 0")));
        }
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::domain(
                "MPPolyParams",
                format!("theta = {theta} must lie in (0, π)"),
            ));
        }
        Ok(Self { lambda, theta })
    }
}

/// Recurrence route; the authoritative evaluation.
pub fn mp_poly(m: usize, p: MPPolyParams, x: f64) -> f64 {
    let (s, c) = p.theta.sin_cos();
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 2.0 * (x * s + p.lambda * c);
    for n in 1..m {
        let nf = n as f64;
        let next = (2.0 * (x * s + (nf + p.lambda) * c) * cur - (nf + 2.0 * p.lambda - 1.0) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[P_0, …, P_{m_max}]` at one point.
pub fn mp_poly_all(m_max: usize, p: MPPolyParams, x: f64) -> Vec<f64> {
    let (s, c) = p.theta.sin_cos();
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(1.0);
    if m_max == 0 {
        return out;
    }
    out.push(2.0 * (x * s + p.lambda * c));
    for n in 1..m_max {
        let nf = n as f64;
        let next =
            (2.0 * (x * s + (nf + p.lambda) * c) * out[n] - (nf + 2.0 * p.lambda - 1.0) * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Hypergeometric-route value with its discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpHypValue {
    pub value: f64,
    pub imag_residue: f64,
    pub rounding_bound: f64,
}

/// `(2λ)_m/m! · e^{imθ} · ₂F₁(−m, λ+ix; 2λ; 1−e^{−2iθ})`, real part.
pub fn mp_poly_hyp(m: usize, p: MPPolyParams, x: f64) -> Result<MpHypValue> {
    let g = 2.0 * p.lambda;
    let ratio: f64 = (0..m).map(|k| (g + k as f64) / (k as f64 + 1.0)).product();
    let z = 1.0 - Complex64::from_polar(1.0, -2.0 * p.theta);
    let f = hyp2f1(
        Complex64::new(-(m as f64), 0.0),
        Complex64::new(p.lambda, x),
        Complex64::new(g, 0.0),
        z,
    )?;
    let v = ratio * Complex64::from_polar(1.0, m as f64 * p.theta) * f.value;
    Ok(MpHypValue {
        value: v.re,
        imag_residue: v.im.abs(),
        rounding_bound: ratio * f.tail_bound,
    })
}
