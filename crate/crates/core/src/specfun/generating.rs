//! Generating-function identities used to build closed forms of the
//! coherent states, each paired with its defining series.

use num_complex::Complex64;

use super::{cpow, hyp1f1_tol, hyp2f1, MPPolyParams, I};
use crate::error::{Error, Result};
use crate::series::{SeriesEval, SeriesSummer, DEFAULT_TERM_CAP, DEFAULT_TOL};

fn check_bilinear(mu: f64, gamma: f64, theta1: f64, theta2: f64) -> Result<()> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain("mp_bilinear", format!("mu = {mu} must lie in (0, 1)")));
    }
    if !(gamma > 0.0) {
        return Err(Error::domain("mp_bilinear", format!("gamma = {gamma} must be > 0")));
    }
    MPPolyParams::new(gamma / 2.0, theta1)?;
    MPPolyParams::new(gamma / 2.0, theta2)?;
    Ok(())
}

/// Closed form of `Σ_m m!/(γ)_m μ^m P_m^{(γ/2)}(x,θ₁) P_m^{(γ/2)}(y,θ₂)`:
///
/// `(1−μe^{i(θ₁−θ₂)})^{−γ/2−iy} (1−μe^{i(θ₂−θ₁)})^{−γ/2−ix} (1−μe^{i(θ₁+θ₂)})^{i(x+y)}
///  · ₂F₁(γ/2+ix, γ/2+iy; γ; −4μ sinθ₁ sinθ₂ / |1−μe^{i(θ₁−θ₂)}|²)`.
pub fn mp_bilinear_closed(mu: f64, gamma: f64, x: f64, y: f64, theta1: f64, theta2: f64) -> Result<Complex64> {
    check_bilinear(mu, gamma, theta1, theta2)?;
    let h = gamma / 2.0;
    let d12 = 1.0 - mu * Complex64::from_polar(1.0, theta1 - theta2);
    let d21 = d12.conj();
    let sum = 1.0 - mu * Complex64::from_polar(1.0, theta1 + theta2);
    let z = -4.0 * mu * theta1.sin() * theta2.sin() / d12.norm_sqr();
    let f = hyp2f1(
        Complex64::new(h, x),
        Complex64::new(h, y),
        Complex64::new(gamma, 0.0),
        Complex64::new(z, 0.0),
    )?
    .require("mp_bilinear_closed")?
    .value;
    let pref = cpow(d12, Complex64::new(-h, -y)) * cpow(d21, Complex64::new(-h, -x)) * cpow(sum, I * (x + y));
    Ok(pref * f)
}

/// Truncated left side of [`mp_bilinear_closed`].
pub fn mp_bilinear_series(
    mu: f64,
    gamma: f64,
    x: f64,
    y: f64,
    theta1: f64,
    theta2: f64,
    tol: f64,
) -> Result<SeriesEval> {
    check_bilinear(mu, gamma, theta1, theta2)?;
    let h = gamma / 2.0;
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut q_prev, mut q) = (0.0, 1.0);
    let mut weight = 1.0; // m!/(γ)_m μ^m
    let mut s = SeriesSummer::new(tol, DEFAULT_TERM_CAP);
    let mut m = 0usize;
    loop {
        if s.add(Complex64::new(weight * p * q, 0.0)) {
            break;
        }
        let mf = m as f64;
        let pn = (2.0 * (x * s1 + (mf + h) * c1) * p - (mf + gamma - 1.0) * p_prev) / (mf + 1.0);
        let qn = (2.0 * (y * s2 + (mf + h) * c2) * q - (mf + gamma - 1.0) * q_prev) / (mf + 1.0);
        p_prev = p;
        p = pn;
        q_prev = q;
        q = qn;
        weight *= mu * (mf + 1.0) / (gamma + mf);
        m += 1;
    }
    s.eval().require("mp_bilinear_series")
}

fn check_laguerre_gen(t: Complex64, nu: f64, u: f64) -> Result<()> {
    if !(t.norm() < 1.0) {
        return Err(Error::domain("laguerre_gen", format!("|t| = {} must be < 1", t.norm())));
    }
    if !(nu > -1.0) || !(u >= 0.0) {
        return Err(Error::domain(
            "laguerre_gen",
            format!("need nu > -1 and u >= 0, got nu={nu}, u={u}"),
        ));
    }
    Ok(())
}

/// `(1−t)^{c−ν−1} (1−t+yt)^{−c} e^{−ut/(1−t)} ₁F₁(c; 1+ν; yut/((1−t)(1−t+yt)))`.
pub fn laguerre_gen_closed(t: Complex64, c: Complex64, nu: f64, y: Complex64, u: f64) -> Result<Complex64> {
    check_laguerre_gen(t, nu, u)?;
    let omt = 1.0 - t;
    let d = omt + y * t;
    if d.norm() == 0.0 {
        return Err(Error::domain("laguerre_gen_closed", "1 - t + y t vanishes".to_string()));
    }
    let f = hyp1f1_tol(c, Complex64::new(1.0 + nu, 0.0), y * u * t / (omt * d), DEFAULT_TOL)?
        .require("laguerre_gen_closed")?
        .value;
    Ok(cpow(omt, c - nu - 1.0) * cpow(d, -c) * (-u * t / omt).exp() * f)
}

/// `Σ_n tⁿ ₂F₁(−n, c; 1+ν; y) L_n^{(ν)}(u)`.
///
/// The polynomial coefficients `F_n = ₂F₁(−n, c; 1+ν; y)` come from the
/// contiguous relation in the first parameter,
/// `(1+ν+n) F_{n+1} = (2n + 1+ν − (c+n) y) F_n − n (1−y) F_{n−1}`
/// (a = −n in `(C−a)F(a−1) + (2a−C+(b−a)z)F(a) + a(z−1)F(a+1) = 0`), which
/// stays accurate where the explicit sums lose everything to cancellation.
pub fn laguerre_gen_series(t: Complex64, c: Complex64, nu: f64, y: Complex64, u: f64, tol: f64) -> Result<SeriesEval> {
    check_laguerre_gen(t, nu, u)?;
    let big_c = 1.0 + nu;
    let (mut l_prev, mut l) = (0.0, 1.0);
    let (mut f_prev, mut f) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut tn = Complex64::new(1.0, 0.0);
    let mut s = SeriesSummer::new(tol, DEFAULT_TERM_CAP);
    let mut n = 0usize;
    loop {
        if s.add(tn * f * l) {
            break;
        }
        let nf = n as f64;
        let ln = if n == 0 {
            1.0 + nu - u
        } else {
            ((2.0 * nf + 1.0 + nu - u) * l - (nf + nu) * l_prev) / (nf + 1.0)
        };
        let fn1 = ((2.0 * nf + big_c - (c + nf) * y) * f - nf * (1.0 - y) * f_prev) / (big_c + nf);
        l_prev = l;
        l = ln;
        f_prev = f;
        f = fn1;
        tn *= t;
        n += 1;
    }
    s.eval().require("laguerre_gen_series")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn bilinear_small_mu_limit() {
        let v = mp_bilinear_closed(1e-12, 2.5, 0.3, -0.8, 1.0, 2.0).unwrap();
        assert!((v - 1.0).norm() < 1e-10);
        let s = mp_bilinear_series(1e-12, 2.5, 0.3, -0.8, 1.0, 2.0, 1e-14).unwrap();
        assert!((s.value - 1.0).norm() < 1e-10);
    }

    #[test]
    fn bilinear_reference_values() {
        // series summed in 30-digit mpmath
        let mu = (-0.4f64).exp();
        let table = [
            (0.7, 0.7, FRAC_PI_3, FRAC_PI_3, 3.92721507486868235),
            (0.7, -0.4, FRAC_PI_3, FRAC_PI_3, 0.932746804554667233),
            (0.7, -0.4, FRAC_PI_3, FRAC_PI_4, 1.93376585779305460),
        ];
        for (x, y, t1, t2, want) in table {
            let want = Complex64::new(want, 0.0);
            let closed = mp_bilinear_closed(mu, 2.5, x, y, t1, t2).unwrap();
            let series = mp_bilinear_series(mu, 2.5, x, y, t1, t2, 1e-14).unwrap();
            assert!(rel(closed, want) < 1e-11, "closed {closed}");
            assert!(rel(series.value, want) < 1e-11, "series {}", series.value);
        }
    }

    #[test]
    fn laguerre_gen_reductions() {
        let c = Complex64::new(1.5, 0.8);
        let one = laguerre_gen_closed(Complex64::new(0.0, 0.0), c, 1.2, Complex64::new(0.3, 0.1), 0.9).unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        let t = Complex64::new(0.3, 0.2);
        let (nu, u) = (1.2, 0.9);
        let got = laguerre_gen_closed(t, c, nu, Complex64::new(0.0, 0.0), u).unwrap();
        let want = cpow(1.0 - t, Complex64::new(-1.0 - nu, 0.0)) * (-u * t / (1.0 - t)).exp();
        assert!(rel(got, want) < 1e-14);
    }

    #[test]
    fn laguerre_gen_reference_value() {
        let t = Complex64::from_polar(0.5, FRAC_PI_4);
        let c = Complex64::new(1.5, 0.8);
        let y = 1.0 - Complex64::from_polar(1.0, -2.0 * FRAC_PI_3);
        let want = Complex64::new(1.75611490590140373, -0.687522872923112520);
        let closed = laguerre_gen_closed(t, c, 1.2, y, 0.9).unwrap();
        let series = laguerre_gen_series(t, c, 1.2, y, 0.9, 1e-14).unwrap();
        assert!(rel(closed, want) < 1e-12, "{closed}");
        assert!(rel(series.value, want) < 1e-12, "{}", series.value);
    }

    #[test]
    fn domain_checks() {
        assert!(mp_bilinear_closed(1.0, 2.5, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(laguerre_gen_closed(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            1.0,
            Complex64::new(0.0, 0.0),
            1.0
        )
        .is_err());
    }
}
