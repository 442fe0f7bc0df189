//! Gauss hypergeometric function ₂F₁(a, b; c; z).
//!
//! Polynomial cases are summed exactly, choosing between the direct sum and
//! the `z → 1 − z` reflection by their rounding bounds. Non-terminating cases
//! use the Taylor series in `z` or in the Pfaff variable `z/(z−1)`, whichever
//! converges faster; for |z| ≥ 1.25 the connection formula to `1/z` comes
//! next, and the Euler integral is the last resort.

use num_complex::Complex64;

use super::hyp1f1::ROUNDING;
use super::{cpow, ln_gamma_any, nonpositive_integer, pochhammer, recip_gamma};
use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh_unit;
use crate::series::{SeriesEval, SeriesSummer, DEFAULT_TERM_CAP, DEFAULT_TOL};

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const C1: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Largest |z| accepted for a Taylor expansion.
const TAYLOR_RADIUS: f64 = 0.8;

pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<SeriesEval> {
    hyp2f1_tol(a, b, c, z, DEFAULT_TOL)
}

pub fn hyp2f1_tol(a: Complex64, b: Complex64, c: Complex64, z: Complex64, tol: f64) -> Result<SeriesEval> {
    let (a, b) = match (nonpositive_integer(a), nonpositive_integer(b)) {
        (None, Some(_)) => (b, a),
        (Some(ma), Some(mb)) if mb < ma => (b, a),
        _ => (a, b),
    };
    let degree = nonpositive_integer(a);
    if let Some(k) = nonpositive_integer(c) {
        match degree {
            Some(m) if m <= k => {}
            _ => return Err(Error::domain("hyp2f1", format!("c = {c} is a pole"))),
        }
    }
    if let Some(m) = degree {
        return Ok(terminating(m, b, c, z));
    }
    if z == C0 {
        return Ok(SeriesEval::exact(C1, 1));
    }

    let w = z / (z - 1.0);
    let mut last = None;
    if z.norm() <= TAYLOR_RADIUS && z.norm() <= w.norm() {
        let t = taylor(a, b, c, z, tol);
        if t.converged {
            return Ok(t);
        }
        last = Some(t);
    } else if w.norm() <= TAYLOR_RADIUS {
        // Pfaff: F(a,b;c;z) = (1−z)^{−a} F(a, c−b; c; z/(z−1))
        let t = taylor(a, c - b, c, w, tol);
        if t.converged {
            return Ok(t.scaled(cpow(1.0 - z, -a)));
        }
        last = Some(t);
    }
    let on_cut = z.im == 0.0 && z.re >= 1.0;
    if !on_cut && z.norm() * TAYLOR_RADIUS >= 1.0 {
        if let Some(v) = inverse_z(a, b, c, z, tol) {
            return Ok(v);
        }
    }
    if !on_cut {
        if let Some(v) = euler_integral(a, b, c, z, tol) {
            return Ok(v);
        }
    }
    match last {
        Some(t) => Err(Error::NonConvergence {
            func: "hyp2f1",
            terms: t.terms_used,
            tail_bound: t.tail_bound,
        }),
        None => Err(Error::domain(
            "hyp2f1",
            format!("z = {z} outside the supported region for a={a}, b={b}, c={c}"),
        )),
    }
}

/// Connection formula to `1/z`, for `b − a` not an integer:
///
/// `F(a,b;c;z) = Γ(c)Γ(b−a)/(Γ(b)Γ(c−a)) (−z)^{−a} F(a, a−c+1; a−b+1; 1/z)
///             + Γ(c)Γ(a−b)/(Γ(a)Γ(c−b)) (−z)^{−b} F(b, b−c+1; b−a+1; 1/z)`.
fn inverse_z(a: Complex64, b: Complex64, c: Complex64, z: Complex64, tol: f64) -> Option<SeriesEval> {
    let d = b - a;
    if d.im == 0.0 && d.re.fract() == 0.0 {
        return None;
    }
    let zi = 1.0 / z;
    let ln_mz = (-z).ln();
    let f1 = hyp2f1_tol(a, a - c + 1.0, 1.0 - d, zi, tol)
        .ok()
        .filter(|f| f.converged)?;
    let f2 = hyp2f1_tol(b, b - c + 1.0, 1.0 + d, zi, tol)
        .ok()
        .filter(|f| f.converged)?;
    let lg_c = ln_gamma_any(c);
    let k1 = (lg_c + ln_gamma_any(d) - a * ln_mz).exp() * recip_gamma(b) * recip_gamma(c - a);
    let k2 = (lg_c + ln_gamma_any(-d) - b * ln_mz).exp() * recip_gamma(a) * recip_gamma(c - b);
    let (t1, t2) = (k1 * f1.value, k2 * f2.value);
    let value = t1 + t2;
    let err = k1.norm() * f1.tail_bound + k2.norm() * f2.tail_bound + ROUNDING * (t1.norm() + t2.norm());
    if !(value.norm().is_finite() && err <= tol * value.norm()) {
        return None;
    }
    Some(SeriesEval {
        value,
        terms_used: f1.terms_used + f2.terms_used,
        tail_bound: err,
        converged: true,
    })
}

/// Direct sum of F(−m, b; c; z); returns (value, Σ|terms|).
fn polynomial(m: usize, b: Complex64, c: Complex64, z: Complex64) -> (Complex64, f64) {
    let mut sum = C1;
    let mut abs = 1.0;
    let mut t = C1;
    for n in 0..m {
        let nf = n as f64;
        t *= (nf - m as f64) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += t;
        abs += t.norm();
    }
    (sum, abs)
}

fn terminating(m: usize, b: Complex64, c: Complex64, z: Complex64) -> SeriesEval {
    let (direct, direct_abs) = polynomial(m, b, c, z);
    let direct_bound = direct_abs;

    // F(−m,b;c;z) = (c−b)_m/(c)_m · F(−m, b; b−c−m+1; 1−z)
    let c2 = b - c - (m as f64) + 1.0;
    let reflectable = match nonpositive_integer(c2) {
        Some(k) => k >= m,
        None => true,
    };
    if reflectable && m > 0 {
        let pref = pochhammer(c - b, m) / pochhammer(c, m);
        let (refl, refl_abs) = polynomial(m, b, c2, 1.0 - z);
        let refl_bound = refl_abs * pref.norm();
        if refl_bound < direct_bound && refl_bound.is_finite() {
            return SeriesEval {
                value: pref * refl,
                terms_used: m + 1,
                tail_bound: ROUNDING * refl_bound,
                converged: true,
            };
        }
    }
    SeriesEval {
        value: direct,
        terms_used: m + 1,
        tail_bound: ROUNDING * direct_bound,
        converged: true,
    }
}

fn taylor(a: Complex64, b: Complex64, c: Complex64, z: Complex64, tol: f64) -> SeriesEval {
    let mut s = SeriesSummer::new(tol, DEFAULT_TERM_CAP);
    let mut t = C1;
    let mut n = 0.0;
    while !s.add(t) {
        t *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        n += 1.0;
    }
    let mut e = s.eval();
    let rounding = ROUNDING * s.abs_sum();
    e.tail_bound = e.tail_bound.max(rounding);
    if !(e.value.norm().is_finite() && rounding <= tol * e.value.norm()) {
        e.converged = false;
    }
    e
}

/// `Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt`, using the
/// symmetry in (a, b) to satisfy `Re c > Re b > 0` when possible.
fn euler_integral(a: Complex64, b: Complex64, c: Complex64, z: Complex64, tol: f64) -> Option<SeriesEval> {
    let ok = |b: Complex64| c.re > b.re && b.re > 0.0;
    let (a, b) = if ok(b) {
        (a, b)
    } else if ok(a) {
        (b, a)
    } else {
        return None;
    };
    let bm1 = b - 1.0;
    let cbm1 = c - b - 1.0;
    let r = tanh_sinh_unit(
        |t, omt| (bm1 * t.ln() + cbm1 * omt.ln() - a * (1.0 - z * t).ln()).exp(),
        0.1 * tol,
        10,
    );
    if !r.converged {
        return None;
    }
    let pref = (ln_gamma_any(c) - ln_gamma_any(b) - ln_gamma_any(c - b)).exp();
    Some(SeriesEval {
        value: pref * r.value,
        terms_used: r.evals,
        tail_bound: pref.norm() * r.error,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn elementary_closed_forms() {
        // F(1,1;2;z) = −ln(1−z)/z
        for &z in &[c(0.3, 0.1), c(-0.7, 0.0), c(-3.0, 0.0), c(0.5, -0.6)] {
            let want = -(1.0 - z).ln() / z;
            let got = hyp2f1(C1, C1, c(2.0, 0.0), z).unwrap().value;
            assert!(close(got, want, 1e-12), "z={z}: {got} vs {want}");
        }
        // F(a,b;b;z) = (1−z)^{−a}
        let a = c(0.4, 1.3);
        let z = c(-0.45, 0.2);
        let got = hyp2f1(a, c(1.1, 0.0), c(1.1, 0.0), z).unwrap().value;
        assert!(close(got, cpow(1.0 - z, -a), 1e-13));
    }

    #[test]
    fn pole_and_cut() {
        assert!(matches!(
            hyp2f1(c(0.5, 0.0), C1, c(-1.0, 0.0), c(0.2, 0.0)),
            Err(Error::Domain { .. })
        ));
        assert!(hyp2f1(c(0.5, 0.0), C1, c(1.5, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn polynomial_with_reflection() {
        // Large m, |z| = 2 sin θ: the reflected sum keeps full accuracy.
        let m = 40usize;
        let b = c(1.25, 0.7);
        let cc = c(2.5, 0.0);
        let z = 1.0 - Complex64::from_polar(1.0, -2.0 * std::f64::consts::FRAC_PI_3);
        let got = hyp2f1(c(-(m as f64), 0.0), b, cc, z).unwrap();
        let want = c(REF_POLY.0, REF_POLY.1);
        assert!(close(got.value, want, 1e-11), "{} vs {want}", got.value);
    }

    // F(−40, 1.25+0.7i; 2.5; 1−e^{−2πi/3})
    const REF_POLY: (f64, f64) = (-0.01202422757582433, 0.020826573083098494);

    #[test]
    fn reference_values() {
        // frozen from 40-digit mpmath
        let table = [
            (
                c(0.75, 0.5),
                c(0.75, 0.5),
                c(1.5, 0.0),
                c(-2.0, 0.0),
                c(0.6350471452463946, -0.3887447097406948),
            ),
            (
                c(0.75, 0.35),
                c(0.75, 0.35),
                c(1.5, 0.0),
                c(-400.0, 0.0),
                c(-0.028672079121548878, -0.04926348063709157),
            ),
            (
                c(1.75, -1.0),
                c(1.75, -1.0),
                c(3.5, 0.0),
                c(-35.0, 0.0),
                c(-0.024492309185775978, -0.011588190304792871),
            ),
            (
                c(0.9, 3.0),
                c(0.9, -2.0),
                c(1.8, 0.0),
                c(-0.6, 0.0),
                c(0.0126399713822519, -0.0030263330147332363),
            ),
            (
                c(0.7, 0.2),
                c(1.3, -0.4),
                c(2.1, 0.3),
                c(0.5, 0.5),
                c(1.2253915437944227, 0.40347162186207325),
            ),
            (
                c(0.7, 0.2),
                c(1.3, -0.4),
                c(2.1, 0.3),
                c(-1.5, 2.0),
                c(0.5109880319441614, 0.24921161349574794),
            ),
            (
                c(1.0, 1.5),
                c(1.0, 1.5),
                c(2.0, 0.0),
                c(-10000.0, 0.0),
                c(0.0026753403329792583, -0.008032557997502235),
            ),
        ];
        for (a, b, cc, z, want) in table {
            let got = hyp2f1(a, b, cc, z).unwrap();
            assert!(
                close(got.value, want, 1e-11),
                "2F1({a},{b};{cc};{z}) = {} vs {want}",
                got.value
            );
        }
    }

    #[test]
    fn outside_the_unit_disk() {
        // 40-digit mpmath
        let table = [
            (
                c(0.9, -2.0),
                c(0.9, 3.0),
                1.8,
                c(-12.462701166251113, 0.0),
                c(0.00046271718565782423, -0.0016665057317480321),
            ),
            (
                c(1.25, 0.7),
                c(1.25, 0.7),
                2.5,
                c(-3.0, 0.0),
                c(0.26286307618352654, -0.3839043016578042),
            ),
            (
                c(0.75, 0.5),
                c(0.75, 0.5),
                1.5,
                c(-2.0, 0.0),
                c(0.63504714524639464, -0.38874470974069483),
            ),
            (
                c(1.75, -1.5),
                c(0.4, 2.2),
                3.5,
                c(-2.0, 1.5),
                c(0.02701060182911587, -0.037702725892665623),
            ),
        ];
        for (a, b, cc, z, want) in table {
            let got = hyp2f1(a, b, c(cc, 0.0), z).unwrap().value;
            assert!(
                (got - want).norm() < 1e-11 * want.norm(),
                "{a} {b} {cc} {z}: {got} vs {want}"
            );
        }
    }
}
