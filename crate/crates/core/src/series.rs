//! Truncated infinite series with a geometric tail certificate.
//!
//! A series is declared converged once three consecutive terms are below
//! `tol * |partial sum|` and the geometric tail estimate `|term| / (1 - r)`,
//! with `r` the most recent term ratio, is below `tol * max(floor, |sum|)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the number of terms of any single series.
pub const DEFAULT_TERM_CAP: usize = 10_000;

/// Default tolerance for special-function evaluations.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default tolerance for composite identities.
pub const COMPOSITE_TOL: f64 = 1e-10;

/// Outcome of an infinite-series (or adaptive quadrature) evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: Complex64,
    pub terms_used: usize,
    /// Estimated magnitude of the neglected tail.
    pub tail_bound: f64,
    pub converged: bool,
}

impl SeriesEval {
    /// A finite sum with nothing neglected.
    pub fn exact(value: Complex64, terms_used: usize) -> Self {
        SeriesEval {
            value,
            terms_used,
            tail_bound: 0.0,
            converged: true,
        }
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        SeriesEval {
            value: self.value * factor,
            tail_bound: self.tail_bound * factor.norm(),
            ..self
        }
    }

    /// Converts a non-converged evaluation into an error.
    pub fn require(self, func: &'static str) -> Result<Self> {
        if self.converged && self.value.re.is_finite() && self.value.im.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                func,
                terms: self.terms_used,
                tail_bound: self.tail_bound,
            })
        }
    }
}

/// Incremental summation with the convergence rule described in the module docs.
#[derive(Debug, Clone)]
pub struct SeriesSummer {
    tol: f64,
    cap: usize,
    floor: f64,
    sum: Complex64,
    abs_sum: f64,
    terms: usize,
    small_run: usize,
    last_nonzero: Option<(usize, f64)>,
    ratio: f64,
    tail: f64,
    converged: bool,
}

impl SeriesSummer {
    pub fn new(tol: f64, cap: usize) -> Self {
        SeriesSummer {
            tol,
            cap,
            floor: 0.0,
            sum: Complex64::new(0.0, 0.0),
            abs_sum: 0.0,
            terms: 0,
            small_run: 0,
            last_nonzero: None,
            ratio: f64::INFINITY,
            tail: f64::INFINITY,
            converged: false,
        }
    }

    /// Absolute scale below which terms count as negligible even if the sum is tiny.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    /// Adds a term. Returns `true` once the series has converged or the cap is reached.
    pub fn add(&mut self, term: Complex64) -> bool {
        let mag = term.norm();
        let idx = self.terms;
        self.sum += term;
        self.abs_sum += mag;
        self.terms += 1;

        if mag > 0.0 {
            if let Some((prev_idx, prev_mag)) = self.last_nonzero {
                let gap = (idx - prev_idx) as f64;
                self.ratio = (mag / prev_mag).powf(1.0 / gap);
            }
            self.last_nonzero = Some((idx, mag));
        }
        let recent = self.last_nonzero.map_or(0.0, |(_, m)| m);
        self.tail = if recent == 0.0 {
            0.0
        } else if self.ratio < 1.0 {
            recent / (1.0 - self.ratio)
        } else {
            f64::INFINITY
        };

        let scale = self.sum.norm().max(self.floor);
        if mag <= self.tol * scale {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        if self.small_run >= 3 && self.tail <= self.tol * scale.max(f64::MIN_POSITIVE) {
            self.converged = true;
        }
        self.converged || self.terms >= self.cap
    }

    /// Adds a term whose remaining tail is bounded by `certified_tail`.
    pub fn add_certified(&mut self, term: Complex64, certified_tail: f64) -> bool {
        self.sum += term;
        self.abs_sum += term.norm();
        self.terms += 1;
        self.tail = certified_tail;
        let scale = self.sum.norm().max(self.floor);
        if certified_tail <= self.tol * scale {
            self.converged = true;
        }
        self.converged || self.terms >= self.cap
    }

    pub fn sum(&self) -> Complex64 {
        self.sum
    }

    /// Sum of term magnitudes; `abs_sum / |sum|` measures cancellation.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn eval(&self) -> SeriesEval {
        SeriesEval {
            value: self.sum,
            terms_used: self.terms,
            tail_bound: if self.tail.is_finite() { self.tail } else { f64::MAX },
            converged: self.converged,
        }
    }
}

/// Relative error `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: Complex64, b: Complex64, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Double-double quotient accurate to the full ~106-bit precision.
///
/// `twofloat`'s `TwoFloat / TwoFloat` loses the low word (its reciprocal
/// residual is formed without a fused multiply-add); dividing by the `f64`
/// high part and correcting with the exact remainder avoids that.
pub(crate) fn dd_div(a: twofloat::TwoFloat, b: twofloat::TwoFloat) -> twofloat::TwoFloat {
    let q1 = a / b.hi();
    let r = a - q1 * b;
    q1 + r / b.hi()
}

/// Complex double-double with just the arithmetic a series recurrence needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdComplex {
    pub re: twofloat::TwoFloat,
    pub im: twofloat::TwoFloat,
}

impl DdComplex {
    pub fn new(z: Complex64) -> Self {
        DdComplex {
            re: z.re.into(),
            im: z.im.into(),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.into(), self.im.into())
    }

    /// Modulus to double precision.
    pub fn norm(self) -> f64 {
        self.re.hi().hypot(self.im.hi())
    }

    pub fn add_real(self, x: f64) -> Self {
        DdComplex {
            re: self.re + x,
            im: self.im,
        }
    }
}

impl std::ops::Add for DdComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DdComplex {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl std::ops::Mul for DdComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DdComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl std::ops::Div for DdComplex {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let d = o.re * o.re + o.im * o.im;
        DdComplex {
            re: dd_div(self.re * o.re + self.im * o.im, d),
            im: dd_div(self.im * o.re - self.re * o.im, d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dd_div_keeps_low_word() {
        use twofloat::TwoFloat;
        let q = dd_div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        // 1/3 − fl(1/3) = 1/(3·2^54) exactly
        assert_eq!(q.hi(), 1.0 / 3.0);
        let want = 1.0 / (3.0 * 2f64.powi(54));
        assert!((q.lo() - want).abs() < 1e-32, "{:e}", q.lo());
    }

    #[test]
    fn dd_complex_division_round_trips() {
        let a = DdComplex::new(Complex64::new(1.0, 2.0));
        let b = DdComplex::new(Complex64::new(3.0, -7.0));
        let back = (a / b) * b;
        let err = (back.re - a.re).hi().abs() + (back.im - a.im).hi().abs();
        assert!(err < 1e-30, "{err:e}");
    }

    #[test]
    fn geometric_series_converges_with_valid_tail() {
        let mut s = SeriesSummer::new(1e-12, DEFAULT_TERM_CAP);
        let mut t = 1.0;
        while !s.add(c(t)) {
            t *= 0.5;
        }
        let e = s.eval();
        assert!(e.converged);
        assert!((e.value.re - 2.0).abs() < 1e-11);
        assert!(e.tail_bound <= 1e-12 * e.value.norm().max(1.0));
    }

    #[test]
    fn single_small_term_does_not_stop_summation() {
        // 1, 1e-20, 0.5, 0.25, ... must not stop at the accidental tiny term.
        let mut s = SeriesSummer::new(1e-12, DEFAULT_TERM_CAP);
        s.add(c(1.0));
        assert!(!s.add(c(1e-20)));
        let mut t = 0.5;
        while !s.add(c(t)) {
            t *= 0.5;
        }
        assert!((s.sum().re - 2.0).abs() < 1e-11);
    }

    #[test]
    fn vanishing_alternate_terms_use_gap_ratio() {
        // Terms 4^-k at even indices only.
        let mut s = SeriesSummer::new(1e-12, DEFAULT_TERM_CAP);
        let mut k = 0;
        loop {
            let t = if k % 2 == 0 { 0.25f64.powi(k / 2) } else { 0.0 };
            if s.add(c(t)) {
                break;
            }
            k += 1;
        }
        assert!(s.eval().converged);
        assert!((s.sum().re - 4.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn cap_hit_is_reported() {
        let mut s = SeriesSummer::new(1e-12, 50);
        let mut n = 1.0;
        while !s.add(c(1.0 / n)) {
            n += 1.0;
        }
        let e = s.eval();
        assert!(!e.converged);
        assert_eq!(e.terms_used, 50);
        assert!(matches!(e.require("harmonic"), Err(Error::NonConvergence { .. })));
    }
}
