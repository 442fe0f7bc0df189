//! Generalized coherent states `|x, ε⟩_{θ,γ,β}` with Meixner-Pollaczek
//! coefficients: weights, normalization, wavefunctions, overlaps and the
//! labelling measure.
//!
//! Each quantity has a series route (the defining superposition, truncated
//! with a tail certificate) and a closed route (hypergeometric forms); the
//! two share no code beyond the special functions, which is what makes their
//! agreement a meaningful check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gk_model::GKParams;
use crate::quadrature::{exponential_tail_cutoff, Rule, PANEL_ORDER};
use crate::series::{SeriesEval, SeriesSummer};
use crate::specfun::{
    cpow, hyp1f1, hyp2f1, ln_gamma_real, log_gamma, mp_bilinear_closed, mp_bilinear_series, MPPolyParams,
};

/// Hard cap on wavefunction-series terms.
pub const WAVEFUNCTION_TERM_CAP: usize = 2_000;

/// Phase (radians) of |ψ|² allowed across one quadrature panel in [`CoherentState::l2_norm_sq`].
const PANEL_WIDTH_PHASE: f64 = 6.0;

/// Allowed imaginary part of quantities that are real by construction, relative to their modulus.
pub const REALNESS_TOL: f64 = 1e-9;

/// A coherent-state label: the point `x` and the parameters `(θ, ε)` on top of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CSLabel {
    pub x: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub params: GKParams,
}

impl CSLabel {
    pub fn new(params: GKParams, theta: f64, epsilon: f64, x: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::domain("CSLabel", format!("theta = {theta} must lie in (0, π)")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::domain(
                "CSLabel",
                format!("epsilon = {epsilon} must be positive"),
            ));
        }
        if !x.is_finite() {
            return Err(Error::domain("CSLabel", format!("x = {x} must be finite")));
        }
        Ok(CSLabel {
            x,
            theta,
            epsilon,
            params,
        })
    }

    pub fn with_x(&self, x: f64) -> Self {
        CSLabel { x, ..*self }
    }

    pub fn mp_params(&self) -> MPPolyParams {
        MPPolyParams {
            lambda: self.params.gamma / 2.0,
            theta: self.theta,
        }
    }

    /// `e^{−4εβ}`, the ratio of successive weights beyond the Pochhammer part.
    pub fn mu(&self) -> f64 {
        (-4.0 * self.epsilon * self.params.beta).exp()
    }

    fn beta_eps(&self) -> f64 {
        self.params.beta * self.epsilon
    }
}

/// `ln σ_ε(m) = ln((γ)_m / m!) + 2β(2m+γ)ε`.
pub fn ln_sigma(label: &CSLabel, m: usize) -> f64 {
    let g = label.params.gamma;
    let mf = m as f64;
    let ln_ratio = ln_gamma_real(g + mf).expect("gamma > 0")
        - ln_gamma_real(g).expect("gamma > 0")
        - ln_gamma_real(mf + 1.0).expect("m >= 0");
    ln_ratio + 2.0 * label.beta_eps() * (2.0 * mf + g)
}

/// `σ_ε(m) = (γ)_m e^{2β(2m+γ)ε} / m!`.
pub fn sigma(label: &CSLabel, m: usize) -> Result<f64> {
    let l = ln_sigma(label, m);
    if l > f64::MAX.ln() {
        return Err(Error::Overflow {
            func: "sigma",
            log_value: l,
        });
    }
    Ok(l.exp())
}

/// `N = e^{−2εβγ} Σ_m (m!/(γ)_m) e^{−4εβm} P_m^{(γ/2)}(x,θ)²`.
///
/// Every term is non-negative, so the partial sums increase monotonically.
pub fn normalization_series(label: &CSLabel, tol: f64) -> Result<SeriesEval> {
    let g = label.params.gamma;
    let mu = label.mu();
    let (s, c) = label.theta.sin_cos();
    let (x, h) = (label.x, g / 2.0);
    let (mut prev, mut p) = (0.0, 1.0);
    let mut weight = 1.0;
    let mut sum = SeriesSummer::new(tol, crate::series::DEFAULT_TERM_CAP);
    let mut m = 0usize;
    loop {
        if sum.add(Complex64::new(weight * p * p, 0.0)) {
            break;
        }
        let mf = m as f64;
        let next = (2.0 * (x * s + (mf + h) * c) * p - (mf + g - 1.0) * prev) / (mf + 1.0);
        prev = p;
        p = next;
        weight *= mu * (mf + 1.0) / (g + mf);
        m += 1;
    }
    Ok(sum
        .eval()
        .require("normalization_series")?
        .scaled(Complex64::new((-2.0 * label.beta_eps() * g).exp(), 0.0)))
}

/// Closed form of N in complex arithmetic:
///
/// `(1−μ)^{−2ix} (1−μe^{2iθ})^{2ix} (2 sinh 2εβ)^{−γ}
///  · ₂F₁(γ/2+ix, γ/2+ix; γ; −4μ sin²θ/(1−μ)²)`, `μ = e^{−4εβ}`.
///
/// The factor `(1−μ)^{−2ix}` is what makes the value real; see
/// [`normalization_closed`].
pub fn normalization_closed_complex(label: &CSLabel) -> Result<Complex64> {
    let g = label.params.gamma;
    let be = label.beta_eps();
    let mu = label.mu();
    let x = label.x;
    let one_m_mu = -(-4.0 * be).exp_m1();
    let st = label.theta.sin();
    let z = -4.0 * mu * st * st / (one_m_mu * one_m_mu);
    let a = Complex64::new(g / 2.0, x);
    let f = hyp2f1(a, a, Complex64::new(g, 0.0), Complex64::new(z, 0.0))?
        .require("normalization_closed")?
        .value;
    let two_ix = Complex64::new(0.0, 2.0 * x);
    let phase = cpow(Complex64::new(one_m_mu, 0.0), -two_ix)
        * cpow(1.0 - mu * Complex64::from_polar(1.0, 2.0 * label.theta), two_ix);
    let scale = (-g * (2.0 * (2.0 * be).sinh()).ln()).exp();
    Ok(phase * f * scale)
}

/// Real part of [`normalization_closed_complex`], after checking that the
/// imaginary part is at rounding level.
pub fn normalization_closed(label: &CSLabel) -> Result<f64> {
    let v = normalization_closed_complex(label)?;
    let residue = v.im.abs() / v.norm();
    if residue > REALNESS_TOL {
        return Err(Error::IdentityViolation {
            func: "normalization_closed",
            residue,
            allowed: REALNESS_TOL,
        });
    }
    Ok(v.re)
}

/// Tail criterion for the wavefunction series: the terms behave like
/// `e^{−2βεm}` times a slowly varying factor, so the ratio is taken as the
/// larger of that rate and the growth observed over the last ten terms.
struct EmpiricalTail {
    window: [f64; 10],
    filled: usize,
    base_ratio: f64,
}

impl EmpiricalTail {
    fn push(&mut self, mag: f64) {
        self.window.rotate_left(1);
        self.window[9] = mag;
        self.filled += 1;
    }

    fn bound(&self) -> f64 {
        if self.filled < 10 {
            return f64::INFINITY;
        }
        let older = self.window[..5].iter().cloned().fold(0.0, f64::max);
        let newer = self.window[5..].iter().cloned().fold(0.0, f64::max);
        if newer == 0.0 {
            return 0.0;
        }
        let growth = if older > 0.0 {
            (newer / older).powf(0.2)
        } else {
            f64::INFINITY
        };
        let r = growth.max(self.base_ratio);
        if r >= 1.0 {
            f64::INFINITY
        } else {
            newer * r / (1.0 - r)
        }
    }
}

/// `⟨ξ|x,ε⟩ = N^{−1/2} Σ_m P_m^{(γ/2)}(x,θ) σ_ε(m)^{−1/2} ψ_m(ξ)`, with N from
/// [`normalization_series`].
pub fn cs_wavefunction_series(label: &CSLabel, xi: f64, tol: f64) -> Result<SeriesEval> {
    let n = normalization_series(label, tol)?.value.re;
    let p = &label.params;
    let g = p.gamma;
    let be = label.beta_eps();
    let (s, c) = label.theta.sin_cos();
    let (x, h) = (label.x, g / 2.0);
    let mut psi = p.eigen_stream(xi)?;
    let (mut prev, mut pm) = (0.0, 1.0);
    // σ_ε(m)^{−1/2} = √(m!/(γ)_m) e^{−β(2m+γ)ε}
    let mut inv_sqrt_sigma = (-be * g).exp();
    let mut sum = 0.0;
    let mut tail = EmpiricalTail {
        window: [0.0; 10],
        filled: 0,
        base_ratio: (-2.0 * be).exp(),
    };
    let mut small_run = 0;
    for m in 0..WAVEFUNCTION_TERM_CAP {
        let term = pm * inv_sqrt_sigma * psi.next().expect("unbounded stream");
        sum += term;
        tail.push(term.abs());
        let scale = sum.abs().max(f64::MIN_POSITIVE);
        small_run = if term.abs() <= tol * scale { small_run + 1 } else { 0 };
        let bound = tail.bound();
        if small_run >= 3 && bound <= tol * scale {
            let norm = n.sqrt();
            return Ok(SeriesEval {
                value: Complex64::new(sum / norm, 0.0),
                terms_used: m + 1,
                tail_bound: bound / norm,
                converged: true,
            });
        }
        let mf = m as f64;
        let next = (2.0 * (x * s + (mf + h) * c) * pm - (mf + g - 1.0) * prev) / (mf + 1.0);
        prev = pm;
        pm = next;
        inv_sqrt_sigma *= ((mf + 1.0) / (g + mf)).sqrt() * (-2.0 * be).exp();
    }
    Err(Error::NonConvergence {
        func: "cs_wavefunction_series",
        terms: WAVEFUNCTION_TERM_CAP,
        tail_bound: tail.bound() / n.sqrt(),
    })
}

/// A state with its closed-form normalization and label-only prefactors
/// evaluated once, for repeated evaluation of the wavefunction.
#[derive(Debug, Clone, Copy)]
pub struct CoherentState {
    label: CSLabel,
    norm: f64,
    /// Everything in the closed form that does not depend on ξ.
    prefactor: Complex64,
    /// `(1+τ)/(1−τ)`, `τ = e^{−2βε+iθ}`.
    gauss: Complex64,
    /// `2 sinθ e^{−2βε}/|1−τ|²`; the ₁F₁ argument is `iβξ²` times this.
    confluent: f64,
}

impl CoherentState {
    pub fn new(label: CSLabel) -> Result<Self> {
        let norm = normalization_closed(&label)?;
        let p = &label.params;
        let g = p.gamma;
        let be = label.beta_eps();
        let r = (-2.0 * be).exp();
        let tau = Complex64::from_polar(r, label.theta);
        let one_m_tau = 1.0 - tau;
        let abs2 = one_m_tau.norm_sqr();
        // ((1−τ)/(1−τ̄))^{ix} = e^{−2x arg(1−τ)}
        let ratio_pow = (-2.0 * label.x * one_m_tau.arg()).exp();
        let ln_mod = 0.5 * (std::f64::consts::LN_2 + g * p.beta.ln())
            - be * g
            - 0.5 * ln_gamma_real(g)?
            - 0.5 * g * abs2.ln()
            - 0.5 * norm.ln();
        Ok(CoherentState {
            label,
            norm,
            prefactor: Complex64::new(ln_mod.exp() * ratio_pow, 0.0),
            gauss: (1.0 + tau) / one_m_tau,
            confluent: 2.0 * label.theta.sin() * r / abs2,
        })
    }

    pub fn label(&self) -> &CSLabel {
        &self.label
    }

    /// Closed-form normalization factor N.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Closed-form `⟨ξ|x,ε⟩` (real up to rounding).
    pub fn wavefunction(&self, xi: f64) -> Result<Complex64> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::domain(
                "cs_wavefunction_closed",
                format!("xi = {xi} must be positive"),
            ));
        }
        let p = &self.label.params;
        let g = p.gamma;
        let u = p.beta * xi * xi;
        let f = hyp1f1(
            Complex64::new(g / 2.0, self.label.x),
            Complex64::new(g, 0.0),
            Complex64::new(0.0, u * self.confluent),
        )?
        .require("cs_wavefunction_closed")?
        .value;
        let envelope = ((g - 0.5) * xi.ln() - 0.5 * u * self.gauss).exp();
        Ok(self.prefactor * envelope * f)
    }

    /// `∫_0^∞ |⟨ξ|x,ε⟩|² dξ` by composite Gauss–Legendre quadrature of the
    /// closed form. The cutoff follows the Gaussian envelope
    /// `ξ^{2γ−1} e^{−βξ² Re(1+τ)/(1−τ)}` and the panel width the local
    /// oscillation rate, so the result is quadrature-accurate to about `tol`.
    pub fn l2_norm_sq(&self, tol: f64) -> Result<f64> {
        let p = &self.label.params;
        let rate = p.beta * self.gauss.re;
        let s_cut = exponential_tail_cutoff(rate, p.gamma, tol * 1e-4);
        let cutoff = s_cut.sqrt();
        // local wavenumber of |ψ|²; a 16-point panel resolves a few radians per panel
        let phase_rate = 0.5 * self.gauss.im.abs() + self.confluent;
        // geometric grading toward 0 for the non-analytic ξ^{2γ−1} factor
        let first = (PANEL_WIDTH_PHASE / (4.0 * p.beta * phase_rate + 1.0))
            .min(1.0)
            .min(cutoff);
        let mut edges: Vec<f64> = (0..=12).rev().map(|k| first * 0.5f64.powi(k)).collect();
        edges.insert(0, 0.0);
        while let Some(&left) = edges.last().filter(|&&l| l < cutoff) {
            let k = 4.0 * p.beta * left * phase_rate + 1.0;
            edges.push((left + (PANEL_WIDTH_PHASE / k).min(1.0)).min(cutoff));
        }
        let rule = Rule::composite(&edges, PANEL_ORDER);
        let vals: Vec<f64> = rule
            .nodes
            .par_iter()
            .map(|&xi| self.wavefunction(xi).map(|v| v.norm_sqr()))
            .collect::<Result<_>>()?;
        Ok(rule.weights.iter().zip(&vals).map(|(w, v)| w * v).sum())
    }
}

/// Closed-form `⟨ξ|x,ε⟩`.
pub fn cs_wavefunction_closed(label: &CSLabel, xi: f64) -> Result<Complex64> {
    CoherentState::new(*label)?.wavefunction(xi)
}

fn check_shared(l1: &CSLabel, l2: &CSLabel) -> Result<()> {
    if l1.theta != l2.theta || l1.epsilon != l2.epsilon || l1.params != l2.params {
        return Err(Error::domain("overlap", "labels must share (θ, ε, γ, β)".to_string()));
    }
    Ok(())
}

/// `⟨x₁,ε|x₂,ε⟩` from the bilinear generating identity.
pub fn overlap(l1: &CSLabel, l2: &CSLabel) -> Result<Complex64> {
    check_shared(l1, l2)?;
    if l1.x == l2.x {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let n1 = normalization_closed(l1)?;
    let n2 = normalization_closed(l2)?;
    overlap_with_norms(l1, l2, n1, n2)
}

/// [`overlap`] with the two closed-form normalizations already known.
pub fn overlap_with_norms(l1: &CSLabel, l2: &CSLabel, n1: f64, n2: f64) -> Result<Complex64> {
    check_shared(l1, l2)?;
    if l1.x == l2.x {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let g = l1.params.gamma;
    let b = mp_bilinear_closed(l1.mu(), g, l1.x, l2.x, l1.theta, l2.theta)?;
    Ok(b * (-2.0 * l1.beta_eps() * g).exp() / (n1 * n2).sqrt())
}

/// Series route for [`overlap`], including both normalizations.
pub fn overlap_series(l1: &CSLabel, l2: &CSLabel, tol: f64) -> Result<Complex64> {
    check_shared(l1, l2)?;
    let g = l1.params.gamma;
    let b = mp_bilinear_series(l1.mu(), g, l1.x, l2.x, l1.theta, l2.theta, tol)?.value;
    let n1 = normalization_series(l1, tol)?.value.re;
    let n2 = normalization_series(l2, tol)?.value.re;
    Ok(b * (-2.0 * l1.beta_eps() * g).exp() / (n1 * n2).sqrt())
}

/// Orthogonality weight of `P_m^{(γ/2)}(·, θ)` normalized so that
/// `∫ Υ P_m P_j dx = (γ)_m/m! δ_{mj}`:
///
/// `Υ(x) = (2 sinθ)^{γ−1} sinθ / (π Γ(γ)) · e^{−(π−2θ)x} |Γ(γ/2+ix)|²`.
pub fn upsilon(gamma: f64, theta: f64, x: f64) -> Result<f64> {
    let lg = log_gamma(Complex64::new(gamma / 2.0, x))?.re;
    let st = theta.sin();
    let ln =
        (gamma - 1.0) * (2.0 * st).ln() + st.ln() - PI.ln() - ln_gamma_real(gamma)? - (PI - 2.0 * theta) * x + 2.0 * lg;
    Ok(ln.exp())
}

/// Density of the labelling measure, `N(x) Υ(x)`.
pub fn measure_density(label: &CSLabel) -> Result<f64> {
    Ok(normalization_closed(label)? * upsilon(label.params.gamma, label.theta, label.x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn label(beta: f64, gamma: f64, eps: f64, theta: f64, x: f64) -> CSLabel {
        CSLabel::new(GKParams::from_gamma(gamma, beta).unwrap(), theta, eps, x).unwrap()
    }

    #[test]
    fn sigma_values() {
        let l = label(1.0, 2.0 + 1e-15, 0.1, 1.0, 0.0);
        let g = l.params.gamma;
        assert!((sigma(&l, 0).unwrap() - (2.0 * g * 0.1f64).exp()).abs() < 1e-13);
        assert!((sigma(&l, 1).unwrap() - 2.0 * 0.8f64.exp()).abs() < 1e-12);
        let l = label(0.7, 2.5, 0.2, 1.0, 0.0);
        let ratio = sigma(&l, 5).unwrap() / sigma(&l, 4).unwrap();
        let want = (2.5 + 4.0) / 5.0 * (4.0 * 0.7 * 0.2f64).exp();
        assert!((ratio - want).abs() < 1e-13 * want);
        let huge = label(1.0, 2.5, 200.0, 1.0, 0.0);
        assert!(matches!(sigma(&huge, 10), Err(Error::Overflow { .. })));
    }

    #[test]
    fn normalization_reference_values() {
        // series summed in 30-digit mpmath
        let table = [
            ((1.0, 2.5, 0.25, FRAC_PI_3, 0.7), 0.631311937533459826),
            ((0.5, 1.8, 0.05, FRAC_PI_4, -2.0), 3.66546273701792073),
            ((2.0, 3.5, 0.1, 2.0 * FRAC_PI_3, 3.0), 0.697365139342493841),
        ];
        for ((b, g, e, t, x), want) in table {
            let l = label(b, g, e, t, x);
            let s = normalization_series(&l, 1e-14).unwrap().value.re;
            let c = normalization_closed(&l).unwrap();
            assert!(((s - want) / want).abs() < 1e-12, "series {s} vs {want}");
            assert!(((c - want) / want).abs() < 1e-11, "closed {c} vs {want}");
        }
    }

    #[test]
    fn normalization_parity_and_large_eps() {
        let l = label(1.0, 2.5, 0.25, FRAC_PI_2, 0.0);
        let n = normalization_closed(&l).unwrap();
        let s = normalization_series(&l, 1e-14).unwrap();
        assert!(((s.value.re - n) / n).abs() < 1e-12);
        let l = label(5.0, 2.5, 1.0, 1.0, 0.4);
        let n = normalization_closed(&l).unwrap();
        let m0 = (-2.0 * 5.0 * 2.5f64).exp();
        assert!((n / m0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wavefunction_reference_values() {
        let table = [
            (
                (1.0, 2.5, 0.25, FRAC_PI_3, 0.7),
                [
                    (0.5, 0.583922444704624307),
                    (2.0, -0.183100374247772504),
                    (4.0, 0.000570097102389745748),
                ],
            ),
            (
                (2.0, 1.8, 0.05, FRAC_PI_4, -2.0),
                [
                    (0.5, 0.0721847860966111221),
                    (2.0, -0.173084891726014042),
                    (4.0, 4.71922823616950020e-5),
                ],
            ),
        ];
        for ((b, g, e, t, x), rows) in table {
            let l = label(b, g, e, t, x);
            let st = CoherentState::new(l).unwrap();
            for (xi, want) in rows {
                let c = st.wavefunction(xi).unwrap();
                let s = cs_wavefunction_series(&l, xi, 1e-13).unwrap().value.re;
                assert!(((c.re - want) / want).abs() < 1e-10, "closed xi={xi}: {c} vs {want}");
                assert!(c.im.abs() < 1e-9 * c.norm());
                assert!(((s - want) / want).abs() < 1e-10, "series xi={xi}: {s} vs {want}");
            }
        }
    }

    #[test]
    fn overlap_properties() {
        let l = label(1.0, 2.5, 0.25, FRAC_PI_3, 0.3);
        let r = l.with_x(0.9);
        assert_eq!(overlap(&l, &l).unwrap(), Complex64::new(1.0, 0.0));
        let o = overlap(&l, &r).unwrap();
        assert!(o.norm() <= 1.0 + 1e-9);
        let back = overlap(&r, &l).unwrap();
        assert!((o - back.conj()).norm() < 1e-10);
        let s = overlap_series(&l, &r, 1e-14).unwrap();
        assert!((o - s).norm() < 1e-10, "{o} vs {s}");
        let other = CSLabel { epsilon: 0.3, ..r };
        assert!(overlap(&l, &other).is_err());
    }

    #[test]
    fn measure_density_positive_and_even_weight() {
        let l = label(1.0, 2.5, 0.25, FRAC_PI_3, 0.0);
        for &x in &[-6.0, -1.0, 0.0, 2.5, 8.0] {
            assert!(measure_density(&l.with_x(x)).unwrap() > 0.0);
        }
        let a = upsilon(2.5, FRAC_PI_2, 1.7).unwrap();
        let b = upsilon(2.5, FRAC_PI_2, -1.7).unwrap();
        assert!((a - b).abs() < 1e-15 * a);
    }
}
