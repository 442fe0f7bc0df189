//! Resolution of the identity in the ε → 0 limit: Meixner-Pollaczek
//! orthogonality on ℝ, the diagonal operator
//! `O_ε = Σ_m e^{−2β(2m+γ)ε} |ψ_m⟩⟨ψ_m|`, the bilinear Laguerre kernel and
//! the convergence experiment `O_ε φ → φ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::coherent::upsilon;
use crate::error::{Error, Result};
use crate::gk_model::GKParams;
use crate::quadrature::{exponential_tail_cutoff, uniform_edges, QuadratureSpec, Rule, PANEL_ORDER};
use crate::series::{dd_div, SeriesEval, DEFAULT_TERM_CAP};
use crate::specfun::{
    bessel_i_reduced, laguerre_all_dd, ln_bessel_i, ln_gamma_real, mp_poly_all, MPPolyParams, BESSEL_ASYMPTOTIC_SWITCH,
};

/// Target for the truncated tails of orthogonality integrals, relative to the expected value.
pub const ORTHOGONALITY_TAIL_TOL: f64 = 1e-11;

/// Largest real-line cutoff the orthogonality integrals may extend to.
pub const MAX_REAL_LINE_CUTOFF: f64 = 400.0;

/// Hard cap on the number of modes in `O_ε`.
pub const MODE_CAP: usize = 5_000;

/// Geometric-factor threshold defining the default mode count.
pub const MODE_TAIL: f64 = 1e-14;

// ---------------------------------------------------------------------------
// Meixner-Pollaczek orthogonality

/// Cutoffs `(left, right)` beyond which `∫ Υ |P_m P_j|` is certified below
/// `tol` (absolute), using `P_m P_j Υ ~ K |x|^{γ−1+m+j}` times `e^{−2θx}` on
/// the right and `e^{−(2π−2θ)|x|}` on the left.
pub fn orthogonality_cutoffs(m: usize, j: usize, gamma: f64, theta: f64, tol: f64) -> Result<(f64, f64)> {
    let power = gamma - 1.0 + (m + j) as f64;
    let st = theta.sin();
    // leading coefficients (2 sinθ)^m/m! and the weight's 2π|x|^{γ−1}e^{−π|x|} asymptote,
    // doubled for the lower-order terms of the polynomials
    let ln_k = (2.0f64).ln() + 2.0f64.ln() + power * (2.0 * st).ln() + st.ln()
        - ln_gamma_real(gamma)?
        - ln_gamma_real(m as f64 + 1.0)?
        - ln_gamma_real(j as f64 + 1.0)?;
    let budget = tol / ln_k.exp().max(1e-300);
    let right = exponential_tail_cutoff(2.0 * theta, power, budget);
    let left = exponential_tail_cutoff(2.0 * PI - 2.0 * theta, power, budget);
    if right > MAX_REAL_LINE_CUTOFF || left > MAX_REAL_LINE_CUTOFF {
        return Err(Error::NonConvergence {
            func: "orthogonality_integral",
            terms: 0,
            tail_bound: tol,
        });
    }
    Ok((left, right))
}

/// The matrix `I_{m,j} = ∫_ℝ P_m P_j Υ dx`, `0 ≤ m, j ≤ m_max`, by truncated
/// quadrature. The quadrature cutoffs are widened as needed so the truncated
/// tails stay below [`ORTHOGONALITY_TAIL_TOL`] relative to the diagonal.
pub fn orthogonality_matrix(m_max: usize, gamma: f64, theta: f64, quad: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
    quad.validate()?;
    let p = MPPolyParams::new(gamma / 2.0, theta)?;
    let (l, r) = orthogonality_cutoffs(m_max, m_max, gamma, theta, ORTHOGONALITY_TAIL_TOL)?;
    let mut spec = *quad;
    spec.real_line_cutoffs = (l.max(quad.real_line_cutoffs.0), r.max(quad.real_line_cutoffs.1));
    // keep the panel width of the requested spec
    let (ql, qr) = quad.real_line_cutoffs;
    let widen = ((spec.real_line_cutoffs.0 + spec.real_line_cutoffs.1) / (ql + qr)).max(1.0);
    spec.n_nodes = ((quad.n_nodes as f64 * widen).ceil() as usize).max(quad.n_nodes);
    let rule = spec.real_line_rule();
    let rows: Vec<(f64, Vec<f64>)> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&x, &w)| Ok((w * upsilon(gamma, theta, x)?, mp_poly_all(m_max, p, x))))
        .collect::<Result<_>>()?;
    let mut out = vec![vec![0.0; m_max + 1]; m_max + 1];
    for (w, ps) in &rows {
        for m in 0..=m_max {
            let wm = w * ps[m];
            for j in 0..=m {
                out[m][j] += wm * ps[j];
            }
        }
    }
    for m in 0..=m_max {
        for j in 0..m {
            out[j][m] = out[m][j];
        }
    }
    Ok(out)
}

/// Single entry of [`orthogonality_matrix`]; the expected value is `(γ)_m/m! δ_{mj}`.
pub fn orthogonality_integral(m: usize, j: usize, gamma: f64, theta: f64, quad: &QuadratureSpec) -> Result<f64> {
    let mat = orthogonality_matrix(m.max(j), gamma, theta, quad)?;
    Ok(mat[m][j])
}

// ---------------------------------------------------------------------------
// Test functions and the diagonal operator

/// Square-integrable functions on (0, ∞) used to probe `O_ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// A single eigenfunction `ψ_n`.
    Eigen { n: usize },
    /// `Σ c_k ψ_{n_k}`.
    FiniteRank { terms: Vec<(usize, f64)> },
    /// `exp(−1/(1−s²))` with `s` the position rescaled from `[a, b]` to `[−1, 1]`.
    Bump { a: f64, b: f64 },
    /// Indicator of `[a, b]`.
    Indicator { a: f64, b: f64 },
}

impl TestFunction {
    /// `Σ_{n≤3} ψ_n / 2ⁿ`.
    pub fn geometric_rank4() -> Self {
        TestFunction::FiniteRank {
            terms: (0..=3).map(|n| (n, 0.5f64.powi(n as i32))).collect(),
        }
    }

    pub fn eval(&self, params: &GKParams, xi: f64) -> Result<f64> {
        Ok(match self {
            TestFunction::Eigen { n } => params.eigenfunction(*n, xi)?,
            TestFunction::FiniteRank { terms } => {
                let mut s = 0.0;
                for &(n, c) in terms {
                    s += c * params.eigenfunction(n, xi)?;
                }
                s
            }
            TestFunction::Bump { a, b } => {
                let s = (2.0 * xi - a - b) / (b - a);
                if s.abs() < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Indicator { a, b } => {
                if xi >= *a && xi <= *b {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    /// Compact support, when there is one.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            TestFunction::Bump { a, b } | TestFunction::Indicator { a, b } => Some((*a, *b)),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some((a, b)) = self.support() {
            if !(a >= 0.0 && b > a && b.is_finite()) {
                return Err(Error::Config(format!("test-function support [{a}, {b}] is invalid")));
            }
        }
        if let TestFunction::FiniteRank { terms } = self {
            if terms.is_empty() {
                return Err(Error::Config(
                    "finite-rank test function needs at least one term".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Smallest m with `e^{−4βεm} < MODE_TAIL`, capped at [`MODE_CAP`].
pub fn default_mode_cap(beta: f64, epsilon: f64) -> usize {
    let m = (-MODE_TAIL.ln() / (4.0 * beta * epsilon)).floor() as usize + 1;
    m.min(MODE_CAP)
}

/// Projections `c_m = ⟨φ|ψ_m⟩` of a test function, with the grid on which
/// `O_ε φ` and φ are compared.
#[derive(Debug, Clone)]
pub struct Projection {
    pub params: GKParams,
    pub coeffs: Vec<f64>,
    /// `‖φ‖` on the evaluation grid.
    pub phi_norm: f64,
    grid: Rule,
    phi_grid: Vec<f64>,
    /// `ψ_m` at the grid nodes, row per node.
    psi_grid: Vec<Vec<f64>>,
}

fn psi_table(params: &GKParams, nodes: &[f64], m_max: usize) -> Result<Vec<Vec<f64>>> {
    nodes.par_iter().map(|&x| params.eigenfunctions(m_max, x)).collect()
}

impl Projection {
    /// Projects `phi` onto `ψ_0 … ψ_{m_max}` by quadrature: on the support for
    /// compactly supported φ, on the truncated half-line otherwise.
    pub fn new(params: GKParams, phi: &TestFunction, m_max: usize, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        phi.validate()?;
        let cutoff = quad.half_line_cutoff;
        let coeff_rule = match phi.support() {
            Some((a, b)) => Rule::composite(
                &uniform_edges(a, b.min(cutoff), (quad.n_nodes / PANEL_ORDER).max(1)),
                PANEL_ORDER,
            ),
            None => quad.half_line_rule(),
        };
        let coeff_phi: Vec<f64> = coeff_rule
            .nodes
            .iter()
            .map(|&x| phi.eval(&params, x))
            .collect::<Result<_>>()?;
        let coeff_psi = psi_table(&params, &coeff_rule.nodes, m_max)?;
        let mut coeffs = vec![0.0; m_max + 1];
        for ((w, f), row) in coeff_rule.weights.iter().zip(&coeff_phi).zip(&coeff_psi) {
            let wf = w * f;
            for (c, p) in coeffs.iter_mut().zip(row) {
                *c += wf * p;
            }
        }

        let mut breaks: Vec<f64> = (1..cutoff.ceil() as usize).map(|k| k as f64).collect();
        if let Some((a, b)) = phi.support() {
            breaks.extend([a, b]);
        }
        let grid = quad.half_line_rule_with_breaks(&breaks);
        let phi_grid: Vec<f64> = grid
            .nodes
            .iter()
            .map(|&x| phi.eval(&params, x))
            .collect::<Result<_>>()?;
        let psi_grid = psi_table(&params, &grid.nodes, m_max)?;
        let phi_norm = grid
            .weights
            .iter()
            .zip(&phi_grid)
            .map(|(w, f)| w * f * f)
            .sum::<f64>()
            .sqrt();
        Ok(Projection {
            params,
            coeffs,
            phi_norm,
            grid,
            phi_grid,
            psi_grid,
        })
    }

    pub fn m_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn factors(&self, epsilon: f64, m_cap: usize) -> Vec<f64> {
        let p = &self.params;
        (0..=m_cap.min(self.m_max()))
            .map(|m| (-2.0 * p.beta * (2.0 * m as f64 + p.gamma) * epsilon).exp())
            .collect()
    }

    /// `O_ε[φ](u)` using the first `m_cap + 1` modes.
    pub fn apply(&self, epsilon: f64, u: f64, m_cap: usize) -> Result<f64> {
        let f = self.factors(epsilon, m_cap);
        let psi = self.params.eigenfunctions(f.len() - 1, u)?;
        Ok(f.iter().zip(&self.coeffs).zip(&psi).map(|((f, c), p)| f * c * p).sum())
    }

    /// Certified L² bound on the modes beyond `m_cap`: `‖φ‖ e^{−2β(2(m_cap+1)+γ)ε}`.
    pub fn truncation_bound(&self, epsilon: f64, m_cap: usize) -> f64 {
        let p = &self.params;
        self.phi_norm * (-2.0 * p.beta * (2.0 * (m_cap + 1) as f64 + p.gamma) * epsilon).exp()
    }

    /// `‖O_ε[φ] − target·φ‖ / ‖φ‖` on the evaluation grid.
    pub fn relative_error(&self, epsilon: f64, m_cap: usize, target: f64) -> f64 {
        let f = self.factors(epsilon, m_cap);
        let mut num = 0.0;
        for ((w, phi), psi) in self.grid.weights.iter().zip(&self.phi_grid).zip(&self.psi_grid) {
            let o: f64 = f.iter().zip(&self.coeffs).zip(psi).map(|((f, c), p)| f * c * p).sum();
            let d = o - target * phi;
            num += w * d * d;
        }
        num.sqrt() / self.phi_norm
    }
}

/// `O_ε[φ](u) = Σ_{m ≤ m_cap} e^{−2β(2m+γ)ε} ⟨φ|ψ_m⟩ ψ_m(u)`.
///
/// `m_cap` defaults to [`default_mode_cap`]; an explicit cap whose certified
/// tail exceeds `tol · ‖φ‖` is rejected.
pub fn apply_o_epsilon(
    params: GKParams,
    epsilon: f64,
    phi: &TestFunction,
    u: f64,
    m_cap: Option<usize>,
    tol: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(
            "apply_o_epsilon",
            format!("epsilon = {epsilon} must be positive"),
        ));
    }
    let cap = m_cap.unwrap_or_else(|| default_mode_cap(params.beta, epsilon));
    let proj = Projection::new(params, phi, cap, quad)?;
    let bound = proj.truncation_bound(epsilon, cap);
    if bound > tol * proj.phi_norm {
        return Err(Error::NonConvergence {
            func: "apply_o_epsilon",
            terms: cap + 1,
            tail_bound: bound,
        });
    }
    proj.apply(epsilon, u, cap)
}

/// Relative L² errors of `O_ε φ` against φ along a decreasing ε ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    /// `errors[i] / errors[i+1]`.
    pub rates: Vec<f64>,
}

impl ConvergenceTrace {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    /// Linear-scaling check: `C` is the larger of `error/ε` at the two largest
    /// ε, inflated by `1 + slack`; returns `(C, worst error/(C ε) on the rest)`.
    pub fn linear_scaling(&self, slack: f64) -> (f64, f64) {
        let head = self.errors.len().min(2);
        let c = (0..head).map(|i| self.errors[i] / self.epsilons[i]).fold(0.0, f64::max) * (1.0 + slack);
        let worst = (head..self.errors.len())
            .map(|i| self.errors[i] / (c * self.epsilons[i]))
            .fold(0.0, f64::max);
        (c, worst)
    }
}

fn check_ladder(eps_ladder: &[f64]) -> Result<()> {
    if eps_ladder.is_empty() {
        return Err(Error::Config("epsilon ladder is empty".into()));
    }
    if eps_ladder.iter().any(|&e| !(e > 0.0 && e.is_finite())) || eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!(
            "epsilon ladder must be positive and strictly decreasing: {eps_ladder:?}"
        )));
    }
    Ok(())
}

/// Runs `O_ε φ → φ` along `eps_ladder`; the projections are computed once,
/// with enough modes for the smallest ε.
pub fn poisson_limit_experiment(
    params: GKParams,
    phi: &TestFunction,
    eps_ladder: &[f64],
    quad: &QuadratureSpec,
) -> Result<ConvergenceTrace> {
    check_ladder(eps_ladder)?;
    let smallest = *eps_ladder.last().expect("non-empty");
    let m_max = default_mode_cap(params.beta, smallest);
    let proj = Projection::new(params, phi, m_max, quad)?;
    let errors: Vec<f64> = eps_ladder
        .par_iter()
        .map(|&e| proj.relative_error(e, default_mode_cap(params.beta, e), 1.0))
        .collect();
    let rates = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(ConvergenceTrace {
        epsilons: eps_ladder.to_vec(),
        errors,
        rates,
    })
}

// ---------------------------------------------------------------------------
// Bilinear Laguerre kernel

fn check_kernel(rho: f64, gamma: f64, a: f64, b: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::domain(
            "bilinear_kernel",
            format!("rho = {rho} must lie in (0, 1)"),
        ));
    }
    if !(gamma > 1.0) || !(a >= 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(
            "bilinear_kernel",
            format!("need gamma > 1, a, b >= 0; got gamma={gamma}, a={a}, b={b}"),
        ));
    }
    Ok(())
}

/// `K(ρ; a, b) = Σ_m ρ^m m!/Γ(m+γ) L_m^{(γ−1)}(a) L_m^{(γ−1)}(b)`.
///
/// The terms can cancel by many orders of magnitude (the sum is tiny when ρ
/// is near 1 and a, b are far apart), so the recurrences and the running sum
/// are carried in double-double arithmetic. The tail is certified with
/// `|L_m^{(γ−1)}(x)| ≤ (γ)_m/m! e^{x/2}`.
pub fn bilinear_kernel_series(rho: f64, gamma: f64, a: f64, b: f64, tol: f64) -> Result<SeriesEval> {
    check_kernel(rho, gamma, a, b)?;
    let nu = gamma - 1.0;
    let inv_gamma = (-ln_gamma_real(gamma)?).exp();
    let env = (0.5 * (a + b)).exp() * inv_gamma;
    let mut chunk = 64usize;
    loop {
        let la = laguerre_all_dd(chunk, nu, a);
        let lb = laguerre_all_dd(chunk, nu, b);
        let mut sum = TwoFloat::from(0.0);
        let rho2 = TwoFloat::from(rho);
        let gamma2 = TwoFloat::from(gamma);
        let mut w = TwoFloat::from(1.0); // ρ^m m!/(γ)_m, every factor exact to double-double
        let mut bound_coeff = 1.0; // ρ^m (γ)_m/m!
        for m in 0..=chunk {
            sum += w * la[m] * lb[m];
            let mf = m as f64;
            w = dd_div(w * rho2 * (mf + 1.0), gamma2 + mf);
            bound_coeff *= rho * (gamma + mf) / (mf + 1.0);
            let r = rho * (gamma + mf + 1.0) / (mf + 2.0);
            if r < 1.0 {
                let tail = env * bound_coeff / (1.0 - r);
                let value = f64::from(sum) * inv_gamma;
                if tail <= tol * value.abs() {
                    return Ok(SeriesEval {
                        value: Complex64::new(value, 0.0),
                        terms_used: m + 1,
                        tail_bound: tail,
                        converged: true,
                    });
                }
            }
        }
        if chunk >= DEFAULT_TERM_CAP {
            return Err(Error::NonConvergence {
                func: "bilinear_kernel_series",
                terms: chunk + 1,
                tail_bound: env * bound_coeff / (1.0 - rho),
            });
        }
        chunk = (chunk * 2).min(DEFAULT_TERM_CAP);
    }
}

/// Hardy–Hille closed form
/// `K = (1−ρ)^{−1} e^{−ρ(a+b)/(1−ρ)} (abρ)^{−ν/2} I_ν(2√(abρ)/(1−ρ))`, `ν = γ−1`.
///
/// Below the Bessel switchover the reduced series
/// `(1−ρ)^{−ν} Σ_k W^k/(k! Γ(ν+k+1))`, `W = abρ/(1−ρ)²`, is used, which is
/// regular as `ab → 0`; above it everything is combined in log-space.
pub fn bilinear_kernel_closed(rho: f64, gamma: f64, a: f64, b: f64) -> Result<f64> {
    check_kernel(rho, gamma, a, b)?;
    let nu = gamma - 1.0;
    let omr = 1.0 - rho;
    let ab = a * b;
    let w = ab * rho / (omr * omr);
    let z = 2.0 * w.sqrt();
    let ln_front = -omr.ln() - rho * (a + b) / omr;
    if z < BESSEL_ASYMPTOTIC_SWITCH {
        Ok((ln_front - nu * omr.ln()).exp() * bessel_i_reduced(nu, w)?)
    } else {
        let l = ln_front - 0.5 * nu * (ab * rho).ln() + ln_bessel_i(nu, z)?;
        if l > f64::MAX.ln() {
            return Err(Error::Overflow {
                func: "bilinear_kernel_closed",
                log_value: l,
            });
        }
        Ok(l.exp())
    }
}
