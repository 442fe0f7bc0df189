//! Gauss-Legendre (composite) and tanh-sinh quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss-Legendre order used inside each composite panel.
pub const PANEL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A list of (node, weight) pairs.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    fn push_panel(&mut self, a: f64, b: f64, base: &(Vec<f64>, Vec<f64>)) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in base.0.iter().zip(&base.1) {
            self.nodes.push(mid + half * x);
            self.weights.push(half * w);
        }
    }

    /// Composite Gauss-Legendre on [a, b] with the given panel edges inside.
    pub fn composite(edges: &[f64], order: usize) -> Rule {
        let base = gauss_legendre(order);
        let mut rule = Rule::default();
        for pair in edges.windows(2) {
            rule.push_panel(pair[0], pair[1], &base);
        }
        rule
    }
}

/// Uniform panel edges on [a, b].
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let panels = panels.max(1);
    (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect()
}

/// Panel edges on [0, b] refined geometrically towards 0.
///
/// Integrands such as `ξ^(2γ-1)` are not analytic at the origin; shrinking
/// the first panels by a factor 8 per level keeps the Gauss-Legendre error
/// negligible there.
pub fn graded_edges(b: f64, panels: usize, levels: usize) -> Vec<f64> {
    let uniform = uniform_edges(0.0, b, panels);
    let first = uniform[1];
    let mut edges = vec![0.0];
    for k in (1..=levels).rev() {
        edges.push(first * 0.125f64.powi(k as i32));
    }
    edges.extend_from_slice(&uniform[1..]);
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussLegendreComposite,
    TanhSinh,
}

/// Node budget, truncation cutoffs, and scheme for integrals over (0, ∞) and ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_nodes: usize,
    pub half_line_cutoff: f64,
    /// (left, right) truncation: the real line is cut to `[-left, right]`.
    pub real_line_cutoffs: (f64, f64),
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            n_nodes: 1024,
            half_line_cutoff: 12.0,
            real_line_cutoffs: (40.0, 40.0),
            scheme: Scheme::GaussLegendreComposite,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 16 {
            return Err(Error::Config(format!("n_nodes must be >= 16, got {}", self.n_nodes)));
        }
        let (l, r) = self.real_line_cutoffs;
        for v in [self.half_line_cutoff, l, r] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "quadrature cutoffs must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    fn panels(&self) -> usize {
        (self.n_nodes / PANEL_ORDER).max(1)
    }

    /// Rule on `[0, half_line_cutoff]` with panel edges at `breaks` added.
    pub fn half_line_rule_with_breaks(&self, breaks: &[f64]) -> Rule {
        let c = self.half_line_cutoff;
        match self.scheme {
            Scheme::GaussLegendreComposite => {
                let mut edges = graded_edges(c, self.panels(), 8);
                edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < c));
                edges.sort_by(f64::total_cmp);
                edges.dedup();
                Rule::composite(&edges, PANEL_ORDER)
            }
            Scheme::TanhSinh => tanh_sinh_rule(0.0, c, self.n_nodes),
        }
    }

    pub fn half_line_rule(&self) -> Rule {
        self.half_line_rule_with_breaks(&[])
    }

    /// Rule on `[-left, right]`.
    pub fn real_line_rule(&self) -> Rule {
        let (l, r) = self.real_line_cutoffs;
        match self.scheme {
            Scheme::GaussLegendreComposite => {
                let mut edges = uniform_edges(-l, r, self.panels());
                if !edges.contains(&0.0) {
                    edges.push(0.0);
                    edges.sort_by(f64::total_cmp);
                }
                Rule::composite(&edges, PANEL_ORDER)
            }
            Scheme::TanhSinh => tanh_sinh_rule(-l, r, self.n_nodes),
        }
    }
}

/// Cutoff `L` such that `∫_L^∞ x^power e^{-rate x} dx <= tol`, using the bound
/// `L^power e^{-rate L} / (rate - power / L)` once `L > power / rate`.
pub fn exponential_tail_cutoff(rate: f64, power: f64, tol: f64) -> f64 {
    assert!(rate > 0.0 && tol > 0.0);
    let mut l = (2.0 * power / rate).max(1.0);
    loop {
        let denom = rate - power.max(0.0) / l;
        if denom > 0.0 {
            let bound = (power * l.ln() - rate * l).exp() / denom;
            if bound <= tol {
                return l;
            }
        }
        l *= 1.05;
    }
}

/// Tanh-sinh rule on [a, b] with roughly `n` nodes.
pub fn tanh_sinh_rule(a: f64, b: f64, n: usize) -> Rule {
    let s_max = 4.0;
    let half = (n / 2).max(8) as f64;
    let h = s_max / half;
    let mut rule = Rule::default();
    let len = b - a;
    let k_max = half as i64;
    for k in -k_max..=k_max {
        let s = k as f64 * h;
        if let Some((t, omt, dt)) = tanh_sinh_node(s) {
            let x = if s < 0.0 { a + len * t } else { b - len * omt };
            rule.nodes.push(x);
            rule.weights.push(h * len * dt);
        }
    }
    rule
}

/// Node at `s` of the unit-interval tanh-sinh map: `(t, 1 - t, dt/ds)`.
#[inline]
fn tanh_sinh_node(s: f64) -> Option<(f64, f64, f64)> {
    let q = 0.5 * PI * s.sinh();
    let e = (-2.0 * q.abs()).exp();
    let small = e / (1.0 + e);
    let big = 1.0 / (1.0 + e);
    if small == 0.0 {
        return None;
    }
    let dt = PI * s.cosh() * e / ((1.0 + e) * (1.0 + e));
    Some(if s >= 0.0 { (big, small, dt) } else { (small, big, dt) })
}

/// Result of an adaptive tanh-sinh integration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Adaptive tanh-sinh on [0, 1] for integrands with endpoint singularities.
///
/// The integrand receives `(t, 1 - t)`, both computed without cancellation,
/// so factors like `(1 - t)^p` stay accurate next to `t = 1`.
pub fn tanh_sinh_unit(f: impl Fn(f64, f64) -> Complex64, tol: f64, max_level: u32) -> AdaptiveResult {
    let s_max = 6.0;
    let mut h = 0.5;
    let mut raw = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    let eval_at = |s: f64, evals: &mut usize| -> Complex64 {
        match tanh_sinh_node(s) {
            Some((t, omt, dt)) => {
                *evals += 1;
                let v = f(t, omt) * dt;
                if v.re.is_finite() && v.im.is_finite() {
                    v
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            None => Complex64::new(0.0, 0.0),
        }
    };
    let n0 = (s_max / h) as i64;
    for k in -n0..=n0 {
        raw += eval_at(k as f64 * h, &mut evals);
    }
    let mut estimate = raw * h;
    let mut prev_diff = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let n = (s_max / h) as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            raw += eval_at(k as f64 * h, &mut evals);
            k += 2;
        }
        let next = raw * h;
        let diff = (next - estimate).norm();
        estimate = next;
        let scale = estimate.norm();
        // Convergence is quadratic in the level, so the last difference
        // over-estimates the remaining error once it starts shrinking fast.
        if level >= 3 && diff <= tol * scale && diff <= prev_diff {
            return AdaptiveResult {
                value: estimate,
                error: diff,
                evals,
                converged: true,
            };
        }
        prev_diff = diff;
    }
    AdaptiveResult {
        value: estimate,
        error: prev_diff,
        evals,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // ∫ x^30 = 2/31
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_handles_algebraic_endpoint() {
        // ∫_0^1 x^0.6 dx = 1/1.6
        let rule = Rule::composite(&graded_edges(1.0, 4, 8), PANEL_ORDER);
        let v = rule.integrate(|x| x.powf(0.6));
        assert!((v - 1.0 / 1.6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn tanh_sinh_unit_endpoint_singularity() {
        // ∫_0^1 t^-0.5 (1-t)^-0.5 dt = π
        let r = tanh_sinh_unit(|t, omt| Complex64::new(t.powf(-0.5) * omt.powf(-0.5), 0.0), 1e-13, 10);
        assert!(r.converged);
        assert!((r.value.re - PI).abs() < 1e-12, "{:?}", r);
    }

    #[test]
    fn fixed_tanh_sinh_rule_on_interval() {
        let rule = tanh_sinh_rule(-1.0, 2.0, 200);
        let v = rule.integrate(|x| (-x * x).exp());
        // erf(2)+erf(1) times √π/2
        let want = 0.5 * PI.sqrt() * (0.995_322_265_018_952_7 + 0.842_700_792_949_714_9);
        assert!((v - want).abs() < 1e-13, "{v} vs {want}");
    }

    #[test]
    fn tail_cutoff_bounds_the_tail() {
        let l = exponential_tail_cutoff(2.0, 5.0, 1e-12);
        // crude numerical tail with a fine rule far beyond l
        let rule = Rule::composite(&uniform_edges(l, l + 60.0, 60), PANEL_ORDER);
        let tail = rule.integrate(|x| x.powf(5.0) * (-2.0 * x).exp());
        assert!(tail <= 1e-12, "{tail}");
    }

    #[test]
    fn spec_validation() {
        let mut q = QuadratureSpec::default();
        assert!(q.validate().is_ok());
        q.n_nodes = 8;
        assert!(q.validate().is_err());
    }
}
