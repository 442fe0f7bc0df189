//! The Gol'dman-Krivchenkov Hamiltonian `−d²/dξ² + β²ξ² + α/ξ²` on (0, ∞):
//! parameter maps, spectrum and orthonormal eigenbasis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{laguerre, ln_gamma_real};

/// Below this, `ξ^{γ−1/2}` is returned as exactly zero.
const XI_FLOOR: f64 = 1e-300;

/// Physical (ϱ, κ₀) and reduced (α, β, γ, q) parameters; constructed from
/// either set, always fully populated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GKParams {
    pub rho: f64,
    pub kappa0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub q: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            "GKParams",
            format!("{name} = {v} must be positive and finite"),
        ))
    }
}

impl GKParams {
    /// From the force constant ϱ and equilibrium length κ₀: α = ϱκ₀², β = √ϱ/κ₀.
    pub fn from_physical(rho: f64, kappa0: f64) -> Result<Self> {
        positive("rho", rho)?;
        positive("kappa0", kappa0)?;
        let alpha = rho * kappa0 * kappa0;
        let root = (1.0 + 4.0 * alpha).sqrt();
        Ok(GKParams {
            rho,
            kappa0,
            alpha,
            beta: rho.sqrt() / kappa0,
            gamma: 1.0 + 0.5 * root,
            q: 0.5 * (1.0 + root),
        })
    }

    /// From the reduced pair (α, β); inverts to ϱ = β√α, κ₀ = (√α/β)^{1/2}.
    pub fn from_reduced(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        let root = (1.0 + 4.0 * alpha).sqrt();
        Ok(GKParams {
            rho: beta * alpha.sqrt(),
            kappa0: (alpha.sqrt() / beta).sqrt(),
            alpha,
            beta,
            gamma: 1.0 + 0.5 * root,
            q: 0.5 * (1.0 + root),
        })
    }

    /// From (γ, β) with γ > 3/2, recovering α = ((2(γ−1))² − 1)/4.
    pub fn from_gamma(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma > 1.5 && gamma.is_finite()) {
            return Err(Error::domain("GKParams", format!("gamma = {gamma} must exceed 3/2")));
        }
        positive("beta", beta)?;
        let two_gm1 = 2.0 * (gamma - 1.0);
        let alpha = (two_gm1 * two_gm1 - 1.0) / 4.0;
        Ok(GKParams {
            rho: beta * alpha.sqrt(),
            kappa0: (alpha.sqrt() / beta).sqrt(),
            alpha,
            beta,
            gamma,
            q: gamma - 0.5,
        })
    }

    /// λ_m = 2β(2m + γ).
    pub fn eigenvalue(&self, m: usize) -> f64 {
        2.0 * self.beta * (2.0 * m as f64 + self.gamma)
    }

    /// `ln √(2β^γ m!/Γ(γ+m))`, in log-space so large m cannot overflow.
    pub fn ln_norm(&self, m: usize) -> f64 {
        let ln_fact = ln_gamma_real(m as f64 + 1.0).expect("positive argument");
        let ln_g = ln_gamma_real(self.gamma + m as f64).expect("positive argument");
        0.5 * (std::f64::consts::LN_2 + self.gamma * self.beta.ln() + ln_fact - ln_g)
    }

    /// `ψ_m(ξ) = (2β^γ m!/Γ(γ+m))^{1/2} ξ^{γ−1/2} e^{−βξ²/2} L_m^{(γ−1)}(βξ²)`.
    pub fn eigenfunction(&self, m: usize, xi: f64) -> Result<f64> {
        check_xi(xi)?;
        if xi < XI_FLOOR {
            return Ok(0.0);
        }
        let u = self.beta * xi * xi;
        let envelope = (self.ln_norm(m) + (self.gamma - 0.5) * xi.ln() - 0.5 * u).exp();
        Ok(envelope * laguerre(m, self.gamma - 1.0, u))
    }

    /// `[ψ_0(ξ), …, ψ_{m_max}(ξ)]`; see [`EigenStream`].
    pub fn eigenfunctions(&self, m_max: usize, xi: f64) -> Result<Vec<f64>> {
        Ok(self.eigen_stream(xi)?.take(m_max + 1).collect())
    }

    /// Unbounded sequence `ψ_0(ξ), ψ_1(ξ), …`.
    pub fn eigen_stream(&self, xi: f64) -> Result<EigenStream> {
        check_xi(xi)?;
        let head = if xi < XI_FLOOR {
            0.0
        } else {
            (self.ln_norm(0) + (self.gamma - 0.5) * xi.ln() - 0.5 * self.beta * xi * xi).exp()
        };
        Ok(EigenStream {
            gamma: self.gamma,
            u: self.beta * xi * xi,
            m: 0,
            prev: 0.0,
            cur: head,
        })
    }
}

/// Eigenfunctions at a fixed ξ by the orthonormal form of the Laguerre
/// recurrence, `√((m+1)(m+γ)) ℓ_{m+1} = (2m+γ−u) ℓ_m − √(m(m+γ−1)) ℓ_{m−1}`,
/// which needs no separate normalization and cannot overflow with m.
#[derive(Debug, Clone)]
pub struct EigenStream {
    gamma: f64,
    u: f64,
    m: usize,
    prev: f64,
    cur: f64,
}

impl Iterator for EigenStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let mf = self.m as f64;
        let g = self.gamma;
        let next = ((2.0 * mf + g - self.u) * self.cur - (mf * (mf + g - 1.0)).sqrt() * self.prev)
            / ((mf + 1.0) * (mf + g)).sqrt();
        self.prev = self.cur;
        self.cur = next;
        self.m += 1;
        Some(out)
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("eigenfunction", format!("xi = {xi} must be positive")))
    }
}

/// Spectrum in physical units: `4κ₀⁻¹√ϱ (m + ½ + ¼(√(1+4ϱκ₀²) − 2κ₀√ϱ))`.
///
/// Differs from [`GKParams::eigenvalue`] by the constant 2ϱ that the
/// reduced Hamiltonian drops when the square in the potential is expanded.
pub fn eigenvalue_physical(rho: f64, kappa0: f64, m: usize) -> Result<f64> {
    positive("rho", rho)?;
    positive("kappa0", kappa0)?;
    let sr = rho.sqrt();
    let root = (1.0 + 4.0 * rho * kappa0 * kappa0).sqrt();
    Ok(4.0 * sr / kappa0 * (m as f64 + 0.5 + 0.25 * (root - 2.0 * kappa0 * sr)))
}
