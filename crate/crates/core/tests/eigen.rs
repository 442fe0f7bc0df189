use gkcs::gk_model::GKParams;

const PARAMS: [(f64, f64); 6] = [(1.8, 0.5), (2.5, 1.0), (3.5, 2.0), (1.8, 2.0), (3.5, 0.5), (2.5, 0.5)];

/// Relative L² residual of the second-difference discretization of
/// `−ψ'' + (β²ξ² + α/ξ²)ψ = λψ` at interior nodes of spacing `h` on [0.01, 12].
fn residual(p: &GKParams, m: usize, h: f64) -> f64 {
    let n = ((12.0 - 0.01) / h).round() as usize;
    let psi: Vec<f64> = (0..=n)
        .map(|k| p.eigenfunction(m, 0.01 + k as f64 * h).unwrap())
        .collect();
    let lam = p.eigenvalue(m);
    let (mut res, mut norm) = (0.0, 0.0);
    for k in 1..n {
        let x = 0.01 + k as f64 * h;
        let d2 = (psi[k + 1] - 2.0 * psi[k] + psi[k - 1]) / (h * h);
        let r = -d2 + (p.beta * p.beta * x * x + p.alpha / (x * x) - lam) * psi[k];
        res += r * r;
        norm += (lam * psi[k]).powi(2);
    }
    (res / norm).sqrt()
}

#[test]
fn eigenfunctions_solve_the_radial_equation() {
    for gamma in [2.5, 3.5] {
        for beta in [0.5, 1.0, 2.0] {
            let p = GKParams::from_gamma(gamma, beta).unwrap();
            for m in 0..=10 {
                let rel = residual(&p, m, 1e-3);
                assert!(rel <= 1e-4, "γ={gamma} β={beta} m={m}: residual {rel:e}");
            }
        }
    }
}

// For γ < 2, ψ ~ ξ^{γ−1/2} is rough enough at the left end that h = 1e-3
// leaves a residual slightly above 1e-4; it is pure discretization error,
// shrinking by 4x per halving of h.
#[test]
fn small_gamma_residual_is_second_order_discretization_error() {
    for beta in [0.5, 1.0, 2.0] {
        let p = GKParams::from_gamma(1.8, beta).unwrap();
        for m in 0..=10 {
            let (coarse, fine) = (residual(&p, m, 1e-3), residual(&p, m, 5e-4));
            assert!(coarse <= 2e-4, "β={beta} m={m}: residual {coarse:e}");
            let order = (coarse / fine).log2();
            assert!((order - 2.0).abs() < 0.1, "β={beta} m={m}: observed order {order}");
        }
    }
}

#[test]
fn psi_m_has_m_nodes() {
    for (gamma, beta) in PARAMS {
        let p = GKParams::from_gamma(gamma, beta).unwrap();
        let end = ((4.0 * 25.0 + 2.0 * gamma + 40.0) / beta).sqrt();
        for m in 0..=25 {
            let mut prev = p.eigenfunction(m, 1e-3).unwrap();
            let mut changes = 0;
            for k in 1..=20_000 {
                let v = p.eigenfunction(m, 1e-3 + end * k as f64 / 20_000.0).unwrap();
                if v != 0.0 && prev != 0.0 && (v < 0.0) != (prev < 0.0) {
                    changes += 1;
                }
                if v != 0.0 {
                    prev = v;
                }
            }
            assert_eq!(changes, m, "γ={gamma} β={beta}");
        }
    }
}

#[test]
fn streamed_and_direct_eigenfunctions_agree() {
    let p = GKParams::from_gamma(2.5, 1.0).unwrap();
    for xi in [0.05, 0.7, 2.0, 5.5] {
        let streamed = p.eigenfunctions(60, xi).unwrap();
        for (m, s) in streamed.iter().enumerate() {
            let d = p.eigenfunction(m, xi).unwrap();
            assert!((s - d).abs() <= 1e-11 * d.abs().max(1.0), "m={m} ξ={xi}: {s} vs {d}");
        }
    }
}

#[test]
fn spectrum_is_equally_spaced_and_starts_at_2_beta_gamma() {
    let p = GKParams::from_physical(1.0, 1.0).unwrap();
    assert_eq!(p.beta, 1.0);
    for m in 0..5 {
        assert!((p.eigenvalue(m + 1) - p.eigenvalue(m) - 4.0).abs() < 1e-14);
    }
    assert!((p.eigenvalue(0) - 2.0 * p.beta * p.gamma).abs() < 1e-14);
}
