use gkcs::coherent::{overlap_series, CSLabel, CoherentState};
use gkcs::gk_model::GKParams;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn states(gamma: f64, beta: f64, theta: f64, eps: f64, xs: &[f64]) -> Vec<CoherentState> {
    let p = GKParams::from_gamma(gamma, beta).unwrap();
    xs.iter()
        .map(|&x| CoherentState::new(CSLabel::new(p, theta, eps, x).unwrap()).unwrap())
        .collect()
}

fn gram(s: &[CoherentState]) -> DMatrix<Complex64> {
    DMatrix::from_fn(s.len(), s.len(), |i, j| {
        gkcs::coherent::overlap_with_norms(s[i].label(), s[j].label(), s[i].norm(), s[j].norm()).unwrap()
    })
}

#[test]
fn gram_matrix_is_hermitian_psd_with_unit_diagonal() {
    let xs = [-3.0, -1.2, -0.3, 0.0, 0.4, 1.1, 2.5, 4.0];
    for (gamma, beta, theta, eps) in [(2.5, 1.0, 1.0, 0.1), (1.8, 0.5, 2.0, 0.05), (3.5, 2.0, 1.5, 0.25)] {
        let g = gram(&states(gamma, beta, theta, eps, &xs));
        for i in 0..xs.len() {
            assert!((g[(i, i)] - 1.0).norm() < 1e-12);
            for j in 0..xs.len() {
                assert!((g[(i, j)] - g[(j, i)].conj()).norm() < 1e-12);
                assert!(g[(i, j)].norm() <= 1.0 + 1e-12);
            }
        }
        let eig = g.symmetric_eigen().eigenvalues;
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-10, "γ={gamma}: min eigenvalue {min:e}");
    }
}

#[test]
fn closed_overlap_matches_series() {
    let s = states(2.5, 1.0, 1.2, 0.1, &[-1.0, 0.0, 0.8, 2.0]);
    for a in &s {
        for b in &s {
            let closed = gkcs::coherent::overlap(a.label(), b.label()).unwrap();
            let series = overlap_series(a.label(), b.label(), 1e-13).unwrap();
            assert!((closed - series).norm() < 1e-9, "{closed} vs {series}");
        }
    }
}

#[test]
fn states_at_distant_labels_are_nearly_orthogonal() {
    let s = states(2.5, 1.0, std::f64::consts::FRAC_PI_2, 0.1, &[0.0, 0.5, 2.0, 8.0]);
    let o: Vec<f64> = s[1..]
        .iter()
        .map(|b| {
            gkcs::coherent::overlap_with_norms(s[0].label(), b.label(), s[0].norm(), b.norm())
                .unwrap()
                .norm()
        })
        .collect();
    assert!(o[0] > o[1] && o[1] > o[2], "{o:?}");
}
