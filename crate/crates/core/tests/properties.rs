use gkcs::coherent::{cs_wavefunction_closed, cs_wavefunction_series, normalization_closed, CSLabel};
use gkcs::gk_model::GKParams;
use gkcs::specfun::{hyp1f1, hyp2f1, mp_poly, MPPolyParams};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #[test]
    fn mp_reflection(m in 0usize..30, lambda in 0.3f64..3.0, theta in 0.2f64..2.9, x in -4.0f64..4.0) {
        let p = MPPolyParams::new(lambda, theta).unwrap();
        let q = MPPolyParams::new(lambda, PI - theta).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (mp_poly(m, p, x), sign * mp_poly(m, q, -x));
        prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn kummer_transformation(ar in 0.1f64..3.0, ai in -2.0f64..2.0, c in 0.5f64..4.0, zr in -15.0f64..15.0, zi in -15.0f64..15.0) {
        let (a, c, z) = (Complex64::new(ar, ai), Complex64::new(c, 0.0), Complex64::new(zr, zi));
        let lhs = hyp1f1(a, c, z).unwrap().value;
        let rhs = z.exp() * hyp1f1(c - a, c, -z).unwrap().value;
        prop_assert!(close(lhs, rhs, 1e-9), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn gauss_parameter_symmetry_and_euler(
        ar in 0.1f64..2.0, ai in -1.5f64..1.5, br in 0.1f64..2.0, bi in -1.5f64..1.5,
        c in 1.0f64..4.0, r in 0.0f64..0.7, phi in -PI..PI,
    ) {
        let (a, b, c) = (Complex64::new(ar, ai), Complex64::new(br, bi), Complex64::new(c, 0.0));
        let z = Complex64::from_polar(r, phi);
        let f = hyp2f1(a, b, c, z).unwrap().value;
        prop_assert!(close(f, hyp2f1(b, a, c, z).unwrap().value, 1e-12));
        let euler = (1.0 - z).powc(c - a - b) * hyp2f1(c - a, c - b, c, z).unwrap().value;
        prop_assert!(close(f, euler, 1e-10), "{} vs {}", f, euler);
    }

    #[test]
    fn normalization_even_at_right_angle(gamma in 1.6f64..4.0, beta in 0.5f64..2.0, eps in 0.05f64..0.3, x in 0.0f64..3.0) {
        let p = GKParams::from_gamma(gamma, beta).unwrap();
        let l = CSLabel::new(p, PI / 2.0, eps, x).unwrap();
        let n1 = normalization_closed(&l).unwrap();
        let n2 = normalization_closed(&l.with_x(-x)).unwrap();
        prop_assert!((n1 - n2).abs() <= 1e-10 * n1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wavefunction_routes_agree(
        gamma in 1.6f64..3.8, beta in 0.5f64..2.0, eps in 0.05f64..0.3,
        theta in 0.5f64..2.6, x in -3.0f64..3.0, xi in 0.05f64..4.0,
    ) {
        let l = CSLabel::new(GKParams::from_gamma(gamma, beta).unwrap(), theta, eps, x).unwrap();
        let closed = cs_wavefunction_closed(&l, xi).unwrap();
        let series = cs_wavefunction_series(&l, xi, 1e-13).unwrap().value;
        prop_assert!((closed - series).norm() <= 1e-8 * closed.norm().max(1e-3), "{} vs {}", closed, series);
    }
}
