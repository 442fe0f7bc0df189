//! Generalized Laguerre polynomials by upward recurrence.

use twofloat::TwoFloat;

/// `L_m^{(a)}(u)`.
pub fn laguerre(m: usize, a: f64, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + a - u);
    if m == 0 {
        return prev;
    }
    for n in 1..m {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + a - u) * cur - (nf + a) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[L_0^{(a)}(u), …, L_{m_max}^{(a)}(u)]`.
pub fn laguerre_all(m_max: usize, a: f64, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(1.0);
    if m_max == 0 {
        return out;
    }
    out.push(1.0 + a - u);
    for n in 1..m_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + a - u) * out[n] - (nf + a) * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Double-double variant of [`laguerre_all`], for sums whose terms cancel
/// far below double precision.
pub(crate) fn laguerre_all_dd(m_max: usize, a: f64, u: f64) -> Vec<TwoFloat> {
    let one = TwoFloat::from(1.0);
    let a2 = TwoFloat::from(a);
    let u2 = TwoFloat::from(u);
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(one);
    if m_max == 0 {
        return out;
    }
    out.push(one + a2 - u2);
    for n in 1..m_max {
        let nf = n as f64;
        let next = ((a2 - u2 + (2.0 * nf + 1.0)) * out[n] - (a2 + nf) * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(laguerre(0, 0.7, 3.0), 1.0);
        assert_eq!(laguerre(1, 0.7, 3.0), 1.0 + 0.7 - 3.0);
        // L_2^{(a)}(u) = ((a+1)(a+2) − 2(a+2)u + u²)/2
        let (a, u) = (1.5, 0.8);
        let want = ((a + 1.0) * (a + 2.0) - 2.0 * (a + 2.0) * u + u * u) / 2.0;
        assert!((laguerre(2, a, u) - want).abs() < 1e-15);
    }

    #[test]
    fn reference_values() {
        // 40-digit mpmath laguerre(n, a, x)
        let table = [
            (10, 1.5, 2.0, 2.603608117212904),
            (25, 0.8, 7.5, 10.033848175865112),
            (60, 1.5, 0.3, 12.749513301093696),
        ];
        for (m, a, u, want) in table {
            let got = laguerre(m, a, u);
            assert!(((got - want) / want).abs() < 1e-12, "L_{m}^({a})({u}) = {got}");
        }
    }

    #[test]
    fn table_and_double_double_agree() {
        let all = laguerre_all(30, 0.8, 2.2);
        let dd = laguerre_all_dd(30, 0.8, 2.2);
        for (m, (&v, w)) in all.iter().zip(&dd).enumerate() {
            assert_eq!(v, laguerre(m, 0.8, 2.2));
            assert!((v - f64::from(*w)).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }
}
