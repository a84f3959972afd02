//! Deterministic scalar minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. The endpoints are also evaluated, so
/// the result is never worse than either of them.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = [a, b]
        .into_iter()
        .map(|x| Minimum { x, value: f(x) })
        .min_by(|p, q| p.value.total_cmp(&q.value))
        .expect("two candidates");
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, value) in [(c, fc), (d, fd)] {
        if value < best.value {
            best = Minimum { x, value };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_minimum_and_reversed_bracket() {
        let m = golden_section(|x| x, 2.0, 1.0, 1e-6);
        assert_eq!(m.x, 1.0);
        let m = golden_section(|x| -x, 0.0, 1.0, 1e-6);
        assert_eq!(m.x, 1.0);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (3.0 * x).sin() + 0.1 * x;
        assert_eq!(golden_section(f, 0.0, 2.0, 1e-6), golden_section(f, 0.0, 2.0, 1e-6));
    }
}
