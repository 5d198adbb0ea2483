/// 1/phi
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub iterations: u32,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Only interior points are evaluated, so `f` may be undefined at the ends.
/// Stops once the bracket is narrower than `tol`.
pub fn golden_section_maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> GoldenResult {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;

    while b - a > tol && iterations < 500 {
        if fc >= fd {
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
        iterations += 1;
    }

    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let (x, value) = [(mid, fm), (c, fc), (d, fd)]
        .into_iter()
        .fold((mid, fm), |best, cand| if cand.1 > best.1 { cand } else { best });
    GoldenResult {
        x,
        value,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let r = golden_section_maximize(|x| -(x - 1.234).powi(2), -10.0, 10.0, 1e-8);
        assert!((r.x - 1.234).abs() < 1e-8);
        assert!(r.value <= 0.0 && r.value > -1e-15);
    }

    #[test]
    fn tolerates_undefined_endpoints() {
        let f = |x: f64| (x * (1.0 - x)).ln();
        let r = golden_section_maximize(f, 0.0, 1.0, 1e-6);
        assert!((r.x - 0.5).abs() < 1e-6);
    }

    #[test]
    fn boundary_peak_converges_to_the_edge() {
        let r = golden_section_maximize(|x| x, 2.0, 3.0, 1e-6);
        assert!(r.x > 3.0 - 1e-6);
    }
}
