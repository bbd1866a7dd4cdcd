//! Golden-section search for the maximum of a unimodal function on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Shrinks `[lo, hi]` until it is narrower than `tol`.
///
/// The best point seen is returned, endpoints included, so a jump inside the
/// bracket cannot make the result worse than any evaluated sample. Ties keep
/// the smaller abscissa.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let mut best = Maximum {
        x: lo,
        value: f(lo),
    };
    let consider = |x: f64, value: f64, best: &mut Maximum| {
        if value > best.value || (value == best.value && x < best.x) {
            *best = Maximum { x, value };
        }
    };
    let fhi = f(hi);
    consider(hi, fhi, &mut best);

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let m = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn monotone_function_returns_endpoint() {
        let m = golden_section_max(|x| x, 0.0, 2.0, 1e-9);
        assert_eq!(m.x, 2.0);
    }

    #[test]
    fn step_never_loses_to_samples() {
        // jump up at 0.5, decreasing after it
        let f = |x: f64| if x < 0.5 { 0.0 } else { 2.0 - x };
        let m = golden_section_max(f, 0.0, 1.0, 1e-7);
        assert!(m.value >= 1.5 - 1e-6);
        assert!((m.x - 0.5).abs() < 1e-6);
    }
}
