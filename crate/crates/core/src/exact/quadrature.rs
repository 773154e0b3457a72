//! Adaptive Gauss–Kronrod (7, 15) quadrature and the integral representation
//! of `hat p_{1,m}`, used as a cancellation-free cross-check of the
//! alternating sums.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::fixed::Fixed;
use super::HighPrecisionValue;
use crate::error::{domain, Error, Result};

/// Kronrod abscissae on `[-1, 1]` (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and `|K15 - G7|` on one interval.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive integration over `[a, b]`, starting from the given
/// breakpoints and bisecting the interval with the largest error estimate.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<QuadratureResult> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("breakpoints must be increasing");
    }
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        heap.push(Piece { a: w[0], b: w[1], value: v, err: e });
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error_estimate: err,
                intervals: heap.len(),
            });
        }
        if heap.len() >= max_intervals {
            return Err(Error::Quadrature(format!(
                "error estimate {err:e} after {max_intervals} intervals"
            )));
        }
        let worst = heap.pop().expect("at least one interval");
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gk15(&f, a, b);
            heap.push(Piece { a, b, value: v, err: e });
        }
    }
}

/// `hat p_{1,m} = (1/(m-1)) ∫_0^∞ e^{-s} (1-e^{-s})^{m-1} / s ds`, the
/// substitution `u = 1 - e^{-s}` of `-(1/(m-1)) ∫_0^1 u^{m-1}/log(1-u) du`.
/// The integrand is bounded at 0 and the range is cut at `log m + 50`.
pub fn integral_oracle(m: usize) -> Result<HighPrecisionValue> {
    if m < 2 {
        return domain("integral_oracle needs m >= 2");
    }
    let p = (m - 1) as i32;
    let f = |s: f64| {
        if s == 0.0 {
            return if p == 1 { 1.0 } else { 0.0 };
        }
        (-s).exp() * (-(-s).exp_m1()).powi(p) / s
    };
    let peak = (m as f64).ln();
    let top = peak + 50.0;
    let mut cuts = vec![0.0];
    let mut x = 0.25;
    while x < top {
        cuts.push(x);
        x *= 2.0;
    }
    cuts.push(peak);
    cuts.push(top);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let r = gauss_kronrod(f, &cuts, 1e-15, 0.0, 4000)?;
    let value = r.value / (m - 1) as f64;
    let err = (r.error_estimate / (m - 1) as f64 + 64.0 * f64::EPSILON * value.abs()).log2();
    if err - value.abs().log2() > -12.0 * std::f64::consts::LOG2_10 {
        return Err(Error::Quadrature(format!("only {:e} relative accuracy for m = {m}", err.exp2() / value)));
    }
    Ok(HighPrecisionValue::new(Fixed::from_f64(value, 1100), 53, err, 15))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exactness() {
        for d in 0..=22 {
            let f = |x: f64| x.powi(d);
            let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
            let (k, e) = gk15(&f, -1.0, 1.0);
            assert!((k - exact).abs() < 1e-14, "degree {d}");
            // the embedded Gauss rule is exact up to degree 13
            if d <= 13 {
                assert!(e < 1e-14, "degree {d}");
            }
        }
        let (_, e) = gk15(&|x: f64| x.powi(14), -1.0, 1.0);
        assert!(e > 1e-6);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let r = gauss_kronrod(|x: f64| 1.0 / (1e-4 + x * x), &[-1.0, 1.0], 1e-13, 0.0, 500).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-10 * exact);
        assert!(gauss_kronrod(|x: f64| x, &[1.0, 0.0], 1e-10, 0.0, 10).is_err());
        assert!(matches!(
            gauss_kronrod(|x: f64| 1.0 / x.abs().sqrt(), &[-1.0, 1.0], 1e-15, 0.0, 8),
            Err(Error::Quadrature(_))
        ));
    }

    #[test]
    fn oracle_first_values() {
        let ln2 = std::f64::consts::LN_2;
        let v = integral_oracle(2).unwrap();
        assert!((v.to_f64() - ln2).abs() < 1e-13);
        assert!(v.certified_digits() >= 12);
        let s2 = 2.0 * ln2 - 3f64.ln();
        assert!((integral_oracle(3).unwrap().to_f64() - 0.5 * s2).abs() < 1e-14);
        assert!(integral_oracle(1).is_err());
    }
}
