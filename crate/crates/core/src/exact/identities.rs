//! Closed forms around the law of `Y(UE)` and the exponential expansion used
//! in the product formulas.

use num_bigint::BigInt;
use num_traits::One;

use super::fixed::Fixed;
use crate::error::{domain, Result};
use crate::rng::RngStream;

/// `E[exp(-theta U E)] = log(1 + theta)/theta` for independent uniform `U`
/// and standard exponential `E`.
pub fn expected_exp_neg_theta_ue(theta: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return domain("theta must be positive and finite");
    }
    Ok(theta.ln_1p() / theta)
}

/// Monte Carlo mean and standard error of `exp(-theta U E)`.
pub fn monte_carlo_exp_neg_theta_ue(
    theta: f64,
    samples: usize,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    expected_exp_neg_theta_ue(theta)?;
    if samples < 2 {
        return domain("at least two samples are needed");
    }
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let x = (-theta * rng.uniform() * rng.exp1()).exp();
        s += x;
        s2 += x * x;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 - n * mean * mean) / (n - 1.0);
    Ok((mean, (var.max(0.0) / n).sqrt()))
}

/// Yule process pmf: `q_m(t) = (1-e^{-t})^{m-1} e^{-t}`.
pub fn yule_pmf(m: usize, t: f64) -> Result<f64> {
    if m == 0 {
        return domain("yule_pmf needs m >= 1");
    }
    if !(t >= 0.0) {
        return domain("yule_pmf needs t >= 0");
    }
    let p = -(-t).exp_m1();
    Ok(p.powi(m as i32 - 1) * (-t).exp())
}

/// Precision of [`exp_expansion_check`].
pub const EXPANSION_BITS: u32 = 256;

fn check_expansion_args(m: usize, r: f64) -> Result<()> {
    if m < 2 {
        return domain("the expansion needs m >= 2");
    }
    if !(r > 0.0) || !r.is_finite() {
        return domain("r must be positive and finite");
    }
    Ok(())
}

/// `|LHS - RHS|` for
/// `(1-e^{-r})^{m-1} - (1-e^{-r})^m = sum_{k=2}^m C(m-2,k-2) (-1)^k (e^{-(k-1)r} - e^{-kr})`,
/// evaluated in 256-bit fixed point.
pub fn exp_expansion_check(m: usize, r: f64) -> Result<f64> {
    check_expansion_args(m, r)?;
    let bits = EXPANSION_BITS;
    let q = Fixed::from_f64(-r, bits + 64).exp().rescale(bits);
    let one = Fixed::one(bits);
    let p = one.sub(&q);
    let mut pow = one.clone();
    for _ in 0..m - 1 {
        pow = pow.mul(&p);
    }
    let lhs = pow.sub(&pow.mul(&p));
    let mut rhs = Fixed::zero(bits);
    let mut qk = q.clone(); // e^{-(k-1) r}
    let mut binom = BigInt::one(); // C(m-2, k-2)
    for k in 2..=m {
        let next = qk.mul(&q);
        let term = Fixed::from_mantissa(qk.sub(&next).mantissa() * &binom, bits);
        rhs = if k % 2 == 0 { rhs.add(&term) } else { rhs.sub(&term) };
        binom = binom * (m - k) / (k - 1);
        qk = next;
    }
    Ok(lhs.sub(&rhs).abs().to_f64())
}

/// The same discrepancy in plain floating point.
pub fn exp_expansion_check_f64(m: usize, r: f64) -> Result<f64> {
    check_expansion_args(m, r)?;
    let q = (-r).exp();
    let p = -(-r).exp_m1();
    let lhs = p.powi(m as i32 - 1) * q;
    let mut rhs = 0.0;
    let mut binom = 1.0;
    for k in 2..=m {
        let term = binom * (q.powi(k as i32 - 1) - q.powi(k as i32));
        rhs += if k % 2 == 0 { term } else { -term };
        binom = binom * (m - k) as f64 / (k - 1) as f64;
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn laplace_transform_values() {
        assert!((expected_exp_neg_theta_ue(1.0).unwrap() - LN_2).abs() < 1e-16);
        assert!((expected_exp_neg_theta_ue(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!((expected_exp_neg_theta_ue(3.0).unwrap() - 0.462098120373297).abs() < 1e-14);
        assert!(expected_exp_neg_theta_ue(0.0).is_err());
        assert!(expected_exp_neg_theta_ue(-1.0).is_err());
    }

    #[test]
    fn monte_carlo_band() {
        let mut rng = RngStream::new(5, 0);
        let (mean, se) = monte_carlo_exp_neg_theta_ue(3.0, 200_000, &mut rng).unwrap();
        let exact = expected_exp_neg_theta_ue(3.0).unwrap();
        assert!((mean - exact).abs() < 4.0 * se, "{mean} {se}");
    }

    #[test]
    fn yule_values() {
        let t = 0.8;
        assert!((yule_pmf(1, t).unwrap() - (-t).exp()).abs() < 1e-16);
        assert_eq!(yule_pmf(1, 0.0).unwrap(), 1.0);
        assert_eq!(yule_pmf(3, 0.0).unwrap(), 0.0);
        let sum: f64 = (1..=200).map(|m| yule_pmf(m, 2.0).unwrap()).sum();
        let p = 1.0 - (-2f64).exp();
        assert!((sum - (1.0 - p.powi(200))).abs() < 1e-14);
        assert!(yule_pmf(0, 1.0).is_err());
    }

    #[test]
    fn expansion_identity() {
        assert!(exp_expansion_check_f64(2, 0.3).unwrap() < 1e-12);
        assert!(exp_expansion_check(5, 0.7).unwrap() < 1e-12);
        for &r in &[0.1, 1.0, 10.0] {
            assert!(exp_expansion_check(20, r).unwrap() < 1e-60);
        }
        assert!(exp_expansion_check(1, 1.0).is_err());
        assert!(exp_expansion_check(3, 0.0).is_err());
    }
}
