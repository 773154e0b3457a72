//! The alternating sums `s_n = sum_{k=1}^n C(n,k) (-1)^{k+1} log(k+1)` and the
//! quantities built from them.
//!
//! The terms grow like `2^n` while `s_n` decays like `1/(n log n)`, so about
//! `n` bits cancel. Both routes work in fixed point with `n` bits beyond the
//! target: [`stable_alt_sum`] sums the binomial terms directly, and
//! [`AltSumTable`] runs the forward-difference triangle of `log(1 + i)`,
//! which yields every `s_k` for `k <= n_max` in one quadratic sweep.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::fixed::{bits_for_digits, shr_round, Fixed};
use super::HighPrecisionValue;
use crate::error::{domain, Error, Result};

/// Largest index accepted by the alternating-sum routines.
pub const MAX_N: usize = 20_000;
/// Largest number of decimal digits that can be requested.
pub const MAX_DIGITS: u32 = 2_000;
/// Digits used when a caller does not ask for a particular precision.
pub const DEFAULT_DIGITS: u32 = 30;

const LOG_GUARD: u32 = 32;
const SUM_GUARD: u32 = 64;

fn check_request(n: usize, digits: u32) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Size(format!("alternating sums are capped at n = {MAX_N}, got {n}")));
    }
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::Precision(format!(
            "between 1 and {MAX_DIGITS} digits can be requested, got {digits}"
        )));
    }
    Ok(())
}

fn log2_ceil(x: usize) -> u32 {
    usize::BITS - x.max(1).leading_zeros()
}

/// Target bits: `digits` decimal digits relative to `s_n >= 1/n^2`.
fn target_bits(n: usize, digits: u32) -> u32 {
    bits_for_digits(digits) + 2 * log2_ceil(n + 1) + 16
}

/// `2^bits * atanh(1/q)`, truncated; error below `terms + 1` units.
fn atanh_inv(q: u64, bits: u32) -> BigInt {
    let q2 = q * q;
    let mut x: BigInt = (BigInt::one() << bits) / q;
    let mut sum = x.clone();
    let mut k = 1u64;
    loop {
        x /= q2;
        if x.is_zero() {
            return sum;
        }
        sum += &x / (2 * k + 1);
        k += 1;
    }
}

/// `log 1, ..., log n` at a common binary precision, each within one unit
/// in the last place.
#[derive(Clone, Debug)]
pub struct LnTable {
    bits: u32,
    /// `logs[i] = 2^bits * log(i)` for `i >= 1`; `logs[0]` is unused.
    logs: Vec<BigInt>,
}

impl LnTable {
    /// Primes use `log p = log(p-1) + 2 atanh(1/(2p-1))`; composites add the
    /// logs of their smallest prime factor and cofactor. Everything runs at
    /// 32 guard bits and is rounded once at the end.
    pub fn new(n: usize, bits: u32) -> Self {
        let w = bits + LOG_GUARD;
        let mut spf = vec![0usize; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                    j += i;
                }
            }
        }
        let mut raw = vec![BigInt::zero(); n + 1];
        for i in 2..=n {
            raw[i] = if spf[i] == i {
                &raw[i - 1] + (atanh_inv(2 * i as u64 - 1, w) << 1)
            } else {
                &raw[spf[i]] + &raw[i / spf[i]]
            };
        }
        let logs = raw.iter().map(|x| shr_round(x, LOG_GUARD)).collect();
        Self { bits, logs }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.logs.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `2^bits * log(i)`.
    pub fn mantissa(&self, i: usize) -> &BigInt {
        &self.logs[i]
    }

    pub fn ln(&self, i: usize) -> Fixed {
        Fixed::from_mantissa(self.logs[i].clone(), self.bits)
    }
}

fn value_with_error(m: BigInt, bits: u32, out_bits: u32, err_log2: f64, digits: u32) -> HighPrecisionValue {
    let value = Fixed::from_mantissa(m, bits).rescale(out_bits);
    let rounding = -(out_bits as f64) - 1.0;
    HighPrecisionValue::new(value, bits, log2_add(err_log2, rounding), digits)
}

/// `log2(2^a + 2^b)`.
pub(crate) fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// `s_n` by direct summation of the binomial terms.
pub fn stable_alt_sum(n: usize, digits: u32) -> Result<HighPrecisionValue> {
    if n == 0 {
        return domain("stable_alt_sum needs n >= 1");
    }
    check_request(n, digits)?;
    let t = target_bits(n, digits);
    let w = n as u32 + t + SUM_GUARD;
    let logs = LnTable::new(n + 1, w);
    let mut acc = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 1..=n {
        binom = binom * (n - k + 1) / k;
        let term = &binom * logs.mantissa(k + 1);
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    // each log is within one unit; the binomials sum to 2^n - 1
    let err = n as f64 - w as f64;
    Ok(value_with_error(acc, w, t + 8, err, digits))
}

/// `s_0, ..., s_{n_max}` from the forward-difference triangle.
#[derive(Clone, Debug)]
pub struct AltSumTable {
    digits: u32,
    values: Vec<HighPrecisionValue>,
}

impl AltSumTable {
    /// With `d_i = log(1 + i)`, the update `d_i <- d_i - d_{i+1}` applied `k`
    /// times leaves `(-1)^k Δ^k log(1 + i)` in slot `i`, and
    /// `s_k = -(-1)^k Δ^k log(1)`. Each pass doubles the inherited error, so
    /// the sweep starts `n_max` bits above the target and drops one bit per
    /// pass (a floor shift adding at most one unit).
    pub fn new(n_max: usize, digits: u32) -> Result<Self> {
        check_request(n_max, digits)?;
        let t = target_bits(n_max, digits);
        let p0 = n_max as u32 + t + SUM_GUARD;
        let logs = LnTable::new(n_max + 1, p0);
        let mut d: Vec<BigInt> = (0..=n_max).map(|i| logs.mantissa(i + 1).clone()).collect();
        drop(logs);
        let out_bits = t + 8;
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(HighPrecisionValue::new(Fixed::zero(out_bits), p0, f64::NEG_INFINITY, digits));
        for k in 1..=n_max {
            let len = n_max + 1 - k;
            for i in 0..len {
                let (lo, hi) = d.split_at_mut(i + 1);
                lo[i] -= &hi[0];
                lo[i] >>= 1u32;
            }
            d.truncate(len);
            let bits = p0 - k as u32;
            // error after k passes is at most (k + 1) units at 2^-bits
            let err = ((k + 1) as f64).log2() - bits as f64;
            values.push(value_with_error(-&d[0], bits, out_bits, err, digits));
        }
        Ok(Self { digits, values })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn s(&self, n: usize) -> &HighPrecisionValue {
        &self.values[n]
    }

    pub fn s_f64(&self, n: usize) -> f64 {
        self.values[n].to_f64()
    }

    /// The limit probability that the reversed chain enters `l` from `m`.
    pub fn hat_p(&self, l: usize, m: usize) -> Result<HighPrecisionValue> {
        check_hat_p_args(l, m)?;
        if m - 1 > self.n_max() {
            return Err(Error::Size(format!("table holds s_n up to n = {}", self.n_max())));
        }
        Ok(hat_p_from(l, m, &self.values[l - 1], &self.values[m - 1], self.digits))
    }

    /// `P(Y(UE) = m) = s_m / m`.
    pub fn p_y_ue(&self, m: usize) -> Result<HighPrecisionValue> {
        if m == 0 || m > self.n_max() {
            return domain(format!("p_y_ue needs 1 <= m <= {}", self.n_max()));
        }
        Ok(self.values[m].div_int(m as u64))
    }
}

fn check_hat_p_args(l: usize, m: usize) -> Result<()> {
    if l < 1 || m <= l {
        return domain(format!("hat_p needs m > l >= 1, got l = {l}, m = {m}"));
    }
    Ok(())
}

fn hat_p_from(
    l: usize,
    m: usize,
    s_l1: &HighPrecisionValue,
    s_m1: &HighPrecisionValue,
    digits: u32,
) -> HighPrecisionValue {
    if l == 1 {
        return s_m1.div_int((m - 1) as u64).with_digits(digits);
    }
    let (l, m) = (l as u64, m as u64);
    let bits = s_m1.value.bits();
    let num = s_m1.value.mul_int(m as i64);
    let den = s_l1.value.rescale(bits).mul_int(((l - 1) * (m - l) * (m - l + 1)) as i64);
    let value = num.div(&den);
    let rel = log2_add(s_m1.relative_error_log2(), s_l1.relative_error_log2()) + 0.1;
    let abs = log2_add(rel + value.to_f64().abs().log2(), -(bits as f64));
    HighPrecisionValue::new(value, s_m1.working_bits, abs, digits)
}

/// `hat p_{l,m}` from the closed form, each call computing its own sums.
pub fn hat_p(l: usize, m: usize, digits: u32) -> Result<HighPrecisionValue> {
    check_hat_p_args(l, m)?;
    let inner = digits + 4;
    let s_m1 = stable_alt_sum(m - 1, inner)?;
    let s_l1 = if l >= 2 {
        stable_alt_sum(l - 1, inner)?
    } else {
        s_m1.clone()
    };
    Ok(hat_p_from(l, m, &s_l1, &s_m1, digits))
}

/// `P(Y(UE) = m) = s_m / m`; equals `hat p_{1,m+1}`.
pub fn p_y_ue(m: usize, digits: u32) -> Result<HighPrecisionValue> {
    if m == 0 {
        return domain("p_y_ue needs m >= 1");
    }
    Ok(stable_alt_sum(m, digits + 2)?.div_int(m as u64).with_digits(digits))
}

/// Partial exponent `sum_{n=r}^N s_n/(n-r+1)` and its exponential.
#[derive(Clone, Debug)]
pub struct ProductPartial {
    pub r: usize,
    pub terms: usize,
    pub exponent: HighPrecisionValue,
    pub product: HighPrecisionValue,
}

pub fn product_partial(r: usize, terms: usize, digits: u32) -> Result<ProductPartial> {
    if r == 0 || terms < r {
        return domain(format!("product_partial needs N >= r >= 1, got r = {r}, N = {terms}"));
    }
    let table = AltSumTable::new(terms, digits + 4)?;
    product_partial_from(&table, r, terms, digits)
}

/// As [`product_partial`] with the sums taken from `table`.
pub fn product_partial_from(
    table: &AltSumTable,
    r: usize,
    terms: usize,
    digits: u32,
) -> Result<ProductPartial> {
    if r == 0 || terms < r {
        return domain(format!("product_partial needs N >= r >= 1, got r = {r}, N = {terms}"));
    }
    if terms > table.n_max() {
        return Err(Error::Size(format!("table holds s_n up to n = {}", table.n_max())));
    }
    let bits = table.s(r).value.bits();
    let mut sum = Fixed::zero(bits);
    let mut err = f64::NEG_INFINITY;
    for n in r..=terms {
        let j = (n - r + 1) as u64;
        sum.add_assign(&table.s(n).value.div_int(j));
        err = log2_add(err, table.s(n).error_log2 - (j as f64).log2());
        err = log2_add(err, -(bits as f64));
    }
    let working = table.s(terms).working_bits;
    let exponent = HighPrecisionValue::new(sum.clone(), working, err, digits);
    let e = sum.exp();
    // |d e^x| <= e^x |dx| plus a few units from the series
    let perr = log2_add(err + e.to_f64().log2() + 0.1, 2.0 - bits as f64);
    let product = HighPrecisionValue::new(e, working, perr, digits);
    Ok(ProductPartial {
        r,
        terms,
        exponent,
        product,
    })
}

/// Largest `n` for [`inner_product_exact`].
pub const MAX_EXACT_INNER: usize = 16;

/// `prod_{k=1}^n (k+1)^{C(n,k) (-1)^{k+1}}` as an exact rational.
pub fn inner_product_exact(n: usize) -> Result<BigRational> {
    if n == 0 {
        return domain("inner_product_exact needs n >= 1");
    }
    if n > MAX_EXACT_INNER {
        return Err(Error::Size(format!("exact products are capped at n = {MAX_EXACT_INNER}")));
    }
    // exponent of each prime p <= n + 1
    let mut exps = vec![0i64; n + 2];
    let mut binom = 1i64;
    for k in 1..=n {
        binom = binom * (n - k + 1) as i64 / k as i64;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let mut x = k + 1;
        let mut p = 2;
        while x > 1 {
            while x % p == 0 {
                exps[p] += sign * binom;
                x /= p;
            }
            p += 1;
        }
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, &e) in exps.iter().enumerate() {
        if e > 0 {
            num *= BigInt::from(p).pow(e as u32);
        } else if e < 0 {
            den *= BigInt::from(p).pow((-e) as u32);
        }
    }
    let g = num.gcd(&den);
    Ok(BigRational::new(num / &g, den / g))
}

/// `log` of a positive rational of moderate size, as f64.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "log of a nonpositive rational");
    Fixed::from_ratio(x.numer(), x.denom(), 128).to_f64().ln()
}
