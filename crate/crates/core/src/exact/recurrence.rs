//! Hitting probabilities of the block-counting chain run backwards from
//! its absorption.
//!
//! `x_n^{(m)}` is the probability that the chain started at `n` enters 1 from
//! `m`. It satisfies `x_m = 1/(m-1)^2` and, for `n > m`,
//! `x_n = n/(n-1) * sum_{j=m}^{n-1} x_j / ((n-j)(n-j+1))`.
//! The same map with other initial values gives the `y` tables.

use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::fixed::{bits_for_digits, Fixed};
use crate::error::{domain, Error, Result};

/// Largest `n_max` for the quadratic high-precision tables.
pub const MAX_TABLE_N: usize = 20_000;
/// Largest `n_max` for exact rational tables.
pub const MAX_EXACT_N: usize = 400;
/// Largest `n_max` for the f64 tables.
pub const MAX_F64_N: usize = 10_000_000;

/// Arithmetic needed by the recurrences.
pub trait Scalar: Clone + Debug {
    /// `num / den` in the same number system (and precision) as `self`.
    fn ratio_like(&self, num: u64, den: u64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn to_f64(&self) -> f64;
    fn mul_ratio(&self, num: u64, den: u64) -> Self {
        self.mul(&self.ratio_like(num, den))
    }
}

impl Scalar for f64 {
    fn ratio_like(&self, num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn mul_ratio(&self, num: u64, den: u64) -> Self {
        self * num as f64 / den as f64
    }
}

impl Scalar for BigRational {
    fn ratio_like(&self, num: u64, den: u64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for Fixed {
    fn ratio_like(&self, num: u64, den: u64) -> Self {
        Fixed::from_u64_ratio(num, den, self.bits())
    }
    fn add(&self, o: &Self) -> Self {
        Fixed::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Fixed::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Fixed::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Fixed::div(self, o)
    }
    fn to_f64(&self) -> f64 {
        Fixed::to_f64(self)
    }
    fn mul_ratio(&self, num: u64, den: u64) -> Self {
        Fixed::mul_ratio(self, num, den)
    }
}

/// A rate that is either an exact rational or a real number.
#[derive(Clone, Debug, PartialEq)]
pub enum RateValue {
    Exact(BigRational),
    Real(f64),
}

impl RateValue {
    pub fn exact(num: i64, den: i64) -> Self {
        RateValue::Exact(BigRational::new(num.into(), den.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RateValue::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RateValue::Exact(r) => r.is_zero(),
            RateValue::Real(x) => *x == 0.0,
        }
    }

    fn combine(
        &self,
        o: &Self,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        real: impl Fn(f64, f64) -> f64,
    ) -> Self {
        match (self, o) {
            (RateValue::Exact(a), RateValue::Exact(b)) => RateValue::Exact(exact(a, b)),
            _ => RateValue::Real(real(self.to_f64(), o.to_f64())),
        }
    }

    /// Exact equality for rationals, `1e-12` relative otherwise.
    pub fn agrees(&self, o: &Self) -> bool {
        match (self, o) {
            (RateValue::Exact(a), RateValue::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), o.to_f64());
                (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
            }
        }
    }
}

impl Scalar for RateValue {
    fn ratio_like(&self, num: u64, den: u64) -> Self {
        match self {
            RateValue::Exact(_) => RateValue::Exact(BigRational::new(num.into(), den.into())),
            RateValue::Real(_) => RateValue::Real(num as f64 / den as f64),
        }
    }
    fn add(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a + b, |a, b| a + b)
    }
    fn sub(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a - b, |a, b| a - b)
    }
    fn mul(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a * b, |a, b| a * b)
    }
    fn div(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a / b, |a, b| a / b)
    }
    fn to_f64(&self) -> f64 {
        match self {
            RateValue::Exact(r) => ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
            RateValue::Real(x) => *x,
        }
    }
}

/// Which recurrence a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// `x_n^{(m)}`.
    X { m: usize },
    /// `y_n^{(l,m)}`: enter `l` from `m`.
    EnterFrom { l: usize, m: usize },
    /// `y_n^{(l)}`: hit `l`.
    Hit { l: usize },
    /// Entering 1 from `m` under general Lambda-coalescent rates.
    General { m: usize },
}

/// Values indexed by `n` from `start` to `n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTable<S> {
    pub kind: TableKind,
    pub start: usize,
    pub values: Vec<S>,
    /// Decimal precision the table was computed for, when it is approximate.
    pub digits: Option<u32>,
}

impl<S: Scalar> RecurrenceTable<S> {
    pub fn n_max(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<&S> {
        n.checked_sub(self.start).and_then(|i| self.values.get(i))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }

    /// Pairs `(n, value)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &S)> {
        self.values.iter().enumerate().map(move |(i, v)| (self.start + i, v))
    }

    /// Largest `|x_{n-1} - x_n| (n-1) / start` over the table; the
    /// hitting-probability bound says it is at most 1.
    pub fn increment_bound_ratio(&self) -> f64 {
        let m = self.start as f64;
        self.values
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let n = (self.start + i + 1) as f64;
                w[0].sub(&w[1]).to_f64().abs() * (n - 1.0) / m
            })
            .fold(0.0, f64::max)
    }

    pub fn within_unit_interval(&self) -> bool {
        self.values.iter().all(|v| {
            let x = v.to_f64();
            (0.0..=1.0).contains(&x)
        })
    }
}

fn check_x_args(m: usize, n_max: usize) -> Result<()> {
    if m < 2 {
        return domain(format!("the reversed chain needs m >= 2, got {m}"));
    }
    if n_max < m {
        return domain(format!("need n_max >= m, got n_max = {n_max}, m = {m}"));
    }
    Ok(())
}

/// The common recurrence from `values[0]` at `n = start`, quadratic time.
fn run_recurrence<S: Scalar>(start: usize, init: S, n_max: usize) -> Vec<S> {
    let zero = init.ratio_like(0, 1);
    let mut values = Vec::with_capacity(n_max + 1 - start);
    values.push(init);
    for n in start + 1..=n_max {
        let mut acc = zero.clone();
        for (i, x) in values.iter().enumerate() {
            let d = (n - start - i) as u64;
            acc = acc.add(&x.mul_ratio(1, d * (d + 1)));
        }
        values.push(acc.mul_ratio(n as u64, n as u64 - 1));
    }
    values
}

/// Binary precision for a quadratic table: each step adds at most `n` half
/// units and the map does not expand errors.
fn table_bits(digits: u32, n_max: usize) -> u32 {
    bits_for_digits(digits) + 2 * (usize::BITS - n_max.leading_zeros()) + 32
}

fn check_table_size(n_max: usize, cap: usize) -> Result<()> {
    if n_max > cap {
        return Err(Error::Size(format!("table size {n_max} exceeds the cap {cap}")));
    }
    Ok(())
}

/// `x_n^{(m)}` for `m <= n <= n_max` in fixed point with `digits` decimal
/// digits.
pub fn x_table(m: usize, n_max: usize, digits: u32) -> Result<RecurrenceTable<Fixed>> {
    check_x_args(m, n_max)?;
    check_table_size(n_max, MAX_TABLE_N)?;
    let bits = table_bits(digits, n_max);
    let init = Fixed::from_u64_ratio(1, ((m - 1) * (m - 1)) as u64, bits);
    Ok(RecurrenceTable {
        kind: TableKind::X { m },
        start: m,
        values: run_recurrence(m, init, n_max),
        digits: Some(digits),
    })
}

/// `x_n^{(m)}` as exact rationals.
pub fn x_table_exact(m: usize, n_max: usize) -> Result<RecurrenceTable<BigRational>> {
    check_x_args(m, n_max)?;
    check_table_size(n_max, MAX_EXACT_N)?;
    let init = BigRational::new(1.into(), BigInt::from((m - 1) * (m - 1)));
    Ok(RecurrenceTable {
        kind: TableKind::X { m },
        start: m,
        values: run_recurrence(m, init, n_max),
        digits: None,
    })
}

/// `x_n^{(m)}` in f64 by the quadratic recurrence.
pub fn x_table_f64_direct(m: usize, n_max: usize) -> Result<RecurrenceTable<f64>> {
    check_x_args(m, n_max)?;
    check_table_size(n_max, MAX_TABLE_N * 10)?;
    let init = 1.0 / ((m - 1) * (m - 1)) as f64;
    let mut values = vec![init];
    let kernel: Vec<f64> = (0..=n_max - m).map(kernel).collect();
    for n in m + 1..=n_max {
        let len = values.len();
        // reversed kernel: values[i] pairs with d = len - i
        let acc: f64 = values
            .iter()
            .zip(kernel[1..=len].iter().rev())
            .map(|(x, k)| x * k)
            .sum();
        values.push(acc * n as f64 / (n - 1) as f64);
    }
    Ok(RecurrenceTable {
        kind: TableKind::X { m },
        start: m,
        values,
        digits: None,
    })
}

fn kernel(d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        let d = d as f64;
        1.0 / (d * (d + 1.0))
    }
}

const DIRECT_BLOCK: usize = 64;

/// Online convolution by divide and conquer: each left half's contribution
/// to the right half goes through one FFT product, giving `O(n log^2 n)`.
struct OnlineSolver {
    start: usize,
    x: Vec<f64>,
    acc: Vec<f64>,
    planner: FftPlanner<f64>,
}

impl OnlineSolver {
    fn finish(&mut self, i: usize) {
        if i > 0 {
            let n = (self.start + i) as f64;
            self.x[i] = self.acc[i] * n / (n - 1.0);
        }
    }

    fn solve(&mut self, lo: usize, hi: usize) {
        if hi - lo <= DIRECT_BLOCK {
            for i in lo..hi {
                let mut s = 0.0;
                for j in lo..i {
                    s += self.x[j] * kernel(i - j);
                }
                self.acc[i] += s;
                self.finish(i);
            }
            return;
        }
        let mid = (lo + hi) / 2;
        self.solve(lo, mid);
        let size = (hi - lo + (mid - lo)).next_power_of_two();
        let mut a: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); size];
        let mut b = a.clone();
        for t in 0..mid - lo {
            a[t].re = self.x[lo + t];
        }
        for (u, slot) in b.iter_mut().enumerate().take(hi - lo) {
            slot.re = kernel(u);
        }
        let fwd = self.planner.plan_fft_forward(size);
        let inv = self.planner.plan_fft_inverse(size);
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (p, q) in a.iter_mut().zip(&b) {
            *p *= *q;
        }
        inv.process(&mut a);
        let scale = 1.0 / size as f64;
        for i in mid..hi {
            self.acc[i] += a[i - lo].re * scale;
        }
        self.solve(mid, hi);
    }
}

fn online_table(start: usize, init: f64, n_max: usize) -> Vec<f64> {
    let len = n_max + 1 - start;
    let mut s = OnlineSolver {
        start,
        x: vec![0.0; len],
        acc: vec![0.0; len],
        planner: FftPlanner::new(),
    };
    s.x[0] = init;
    s.solve(0, len);
    s.x
}

/// `x_n^{(m)}` in f64, near-linear time.
pub fn x_table_f64(m: usize, n_max: usize) -> Result<RecurrenceTable<f64>> {
    check_x_args(m, n_max)?;
    check_table_size(n_max, MAX_F64_N)?;
    let init = 1.0 / ((m - 1) * (m - 1)) as f64;
    Ok(RecurrenceTable {
        kind: TableKind::X { m },
        start: m,
        values: online_table(m, init, n_max),
        digits: None,
    })
}

fn check_y_args(l: usize, m: usize, n_max: usize) -> Result<()> {
    if l < 2 || m <= l {
        return domain(format!("y tables need m > l >= 2, got l = {l}, m = {m}"));
    }
    if n_max < m {
        return domain("need n_max >= m");
    }
    Ok(())
}

/// `(y^{(l,m)}, y^{(l)})` from their own initial conditions
/// `y_m^{(l,m)} = m/((m-1)(m-l+1)(m-l))` and `y_l^{(l)} = 1`.
pub fn y_tables(
    l: usize,
    m: usize,
    n_max: usize,
    digits: u32,
) -> Result<(RecurrenceTable<Fixed>, RecurrenceTable<Fixed>)> {
    check_y_args(l, m, n_max)?;
    check_table_size(n_max, MAX_TABLE_N)?;
    let bits = table_bits(digits, n_max);
    let init = Fixed::from_u64_ratio(m as u64, ((m - 1) * (m - l + 1) * (m - l)) as u64, bits);
    let enter = RecurrenceTable {
        kind: TableKind::EnterFrom { l, m },
        start: m,
        values: run_recurrence(m, init, n_max),
        digits: Some(digits),
    };
    let hit = RecurrenceTable {
        kind: TableKind::Hit { l },
        start: l,
        values: run_recurrence(l, Fixed::one(bits), n_max),
        digits: Some(digits),
    };
    Ok((enter, hit))
}

/// f64 versions of [`y_tables`], near-linear time.
pub fn y_tables_f64(
    l: usize,
    m: usize,
    n_max: usize,
) -> Result<(RecurrenceTable<f64>, RecurrenceTable<f64>)> {
    check_y_args(l, m, n_max)?;
    check_table_size(n_max, MAX_F64_N)?;
    let init = m as f64 / ((m - 1) * (m - l + 1) * (m - l)) as f64;
    Ok((
        RecurrenceTable {
            kind: TableKind::EnterFrom { l, m },
            start: m,
            values: online_table(m, init, n_max),
            digits: None,
        },
        RecurrenceTable {
            kind: TableKind::Hit { l },
            start: l,
            values: online_table(l, 1.0, n_max),
            digits: None,
        },
    ))
}

type RateFn = dyn Fn(usize, usize) -> Option<RateValue> + Send + Sync;
type TotalFn = dyn Fn(usize) -> Option<RateValue> + Send + Sync;

/// Merger rates `a_{n,k}`: the total rate at which some `k` of `n` blocks
/// merge. The total `b_n` is either supplied or taken as `sum_k a_{n,k}`.
#[derive(Clone)]
pub struct LambdaRates {
    pub name: String,
    rate: Arc<RateFn>,
    total: Option<Arc<TotalFn>>,
}

impl Debug for LambdaRates {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LambdaRates({})", self.name)
    }
}

impl LambdaRates {
    pub fn from_fn(
        name: impl Into<String>,
        rate: impl Fn(usize, usize) -> Option<RateValue> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            rate: Arc::new(rate),
            total: None,
        }
    }

    pub fn with_total(
        mut self,
        total: impl Fn(usize) -> Option<RateValue> + Send + Sync + 'static,
    ) -> Self {
        self.total = Some(Arc::new(total));
        self
    }

    /// `a_{n,k} = n/(k(k-1))`, `b_n = n - 1`.
    pub fn bolthausen_sznitman() -> Self {
        Self::from_fn("bolthausen-sznitman", |n, k| {
            (k >= 2 && k <= n).then(|| RateValue::exact(n as i64, (k * (k - 1)) as i64))
        })
        .with_total(|n| (n >= 2).then(|| RateValue::exact(n as i64 - 1, 1)))
    }

    /// The same rates as floating-point numbers.
    pub fn bolthausen_sznitman_f64() -> Self {
        Self::from_fn("bolthausen-sznitman-f64", |n, k| {
            (k >= 2 && k <= n).then(|| RateValue::Real(n as f64 / (k * (k - 1)) as f64))
        })
        .with_total(|n| (n >= 2).then_some(RateValue::Real(n as f64 - 1.0)))
    }

    /// Binary mergers only: `a_{n,2} = C(n,2)`.
    pub fn kingman() -> Self {
        Self::from_fn("kingman", |n, k| {
            (k >= 2 && k <= n).then(|| {
                if k == 2 {
                    RateValue::exact((n * (n - 1) / 2) as i64, 1)
                } else {
                    RateValue::exact(0, 1)
                }
            })
        })
        .with_total(|n| (n >= 2).then(|| RateValue::exact((n * (n - 1) / 2) as i64, 1)))
    }

    /// These rates with `delta` added to `a_{n,k}` (and to `b_n`).
    pub fn perturbed(&self, n: usize, k: usize, delta: f64) -> Self {
        let base = self.clone();
        let base_total = self.clone();
        let bump = move |v: RateValue| RateValue::Real(v.to_f64() + delta);
        let mut out = Self::from_fn(format!("{} perturbed at ({n},{k})", self.name), move |nn, kk| {
            let v = base.a(nn, kk).ok()?;
            Some(if (nn, kk) == (n, k) { bump(v) } else { v })
        });
        out.total = Some(Arc::new(move |nn| {
            let v = base_total.b(nn).ok()?;
            Some(if nn == n { RateValue::Real(v.to_f64() + delta) } else { v })
        }));
        out
    }

    pub fn a(&self, n: usize, k: usize) -> Result<RateValue> {
        (self.rate)(n, k).ok_or(Error::UndefinedRate { n, k })
    }

    /// `sum_{k=2}^n a_{n,k}`.
    pub fn row_sum(&self, n: usize) -> Result<RateValue> {
        let mut s = self.a(n, 2)?;
        for k in 3..=n {
            s = s.add(&self.a(n, k)?);
        }
        Ok(s)
    }

    pub fn b(&self, n: usize) -> Result<RateValue> {
        match &self.total {
            Some(t) => t(n).ok_or(Error::UndefinedRate { n, k: 0 }),
            None => self.row_sum(n),
        }
    }
}

/// Checks, for `2 <= k <= n <= n_max`, the sampling consistency
/// `a_{n,k} = (n-k+1)/(n+1) a_{n+1,k} + (k+1)/(n+1) a_{n+1,k+1}`, the total
/// `b_n = sum_k a_{n,k}`, and `b_n = b_{n-1} + (2/n) a_{n,2}`.
pub fn lambda_consistency_check(rates: &LambdaRates, n_max: usize) -> Result<bool> {
    for n in 2..=n_max {
        let w = |num: usize| RateValue::exact(num as i64, (n + 1) as i64);
        for k in 2..=n {
            let rhs = w(n - k + 1)
                .mul(&rates.a(n + 1, k)?)
                .add(&w(k + 1).mul(&rates.a(n + 1, k + 1)?));
            if !rates.a(n, k)?.agrees(&rhs) {
                return Ok(false);
            }
        }
        let b = rates.b(n)?;
        if !b.agrees(&rates.row_sum(n)?) {
            return Ok(false);
        }
        if n >= 3 {
            let rhs = rates.b(n - 1)?.add(&RateValue::exact(2, n as i64).mul(&rates.a(n, 2)?));
            if !b.agrees(&rhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `x_n = sum_{k=2}^{n-m+1} (a_{n,k}/b_n) x_{n-k+1}` from a supplied `x_m`.
pub fn general_x_table(
    rates: &LambdaRates,
    m: usize,
    n_max: usize,
    x_m: RateValue,
) -> Result<RecurrenceTable<RateValue>> {
    check_x_args(m, n_max)?;
    let x0 = x_m.to_f64();
    if !(x0 > 0.0 && x0 <= 1.0) {
        return domain("x_m must lie in (0, 1]");
    }
    if !lambda_consistency_check(rates, n_max)? {
        return Err(Error::InconsistentRates(rates.name.clone()));
    }
    let mut values = vec![x_m];
    for n in m + 1..=n_max {
        let b = rates.b(n)?;
        let mut acc = values[0].ratio_like(0, 1);
        for k in 2..=n - m + 1 {
            let a = rates.a(n, k)?;
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&a.mul(&values[n - k + 1 - m]));
        }
        values.push(acc.div(&b));
    }
    Ok(RecurrenceTable {
        kind: TableKind::General { m },
        start: m,
        values,
        digits: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn first_exact_values() {
        let t = x_table_exact(2, 6).unwrap();
        assert_eq!(t.get(2).unwrap(), &q(1, 1));
        assert_eq!(t.get(3).unwrap(), &q(3, 4));
        assert_eq!(t.get(4).unwrap(), &q(13, 18));
        assert!(x_table_exact(1, 6).is_err());
        assert!(x_table_exact(5, 4).is_err());
    }

    #[test]
    fn routes_agree() {
        let m = 3;
        let exact = x_table_exact(m, 120).unwrap().to_f64();
        let fixed = x_table(m, 120, 40).unwrap().to_f64();
        let direct = x_table_f64_direct(m, 120).unwrap().to_f64();
        let fast = x_table_f64(m, 120).unwrap().to_f64();
        for i in 0..exact.len() {
            assert!((exact[i] - fixed[i]).abs() < 1e-16);
            assert!((exact[i] - direct[i]).abs() < 1e-14);
            assert!((exact[i] - fast[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn fast_route_matches_direct_route_at_scale() {
        let a = x_table_f64_direct(2, 5000).unwrap().to_f64();
        let b = x_table_f64(2, 5000).unwrap().to_f64();
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn fixed_table_is_accurate() {
        let a = x_table(2, 60, 60).unwrap();
        let b = x_table_exact(2, 60).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            let yb = Fixed::from_ratio(y.numer(), y.denom(), x.bits());
            assert!(x.sub(&yb).abs().to_f64() < 1e-60);
        }
    }

    #[test]
    fn convergence_towards_log_two() {
        let t = x_table_f64(2, 100_000).unwrap();
        let errs: Vec<f64> = [100, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| (t.get(n).unwrap() - LN_2).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[3] < 0.02);
        assert!(t.within_unit_interval());
        assert!(t.increment_bound_ratio() <= 1.0);
    }

    #[test]
    fn y_tables_scale_x_tables() {
        let (l, m) = (2, 3);
        let (enter, hit) = y_tables(l, m, 200, 30).unwrap();
        assert!((enter.get(3).unwrap().to_f64() - 0.75).abs() < 1e-30);
        assert_eq!(hit.get(2).unwrap().to_f64(), 1.0);
        let xm = x_table(m, 200, 30).unwrap();
        let xl = x_table(l, 200, 30).unwrap();
        let c = (m * (m - 1)) as f64 / ((m - l + 1) * (m - l)) as f64;
        for n in m..=200 {
            let r = enter.get(n).unwrap().to_f64() / xm.get(n).unwrap().to_f64();
            assert!((r - c).abs() < 1e-13);
            let h = hit.get(n).unwrap().to_f64() / xl.get(n).unwrap().to_f64();
            assert!((h - ((l - 1) * (l - 1)) as f64).abs() < 1e-13);
        }
        assert!(y_tables(3, 3, 10, 10).is_err());
        assert!(y_tables(1, 3, 10, 10).is_err());
    }

    #[test]
    fn consistency_of_rate_families() {
        assert!(lambda_consistency_check(&LambdaRates::bolthausen_sznitman(), 40).unwrap());
        assert!(lambda_consistency_check(&LambdaRates::bolthausen_sznitman_f64(), 40).unwrap());
        assert!(lambda_consistency_check(&LambdaRates::kingman(), 40).unwrap());
        let bad = LambdaRates::bolthausen_sznitman().perturbed(5, 3, 0.01);
        assert!(!lambda_consistency_check(&bad, 40).unwrap());
        let short = LambdaRates::from_fn("short", |n, k| {
            (n <= 10 && k >= 2 && k <= n).then(|| RateValue::exact(n as i64, (k * (k - 1)) as i64))
        });
        assert_eq!(
            lambda_consistency_check(&short, 10),
            Err(Error::UndefinedRate { n: 11, k: 2 })
        );
    }

    #[test]
    fn general_table_specialisations() {
        let bs = general_x_table(&LambdaRates::bolthausen_sznitman(), 2, 30, RateValue::exact(1, 1)).unwrap();
        let x = x_table_exact(2, 30).unwrap();
        for (a, b) in bs.values.iter().zip(&x.values) {
            assert_eq!(a, &RateValue::Exact(b.clone()));
        }
        let king = general_x_table(&LambdaRates::kingman(), 2, 30, RateValue::exact(1, 1)).unwrap();
        assert!(king.values.iter().all(|v| v == &RateValue::exact(1, 1)));
        let bad = LambdaRates::bolthausen_sznitman().perturbed(5, 3, 0.01);
        assert!(matches!(
            general_x_table(&bad, 2, 10, RateValue::exact(1, 1)),
            Err(Error::InconsistentRates(_))
        ));
        assert!(general_x_table(&LambdaRates::kingman(), 2, 10, RateValue::Real(1.5)).is_err());
    }
}
