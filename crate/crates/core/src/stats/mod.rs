//! Empirical distributions, goodness-of-fit tests, and the Monte Carlo
//! experiments built on them.

pub mod experiments;

use serde::Serialize;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::{domain, Error, Result};

pub use experiments::*;

/// Significance level of every hypothesis test.
pub const SIGNIFICANCE: f64 = 1e-3;
/// Minimum expected count per chi-square cell.
pub const MIN_EXPECTED: f64 = 5.0;
/// Width of binomial acceptance bands, in standard errors.
pub const SE_BAND: f64 = 4.0;

/// A sorted sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return domain("samples must not be NaN");
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn from_counts(values: &[usize]) -> Self {
        let mut samples: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        samples.sort_unstable_by(f64::total_cmp);
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Fraction of samples at most `x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Sample standard deviation (divisor `len - 1`).
    pub fn sd(&self) -> f64 {
        let n = self.samples.len() as f64;
        let m = self.mean();
        let ss: f64 = self.samples.iter().map(|x| (x - m) * (x - m)).sum();
        (ss / (n - 1.0)).sqrt()
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        self.sd() / (self.samples.len() as f64).sqrt()
    }

    /// Combines two samples; the result does not depend on the order.
    pub fn merge(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.samples, &other.samples);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self { samples: out }
    }
}

/// Outcome of one test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub test: String,
    pub statistic: f64,
    /// Largest statistic that passes.
    pub threshold: f64,
    pub significance: Option<f64>,
    pub df: Option<usize>,
    pub sample_size: usize,
    pub pass: bool,
}

impl TestResult {
    pub fn below(test: impl Into<String>, statistic: f64, threshold: f64, sample_size: usize) -> Self {
        Self {
            test: test.into(),
            statistic,
            threshold,
            significance: None,
            df: None,
            sample_size,
            pass: statistic < threshold,
        }
    }
}

/// `sup_x |F_n(x) - F(x)|` for a continuous reference `F`. At a value
/// repeated in positions `i..j` of the sorted sample the ECDF jumps from
/// `i/n` to `j/n`, so both one-sided gaps are checked there.
pub fn ks_statistic(e: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let s = e.samples();
    if s.is_empty() {
        return domain("the K-S statistic needs at least one sample");
    }
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let mut j = i + 1;
        while j < s.len() && s[j] == s[i] {
            j += 1;
        }
        let f = cdf(s[i]);
        d = d.max(j as f64 / n - f).max(f - i as f64 / n);
        i = j;
    }
    Ok(d)
}

/// K-S test against a fixed threshold.
pub fn ks_test(
    name: &str,
    e: &EmpiricalDistribution,
    cdf: impl Fn(f64) -> f64,
    threshold: f64,
) -> Result<TestResult> {
    let d = ks_statistic(e, cdf)?;
    Ok(TestResult::below(format!("ks:{name}"), d, threshold, e.len()))
}

/// Upper `alpha` quantile of the chi-square law with `df` degrees of freedom.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

fn chi_square_result(test: String, statistic: f64, df: usize, sample_size: usize) -> TestResult {
    let threshold = chi_square_critical(df, SIGNIFICANCE);
    TestResult {
        test,
        statistic,
        threshold,
        significance: Some(SIGNIFICANCE),
        df: Some(df),
        sample_size,
        pass: statistic <= threshold,
    }
}

/// Pearson goodness of fit of `counts` to the probabilities `expected`.
pub fn chi_square_uniformity(counts: &[u64], expected: &[f64]) -> Result<TestResult> {
    if counts.len() != expected.len() || counts.len() < 2 {
        return domain("need matching count and probability vectors with at least two cells");
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return domain("no observations");
    }
    let mass: f64 = expected.iter().sum();
    if (mass - 1.0).abs() > 1e-9 || expected.iter().any(|&p| !(p >= 0.0)) {
        return domain(format!("expected probabilities must sum to 1, got {mass}"));
    }
    let n = total as f64;
    if let Some(i) = expected.iter().position(|&p| p * n < MIN_EXPECTED) {
        return Err(Error::SparseCells(format!(
            "cell {i} expects {:.2} < {MIN_EXPECTED} counts",
            expected[i] * n
        )));
    }
    let stat = counts
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * n;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    Ok(chi_square_result("chi2:gof".into(), stat, counts.len() - 1, total as usize))
}

/// Merges adjacent cells left to right until each expects at least
/// `min_expected` counts; a short remainder joins the last full cell.
pub fn merge_sparse_cells(counts: &[u64], probs: &[f64], min_expected: f64) -> (Vec<u64>, Vec<f64>) {
    let n: u64 = counts.iter().sum();
    let mut out_c = Vec::new();
    let mut out_p = Vec::new();
    let (mut c, mut p) = (0u64, 0.0);
    for (&ci, &pi) in counts.iter().zip(probs) {
        c += ci;
        p += pi;
        if p * n as f64 >= min_expected {
            out_c.push(c);
            out_p.push(p);
            c = 0;
            p = 0.0;
        }
    }
    if c > 0 || p > 0.0 {
        match (out_c.last_mut(), out_p.last_mut()) {
            (Some(lc), Some(lp)) => {
                *lc += c;
                *lp += p;
            }
            _ => {
                out_c.push(c);
                out_p.push(p);
            }
        }
    }
    (out_c, out_p)
}

/// Merges adjacent cells of two count vectors until the pooled expectation
/// of each cell is at least `min_expected` in both rows.
pub fn merge_sparse_pairs(a: &[u64], b: &[u64], min_expected: f64) -> (Vec<u64>, Vec<u64>) {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let frac = na.min(nb) / (na + nb);
    let mut oa = Vec::new();
    let mut ob = Vec::new();
    let (mut ca, mut cb) = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        if (ca + cb) as f64 * frac >= min_expected {
            oa.push(ca);
            ob.push(cb);
            ca = 0;
            cb = 0;
        }
    }
    if ca + cb > 0 {
        match (oa.last_mut(), ob.last_mut()) {
            (Some(x), Some(y)) => {
                *x += ca;
                *y += cb;
            }
            _ => {
                oa.push(ca);
                ob.push(cb);
            }
        }
    }
    (oa, ob)
}

/// Chi-square test that two count vectors come from the same law.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<TestResult> {
    if a.len() != b.len() || a.len() < 2 {
        return domain("need matching count vectors with at least two cells");
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return domain("both samples must be nonempty");
    }
    let total = na + nb;
    let mut stat = 0.0;
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        let col = (x + y) as f64;
        let (ea, eb) = (col * na / total, col * nb / total);
        if ea < MIN_EXPECTED || eb < MIN_EXPECTED {
            return Err(Error::SparseCells(format!("cell {i} expects {:.2} counts", ea.min(eb))));
        }
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    Ok(chi_square_result("chi2:two-sample".into(), stat, a.len() - 1, total as usize))
}

/// Sums independent chi-square statistics and their degrees of freedom into
/// a single test.
pub fn pooled_chi_square(parts: &[TestResult]) -> Result<TestResult> {
    if parts.is_empty() {
        return domain("nothing to pool");
    }
    let stat = parts.iter().map(|t| t.statistic).sum();
    let df = parts.iter().map(|t| t.df.unwrap_or(0)).sum();
    let n = parts.iter().map(|t| t.sample_size).sum();
    if df == 0 {
        return domain("pooled tests have no degrees of freedom");
    }
    Ok(chi_square_result("chi2:pooled".into(), stat, df, n))
}

/// `|p_hat - p| <= 4 sqrt(p(1-p)/n)`, with the standard error from the
/// reference probability.
pub fn binomial_band(name: &str, successes: u64, trials: u64, p: f64) -> TestResult {
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let se = (p * (1.0 - p) / n).sqrt();
    let z = if se > 0.0 {
        (p_hat - p).abs() / se
    } else if p_hat == p {
        0.0
    } else {
        f64::INFINITY
    };
    TestResult {
        test: format!("band:{name}"),
        statistic: z,
        threshold: SE_BAND,
        significance: None,
        df: None,
        sample_size: trials as usize,
        pass: z <= SE_BAND,
    }
}

/// Counts of each value `0..cells`, values at or above `cells - 1` going to
/// the last cell.
pub fn histogram(values: impl IntoIterator<Item = usize>, cells: usize) -> Vec<u64> {
    let mut h = vec![0u64; cells];
    for v in values {
        h[v.min(cells - 1)] += 1;
    }
    h
}

pub fn uniform_cdf(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `exp(-e^{-x})`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// `(2/π) asin(√x)`, the Beta(1/2, 1/2) law.
pub fn arcsine_cdf(x: f64) -> f64 {
    2.0 / std::f64::consts::PI * x.clamp(0.0, 1.0).sqrt().asin()
}

/// `log(1+v)/log 2` on `[0, 1]`.
pub fn log_ratio_cdf(v: f64) -> f64 {
    v.clamp(0.0, 1.0).ln_1p() / std::f64::consts::LN_2
}

/// CDF of Beta(a, b).
pub fn beta_cdf(a: f64, b: f64) -> Result<impl Fn(f64) -> f64> {
    let d = Beta::new(a, b).map_err(|e| Error::Domain(format!("beta({a}, {b}): {e}")))?;
    Ok(move |x: f64| d.cdf(x.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn ecdf_is_right_continuous() {
        let e = EmpiricalDistribution::new(vec![2.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.ecdf(0.5), 0.0);
        assert_eq!(e.ecdf(1.0), 0.25);
        assert_eq!(e.ecdf(2.0), 0.75);
        assert_eq!(e.ecdf(10.0), 1.0);
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_single_sample() {
        let e = EmpiricalDistribution::new(vec![0.3]).unwrap();
        assert!((ks_statistic(&e, uniform_cdf).unwrap() - 0.7).abs() < 1e-15);
        let e = EmpiricalDistribution::new(vec![0.9]).unwrap();
        assert!((ks_statistic(&e, uniform_cdf).unwrap() - 0.9).abs() < 1e-15);
        assert!(ks_statistic(&EmpiricalDistribution::default(), uniform_cdf).is_err());
    }

    #[test]
    fn ks_ties_count_whole_jump() {
        // all mass at 0.5: ECDF jumps 0 -> 1 where F = 0.5
        let e = EmpiricalDistribution::new(vec![0.5; 10]).unwrap();
        assert!((ks_statistic(&e, uniform_cdf).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_calibration_and_power() {
        let mut rng = RngStream::new(3, 0);
        let n = 10_000;
        let u = EmpiricalDistribution::new((0..n).map(|_| rng.uniform()).collect()).unwrap();
        assert!(ks_statistic(&u, uniform_cdf).unwrap() < 1.95 / (n as f64).sqrt());
        assert!(ks_statistic(&u, gumbel_cdf).unwrap() > 0.2);
    }

    #[test]
    fn chi_square_behaviour() {
        let p = [0.25, 0.25, 0.5];
        let exact = chi_square_uniformity(&[250, 250, 500], &p).unwrap();
        assert_eq!(exact.statistic, 0.0);
        assert!(exact.pass);
        let mut rng = RngStream::new(4, 0);
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            let u = rng.uniform();
            counts[if u < 0.25 { 0 } else if u < 0.5 { 1 } else { 2 }] += 1;
        }
        assert!(chi_square_uniformity(&counts, &p).unwrap().pass);
        let mut doubled = counts;
        doubled[0] *= 2;
        assert!(!chi_square_uniformity(&doubled, &p).unwrap().pass);
        assert!(matches!(
            chi_square_uniformity(&[10, 0], &[0.999, 0.001]),
            Err(Error::SparseCells(_))
        ));
        assert!(chi_square_uniformity(&[1, 1], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn critical_values() {
        // standard table: 10.828 for df 1, 16.266 for df 3 at 0.001
        assert!((chi_square_critical(1, 1e-3) - 10.828).abs() < 1e-3);
        assert!((chi_square_critical(3, 1e-3) - 16.266).abs() < 1e-3);
    }

    #[test]
    fn merging_cells() {
        let (c, p) = merge_sparse_cells(&[50, 30, 10, 6, 3, 1], &[0.5, 0.3, 0.1, 0.06, 0.03, 0.01], 5.0);
        assert_eq!(c, vec![50, 30, 10, 10]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x * 100.0 >= 5.0));
        let (a, b) = merge_sparse_pairs(&[40, 40, 2, 1], &[40, 40, 1, 3], 5.0);
        assert_eq!(a.iter().sum::<u64>(), 83);
        assert_eq!(b.iter().sum::<u64>(), 84);
        assert!(chi_square_two_sample(&a, &b).unwrap().pass);
    }

    #[test]
    fn two_sample_and_pooled() {
        let t = chi_square_two_sample(&[500, 500], &[500, 500]).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!(!chi_square_two_sample(&[900, 100], &[100, 900]).unwrap().pass);
        let p = pooled_chi_square(&[t.clone(), t]).unwrap();
        assert_eq!(p.df, Some(2));
    }

    #[test]
    fn bands_and_reference_cdfs() {
        assert!(binomial_band("x", 5000, 10_000, 0.5).pass);
        assert!(!binomial_band("x", 6000, 10_000, 0.5).pass);
        assert!((gumbel_cdf(0.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(gumbel_cdf(f64::INFINITY), 1.0);
        assert_eq!(log_ratio_cdf(1.0), 1.0);
        let b = beta_cdf(0.5, 0.5).unwrap();
        for x in [0.01, 0.2, 0.5, 0.77] {
            assert!((b(x) - arcsine_cdf(x)).abs() < 1e-10);
        }
        assert!(beta_cdf(0.0, 1.0).is_err());
    }

    #[test]
    fn merge_is_order_free() {
        let a = EmpiricalDistribution::new(vec![3.0, 1.0]).unwrap();
        let b = EmpiricalDistribution::new(vec![2.0, 0.0, 5.0]).unwrap();
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b).samples(), &[0.0, 1.0, 2.0, 3.0, 5.0]);
    }
}
