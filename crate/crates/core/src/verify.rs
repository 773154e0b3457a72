//! The acceptance suite: seventeen numbered criteria, each made of one or
//! more checks, run at full or reduced scale.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coalescent::{forward_row_sum, lambda};
use crate::error::Result;
use crate::exact::{
    exp_expansion_check, exact_j_distribution, exact_j_mean, inner_product_exact, integral_oracle,
    lambda_consistency_check, product_partial_from, x_table_f64, AltSumTable, LambdaRates,
};
use crate::rng::derive_seed;
use crate::stats::{
    cut_closure_experiment, cut_count_experiment, last_collision_experiment,
    marked_tree_experiment, reversed_chain_experiment, rrt_uniformity_experiment,
    absorption_experiment, block_of_one_experiment, gem_first_frequency_experiment,
    restriction_experiment, CutEngine, ExperimentReport, TestResult,
};

/// Number of criteria.
pub const CRITERIA: u32 = 17;
/// Digits of the shared alternating-sum table.
const TABLE_DIGITS: u32 = 20;
/// Largest index of the shared table.
const TABLE_N: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Sizes as stated in the criteria.
    Full,
    /// Monte Carlo sample counts of `10^5` cut to `2*10^4`, and the largest
    /// `n` of the last-collision and cut-count checks lowered.
    Fast,
}

impl Scale {
    fn big(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Fast => full.min(20_000),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    /// `"9"`, or `"9a"` etc. for the parts of a split criterion.
    pub id: String,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<TestResult>,
    pub notes: Vec<String>,
}

impl CriterionResult {
    fn new(id: impl Into<String>, title: &str) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            pass: true,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, t: TestResult) {
        self.pass &= t.pass;
        self.checks.push(t);
    }

    fn checks_from(&mut self, rep: &ExperimentReport, prefix: &str) {
        for (k, t) in &rep.test_statistics {
            let mut t = t.clone();
            t.test = format!("{prefix}{k}");
            self.check(t);
        }
        if rep.test_statistics.is_empty() {
            self.pass = false;
        }
        self.notes.extend(rep.notes.iter().map(|s| format!("{prefix}{s}")));
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.check(TestResult {
            test: name.into(),
            statistic: if ok { 0.0 } else { 1.0 },
            threshold: 0.5,
            significance: None,
            df: None,
            sample_size: 0,
            pass: ok,
        });
    }

    /// One-line summary, `PASS 9a: title`.
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.title)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Scale,
    pub seed: u64,
    pub version: String,
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
}

fn shared_table() -> Result<&'static AltSumTable> {
    static TABLE: OnceLock<AltSumTable> = OnceLock::new();
    if let Some(t) = TABLE.get() {
        return Ok(t);
    }
    let t = AltSumTable::new(TABLE_N, TABLE_DIGITS)?;
    Ok(TABLE.get_or_init(|| t))
}

fn seed_for(seed: u64, id: u32) -> u64 {
    derive_seed(seed, &[0x7665_7269_6679, id as u64])
}

fn below(name: &str, statistic: f64, threshold: f64) -> TestResult {
    TestResult::below(name, statistic, threshold, 0)
}

/// Runs criterion `id` (1 to 17). Criterion 9 comes back as four parts.
pub fn run_criterion(id: u32, scale: Scale, seed: u64) -> Result<Vec<CriterionResult>> {
    let s = seed_for(seed, id);
    let one = |r: CriterionResult| Ok(vec![r]);
    match id {
        1 => {
            let mut c = CriterionResult::new("1", "uniform recursive trees on 4 vertices");
            c.checks_from(&rrt_uniformity_experiment(4, scale.big(100_000), s)?, "");
            one(c)
        }
        2 => {
            let mut c = CriterionResult::new("2", "a uniform cut leaves a uniform recursive tree");
            c.checks_from(&cut_closure_experiment(5, scale.big(100_000), s)?, "");
            one(c)
        }
        3 => {
            let mut c = CriterionResult::new("3", "cutting engine matches the exact collision law");
            for n in 5..=8 {
                let rep = cut_count_experiment(n, scale.big(100_000), s, CutEngine::Cutting)?;
                c.checks_from(&rep, &format!("n{n}:"));
            }
            one(c)
        }
        4 => {
            let mut c = CriterionResult::new("4", "edge records match the exact collision law");
            c.checks_from(&cut_count_experiment(7, scale.big(100_000), s, CutEngine::Records)?, "");
            one(c)
        }
        5 => {
            let mut c = CriterionResult::new("5", "restriction consistency of coupled trees");
            c.checks_from(&restriction_experiment(&[50, 100], 100, s)?, "");
            one(c)
        }
        6 => {
            let mut c = CriterionResult::new("6", "reversed chain frequencies at n = 1000");
            let runs = scale.big(100_000);
            c.checks_from(&reversed_chain_experiment(1000, 1, 6, runs, s)?, "l1:");
            c.checks_from(&reversed_chain_experiment(1000, 3, 8, runs, s)?, "l3:");
            one(c)
        }
        7 => one(criterion_7()?),
        8 => one(criterion_8()?),
        9 => criterion_9(scale, s),
        10 => {
            let mut c = CriterionResult::new("10", "absorption time against the Gumbel law");
            c.checks_from(&absorption_experiment(100_000, 10_000, s)?, "");
            one(c)
        }
        11 => {
            let mut c = CriterionResult::new("11", "block of 1 at time log 2 against the arcsine law");
            c.checks_from(&block_of_one_experiment(10_000, std::f64::consts::LN_2, 10_000, s)?, "");
            one(c)
        }
        12 => {
            let mut c = CriterionResult::new("12", "marked tree block counts against the restaurant");
            c.checks_from(&marked_tree_experiment(500, 1.0, scale.big(100_000), s)?, "");
            one(c)
        }
        13 => {
            let mut c = CriterionResult::new("13", "first restaurant frequency against U[0,1]");
            c.checks_from(&gem_first_frequency_experiment(10_000, 10_000, s)?, "");
            one(c)
        }
        14 => one(criterion_14(scale, s)?),
        15 => one(criterion_15()?),
        16 => one(criterion_16()?),
        17 => one(criterion_17()?),
        _ => crate::error::domain(format!("criteria are numbered 1 to {CRITERIA}, got {id}")),
    }
}

fn criterion_7() -> Result<CriterionResult> {
    let mut c = CriterionResult::new("7", "reversed chain limits and the integral oracle");
    let ln2 = std::f64::consts::LN_2;
    let table = x_table_f64(2, 100_000)?;
    let errs: Vec<f64> = [100, 1_000, 10_000, 100_000]
        .iter()
        .map(|&n| (table.get(n).expect("in range") - ln2).abs())
        .collect();
    c.check(below("x2_at_1e5_vs_log2", errs[3], 0.02));
    c.flag("x2_error_strictly_decreasing", errs.windows(2).all(|w| w[1] < w[0]));
    let s = shared_table()?;
    let mut worst: f64 = 0.0;
    for m in 2..=200 {
        let gap = s.hat_p(1, m)?.to_f64() - integral_oracle(m)?.to_f64();
        worst = worst.max(gap.abs());
    }
    c.check(below("hat_p_vs_integral_oracle", worst, 1e-10));
    Ok(c)
}

fn criterion_8() -> Result<CriterionResult> {
    let mut c = CriterionResult::new("8", "rows of the reversed chain limit sum to 1");
    let s = shared_table()?;
    for l in 1..=5 {
        let mut sum = 0.0;
        let mut nonneg = true;
        for m in l + 1..=TABLE_N {
            let p = s.hat_p(l, m)?;
            nonneg &= !p.value.is_negative();
            sum += p.to_f64();
        }
        c.check(TestResult {
            test: format!("row_{l}_partial_sum"),
            statistic: sum,
            threshold: 0.995,
            significance: None,
            df: None,
            sample_size: 0,
            pass: sum >= 0.995,
        });
        c.flag(&format!("row_{l}_nonnegative"), nonneg);
    }
    Ok(c)
}

fn criterion_9(scale: Scale, s: u64) -> Result<Vec<CriterionResult>> {
    let n = match scale {
        Scale::Full => 1_000_000,
        Scale::Fast => 100_000,
    };
    let rep = last_collision_experiment(n, 10_000, s)?;
    let parts = [
        ("9a", "P(B_n = 2) near log 2", "p_blocks_two_vs_log2"),
        ("9b", "log M_n / log n against U[0,1]", "ks_mass_exponent_uniform"),
        ("9c", "mass exponent given B_n = 2", "ks_conditional_log_ratio"),
        ("9d", "B_n - 1 against the law of Y(UE)", "chi2_blocks_minus_one"),
    ];
    Ok(parts
        .iter()
        .map(|&(id, title, key)| {
            let mut c = CriterionResult::new(id, title);
            match rep.get_test(key) {
                Some(t) => c.check(t.clone()),
                None => {
                    c.pass = false;
                    c.notes.push(format!("{key} was not computed"));
                }
            }
            let tag = match id {
                "9b" => Some("(M_n = 1)"),
                "9c" => Some("given B_n = 2"),
                _ => None,
            };
            if let Some(tag) = tag {
                c.notes.extend(rep.notes.iter().filter(|n| n.contains(tag) || n.contains("empirical")).cloned());
            }
            c
        })
        .collect())
}

fn criterion_14(scale: Scale, s: u64) -> Result<CriterionResult> {
    let mut c = CriterionResult::new("14", "collision count mean and concentration");
    let n = 10_000usize;
    let ln = (n as f64).ln();
    let mean = exact_j_mean(n)?;
    let dp_mean = exact_j_distribution(n)?.mean();
    let target = 1.0 + (2.0 - 0.577_215_664_901_532_9) / ln;
    c.check(below("scaled_mean_vs_expansion", (mean * ln / n as f64 - target).abs(), 0.05));
    c.check(below("dp_mean_vs_mean_recursion", (dp_mean - mean).abs() / mean, 1e-9));
    let top = match scale {
        Scale::Full => 100_000,
        Scale::Fast => 10_000,
    };
    let lo = cut_count_experiment(1_000, 1_000, s, CutEngine::Cutting)?;
    let hi = cut_count_experiment(top, 1_000, s, CutEngine::Cutting)?;
    let (a, b) = (lo.estimates["scaled_sd"], hi.estimates["scaled_sd"]);
    c.check(TestResult {
        test: format!("scaled_sd_1000_over_{top}"),
        statistic: b / a,
        threshold: 1.0,
        significance: None,
        df: None,
        sample_size: 2_000,
        pass: b < a,
    });
    Ok(c)
}

fn criterion_15() -> Result<CriterionResult> {
    let mut c = CriterionResult::new("15", "expansion, rate and consistency identities");
    let mut worst: f64 = 0.0;
    for m in 2..=20 {
        for r in [0.1, 0.5, 1.0, 2.0, 10.0] {
            worst = worst.max(exp_expansion_check(m, r)?);
        }
    }
    c.check(below("exp_expansion_max_error", worst, 1e-12));
    let mut rows_ok = true;
    for b in 2..=100usize {
        let mut total = BigRational::zero();
        let mut binom = BigInt::from(b * (b - 1) / 2);
        for k in 2..=b {
            total += BigRational::from_integer(binom.clone()) * lambda(b, k)?;
            binom = binom * (b - k) / (k + 1);
        }
        rows_ok &= total == BigRational::from_integer(((b - 1) as i64).into());
        rows_ok &= forward_row_sum(b)? == BigRational::one();
    }
    c.flag("rational_row_identities_b_le_100", rows_ok);
    c.flag("consistency_bs_n_le_100", lambda_consistency_check(&LambdaRates::bolthausen_sznitman(), 100)?);
    Ok(c)
}

fn criterion_16() -> Result<CriterionResult> {
    let mut c = CriterionResult::new("16", "partial products converge to e^{1/r}");
    let s = shared_table()?;
    for r in 1..=3 {
        let p = product_partial_from(s, r, TABLE_N, 20)?;
        c.check(below(&format!("exponent_r{r}_vs_1_over_r"), (p.exponent.to_f64() - 1.0 / r as f64).abs(), 1e-3));
    }
    let first = product_partial_from(s, 1, 1, 20)?;
    let gap = (first.product.value.to_f64() - 2.0).abs();
    c.flag(
        "first_product_r1_is_2",
        inner_product_exact(1)? == BigRational::from_integer(2.into())
            && gap <= first.product.error_bound()
            && first.product.to_decimal_certified().starts_with("2.000"),
    );
    Ok(c)
}

fn criterion_17() -> Result<CriterionResult> {
    let mut c = CriterionResult::new("17", "the law of Y(UE) has infinite mean");
    let s = shared_table()?;
    let (mut mass, mut first_moment) = (0.0, 0.0);
    for m in 1..=TABLE_N {
        let p = s.p_y_ue(m)?.to_f64();
        mass += p;
        first_moment += m as f64 * p;
    }
    c.check(TestResult {
        test: "truncated_first_moment".into(),
        statistic: first_moment,
        threshold: 5.0,
        significance: None,
        df: None,
        sample_size: 0,
        pass: first_moment > 5.0,
    });
    c.check(TestResult {
        test: "truncated_mass".into(),
        statistic: mass,
        threshold: 0.995,
        significance: None,
        df: None,
        sample_size: 0,
        pass: (0.995..=1.0).contains(&mass),
    });
    c.notes.push(format!(
        "the truncated moment grows like log log N; at N = {TABLE_N} it is {first_moment:.4}"
    ));
    Ok(c)
}

/// Runs every criterion in order.
pub fn run_suite(scale: Scale, seed: u64) -> Result<VerifyReport> {
    let mut criteria = Vec::new();
    for id in 1..=CRITERIA {
        criteria.extend(run_criterion(id, scale, seed)?);
    }
    Ok(VerifyReport {
        suite: scale,
        seed,
        version: env!("CARGO_PKG_VERSION").into(),
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    })
}
