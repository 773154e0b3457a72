//! Exact and high-precision computations: the reversed block-counting chain,
//! the alternating log sums behind its limits, the law of the collision
//! count, and identity checks.

pub mod altsum;
pub mod fixed;
pub mod identities;
pub mod jdist;
pub mod quadrature;
pub mod recurrence;

use serde::Serialize;

pub use altsum::{
    hat_p, inner_product_exact, p_y_ue, product_partial, product_partial_from, stable_alt_sum,
    AltSumTable, LnTable, ProductPartial, DEFAULT_DIGITS,
};
pub use fixed::Fixed;
pub use identities::{
    exp_expansion_check, exp_expansion_check_f64, expected_exp_neg_theta_ue,
    monte_carlo_exp_neg_theta_ue, yule_pmf,
};
pub use jdist::{exact_j_distribution, exact_j_distribution_rational, exact_j_mean, JDistribution};
pub use quadrature::{gauss_kronrod, integral_oracle, QuadratureResult};
pub use recurrence::{
    general_x_table, lambda_consistency_check, x_table, x_table_exact, x_table_f64,
    x_table_f64_direct, y_tables, LambdaRates, RateValue, RecurrenceTable, Scalar,
};

/// A fixed-point value with the precision it was computed at and an upper
/// bound on its absolute error, stored as a base-2 logarithm.
#[derive(Clone, Debug, PartialEq)]
pub struct HighPrecisionValue {
    pub value: Fixed,
    /// Binary precision of the computation that produced the value.
    pub working_bits: u32,
    /// `log2` of the absolute error bound; `-inf` when exact.
    pub error_log2: f64,
    /// Digits the caller asked for.
    pub requested_digits: u32,
}

impl HighPrecisionValue {
    pub fn new(value: Fixed, working_bits: u32, error_log2: f64, requested_digits: u32) -> Self {
        Self {
            value,
            working_bits,
            error_log2,
            requested_digits,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn error_bound(&self) -> f64 {
        self.error_log2.exp2()
    }

    pub fn relative_error_log2(&self) -> f64 {
        self.error_log2 - self.to_f64().abs().log2()
    }

    /// Significant decimal digits guaranteed by the error bound.
    pub fn certified_digits(&self) -> u32 {
        if self.value.is_zero() {
            return 0;
        }
        let d = -self.relative_error_log2() * std::f64::consts::LOG10_2;
        if d.is_infinite() {
            self.value.bits()
        } else {
            d.floor().max(0.0) as u32
        }
    }

    /// Digits that will be reported: never more than are certified.
    pub fn reported_digits(&self) -> u32 {
        self.requested_digits.min(self.certified_digits())
    }

    pub fn with_digits(mut self, digits: u32) -> Self {
        self.requested_digits = digits;
        self
    }

    /// Divides by a positive integer; adds half a unit of rounding.
    pub fn div_int(&self, k: u64) -> Self {
        let value = self.value.div_int(k);
        let err = altsum::log2_add(
            self.error_log2 - (k as f64).log2(),
            -(self.value.bits() as f64) - 1.0,
        );
        Self::new(value, self.working_bits, err, self.requested_digits)
    }

    /// Decimal string with [`reported_digits`](Self::reported_digits)
    /// significant digits.
    pub fn to_decimal_certified(&self) -> String {
        let digits = self.reported_digits().max(1) as i64;
        let x = self.to_f64().abs();
        let lead = if x > 0.0 { x.log10().floor() as i64 } else { 0 };
        let frac = (digits - 1 - lead).max(0) as usize;
        self.value.to_decimal(frac)
    }
}

/// Plain summary of a [`HighPrecisionValue`] for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueSummary {
    pub value: String,
    pub approx: f64,
    pub certified_digits: u32,
    pub working_bits: u32,
}

impl From<&HighPrecisionValue> for ValueSummary {
    fn from(v: &HighPrecisionValue) -> Self {
        Self {
            value: v.to_decimal_certified(),
            approx: v.to_f64(),
            certified_digits: v.certified_digits(),
            working_bits: v.working_bits,
        }
    }
}
