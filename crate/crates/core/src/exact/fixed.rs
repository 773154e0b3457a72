//! Binary fixed-point numbers backed by `BigInt`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The number `mantissa / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fixed {
    m: BigInt,
    bits: u32,
}

/// `x * 2^e` without intermediate overflow or underflow.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Rounded `num / den` for `den > 0`, ties away from zero.
pub(crate) fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    let twice: BigInt = r.abs() << 1;
    if twice >= den.abs() {
        if num.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Rounded `x / 2^s`.
pub(crate) fn shr_round(x: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (s - 1);
    if x.is_negative() {
        -((-x + half) >> s)
    } else {
        (x + half) >> s
    }
}

impl Fixed {
    pub fn from_mantissa(m: BigInt, bits: u32) -> Self {
        Self { m, bits }
    }

    pub fn zero(bits: u32) -> Self {
        Self {
            m: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        Self::from_int(1, bits)
    }

    pub fn from_int(i: i64, bits: u32) -> Self {
        Self {
            m: BigInt::from(i) << bits,
            bits,
        }
    }

    /// Nearest representable value to `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero(), "division by zero");
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        Self {
            m: div_round(&(num << bits), &den),
            bits,
        }
    }

    pub fn from_u64_ratio(num: u64, den: u64, bits: u32) -> Self {
        Self::from_ratio(&BigInt::from(num), &BigInt::from(den), bits)
    }

    /// Exact when `bits` is large enough to hold the binary expansion of `x`.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "cannot convert a non-finite value");
        if x == 0.0 {
            return Self::zero(bits);
        }
        let raw = x.abs().to_bits();
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut m = BigInt::from(mant);
        let shift = e + bits as i64;
        m = if shift >= 0 {
            m << shift as u32
        } else {
            shr_round(&m, (-shift) as u32)
        };
        Self {
            m: if x < 0.0 { -m } else { m },
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    /// Same value at a different precision, rounded to nearest.
    pub fn rescale(&self, bits: u32) -> Self {
        let m = match bits.cmp(&self.bits) {
            Ordering::Equal => self.m.clone(),
            Ordering::Greater => &self.m << (bits - self.bits),
            Ordering::Less => shr_round(&self.m, self.bits - bits),
        };
        Self { m, bits }
    }

    pub fn to_f64(&self) -> f64 {
        let len = self.m.bits();
        if len == 0 {
            return 0.0;
        }
        let excess = len.saturating_sub(64) as u32;
        let top = (&self.m >> excess).to_f64().expect("64-bit value fits in f64");
        ldexp(top, excess as i64 - self.bits as i64)
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self {
            m: self.m.abs(),
            bits: self.bits,
        }
    }

    fn same(&self, o: &Self) {
        assert_eq!(self.bits, o.bits, "fixed-point precisions differ");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same(o);
        Self {
            m: &self.m + &o.m,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same(o);
        Self {
            m: &self.m - &o.m,
            bits: self.bits,
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        self.same(o);
        self.m += &o.m;
    }

    pub fn neg(&self) -> Self {
        Self {
            m: -&self.m,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same(o);
        Self {
            m: shr_round(&(&self.m * &o.m), self.bits),
            bits: self.bits,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.same(o);
        assert!(!o.is_zero(), "division by zero");
        let (num, den) = if o.m.is_negative() {
            (-(&self.m << self.bits), -&o.m)
        } else {
            (&self.m << self.bits, o.m.clone())
        };
        Self {
            m: div_round(&num, &den),
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self {
            m: &self.m * k,
            bits: self.bits,
        }
    }

    pub fn div_int(&self, k: u64) -> Self {
        assert!(k > 0, "division by zero");
        Self {
            m: div_round(&self.m, &BigInt::from(k)),
            bits: self.bits,
        }
    }

    /// `self * num / den`, rounded once.
    pub fn mul_ratio(&self, num: u64, den: u64) -> Self {
        Self {
            m: div_round(&(&self.m * num), &BigInt::from(den)),
            bits: self.bits,
        }
    }

    /// `e^self`, accurate to a few ulps at the current precision.
    pub fn exp(&self) -> Self {
        let bits = self.bits;
        // halve until |x| < 2^-s, sum the Taylor series, square back s times
        let s = ((bits as f64).sqrt() as u32).max(4) + self.to_f64().abs().log2().max(0.0) as u32;
        let guard = s + 32 + (bits as f64).log2() as u32;
        let w = bits + guard;
        let x = Self {
            m: shr_round(&(&self.m << guard), s),
            bits: w,
        };
        let one = Self::one(w);
        let mut sum = one.clone();
        let mut term = one;
        for k in 1u64.. {
            term = term.mul(&x).div_int(k);
            if term.is_zero() {
                break;
            }
            sum.add_assign(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum.rescale(bits)
    }

    /// Decimal expansion with `frac_digits` digits after the point, rounded.
    pub fn to_decimal(&self, frac_digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(frac_digits as u32);
        let q = shr_round(&(self.m.abs() * scale), self.bits);
        let s = q.to_str_radix(10);
        let s = if s.len() <= frac_digits {
            format!("{}{}", "0".repeat(frac_digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - frac_digits);
        let sign = if self.m.sign() == Sign::Minus && !q.is_zero() {
            "-"
        } else {
            ""
        };
        if frac_digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.bits == other.bits).then(|| self.m.cmp(&other.m))
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.bits as f64 * std::f64::consts::LOG10_2) as usize;
        write!(f, "{}", self.to_decimal(digits))
    }
}

/// Bits needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for &x in &[0.0, 1.0, -2.5, 0.1, 1e-300, 123456.789, -7e-5] {
            assert_eq!(Fixed::from_f64(x, 1200).to_f64(), x);
        }
        let third = Fixed::from_u64_ratio(1, 3, 64);
        assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-17);
    }

    #[test]
    fn arithmetic() {
        let b = 100;
        let a = Fixed::from_u64_ratio(3, 7, b);
        let c = Fixed::from_u64_ratio(2, 5, b);
        let prod = a.mul(&c);
        assert!((prod.to_f64() - 6.0 / 35.0).abs() < 1e-16);
        let q = a.div(&c);
        assert!((q.to_f64() - 15.0 / 14.0).abs() < 1e-15);
        assert_eq!(a.add(&c).sub(&c), a);
        assert_eq!(a.neg().abs(), a);
        assert!((a.mul_ratio(7, 3).to_f64() - 1.0).abs() < 1e-29);
        assert!(a.neg().div(&c.neg()).sub(&q).abs().mantissa() <= &BigInt::one());
    }

    #[test]
    fn exp_values() {
        let b = 300;
        let e = Fixed::one(b).exp();
        assert_eq!(
            e.to_decimal(40),
            "2.7182818284590452353602874713526624977572"
        );
        let x = Fixed::from_f64(-3.5, b).exp();
        assert!((x.to_f64() - (-3.5f64).exp()).abs() < 1e-17);
        assert_eq!(Fixed::zero(b).exp(), Fixed::one(b));
        let big = Fixed::from_int(20, b).exp();
        assert!((big.to_f64() / 20f64.exp() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(Fixed::from_f64(-0.125, 10).to_decimal(2), "-0.13");
        assert_eq!(Fixed::from_f64(0.004, 30).to_decimal(2), "0.00");
        assert_eq!(Fixed::from_int(12, 8).to_decimal(0), "12");
    }

    #[test]
    fn huge_precision_to_f64() {
        let x = Fixed::from_u64_ratio(2, 3, 20_000);
        assert!((x.to_f64() - 2.0 / 3.0).abs() < 1e-16);
    }
}
