//! Fixed-precision real arithmetic.
//!
//! A [`PrecContext`] turns a decimal digit count into a binary working
//! precision. Every [`MpReal`] produced through a context, and every
//! arithmetic result between two values of the same context, is rounded
//! to exactly that many bits (round-to-nearest-even). There is no global
//! rounding state: contexts and values are plain immutable data.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard bits added on top of the decimal-to-binary conversion.
pub const GUARD_BITS: u32 = 8;

/// Working precision shared by every value of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecContext {
    digits: u32,
    bits: u32,
}

impl PrecContext {
    /// Builds a context carrying `digits` significant decimal digits.
    ///
    /// The binary precision is `ceil(digits * log2(10)) + 8`.
    pub fn new(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::InvalidPrecision(digits));
        }
        Ok(PrecContext {
            digits,
            bits: digits_to_bits(digits) + GUARD_BITS,
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// A context with `extra` more decimal digits, used by reference
    /// computations that must dominate the working precision.
    pub fn widened(&self, extra: u32) -> Self {
        PrecContext::new(self.digits + extra).expect("digits stay positive")
    }

    /// Parses a signed decimal literal such as `-800.00000` or `5.4975581e11`.
    pub fn parse(&self, s: &str) -> Result<MpReal> {
        let trimmed = s.trim();
        if !is_decimal_literal(trimmed) {
            return Err(Error::Parse(s.to_string()));
        }
        let parsed = Float::parse(trimmed).map_err(|_| Error::Parse(s.to_string()))?;
        Ok(MpReal(Float::with_val_round(self.bits, parsed, Round::Nearest).0))
    }

    pub fn zero(&self) -> MpReal {
        MpReal(Float::new(self.bits))
    }

    pub fn one(&self) -> MpReal {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> MpReal {
        MpReal(Float::with_val(self.bits, v))
    }

    pub fn from_integer(&self, v: &Integer) -> MpReal {
        MpReal(Float::with_val(self.bits, v))
    }

    /// Rounds a value from another context (or an exact source) into this one.
    pub fn round(&self, v: &MpReal) -> MpReal {
        MpReal(Float::with_val(self.bits, &v.0))
    }

    /// `10^e`, correctly rounded.
    pub fn pow10(&self, e: i32) -> MpReal {
        let ten = Float::with_val(self.bits, 10);
        MpReal(Float::with_val(self.bits, rug::ops::Pow::pow(&ten, e)))
    }

    pub fn pi(&self) -> MpReal {
        MpReal(Float::with_val(self.bits, Constant::Pi))
    }

    /// Result of `num / den` as a fresh value, for building test inputs.
    pub fn ratio(&self, num: i64, den: i64) -> MpReal {
        let n = Float::with_val(self.bits, num);
        MpReal(Float::with_val(self.bits, n / den))
    }

    pub(crate) fn wrap(&self, f: Float) -> MpReal {
        debug_assert_eq!(f.prec(), self.bits);
        MpReal(f)
    }
}

fn digits_to_bits(digits: u32) -> u32 {
    // ceil(digits * log2(10)) computed exactly: the smallest b with 2^b >= 10^digits.
    let target = Integer::from(Integer::u_pow_u(10, digits));
    // 10^d is never a power of two for d >= 1, so significant_bits is the ceiling.
    target.significant_bits()
}

fn is_decimal_literal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut seen_digit = false;
    let mut seen_point = false;
    for c in mantissa.chars() {
        match c {
            '0'..='9' => seen_digit = true,
            '.' if !seen_point => seen_point = true,
            _ => return false,
        }
    }
    if !seen_digit {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let digits = e.strip_prefix(['+', '-']).unwrap_or(e);
            !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
        }
    }
}

/// A real number carried at a context's working precision.
///
/// Non-finite values (produced by `1/0`, `0/0`, overflow) are representable
/// and detected with [`MpReal::is_numeric`].
#[derive(Clone, PartialEq, PartialOrd)]
pub struct MpReal(Float);

impl MpReal {
    pub(crate) fn from_float(f: Float) -> MpReal {
        MpReal(f)
    }

    /// True iff the value is finite.
    pub fn is_numeric(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn abs(&self) -> MpReal {
        MpReal(self.0.clone().abs())
    }

    pub fn square(&self) -> MpReal {
        MpReal(self.0.clone().square())
    }

    pub fn cos(&self) -> MpReal {
        MpReal(self.0.clone().cos())
    }

    pub fn sqrt(&self) -> MpReal {
        MpReal(self.0.clone().sqrt())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// `-1`, `0` or `1`; `None` for NaN.
    pub fn signum(&self) -> Option<Ordering> {
        self.0.cmp0()
    }

    pub fn max<'a>(&'a self, other: &'a MpReal) -> &'a MpReal {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Base-10 exponent `e` such that `10^(e-1) <= |v| < 10^e`, for nonzero finite values.
    pub fn decimal_exponent(&self) -> Option<i32> {
        let (_, _, exp) = self.0.to_sign_string_exp(10, Some(3));
        exp
    }

    /// Decimal rendering with `digits` significant digits.
    ///
    /// Magnitudes in `[1e-5, 1e6)` print in positional notation
    /// (`-800.00000`, `0.10000000`); others use an exponent suffix
    /// (`5.4975581e11`).
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.0.is_nan() {
            return "NaN".to_string();
        }
        if self.0.is_infinite() {
            return if self.0.is_sign_negative() { "-inf" } else { "inf" }.to_string();
        }
        let digits = digits.max(1) as usize;
        let (neg, mant, exp) = self.0.to_sign_string_exp(10, Some(digits));
        let sign = if neg { "-" } else { "" };
        let exp = match exp {
            Some(e) => e,
            None => {
                // zero
                return if digits == 1 {
                    format!("{sign}0")
                } else {
                    format!("{sign}0.{}", "0".repeat(digits - 1))
                };
            }
        };
        // value = 0.mant * 10^exp
        if (-4..=6).contains(&exp) {
            if exp <= 0 {
                format!("{sign}0.{}{}", "0".repeat((-exp) as usize), mant)
            } else {
                let split = exp as usize;
                if split >= mant.len() {
                    format!("{sign}{}{}", mant, "0".repeat(split - mant.len()))
                } else {
                    format!("{sign}{}.{}", &mant[..split], &mant[split..])
                }
            }
        } else if mant.len() == 1 {
            format!("{sign}{}e{}", mant, exp - 1)
        } else {
            format!("{sign}{}.{}e{}", &mant[..1], &mant[1..], exp - 1)
        }
    }

    /// The first and last `n` significant digits of the value, for
    /// logging very long expansions.
    pub fn digit_summary(&self, digits: u32, n: usize) -> String {
        if digits as usize <= 2 * n || !self.is_numeric() || self.is_zero() {
            return self.to_decimal(digits);
        }
        let (neg, mant, exp) = self.0.to_sign_string_exp(10, Some(digits as usize));
        let sign = if neg { "-" } else { "" };
        let exp = exp.unwrap_or(0);
        format!(
            "{sign}0.{}...{} x 10^{} ({} digits)",
            &mant[..n],
            &mant[mant.len() - n..],
            exp,
            mant.len()
        )
    }

    fn binop(&self, rhs: &MpReal, f: impl FnOnce(&Float, &Float) -> Float) -> MpReal {
        debug_assert_eq!(self.prec(), rhs.prec(), "operands from different contexts");
        MpReal(f(&self.0, &rhs.0))
    }
}

impl fmt::Debug for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpReal({}, {} bits)", self.to_decimal(20), self.prec())
    }
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec().saturating_sub(GUARD_BITS)) as f64 * std::f64::consts::LOG10_2)
            .floor()
            .max(1.0) as u32;
        f.write_str(&self.to_decimal(digits))
    }
}

impl<'a> Add<&'a MpReal> for &'a MpReal {
    type Output = MpReal;
    fn add(self, rhs: &'a MpReal) -> MpReal {
        self.binop(rhs, |a, b| Float::with_val(a.prec(), a + b))
    }
}

impl<'a> Sub<&'a MpReal> for &'a MpReal {
    type Output = MpReal;
    fn sub(self, rhs: &'a MpReal) -> MpReal {
        self.binop(rhs, |a, b| Float::with_val(a.prec(), a - b))
    }
}

impl<'a> Mul<&'a MpReal> for &'a MpReal {
    type Output = MpReal;
    fn mul(self, rhs: &'a MpReal) -> MpReal {
        self.binop(rhs, |a, b| Float::with_val(a.prec(), a * b))
    }
}

impl<'a> Div<&'a MpReal> for &'a MpReal {
    type Output = MpReal;
    fn div(self, rhs: &'a MpReal) -> MpReal {
        self.binop(rhs, |a, b| Float::with_val(a.prec(), a / b))
    }
}

impl Neg for &MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal(Float::with_val(self.0.prec(), -&self.0))
    }
}

impl Mul<i64> for &MpReal {
    type Output = MpReal;
    fn mul(self, rhs: i64) -> MpReal {
        MpReal(Float::with_val(self.0.prec(), &self.0 * rhs))
    }
}

/// Error-free transformations used by compensated evaluation. All
/// operations round to the operands' precision.
pub(crate) mod eft {
    use rug::Float;

    /// `a + b = s + e` exactly (Knuth's TwoSum).
    pub fn two_sum(a: &Float, b: &Float) -> (Float, Float) {
        let p = a.prec();
        let s = Float::with_val(p, a + b);
        let bb = Float::with_val(p, &s - a);
        let ab = Float::with_val(p, &s - &bb);
        let da = Float::with_val(p, a - &ab);
        let db = Float::with_val(p, b - &bb);
        let e = Float::with_val(p, &da + &db);
        (s, e)
    }

    /// `a * b = m + e` exactly; the error term comes from a fused multiply-subtract.
    pub fn two_prod(a: &Float, b: &Float) -> (Float, Float) {
        let p = a.prec();
        let m = Float::with_val(p, a * b);
        let e = Float::with_val(p, a * b - &m);
        (m, e)
    }
}
