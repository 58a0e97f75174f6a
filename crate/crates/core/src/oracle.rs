//! Reference roots that share no code path with the distiller: the
//! closed-form zeros of `T_d` and exact-arithmetic bisection.

use std::cmp::Ordering;

use rug::{Float, Rational};

use crate::context::{MpReal, PrecContext};
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

/// Extra decimal digits carried when evaluating the closed form.
pub const ORACLE_GUARD_DIGITS: u32 = 8;

/// `cos((2j + 1) pi / (2d))`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleRoot {
    pub value: MpReal,
    pub index_j: usize,
}

/// Zeros of the degree-`d` Chebyshev polynomial lying in `[a, b]`,
/// ascending, rounded to `ctx`.
pub fn chebyshev_roots(d: usize, a: &MpReal, b: &MpReal, ctx: PrecContext) -> Vec<OracleRoot> {
    assert!(d >= 1, "Chebyshev roots need degree >= 1");
    let wide = ctx.widened(ORACLE_GUARD_DIGITS);
    let bits = wide.bits();
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let denom = 2 * d as u64;
    let a = ctx.round(a);
    let b = ctx.round(b);
    (0..d)
        .rev()
        .map(|j| {
            let angle = Float::with_val(bits, &pi * (2 * j as u64 + 1)) / denom;
            let value = ctx.round(&MpReal::from_float(angle.cos()));
            OracleRoot { value, index_j: j }
        })
        .filter(|r| r.value >= a && r.value <= b)
        .collect()
}

/// Result of [`bisection_refine`].
#[derive(Clone, Debug, PartialEq)]
pub struct Refined {
    /// Midpoint of the final bracket, rounded to the polynomial's context.
    pub value: MpReal,
    pub iterations: u32,
    pub width: Rational,
}

/// Bisection on `f` with exact rational evaluation of its sign.
///
/// The coefficients of `f` and the bracket endpoints are binary floats,
/// hence exact dyadic rationals; every midpoint is dyadic too, so signs
/// are never affected by rounding.
pub fn bisection_refine(f: &Polynomial, x1: &MpReal, x2: &MpReal, target_tol: &MpReal) -> Result<Refined> {
    let no_change = || Error::NoSignChange {
        x1: x1.to_decimal(f.ctx().digits()),
        x2: x2.to_decimal(f.ctx().digits()),
    };
    let tol = to_rational(target_tol)
        .filter(|t| t.cmp0() == Ordering::Greater)
        .ok_or_else(|| Error::InvalidParameter("target_tol must be positive".to_string()))?;
    let coeffs: Vec<Rational> = f
        .coeffs()
        .iter()
        .map(|c| to_rational(c).ok_or_else(|| Error::InvalidPolynomial("non-finite coefficient".into())))
        .collect::<Result<_>>()?;
    let sign_at = |x: &Rational| -> Ordering {
        let mut acc = Rational::new();
        for c in coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc.cmp0()
    };
    let (mut lo, mut hi) = match (to_rational(x1), to_rational(x2)) {
        (Some(l), Some(h)) if l < h => (l, h),
        (Some(l), Some(h)) if h < l => (h, l),
        _ => return Err(no_change()),
    };
    let s_lo = sign_at(&lo);
    let s_hi = sign_at(&hi);
    if s_lo == Ordering::Equal || s_hi == Ordering::Equal || s_lo == s_hi {
        return Err(no_change());
    }
    let mut iterations = 0;
    while Rational::from(&hi - &lo) > tol {
        let mid = Rational::from(&lo + &hi) / 2u32;
        match sign_at(&mid) {
            Ordering::Equal => {
                lo = mid.clone();
                hi = mid;
            }
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
        iterations += 1;
    }
    let mid = Rational::from(&lo + &hi) / 2u32;
    let ctx = f.ctx();
    let value = MpReal::from_float(Float::with_val(ctx.bits(), &mid));
    Ok(Refined {
        value,
        iterations,
        width: hi - lo,
    })
}

fn to_rational(v: &MpReal) -> Option<Rational> {
    v.as_float().to_rational()
}
