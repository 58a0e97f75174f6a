//! Power-basis polynomials: exact Chebyshev generation, precision
//! truncation, evaluation and differentiation.

use std::fmt;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::context::{eft, MpReal, PrecContext};
use crate::error::{Error, Result};

/// Evaluation scheme used for `f` and `f'` inside the educated map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalScheme {
    /// Plain Horner recurrence.
    Horner,
    /// Horner with error-free transformations carrying the rounding error
    /// of every step in a second accumulator.
    #[default]
    Compensated,
}

impl fmt::Display for EvalScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalScheme::Horner => f.write_str("horner"),
            EvalScheme::Compensated => f.write_str("compensated"),
        }
    }
}

/// Polynomial with exact integer coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPolynomial {
    coeffs: Vec<Integer>,
}

impl ExactPolynomial {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| *c == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Integer::new());
        }
        ExactPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    /// First-kind Chebyshev polynomial `T_d` from the three-term recurrence.
    pub fn chebyshev_t(d: usize) -> Self {
        let mut prev = vec![Integer::from(1)];
        if d == 0 {
            return Self::new(prev);
        }
        let mut cur = vec![Integer::new(), Integer::from(1)];
        for _ in 1..d {
            let mut next = vec![Integer::new(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += Integer::from(c * 2u32);
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Self::new(cur)
    }

    /// The product of `(den * x - num)` over the given roots `num/den`;
    /// integer coefficients whose real roots are exactly the inputs.
    pub fn from_roots(roots: &[Rational]) -> Self {
        let mut coeffs = vec![Integer::from(1)];
        for r in roots {
            let (num, den) = (r.numer(), r.denom());
            let mut next = vec![Integer::new(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += Integer::from(c * den);
                next[i] -= Integer::from(c * num);
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// `factor * x * self`.
    pub fn times_x_scaled(&self, factor: i64) -> Self {
        let mut coeffs = vec![Integer::new()];
        coeffs.extend(self.coeffs.iter().map(|c| Integer::from(c * factor)));
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Integer::new();
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                Integer::from(a - b)
            })
            .collect();
        Self::new(coeffs)
    }

    /// Rounds every coefficient to the context precision.
    pub fn round_coeffs(&self, ctx: PrecContext) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| ctx.from_integer(c)).collect(), ctx)
    }
}

/// Polynomial over fixed-precision reals, ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<MpReal>,
    ctx: PrecContext,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped; an empty or all-zero input
    /// becomes the degree-0 zero polynomial.
    pub fn new(mut coeffs: Vec<MpReal>, ctx: PrecContext) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, MpReal::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ctx.zero());
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.prec() == ctx.bits() { c } else { ctx.round(&c) })
            .collect();
        Polynomial { coeffs, ctx }
    }

    /// Parses ascending-power coefficients given as decimal strings.
    pub fn from_decimal_strings<S: AsRef<str>>(coeffs: &[S], ctx: PrecContext) -> Result<Self> {
        let values = coeffs
            .iter()
            .map(|s| ctx.parse(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(values, ctx))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[MpReal] {
        &self.coeffs
    }

    pub fn ctx(&self) -> PrecContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Horner's scheme with every intermediate rounded to the context precision.
    pub fn horner_eval(&self, x: &MpReal) -> MpReal {
        let bits = self.ctx.bits();
        let x = self.in_context(x);
        let mut coeffs = self.coeffs.iter().rev();
        let mut acc = coeffs.next().expect("nonempty").as_float().clone();
        for c in coeffs {
            acc = Float::with_val(bits, &acc * x.as_float());
            acc += c.as_float();
        }
        self.ctx.wrap(acc)
    }

    /// Compensated Horner: the rounding error of each multiply and add is
    /// recovered exactly and accumulated in a correction term evaluated by
    /// its own Horner recurrence. All operations run at the context
    /// precision; the result is about as accurate as plain Horner at twice
    /// the precision, then rounded.
    pub fn eval_compensated(&self, x: &MpReal) -> MpReal {
        let bits = self.ctx.bits();
        let x = self.in_context(x);
        let xf = x.as_float();
        let mut coeffs = self.coeffs.iter().rev();
        let mut acc = coeffs.next().expect("nonempty").as_float().clone();
        let mut corr = Float::new(bits);
        for c in coeffs {
            let (prod, prod_err) = eft::two_prod(&acc, xf);
            let (sum, sum_err) = eft::two_sum(&prod, c.as_float());
            acc = sum;
            let local = Float::with_val(bits, &prod_err + &sum_err);
            corr = Float::with_val(bits, &corr * xf);
            corr += &local;
        }
        if !acc.is_finite() {
            return self.ctx.wrap(acc);
        }
        acc += &corr;
        self.ctx.wrap(acc)
    }

    pub fn eval(&self, x: &MpReal, scheme: EvalScheme) -> MpReal {
        match scheme {
            EvalScheme::Horner => self.horner_eval(x),
            EvalScheme::Compensated => self.eval_compensated(x),
        }
    }

    /// Coefficient-wise derivative, `c'[i] = (i + 1) c[i + 1]`.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![self.ctx.zero()], self.ctx);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as i64)
            .collect();
        Polynomial::new(coeffs, self.ctx)
    }

    /// Sum of `|c_i| * |x|^i`, the scale of the rounding error of Horner's
    /// scheme at `x`.
    pub fn abs_magnitude(&self, x: &MpReal) -> MpReal {
        let x = self.in_context(x).abs();
        let abs_poly = Polynomial {
            coeffs: self.coeffs.iter().map(MpReal::abs).collect(),
            ctx: self.ctx,
        };
        abs_poly.horner_eval(&x)
    }

    fn in_context<'a>(&self, x: &'a MpReal) -> std::borrow::Cow<'a, MpReal> {
        if x.prec() == self.ctx.bits() {
            std::borrow::Cow::Borrowed(x)
        } else {
            std::borrow::Cow::Owned(self.ctx.round(x))
        }
    }

    /// Reads the JSON polynomial format
    /// `{"degree": d, "coeffs": ["c0", "c1", ...], "prec": p}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: PolyFile = serde_json::from_str(s)?;
        file.into_polynomial()
    }

    pub fn to_poly_file(&self) -> PolyFile {
        PolyFile {
            degree: self.degree(),
            coeffs: self.coeffs.iter().map(|c| c.to_decimal(self.ctx.digits())).collect(),
            prec: self.ctx.digits(),
        }
    }
}

/// On-disk polynomial description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub degree: usize,
    pub coeffs: Vec<String>,
    pub prec: u32,
}

impl PolyFile {
    pub fn into_polynomial(self) -> Result<Polynomial> {
        let ctx = PrecContext::new(self.prec)?;
        if self.coeffs.len() != self.degree + 1 {
            return Err(Error::InvalidPolynomial(format!(
                "degree {} needs {} coefficients, got {}",
                self.degree,
                self.degree + 1,
                self.coeffs.len()
            )));
        }
        let values = self
            .coeffs
            .iter()
            .map(|s| ctx.parse(s))
            .collect::<Result<Vec<_>>>()?;
        if self.degree > 0 && values[self.degree].is_zero() {
            return Err(Error::InvalidPolynomial(
                "leading coefficient is zero".to_string(),
            ));
        }
        Ok(Polynomial::new(values, ctx))
    }
}
