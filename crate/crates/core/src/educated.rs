//! The educated map: `k + 1` composed Newton steps followed by the
//! education rules that send irrelevant points to [`MapResult::Null`].

use crate::context::{MpReal, PrecContext};
use crate::error::{Error, Result};
use crate::polynomial::{EvalScheme, Polynomial};

/// Order of convergence of the `k`-fold map, `2^(k+1)`.
pub fn order_of(k: u32) -> u64 {
    1u64 << (k + 1)
}

/// Image of a point under the educated map.
#[derive(Clone, Debug, PartialEq)]
pub enum MapResult {
    Numeric(MpReal),
    Null,
}

impl MapResult {
    pub fn numeric(&self) -> Option<&MpReal> {
        match self {
            MapResult::Numeric(v) => Some(v),
            MapResult::Null => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, MapResult::Null)
    }
}

/// Target polynomial, its derivative, the interval and the fold count.
#[derive(Clone, Debug)]
pub struct MapConfig {
    f: Polynomial,
    fprime: Polynomial,
    a: MpReal,
    b: MpReal,
    k: u32,
    scheme: EvalScheme,
}

impl MapConfig {
    pub fn new(f: Polynomial, a: MpReal, b: MpReal, k: u32) -> Result<Self> {
        let ctx = f.ctx();
        let a = ctx.round(&a);
        let b = ctx.round(&b);
        if !(a.is_numeric() && b.is_numeric() && a < b) {
            return Err(Error::InvalidInterval {
                a: a.to_decimal(ctx.digits()),
                b: b.to_decimal(ctx.digits()),
            });
        }
        let fprime = f.derivative();
        Ok(MapConfig {
            f,
            fprime,
            a,
            b,
            k,
            scheme: EvalScheme::default(),
        })
    }

    pub fn with_scheme(mut self, scheme: EvalScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Same map with a different fold count.
    pub fn with_k(&self, k: u32) -> Self {
        MapConfig { k, ..self.clone() }
    }

    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn fprime(&self) -> &Polynomial {
        &self.fprime
    }

    pub fn a(&self) -> &MpReal {
        &self.a
    }

    pub fn b(&self) -> &MpReal {
        &self.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn scheme(&self) -> EvalScheme {
        self.scheme
    }

    pub fn ctx(&self) -> PrecContext {
        self.f.ctx()
    }

    pub fn order(&self) -> u64 {
        order_of(self.k)
    }

    /// `f(x)` with the configured evaluation scheme.
    pub fn eval_f(&self, x: &MpReal) -> MpReal {
        self.f.eval(x, self.scheme)
    }

    /// One Newton step `x - f(x)/f'(x)`; `Null` when the quotient is not finite.
    pub fn newton_step(&self, x: &MpReal) -> MapResult {
        let fx = self.f.eval(x, self.scheme);
        let dfx = self.fprime.eval(x, self.scheme);
        if dfx.is_zero() {
            return MapResult::Null;
        }
        let y = x - &(&fx / &dfx);
        if y.is_numeric() {
            MapResult::Numeric(y)
        } else {
            MapResult::Null
        }
    }

    /// The educated map `g(x)`.
    ///
    /// Runs `k + 1` Newton steps, giving up on the first non-numeric
    /// iterate. The final value must lie in `[a, b]` and move at most
    /// `b - a` away from `x`.
    pub fn educated_g(&self, x: &MpReal) -> MapResult {
        let x = self.ctx().round(x);
        let mut y = x.clone();
        for _ in 0..=self.k {
            match self.newton_step(&y) {
                MapResult::Numeric(next) => y = next,
                MapResult::Null => return MapResult::Null,
            }
        }
        if y < self.a || y > self.b {
            return MapResult::Null;
        }
        let width = &self.b - &self.a;
        if (&y - &x).abs() > width {
            return MapResult::Null;
        }
        MapResult::Numeric(y)
    }
}
