//! Uniform meshes, the sampled table of map images, and the two
//! diagnostics on it: monotone steps and stationarity in `k`.

use rayon::prelude::*;
use rug::{Float, Rational};

use crate::context::MpReal;
use crate::educated::{MapConfig, MapResult};
use crate::error::{Error, Result};

/// Allowed distance of `(b - a) / h` from the nearest integer.
const DIVISIBILITY_SLACK: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct Mesh {
    a: MpReal,
    b: MpReal,
    h: MpReal,
    nodes: Vec<MpReal>,
}

impl Mesh {
    /// `n + 1` nodes with `n = round((b - a) / h)`. Node `i` is the exact
    /// value `a + i (b - a) / n` rounded once, so the endpoints are exact and
    /// there is no accumulated drift.
    pub fn uniform(a: &MpReal, b: &MpReal, h: &MpReal) -> Result<Mesh> {
        let digits = 12;
        if !(a.is_numeric() && b.is_numeric() && a < b) {
            return Err(Error::InvalidInterval {
                a: a.to_decimal(digits),
                b: b.to_decimal(digits),
            });
        }
        let width = b - a;
        if !(h.is_numeric() && !h.is_zero() && h.signum() == Some(std::cmp::Ordering::Greater))
            || h > &width
        {
            return Err(Error::InvalidMeshWidth(h.to_decimal(digits)));
        }
        let ratio = (&width / h).to_f64();
        let steps = ratio.round();
        if (ratio - steps).abs() > DIVISIBILITY_SLACK || steps > u32::MAX as f64 {
            return Err(Error::MeshNotDivisible {
                a: a.to_decimal(digits),
                b: b.to_decimal(digits),
                h: h.to_decimal(digits),
            });
        }
        let steps = steps as u32;
        let bits = a.prec();
        let ra = a.as_float().to_rational().expect("finite");
        let rb = b.as_float().to_rational().expect("finite");
        let step = Rational::from(&rb - &ra) / steps;
        let mut nodes = Vec::with_capacity(steps as usize + 1);
        nodes.push(a.clone());
        for i in 1..steps {
            let exact = Rational::from(&step * i) + &ra;
            nodes.push(MpReal::from_float(Float::with_val(bits, &exact)));
        }
        nodes.push(b.clone());
        Ok(Mesh {
            a: a.clone(),
            b: b.clone(),
            h: h.clone(),
            nodes,
        })
    }

    pub fn a(&self) -> &MpReal {
        &self.a
    }

    pub fn b(&self) -> &MpReal {
        &self.b
    }

    pub fn h(&self) -> &MpReal {
        &self.h
    }

    pub fn nodes(&self) -> &[MpReal] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// One row of the table: a mesh node and its image.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: MpReal,
    pub y: MapResult,
}

impl Sample {
    /// `y - x` when the image is numeric.
    pub fn displacement(&self) -> Option<MpReal> {
        self.y.numeric().map(|y| y - &self.x)
    }
}

/// The sampled map over a mesh, in ascending `x`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleList {
    pairs: Vec<Sample>,
}

impl SampleList {
    /// Builds a list, rejecting non-increasing `x`.
    pub fn new(pairs: Vec<Sample>) -> Result<Self> {
        if pairs.windows(2).any(|w| w[0].x >= w[1].x) {
            return Err(Error::InvalidParameter(
                "sample abscissae must be strictly increasing".to_string(),
            ));
        }
        Ok(SampleList { pairs })
    }

    pub fn pairs(&self) -> &[Sample] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Numeric `(x, y)` pairs in order.
    pub fn numeric(&self) -> impl Iterator<Item = (&MpReal, &MpReal)> {
        self.pairs
            .iter()
            .filter_map(|s| s.y.numeric().map(|y| (&s.x, y)))
    }

    pub fn null_count(&self) -> usize {
        self.pairs.iter().filter(|s| s.y.is_null()).count()
    }

    /// True iff the numeric images never decrease by more than `tol`.
    pub fn is_monotone_step(&self, tol: &MpReal) -> bool {
        let ys: Vec<&MpReal> = self.numeric().map(|(_, y)| y).collect();
        ys.windows(2).all(|w| &(w[1] - w[0]) >= &-tol)
    }

    /// Nodewise agreement: identical Null pattern and numeric images within `tol`.
    pub fn agrees_with(&self, other: &SampleList, tol: &MpReal) -> bool {
        self.pairs.len() == other.pairs.len()
            && self.pairs.iter().zip(&other.pairs).all(|(p, q)| {
                p.x == q.x
                    && match (&p.y, &q.y) {
                        (MapResult::Null, MapResult::Null) => true,
                        (MapResult::Numeric(u), MapResult::Numeric(v)) => &(u - v).abs() <= tol,
                        _ => false,
                    }
            })
    }
}

/// Evaluates the educated map at every mesh node.
///
/// Nodes are evaluated in parallel on the current rayon pool; the result
/// is independent of the schedule.
pub fn sample_map(cfg: &MapConfig, mesh: &Mesh) -> SampleList {
    let pairs = mesh
        .nodes()
        .par_iter()
        .map(|x| Sample {
            x: x.clone(),
            y: cfg.educated_g(x),
        })
        .collect();
    SampleList { pairs }
}

/// Sequential variant of [`sample_map`].
pub fn sample_map_sequential(cfg: &MapConfig, mesh: &Mesh) -> SampleList {
    let pairs = mesh
        .nodes()
        .iter()
        .map(|x| Sample {
            x: x.clone(),
            y: cfg.educated_g(x),
        })
        .collect();
    SampleList { pairs }
}

/// True iff sampling at `k` and `k + 1` gives the same table up to `tol`.
pub fn is_invariant(cfg: &MapConfig, mesh: &Mesh, tol: &MpReal) -> bool {
    let here = sample_map(cfg, mesh);
    let next = sample_map(&cfg.with_k(cfg.k() + 1), mesh);
    here.agrees_with(&next, tol)
}

/// Default stationarity tolerance, one unit in the last requested digit
/// place: `10^(1 - prec_digits)`.
pub fn default_invariance_tol(cfg: &MapConfig) -> MpReal {
    let ctx = cfg.ctx();
    ctx.pow10(1 - ctx.digits() as i32)
}
