//! Filtering the sampled table into roots with error estimates.
//!
//! The pipeline runs five stages over the table produced by
//! [`sample_map`]:
//!
//! 1. keep numeric pairs close to the bisector, `(y - x)^2 < c`;
//! 2. keep adjacent pairs where `y - x` changes sign, which certifies a
//!    machine fixed point between the two nodes;
//! 3. project the brackets onto their images and drop near-duplicates;
//! 4. keep images with a small residual `|f(y)|`;
//! 5. keep images whose error estimate `g(y) - y` is below a tolerance.
//!
//! [`platform_representative`] is the simpler alternative that picks, from
//! each platform of the step function, the image closest to its node.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::context::{MpReal, PrecContext};
use crate::educated::{MapConfig, MapResult};
use crate::error::{Error, Result};
use crate::grid::{sample_map, Mesh, Sample, SampleList};
use crate::polynomial::{EvalScheme, Polynomial};

/// Thresholds of the filtering stages. All must be strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterParams {
    /// Bound on the squared distance `(y - x)^2` to the bisector.
    pub bisector_c: MpReal,
    pub residual_threshold: MpReal,
    pub error_tol: MpReal,
    pub dedup_tol: MpReal,
}

impl FilterParams {
    /// `c = 0.1`, residual threshold `10^(10 - prec)`, and error and
    /// duplicate tolerances `10^(1 - prec)`.
    pub fn defaults(ctx: PrecContext) -> Self {
        let p = ctx.digits() as i32;
        FilterParams {
            bisector_c: ctx.parse("0.1").expect("literal"),
            residual_threshold: ctx.pow10(10 - p),
            error_tol: ctx.pow10(1 - p),
            dedup_tol: ctx.pow10(1 - p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bisector_c", &self.bisector_c),
            ("residual_threshold", &self.residual_threshold),
            ("error_tol", &self.error_tol),
            ("dedup_tol", &self.dedup_tol),
        ];
        for (name, v) in fields {
            if !(v.is_numeric() && v.signum() == Some(Ordering::Greater)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a positive number, got {}",
                    v.to_decimal(12)
                )));
            }
        }
        Ok(())
    }
}

/// Two adjacent retained samples whose displacements `y - x` have
/// opposite signs, or where exactly one displacement is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub x1: MpReal,
    pub y1: MpReal,
    pub x2: MpReal,
    pub y2: MpReal,
}

impl Bracket {
    /// `(y1 - x1) * (y2 - x2)`.
    pub fn sign_product(&self) -> MpReal {
        &(&self.y1 - &self.x1) * &(&self.y2 - &self.x2)
    }
}

/// A candidate root together with the bracket it was taken from.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub value: MpReal,
    pub bracket: Bracket,
}

/// `g(y) - y`, or unavailable when `g(y)` is Null.
#[derive(Clone, Debug, PartialEq)]
pub enum ErrorEstimate {
    Value(MpReal),
    Unavailable,
}

impl ErrorEstimate {
    pub fn value(&self) -> Option<&MpReal> {
        match self {
            ErrorEstimate::Value(v) => Some(v),
            ErrorEstimate::Unavailable => None,
        }
    }
}

/// A distilled root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEstimate {
    pub root: MpReal,
    /// `g(root) - root`, an estimate of `alpha - root`.
    pub error_estimate: MpReal,
    /// `|f(root)|`.
    pub residual: MpReal,
    /// Mesh nodes of the originating bracket, `x1 < x2`.
    pub bracket: (MpReal, MpReal),
}

/// Sizes of the intermediate lists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageCounts {
    pub samples: usize,
    pub numeric: usize,
    pub near_bisector: usize,
    pub brackets: usize,
    pub union: usize,
    pub residual_kept: usize,
    pub final_count: usize,
}

/// Outcome of a full distillation run.
#[derive(Clone, Debug)]
pub struct RootReport {
    pub roots: Vec<RootEstimate>,
    pub stage_counts: StageCounts,
    pub params: FilterParams,
    pub prec_digits: u32,
    pub k: u32,
    pub scheme: EvalScheme,
    pub a: MpReal,
    pub b: MpReal,
    pub h: MpReal,
    pub mesh_len: usize,
}

impl RootReport {
    pub fn largest(&self) -> Option<&RootEstimate> {
        self.roots.last()
    }
}

/// Stage 1: numeric pairs with `(y - x)^2 < c`, order preserved.
pub fn filter_near_bisector(samples: &SampleList, c: &MpReal) -> SampleList {
    let kept = samples
        .pairs()
        .iter()
        .filter(|s| s.displacement().map_or(false, |d| &d.square() < c))
        .cloned()
        .collect();
    SampleList::new(kept).expect("subsequence stays ordered")
}

/// Stage 2: consecutive numeric pairs with `(y1 - x1)(y2 - x2) < 0`.
///
/// A node that is itself a machine fixed point has displacement exactly
/// zero, so the product with either neighbour vanishes; such pairs are kept
/// too unless both displacements are zero.
pub fn bracket_sign_changes(data1: &SampleList) -> Vec<Bracket> {
    let numeric: Vec<(&MpReal, &MpReal)> = data1.numeric().collect();
    numeric
        .windows(2)
        .filter_map(|w| {
            let bracket = Bracket {
                x1: w[0].0.clone(),
                y1: w[0].1.clone(),
                x2: w[1].0.clone(),
                y2: w[1].1.clone(),
            };
            let d1 = (&bracket.y1 - &bracket.x1).signum();
            let d2 = (&bracket.y2 - &bracket.x2).signum();
            let keep = match (d1, d2) {
                (Some(Ordering::Equal), Some(Ordering::Equal)) => false,
                (Some(Ordering::Equal), Some(_)) | (Some(_), Some(Ordering::Equal)) => true,
                _ => bracket.sign_product().signum() == Some(Ordering::Less),
            };
            keep.then_some(bracket)
        })
        .collect()
}

/// Stage 3: every image appearing in a bracket, sorted ascending, with
/// values within `dedup_tol` of a cluster's first member collapsed into it.
///
/// A cluster keeps its first value. Its bracket is one that encloses that
/// value when the cluster has such a bracket, so the reported bracket
/// straddles the root rather than a basin boundary.
pub fn dedup_union(brackets: &[Bracket], dedup_tol: &MpReal) -> Vec<Candidate> {
    let mut all: Vec<Candidate> = brackets
        .iter()
        .flat_map(|b| {
            [
                Candidate { value: b.y1.clone(), bracket: b.clone() },
                Candidate { value: b.y2.clone(), bracket: b.clone() },
            ]
        })
        .collect();
    all.sort_by(|p, q| p.value.partial_cmp(&q.value).unwrap_or(Ordering::Equal));
    let mut out: Vec<Candidate> = Vec::with_capacity(all.len());
    for cand in all {
        match out.last_mut() {
            Some(rep) if &(&cand.value - &rep.value).abs() < dedup_tol => {
                if !encloses(&rep.bracket, &rep.value) && encloses(&cand.bracket, &rep.value) {
                    rep.bracket = cand.bracket;
                }
            }
            _ => out.push(cand),
        }
    }
    out
}

fn encloses(b: &Bracket, v: &MpReal) -> bool {
    &b.x1 <= v && v <= &b.x2
}

/// Stage 4: candidates with `|f(y)| < threshold`.
pub fn residual_filter(
    union: Vec<Candidate>,
    f: &Polynomial,
    scheme: EvalScheme,
    threshold: &MpReal,
) -> Vec<Candidate> {
    union
        .into_iter()
        .filter(|c| &f.eval(&c.value, scheme).abs() < threshold)
        .collect()
}

/// `g(y) - y`, the estimated error `alpha - y` of a value near a fixed point.
pub fn error_estimate(cfg: &MapConfig, y: &MpReal) -> ErrorEstimate {
    match cfg.educated_g(y) {
        MapResult::Numeric(gy) => ErrorEstimate::Value(&gy - y),
        MapResult::Null => ErrorEstimate::Unavailable,
    }
}

/// Stage 5: candidates whose error estimate is below `error_tol`.
pub fn error_filter(final_a: Vec<Candidate>, cfg: &MapConfig, error_tol: &MpReal) -> Vec<RootEstimate> {
    final_a
        .into_par_iter()
        .filter_map(|c| {
            let err = error_estimate(cfg, &c.value);
            let err = err.value()?;
            if &err.abs() >= error_tol {
                return None;
            }
            Some(RootEstimate {
                residual: cfg.eval_f(&c.value).abs(),
                error_estimate: err.clone(),
                bracket: (c.bracket.x1, c.bracket.x2),
                root: c.value,
            })
        })
        .collect()
}

/// Runs every stage on an already sampled table.
pub fn distill_samples(
    cfg: &MapConfig,
    mesh: &Mesh,
    samples: &SampleList,
    params: &FilterParams,
) -> Result<RootReport> {
    params.validate()?;
    let mut counts = StageCounts {
        samples: samples.len(),
        numeric: samples.numeric().count(),
        ..StageCounts::default()
    };
    let data1 = filter_near_bisector(samples, &params.bisector_c);
    counts.near_bisector = data1.len();
    let data2 = bracket_sign_changes(&data1);
    counts.brackets = data2.len();
    let union = dedup_union(&data2, &params.dedup_tol);
    counts.union = union.len();
    let final_a = residual_filter(union, cfg.f(), cfg.scheme(), &params.residual_threshold);
    counts.residual_kept = final_a.len();
    let roots = error_filter(final_a, cfg, &params.error_tol);
    counts.final_count = roots.len();
    Ok(RootReport {
        roots,
        stage_counts: counts,
        params: params.clone(),
        prec_digits: cfg.ctx().digits(),
        k: cfg.k(),
        scheme: cfg.scheme(),
        a: cfg.a().clone(),
        b: cfg.b().clone(),
        h: mesh.h().clone(),
        mesh_len: mesh.len(),
    })
}

/// Samples the map over the mesh and distills the roots.
pub fn distill(cfg: &MapConfig, mesh: &Mesh, params: &FilterParams) -> Result<RootReport> {
    let samples = sample_map(cfg, mesh);
    distill_samples(cfg, mesh, &samples, params)
}

/// A platform: numeric samples sharing one image height within the
/// tolerance. Runs of consecutive nodes are collected first, then runs at
/// the same height are merged; a platform has at least two members.
#[derive(Clone, Debug)]
pub struct Platform {
    pub samples: Vec<Sample>,
    /// Image of the member closest to the bisector.
    pub height: MpReal,
}

/// Platforms of the sampled step function, ascending by height.
pub fn platforms(samples: &SampleList, tol: &MpReal) -> Vec<Platform> {
    let mut runs: Vec<Vec<Sample>> = Vec::new();
    for s in samples.pairs().iter().filter(|s| !s.y.is_null()) {
        let y = s.y.numeric().expect("numeric");
        match runs.last_mut() {
            Some(run)
                if &(y - run.last().and_then(|p| p.y.numeric()).expect("numeric")).abs()
                    <= tol =>
            {
                run.push(s.clone())
            }
            _ => runs.push(vec![s.clone()]),
        }
    }
    let mut out: Vec<Platform> = runs
        .into_iter()
        .map(|run| Platform {
            height: closest_to_bisector(&run).clone(),
            samples: run,
        })
        .collect();
    out.sort_by(|p, q| p.height.partial_cmp(&q.height).unwrap_or(Ordering::Equal));
    let mut merged: Vec<Platform> = Vec::with_capacity(out.len());
    for p in out {
        match merged.last_mut() {
            Some(last) if &(&p.height - &last.height).abs() <= tol => {
                last.samples.extend(p.samples);
                last.height = closest_to_bisector(&last.samples).clone();
            }
            _ => merged.push(p),
        }
    }
    merged.retain(|p| p.samples.len() >= MIN_PLATFORM_SIZE);
    merged
}

const MIN_PLATFORM_SIZE: usize = 2;

/// Distinct sampled images that are machine fixed points: one Newton
/// correction moves them by less than `tol`. Ascending, duplicates within
/// `tol` dropped.
///
/// Unlike [`platforms`] this also counts roots hit by a single node, which
/// is the common case when roots are denser than the mesh.
pub fn captured_fixed_points(cfg: &MapConfig, samples: &SampleList, tol: &MpReal) -> Vec<MpReal> {
    let mut ys: Vec<MpReal> = samples
        .numeric()
        .map(|(_, y)| y.clone())
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|y| match cfg.newton_step(y) {
            MapResult::Numeric(z) => &(&z - y).abs() < tol,
            MapResult::Null => false,
        })
        .collect();
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap_or(Ordering::Equal));
    ys.dedup_by(|q, p| &(&*q - &*p).abs() < tol);
    ys
}

fn closest_to_bisector(run: &[Sample]) -> &MpReal {
    run.iter()
        .filter_map(|s| s.displacement().map(|d| (d.abs(), s)))
        .min_by(|(d1, _), (d2, _)| d1.partial_cmp(d2).unwrap_or(Ordering::Equal))
        .and_then(|(_, s)| s.y.numeric())
        .expect("platforms are nonempty and numeric")
}

/// One value per platform: the image of the pair whose image is closest
/// to its node.
pub fn platform_representative(samples: &SampleList, tol: &MpReal) -> Vec<MpReal> {
    platforms(samples, tol).into_iter().map(|p| p.height).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::ExactPolynomial;

    fn ctx8() -> PrecContext {
        PrecContext::new(8).unwrap()
    }

    fn num(ctx: PrecContext, x: &str, y: &str) -> Sample {
        Sample {
            x: ctx.parse(x).unwrap(),
            y: MapResult::Numeric(ctx.parse(y).unwrap()),
        }
    }

    fn list(samples: Vec<Sample>) -> SampleList {
        SampleList::new(samples).unwrap()
    }

    #[test]
    fn bisector_stage() {
        let c = ctx8();
        let tenth = c.parse("0.1").unwrap();
        let l = list(vec![num(c, "0", "0.9"), num(c, "0.5", "0.5")]);
        let kept = filter_near_bisector(&l, &tenth);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept.pairs()[0].x, c.parse("0.5").unwrap());
    }

    #[test]
    fn bracket_stage() {
        let c = ctx8();
        let l = list(vec![num(c, "0.3", "0.4"), num(c, "0.5", "0.4")]);
        let b = bracket_sign_changes(&l);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].sign_product().to_decimal(3), "-0.0100");
        let l = list(vec![num(c, "0.3", "0.35"), num(c, "0.5", "0.55")]);
        assert!(bracket_sign_changes(&l).is_empty());
    }

    #[test]
    fn node_on_a_root_brackets_with_its_neighbours() {
        let c = ctx8();
        let l = list(vec![num(c, "0.25", "0.5"), num(c, "0.5", "0.5"), num(c, "0.75", "0.5")]);
        let b = bracket_sign_changes(&l);
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|b| b.y1 == c.parse("0.5").unwrap()));
        let flat = list(vec![num(c, "0.25", "0.25"), num(c, "0.5", "0.5")]);
        assert!(bracket_sign_changes(&flat).is_empty());
    }

    #[test]
    fn bracket_skips_nulls() {
        let c = ctx8();
        let l = list(vec![
            num(c, "0.1", "0.4"),
            Sample { x: c.parse("0.2").unwrap(), y: MapResult::Null },
            num(c, "0.3", "0.2"),
        ]);
        let b = bracket_sign_changes(&l);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].x1, c.parse("0.1").unwrap());
        assert_eq!(b[0].x2, c.parse("0.3").unwrap());
    }

    fn bracket_with(c: PrecContext, y1: &MpReal, y2: &MpReal) -> Bracket {
        Bracket { x1: c.zero(), y1: y1.clone(), x2: c.one(), y2: y2.clone() }
    }

    #[test]
    fn union_stage() {
        let c = ctx8();
        let r1 = c.parse("0.38268343").unwrap();
        let r2 = c.parse("0.92387953").unwrap();
        let u = dedup_union(&[bracket_with(c, &r1, &r1), bracket_with(c, &r2, &r1)], &c.pow10(-8));
        let vals: Vec<MpReal> = u.into_iter().map(|c| c.value).collect();
        assert_eq!(vals, vec![r1, r2]);

        let c = PrecContext::new(20).unwrap();
        let half = c.parse("0.5").unwrap();
        let near = &half + &c.pow10(-9);
        let u = dedup_union(&[bracket_with(c, &near, &half)], &c.pow10(-8));
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].value, half);
    }

    #[test]
    fn residual_stage() {
        let c = ctx8();
        let f = ExactPolynomial::from_i64(&[0, 1]).round_coeffs(c);
        let tol = c.pow10(-8);
        let zero = Candidate { value: c.zero(), bracket: bracket_with(c, &c.zero(), &c.zero()) };
        let one = Candidate { value: c.one(), bracket: bracket_with(c, &c.one(), &c.one()) };
        let kept = residual_filter(vec![zero.clone(), one], &f, EvalScheme::Compensated, &tol);
        assert_eq!(kept, vec![zero]);
    }

    #[test]
    fn negative_residuals_use_absolute_value() {
        let c = ctx8();
        // f(y) = -1 everywhere: a signed comparison would keep it.
        let f = ExactPolynomial::from_i64(&[-1]).round_coeffs(c);
        let cand = Candidate { value: c.zero(), bracket: bracket_with(c, &c.zero(), &c.zero()) };
        assert!(residual_filter(vec![cand], &f, EvalScheme::Horner, &c.pow10(-8)).is_empty());
    }

    fn parabola(digits: u32, k: u32) -> MapConfig {
        let ctx = PrecContext::new(digits).unwrap();
        let f = ExactPolynomial::from_i64(&[-1, 0, 1]).round_coeffs(ctx);
        MapConfig::new(f, ctx.zero(), ctx.from_i64(2), k).unwrap()
    }

    #[test]
    fn error_estimates() {
        let cfg = parabola(30, 0);
        let ctx = cfg.ctx();
        assert!(error_estimate(&cfg, &ctx.one()).value().unwrap().is_zero());

        // One Newton step from 1 + eps lands at 1 + eps^2 / (2 (1 + eps)).
        let eps = ctx.pow10(-4);
        let y = &ctx.one() + &eps;
        let est = error_estimate(&cfg, &y);
        let est = est.value().unwrap();
        let expect = -&(&eps - &(&eps.square() / &(&(&ctx.one() + &eps) * 2)));
        assert!((est - &expect).abs() < ctx.pow10(-28));
        assert!((est.to_f64() + 1e-4).abs() < 1e-8);

        assert_eq!(error_estimate(&cfg, &ctx.zero()), ErrorEstimate::Unavailable);
    }

    #[test]
    fn error_stage() {
        let cfg = parabola(30, 0);
        let ctx = cfg.ctx();
        let tol = ctx.pow10(-10);
        let b = bracket_with(ctx, &ctx.one(), &ctx.one());
        let exact = Candidate { value: ctx.one(), bracket: b.clone() };
        // |g(y) - y| close to 2e-10, twice the tolerance.
        let off = Candidate { value: &ctx.one() + &(&ctx.pow10(-10) * 2), bracket: b };
        let kept = error_filter(vec![exact, off], &cfg, &tol);
        assert_eq!(kept.len(), 1);
        assert!(kept[0].error_estimate.is_zero());
        assert_eq!(kept[0].root, ctx.one());
    }

    #[test]
    fn platform_examples() {
        let c = ctx8();
        let tol = c.pow10(-8);
        let f = ExactPolynomial::from_i64(&[0, 1]).round_coeffs(c);
        let cfg = MapConfig::new(f, c.from_i64(-1), c.one(), 0).unwrap();
        let mesh = Mesh::uniform(&c.from_i64(-1), &c.one(), &c.parse("0.5").unwrap()).unwrap();
        let l = sample_map(&cfg, &mesh);
        assert_eq!(platform_representative(&l, &tol), vec![c.zero()]);

        let nulls = list(vec![
            Sample { x: c.zero(), y: MapResult::Null },
            Sample { x: c.one(), y: MapResult::Null },
        ]);
        assert!(platform_representative(&nulls, &tol).is_empty());
    }

    #[test]
    fn platform_picks_pair_closest_to_bisector() {
        let c = ctx8();
        let l = list(vec![
            num(c, "0.1", "0.30000001"),
            num(c, "0.3", "0.30000000"),
            num(c, "0.4", "0.30000002"),
            num(c, "0.6", "0.7"),
            num(c, "0.7", "0.7"),
            num(c, "0.8", "0.95"),
        ]);
        // The lone node at 0.8 is not a platform.
        let reps = platform_representative(&l, &c.pow10(-7));
        assert_eq!(reps, vec![c.parse("0.3").unwrap(), c.parse("0.7").unwrap()]);
    }

    #[test]
    fn params_validation() {
        let c = ctx8();
        let mut p = FilterParams::defaults(c);
        assert!(p.validate().is_ok());
        p.dedup_tol = c.zero();
        assert!(p.validate().is_err());
    }
}
