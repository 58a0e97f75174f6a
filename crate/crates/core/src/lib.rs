//! Global real-root distillation.
//!
//! A polynomial `f` is sampled on a uniform mesh of `[a, b]` through a
//! high-order "educated" map `g`, the `k`-fold composition of Newton's
//! map (order `2^(k+1)`) with points that fail to converge inside the
//! interval mapped to `Null`. For large enough `k` the sampled table is a
//! monotone step function whose platforms sit at the roots; filtering the
//! table yields every detectable root together with the error estimate
//! `g(y) - y`.
//!
//! ```
//! use rootdistill::{distill, ExactPolynomial, FilterParams, MapConfig, Mesh, PrecContext};
//!
//! let ctx = PrecContext::new(8).unwrap();
//! let f = ExactPolynomial::chebyshev_t(4).round_coeffs(ctx);
//! let (a, b) = (ctx.from_i64(-1), ctx.one());
//! let mesh = Mesh::uniform(&a, &b, &ctx.parse("0.1").unwrap()).unwrap();
//! let cfg = MapConfig::new(f, a, b, 3).unwrap();
//! let report = distill(&cfg, &mesh, &FilterParams::defaults(ctx)).unwrap();
//! assert_eq!(report.roots.len(), 4);
//! ```

pub mod context;
pub mod distiller;
pub mod educated;
pub mod error;
pub mod export;
pub mod grid;
pub mod oracle;
pub mod polynomial;

pub use context::{MpReal, PrecContext, GUARD_BITS};
pub use distiller::{
    bracket_sign_changes, captured_fixed_points, dedup_union, distill, distill_samples, error_estimate, error_filter,
    filter_near_bisector, platform_representative, platforms, residual_filter, Bracket, Candidate,
    ErrorEstimate, FilterParams, Platform, RootEstimate, RootReport, StageCounts,
};
pub use export::{samples_to_csv, samples_to_svg, ReportRecord};
pub use educated::{order_of, MapConfig, MapResult};
pub use error::{Error, Result};
pub use grid::{
    default_invariance_tol, is_invariant, sample_map, sample_map_sequential, Mesh, Sample,
    SampleList,
};
pub use oracle::{bisection_refine, chebyshev_roots, OracleRoot, Refined};
pub use polynomial::{EvalScheme, ExactPolynomial, PolyFile, Polynomial};
