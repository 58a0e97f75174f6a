//! Command-line driver: argument parsing, run configuration and the
//! `distill`, `sample` and `verify` commands.
//!
//! Every output file embeds the resolved [`RunConfig`]; nothing depends
//! on time or thread count, so identical configurations give
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rootdistill::{
    bisection_refine, chebyshev_roots, distill_samples, sample_map, samples_to_csv, samples_to_svg,
    EvalScheme, ExactPolynomial, FilterParams, MapConfig, MapResult, Mesh, MpReal, PolyFile,
    Polynomial, PrecContext, ReportRecord, RootReport, SampleList,
};

/// Digits above which long values are shown as first/last digits only.
pub const FULL_DISPLAY_LIMIT: u32 = 200;
const SUMMARY_DIGITS: usize = 100;

#[derive(Parser, Debug)]
#[command(name = "rootdistill", version)]
#[command(about = "Find the real roots of a polynomial on an interval with a composed Newton map")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the map, filter the table and write the root report.
    Distill(RunArgs),
    /// Write the sampled table of (x, g(x)) pairs.
    Sample(RunArgs),
    /// Distill and compare against the closed form (Chebyshev) or bisection.
    Verify(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Use the Chebyshev polynomial T_d.
    #[arg(long, value_name = "D", conflicts_with = "poly", required_unless_present = "poly")]
    pub chebyshev: Option<usize>,

    /// Read the polynomial from a JSON file {"degree", "coeffs", "prec"}.
    #[arg(long, value_name = "FILE")]
    pub poly: Option<PathBuf>,

    /// Interval endpoints as decimal strings.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, required = true)]
    pub interval: Vec<String>,

    /// Working precision in decimal digits. Defaults to the file's prec for --poly.
    #[arg(long)]
    pub prec: Option<u32>,

    /// Mesh width.
    #[arg(long)]
    pub h: String,

    /// Fold count; the map applies k + 1 Newton steps.
    #[arg(long, default_value_t = 0)]
    pub k: u32,

    /// Keep pairs with (y - x)^2 below this [default: 0.1]
    #[arg(long, value_name = "V")]
    pub bisector_c: Option<String>,

    /// Residual bound |f(y)| [default: 10^(10 - prec)]
    #[arg(long, value_name = "V")]
    pub residual_threshold: Option<String>,

    /// Bound on |g(y) - y| [default: 10^(1 - prec)]
    #[arg(long, value_name = "V")]
    pub error_tol: Option<String>,

    /// Candidates closer than this are merged [default: 10^(1 - prec)]
    #[arg(long, value_name = "V")]
    pub dedup_tol: Option<String>,

    /// Polynomial evaluation scheme.
    #[arg(long, value_enum, default_value_t = EvalArg::Compensated)]
    pub eval: EvalArg,

    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Also write an SVG scatter plot of the sampled map.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,

    /// Worker threads for sampling; all cores when omitted.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalArg {
    Horner,
    Compensated,
}

impl From<EvalArg> for EvalScheme {
    fn from(e: EvalArg) -> Self {
        match e {
            EvalArg::Horner => EvalScheme::Horner,
            EvalArg::Compensated => EvalScheme::Compensated,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files. Exit code 2.
    Config(String),
    /// A numeric step failed. Exit code 3.
    Numeric(String),
    /// Writing an output failed. Exit code 1.
    Output(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Where the polynomial comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolySource {
    Chebyshev { degree: usize },
    File { path: String, degree: usize, coeffs: Vec<String> },
}

/// Fully resolved run parameters, echoed into every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub polynomial: PolySource,
    pub a: String,
    pub b: String,
    pub prec: u32,
    pub h: String,
    pub k: u32,
    pub eval: EvalArg,
    pub bisector_c: String,
    pub residual_threshold: String,
    pub error_tol: String,
    pub dedup_tol: String,
    pub format: Format,
    pub out: Option<String>,
    pub svg: Option<String>,
}

/// Parsed numeric objects behind a [`RunConfig`].
pub struct Resolved {
    pub config: RunConfig,
    pub map: MapConfig,
    pub mesh: Mesh,
    pub params: FilterParams,
}

impl Resolved {
    pub fn ctx(&self) -> PrecContext {
        self.map.ctx()
    }
}

/// Checks the arguments and builds the numeric objects.
pub fn resolve(command: &str, args: &RunArgs) -> Result<Resolved, CliError> {
    let (f, source) = load_polynomial(args)?;
    let ctx = f.ctx();
    let (a_str, b_str) = match args.interval.as_slice() {
        [a, b] => (a.clone(), b.clone()),
        _ => return Err(config_err("--interval needs exactly two values")),
    };
    let a = ctx.parse(&a_str).map_err(config_err)?;
    let b = ctx.parse(&b_str).map_err(config_err)?;
    let h = ctx.parse(&args.h).map_err(config_err)?;
    let mesh = Mesh::uniform(&a, &b, &h).map_err(config_err)?;
    let map = MapConfig::new(f, a, b, args.k)
        .map_err(config_err)?
        .with_scheme(args.eval.into());

    let mut params = FilterParams::defaults(ctx);
    let overrides = [
        (&args.bisector_c, &mut params.bisector_c),
        (&args.residual_threshold, &mut params.residual_threshold),
        (&args.error_tol, &mut params.error_tol),
        (&args.dedup_tol, &mut params.dedup_tol),
    ];
    for (given, slot) in overrides {
        if let Some(s) = given {
            *slot = ctx.parse(s).map_err(config_err)?;
        }
    }
    params.validate().map_err(config_err)?;
    if args.threads == Some(0) {
        return Err(config_err("--threads must be at least 1"));
    }

    let show = |v: &MpReal| short_decimal(v, ctx.digits());
    let config = RunConfig {
        command: command.to_string(),
        polynomial: source,
        a: a_str,
        b: b_str,
        prec: ctx.digits(),
        h: args.h.clone(),
        k: args.k,
        eval: args.eval,
        bisector_c: show(&params.bisector_c),
        residual_threshold: show(&params.residual_threshold),
        error_tol: show(&params.error_tol),
        dedup_tol: show(&params.dedup_tol),
        format: args.format,
        out: args.out.as_ref().map(|p| p.display().to_string()),
        svg: args.svg.as_ref().map(|p| p.display().to_string()),
    };
    Ok(Resolved { config, map, mesh, params })
}

fn load_polynomial(args: &RunArgs) -> Result<(Polynomial, PolySource), CliError> {
    match (&args.chebyshev, &args.poly) {
        (Some(d), None) => {
            let prec = args
                .prec
                .ok_or_else(|| config_err("--prec is required with --chebyshev"))?;
            if *d == 0 {
                return Err(config_err("Chebyshev degree must be at least 1"));
            }
            let ctx = PrecContext::new(prec).map_err(config_err)?;
            let f = ExactPolynomial::chebyshev_t(*d).round_coeffs(ctx);
            Ok((f, PolySource::Chebyshev { degree: *d }))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            let mut file: PolyFile = serde_json::from_str(&text)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            if let Some(p) = args.prec {
                file.prec = p;
            }
            let source = PolySource::File {
                path: path.display().to_string(),
                degree: file.degree,
                coeffs: file.coeffs.clone(),
            };
            let f = file.into_polynomial().map_err(config_err)?;
            if f.degree() == 0 {
                return Err(config_err("polynomial must have degree at least 1"));
            }
            Ok((f, source))
        }
        _ => Err(config_err("give exactly one of --chebyshev or --poly")),
    }
}

/// Compact decimal: trailing zeros of the mantissa dropped.
fn short_decimal(v: &MpReal, digits: u32) -> String {
    let s = v.to_decimal(digits);
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s.as_str(), ""),
    };
    if !mant.contains('.') {
        return s;
    }
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    format!("{mant}{exp}")
}

/// Human-readable form of a possibly very long value.
pub fn display_value(v: &MpReal, digits: u32) -> String {
    if digits > FULL_DISPLAY_LIMIT {
        v.digit_summary(digits, SUMMARY_DIGITS)
    } else {
        v.to_decimal(digits)
    }
}

/// What a command produced: the main artifact and a short summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifact: String,
    pub svg: Option<String>,
    pub summary: String,
}

#[derive(Serialize)]
struct DistillDoc<'a> {
    config: &'a RunConfig,
    report: ReportRecord,
}

#[derive(Serialize)]
struct SampleDoc<'a> {
    config: &'a RunConfig,
    samples: Vec<SampleRow>,
}

#[derive(Serialize)]
struct SampleRow {
    x: String,
    y: Option<String>,
}

/// One distilled root paired with its reference value.
#[derive(Serialize, Debug, Clone)]
pub struct VerifyRow {
    pub root: String,
    pub reference: String,
    pub index_j: Option<usize>,
    pub abs_diff: String,
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    config: &'a RunConfig,
    reference: &'static str,
    rows: Vec<VerifyRow>,
    max_abs_diff: Option<String>,
    distilled: usize,
    oracle: Option<usize>,
}

fn svg_for(r: &Resolved, samples: &SampleList) -> Option<String> {
    r.config.svg.as_ref()?;
    let title = format!(
        "g over [{}, {}], prec {}, h {}, k {}",
        r.config.a, r.config.b, r.config.prec, r.config.h, r.config.k
    );
    let svg = samples_to_svg(samples, r.map.a().to_f64(), r.map.b().to_f64(), &title);
    let meta = serde_json::to_string(&r.config).expect("config serializes");
    // The config goes into an XML comment, so "--" must not appear.
    let meta = meta.replace("--", "- -");
    Some(svg.replacen('\n', &format!("\n<!-- run_config {meta} -->\n"), 1))
}

fn csv_header(config: &RunConfig) -> String {
    format!(
        "# run_config {}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

fn run_distill(r: &Resolved) -> Result<(RootReport, SampleList), CliError> {
    let samples = sample_map(&r.map, &r.mesh);
    let report =
        distill_samples(&r.map, &r.mesh, &samples, &r.params).map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok((report, samples))
}

pub fn cmd_distill(r: &Resolved) -> Result<Outcome, CliError> {
    let (report, samples) = run_distill(r)?;
    let record = report.to_record();
    let artifact = match r.config.format {
        Format::Json => to_json(&DistillDoc { config: &r.config, report: record }),
        Format::Csv => {
            let mut s = csv_header(&r.config);
            s.push_str("index,root,error_estimate,residual,x1,x2\n");
            for (i, root) in record.roots.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i},{},{},{},{},{}",
                    root.root, root.error_estimate, root.residual, root.bracket[0], root.bracket[1]
                );
            }
            s
        }
    };
    let digits = r.ctx().digits();
    let mut summary = format!("roots: {}\n", report.roots.len());
    if let Some(top) = report.largest() {
        let _ = writeln!(summary, "largest root: {}", display_value(&top.root, digits));
        let _ = writeln!(summary, "error estimate: {}", top.error_estimate.to_decimal(6));
    }
    Ok(Outcome { artifact, svg: svg_for(r, &samples), summary })
}

pub fn cmd_sample(r: &Resolved) -> Result<Outcome, CliError> {
    let samples = sample_map(&r.map, &r.mesh);
    let digits = r.ctx().digits();
    let artifact = match r.config.format {
        Format::Json => {
            let rows = samples
                .pairs()
                .iter()
                .map(|s| SampleRow {
                    x: s.x.to_decimal(digits),
                    y: match &s.y {
                        MapResult::Numeric(v) => Some(v.to_decimal(digits)),
                        MapResult::Null => None,
                    },
                })
                .collect();
            to_json(&SampleDoc { config: &r.config, samples: rows })
        }
        Format::Csv => csv_header(&r.config) + &samples_to_csv(&samples, digits),
    };
    let summary = format!(
        "samples: {} ({} numeric, {} null)\n",
        samples.len(),
        samples.numeric().count(),
        samples.null_count()
    );
    Ok(Outcome { artifact, svg: svg_for(r, &samples), summary })
}

pub fn cmd_verify(r: &Resolved) -> Result<Outcome, CliError> {
    let (report, samples) = run_distill(r)?;
    let ctx = r.ctx();
    let digits = ctx.digits();
    let (reference, oracle_count, refs): (&str, Option<usize>, Vec<(MpReal, Option<usize>)>) =
        match r.config.polynomial {
            PolySource::Chebyshev { degree } => {
                let oracle = chebyshev_roots(degree, r.map.a(), r.map.b(), ctx);
                let refs = report
                    .roots
                    .iter()
                    .map(|est| {
                        oracle
                            .iter()
                            .min_by(|p, q| {
                                let dp = (&p.value - &est.root).abs();
                                let dq = (&q.value - &est.root).abs();
                                dp.partial_cmp(&dq).expect("finite")
                            })
                            .map(|o| (o.value.clone(), Some(o.index_j)))
                            .expect("a root inside the interval implies a closed-form root there")
                    })
                    .collect();
                ("closed_form", Some(oracle.len()), refs)
            }
            PolySource::File { .. } => {
                let refs = report
                    .roots
                    .iter()
                    .map(|est| {
                        let half = bisection_window(&est.error_estimate, ctx);
                        let lo = &est.root - &half;
                        let hi = &est.root + &half;
                        bisection_refine(r.map.f(), &lo, &hi, &ctx.pow10(-(digits as i32) - 2))
                            .map(|refined| (refined.value, None))
                            .map_err(|e| CliError::Numeric(e.to_string()))
                    })
                    .collect::<Result<_, _>>()?;
                ("bisection", None, refs)
            }
        };
    let rows: Vec<(MpReal, VerifyRow)> = report
        .roots
        .iter()
        .zip(refs)
        .map(|(est, (value, index_j))| {
            let diff = (&est.root - &value).abs();
            let row = VerifyRow {
                root: est.root.to_decimal(digits),
                reference: value.to_decimal(digits),
                index_j,
                abs_diff: diff.to_decimal(6),
            };
            (diff, row)
        })
        .collect();
    let max_diff = rows
        .iter()
        .map(|(d, _)| d)
        .max_by(|p, q| p.partial_cmp(q).expect("finite"))
        .cloned();
    let rows: Vec<VerifyRow> = rows.into_iter().map(|(_, row)| row).collect();
    let max_abs_diff = max_diff.as_ref().map(|d| d.to_decimal(6));

    let artifact = match r.config.format {
        Format::Json => to_json(&VerifyDoc {
            config: &r.config,
            reference,
            rows: rows.clone(),
            max_abs_diff: max_abs_diff.clone(),
            distilled: report.roots.len(),
            oracle: oracle_count,
        }),
        Format::Csv => {
            let mut s = csv_header(&r.config);
            s.push_str("index,root,reference,index_j,abs_diff\n");
            for (i, row) in rows.iter().enumerate() {
                let j = row.index_j.map(|j| j.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{i},{},{},{j},{}", row.root, row.reference, row.abs_diff);
            }
            s
        }
    };
    let mut summary = String::new();
    match oracle_count {
        Some(n) => {
            let _ = writeln!(summary, "distilled={} oracle={}", report.roots.len(), n);
        }
        None => {
            let _ = writeln!(summary, "distilled={} (checked by bisection)", report.roots.len());
        }
    }
    let _ = writeln!(
        summary,
        "max abs difference: {}",
        max_abs_diff.as_deref().unwrap_or("n/a")
    );
    Ok(Outcome { artifact, svg: svg_for(r, &samples), summary })
}

/// Half-width of the bracket handed to bisection around a distilled root:
/// ten times the error estimate, at least a hundred units of the last digit.
fn bisection_window(err: &MpReal, ctx: PrecContext) -> MpReal {
    let floor = ctx.pow10(2 - ctx.digits() as i32);
    let scaled = &err.abs() * &ctx.from_i64(10);
    scaled.max(&floor).clone()
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Runs a parsed command line. Artifacts go to their files; the main
/// artifact is returned for stdout when `--out` is absent.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (name, args, command): (&str, &RunArgs, fn(&Resolved) -> Result<Outcome, CliError>) = match &cli.command {
        Command::Distill(a) => ("distill", a, cmd_distill),
        Command::Sample(a) => ("sample", a, cmd_sample),
        Command::Verify(a) => ("verify", a, cmd_verify),
    };
    let resolved = resolve(name, args)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Numeric(e.to_string()))?;
    let outcome = pool.install(|| command(&resolved))?;
    if let Some(path) = &args.out {
        write_file(path, &outcome.artifact)?;
    }
    if let (Some(path), Some(svg)) = (&args.svg, &outcome.svg) {
        write_file(path, svg)?;
    }
    Ok(outcome)
}
