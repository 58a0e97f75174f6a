//! Text artifacts: the sample table as CSV, a scatter plot as SVG, and
//! the root report as a JSON record. Every number is written as a
//! decimal string at the working precision.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distiller::{FilterParams, RootReport, StageCounts};
use crate::educated::MapResult;
use crate::grid::SampleList;

/// `index,x,y` rows, `Null` for ignored nodes.
pub fn samples_to_csv(samples: &SampleList, digits: u32) -> String {
    let mut out = String::from("index,x,y\n");
    for (i, s) in samples.pairs().iter().enumerate() {
        let y = match &s.y {
            MapResult::Numeric(v) => v.to_decimal(digits),
            MapResult::Null => "Null".to_string(),
        };
        writeln!(out, "{i},{},{y}", s.x.to_decimal(digits)).expect("write to string");
    }
    out
}

/// Scatter plot of the numeric pairs over `[a, b]^2` with the line `y = x`.
pub fn samples_to_svg(samples: &SampleList, a: f64, b: f64, title: &str) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 48.0;
    let span = (b - a).max(f64::MIN_POSITIVE);
    let px = |v: f64| PAD + (v - a) / span * SIZE;
    let py = |v: f64| PAD + SIZE - (v - a) / span * SIZE;
    let total = SIZE + 2.0 * PAD;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        total / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        svg,
        r##"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#444"/>"##
    )
    .unwrap();
    writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c33" stroke-dasharray="4 3"/>"##,
        px(a),
        py(a),
        px(b),
        py(b)
    )
    .unwrap();
    for v in [a, b] {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{v}</text>"#,
            px(v),
            PAD + SIZE + 18.0
        )
        .unwrap();
    }
    for (x, y) in samples.numeric() {
        let (x, y) = (x.to_f64(), y.to_f64());
        writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f5fa8"/>"##,
            px(x),
            py(y)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Serializable form of a [`RootReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub roots: Vec<RootRecord>,
    pub stage_counts: StageRecord,
    pub map: MapRecord,
    pub filter: FilterRecord,
    pub mesh: MeshRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub root: String,
    pub error_estimate: String,
    pub residual: String,
    pub bracket: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub samples: usize,
    pub data: usize,
    pub data1: usize,
    pub data2: usize,
    pub union: usize,
    pub final_a: usize,
    #[serde(rename = "final")]
    pub final_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapRecord {
    pub a: String,
    pub b: String,
    pub k: u32,
    pub order: String,
    pub prec: u32,
    pub prec_bits: u32,
    pub scheme: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterRecord {
    pub bisector_c: String,
    pub residual_threshold: String,
    pub error_tol: String,
    pub dedup_tol: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRecord {
    pub a: String,
    pub b: String,
    pub h: String,
    pub nodes: usize,
}

impl From<StageCounts> for StageRecord {
    fn from(c: StageCounts) -> Self {
        StageRecord {
            samples: c.samples,
            data: c.numeric,
            data1: c.near_bisector,
            data2: c.brackets,
            union: c.union,
            final_a: c.residual_kept,
            final_count: c.final_count,
        }
    }
}

fn filter_record(p: &FilterParams, digits: u32) -> FilterRecord {
    FilterRecord {
        bisector_c: p.bisector_c.to_decimal(digits),
        residual_threshold: p.residual_threshold.to_decimal(digits),
        error_tol: p.error_tol.to_decimal(digits),
        dedup_tol: p.dedup_tol.to_decimal(digits),
    }
}

impl RootReport {
    pub fn to_record(&self) -> ReportRecord {
        let d = self.prec_digits;
        ReportRecord {
            roots: self
                .roots
                .iter()
                .map(|r| RootRecord {
                    root: r.root.to_decimal(d),
                    error_estimate: r.error_estimate.to_decimal(d),
                    residual: r.residual.to_decimal(d),
                    bracket: [r.bracket.0.to_decimal(d), r.bracket.1.to_decimal(d)],
                })
                .collect(),
            stage_counts: self.stage_counts.into(),
            map: MapRecord {
                a: self.a.to_decimal(d),
                b: self.b.to_decimal(d),
                k: self.k,
                order: format!("2^{}", self.k + 1),
                prec: d,
                prec_bits: self.a.prec(),
                scheme: self.scheme.to_string(),
            },
            filter: filter_record(&self.params, d),
            mesh: MeshRecord {
                a: self.a.to_decimal(d),
                b: self.b.to_decimal(d),
                h: self.h.to_decimal(d),
                nodes: self.mesh_len,
            },
        }
    }
}
