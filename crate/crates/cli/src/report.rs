use std::io::Write;
use std::path::Path;

use qghot_core::graph::{diameter, GraphDescription};
use qghot_core::hotspots::{HotspotReport, VerifierOutcome};
use qghot_core::MetricGraph;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: "qghot".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphBlock {
    pub description: GraphDescription,
    pub total_length: f64,
    pub betti: usize,
    pub diameter: f64,
}

impl GraphBlock {
    pub fn new(g: &MetricGraph) -> Self {
        Self {
            description: g.to_description(),
            total_length: g.total_length(),
            betti: g.betti(),
            diameter: diameter(g),
        }
    }
}

/// One distinct eigenvalue. Residual diagnostics are absent for the FEM backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub first_index: usize,
    pub last_index: usize,
    pub mu: f64,
    pub k: f64,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gram_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub derivative_bounds_hold: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length: f64,
    pub mu: f64,
    pub gap: Option<f64>,
    pub hotspots: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eig_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub supnorm_err: Option<f64>,
}

/// A hot-spot marker in the unrolled panel: edge, offset, and the drawn position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub edge: String,
    pub offset: f64,
    pub kind: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: RunConfig,
    pub graph: GraphBlock,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub spectrum: Vec<SpectrumEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hotspots: Option<HotspotReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub verifiers: Vec<VerifierOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub facts: Vec<Fact>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sweep: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub markers: Vec<Marker>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_seconds: Option<f64>,
}

impl Report {
    pub fn new(config: RunConfig, g: &MetricGraph) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: Tool::default(),
            config,
            graph: GraphBlock::new(g),
            spectrum: Vec::new(),
            hotspots: None,
            verifiers: Vec::new(),
            facts: Vec::new(),
            sweep: Vec::new(),
            markers: Vec::new(),
            timing_seconds: None,
        }
    }

    /// A failed verifier or fact.
    pub fn failed(&self) -> bool {
        self.verifiers.iter().any(VerifierOutcome::failed) || self.facts.iter().any(|f| !f.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub const SOLVE_CSV_HEADER: &[&str] = &["index", "mu", "k", "multiplicity"];
pub const VERIFY_CSV_HEADER: &[&str] = &["check", "status", "witnesses", "detail"];
pub const FACTS_CSV_HEADER: &[&str] = &["fact", "expected", "observed", "status"];
pub const SWEEP_CSV_HEADER: &[&str] = &["length", "mu", "gap", "hotspots"];
pub const SWEEP_LIMIT_CSV_HEADER: &[&str] = &["length", "mu", "gap", "hotspots", "eig_err", "supnorm_err"];
pub const MARKER_CSV_HEADER: &[&str] = &["edge", "offset", "kind", "x", "y"];

/// CSV text with the given header row.
pub fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Writes through a temporary file in the target directory and renames it
/// into place; without a path the text goes to stdout.
pub fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
