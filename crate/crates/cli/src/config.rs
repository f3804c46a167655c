use std::path::PathBuf;

use qghot_core::catalog::{build_example, ExampleId, Params};
use qghot_core::graph::build_graph;
use qghot_core::hotspots::Sampling;
use qghot_core::spectral::SolverConfig;
use qghot_core::tol::Tolerances;
use qghot_core::MetricGraph;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSource {
    File { path: PathBuf },
    Example { id: ExampleId, params: Params },
}

impl GraphSource {
    pub fn load(&self) -> Result<MetricGraph, Failure> {
        match self {
            GraphSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Input(format!("cannot read graph file `{}`: {e}", path.display())))?;
                Ok(build_graph(&text)?)
            }
            GraphSource::Example { id, params } => Ok(build_example(*id, params)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Secular,
    Fem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Report,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Location,
    TreeBoundary,
    NoDisconnect,
    StarDiameter,
    Reverify,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Location,
        Check::TreeBoundary,
        Check::NoDisconnect,
        Check::StarDiameter,
        Check::Reverify,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum CommandConfig {
    Solve { count: usize },
    Hotspots,
    Verify { checks: Vec<Check> },
    Reproduce,
    Sweep { edges: Vec<String>, lengths: Vec<f64>, index: usize },
    Plot { index: usize },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Solve { .. } => "solve",
            CommandConfig::Hotspots => "hotspots",
            CommandConfig::Verify { .. } => "verify",
            CommandConfig::Reproduce => "reproduce",
            CommandConfig::Sweep { .. } => "sweep",
            CommandConfig::Plot { .. } => "plot",
        }
    }
}

/// Everything a command depends on. Echoed into every report; running a
/// report's config again reproduces the report byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub source: GraphSource,
    pub backend: BackendChoice,
    pub h: f64,
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

impl RunConfig {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tolerances,
            ..SolverConfig::default()
        }
    }
}
