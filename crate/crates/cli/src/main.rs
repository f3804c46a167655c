//! `qghot`: spectra, hot spots and verifiers for quantum graphs.

mod commands;
mod config;
mod plot;
mod report;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qghot_core::catalog::{ExampleId, Params};
use qghot_core::hotspots::Sampling;
use qghot_core::tol::Tolerances;

use config::{BackendChoice, Check, CommandConfig, Format, GraphSource, RunConfig};
use report::{write_output, Report};

/// Exit codes.
const EXIT_VERIFIER: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl From<qghot_core::Error> for Failure {
    fn from(e: qghot_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "qghot", version, about = "Eigenvalues, eigenfunctions and hot spots of metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Graph description (JSON).
    #[arg(value_name = "GRAPH")]
    file: Option<PathBuf>,
    /// Graph description (JSON); same as the positional argument.
    #[arg(long, conflicts_with = "file")]
    graph: Option<PathBuf>,
    /// Named example instead of a file.
    #[arg(long, conflicts_with_all = ["file", "graph"])]
    example: Option<String>,
    /// Example parameter `name=value`; repeatable, comma-separated pairs allowed.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, value_enum, default_value = "secular")]
    backend: BackendChoice,
    /// Mesh width for the FEM backend.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Sampled directions for multiple eigenvalues.
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "report")]
    format: Format,
    /// Record wall-clock time in the report (breaks byte-identical replays).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// The first eigenvalues with residual diagnostics.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        /// Number of eigenvalues, counted with multiplicity.
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Hot-spot sets of the second eigenvalue with verifier outcomes.
    Hotspots {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs selected verifiers; exit code 1 if any fails.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, value_delimiter = ',')]
        checks: Vec<Check>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs an example and compares it with its facts table.
    /// Example parameters may also be given as `--name value`.
    Reproduce {
        example: String,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tracks one eigenvalue while the given edges run through a length ladder.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        /// Edge ids set to each ladder length.
        #[arg(long, value_delimiter = ',', required = true)]
        edge: Vec<String>,
        /// Length ladder; a final 0 adds the limit comparison.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        lengths: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        index: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// SVG of an eigenfunction: graph layout and unrolled edge profiles.
    Plot {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 2)]
        index: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-runs the configuration embedded in a JSON report.
    Replay {
        report: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn source(args: SourceArgs) -> Result<GraphSource, Failure> {
    let params = Params::parse(&args.params)?;
    match (args.file.or(args.graph), args.example) {
        (Some(path), None) => {
            if !params.0.is_empty() {
                return Err(Failure::Input("--param applies to --example only".into()));
            }
            Ok(GraphSource::File { path })
        }
        (None, Some(id)) => Ok(GraphSource::Example { id: id.parse()?, params }),
        _ => Err(Failure::Input("give a graph file or --example".into())),
    }
}

fn config(command: CommandConfig, source: GraphSource, common: CommonArgs) -> RunConfig {
    RunConfig {
        command,
        source,
        backend: common.backend,
        h: common.h,
        tolerances: Tolerances::from_env(),
        sampling: common.directions.map(Sampling::uniform).unwrap_or_default(),
        seed: common.seed,
        format: common.format,
        out: common.out,
        timing: common.timing,
    }
}

/// Turns `--name value` after `reproduce <id>` into `--param name=value`
/// for the example's own parameter names.
fn rewrite_reproduce(args: Vec<String>) -> Vec<String> {
    let Some(pos) = args.iter().position(|a| a == "reproduce") else {
        return args;
    };
    let Some(id) = args.get(pos + 1).and_then(|s| s.parse::<ExampleId>().ok()) else {
        return args;
    };
    let names: Vec<&str> = id.parameters().iter().map(|(k, _)| *k).collect();
    let mut out: Vec<String> = args[..pos + 2].to_vec();
    let mut rest = args[pos + 2..].iter();
    while let Some(a) = rest.next() {
        let flag = a.strip_prefix("--").map(|f| f.split_once('=').map_or((f, None), |(n, v)| (n, Some(v))));
        match flag {
            Some((name, inline)) if names.contains(&name) => {
                let value = inline.map(str::to_string).or_else(|| rest.next().cloned()).unwrap_or_default();
                out.push("--param".into());
                out.push(format!("{name}={value}"));
            }
            _ => out.push(a.clone()),
        }
    }
    out
}

/// The run configuration and where its output goes. A replay keeps the
/// echoed config untouched and writes wherever it is told.
fn parse() -> Result<(RunConfig, Option<PathBuf>), Failure> {
    let cli = Cli::parse_from(rewrite_reproduce(std::env::args().collect()));
    let cfg = match cli.command {
        Command::Solve { source: s, k, common } => config(CommandConfig::Solve { count: k }, source(s)?, common),
        Command::Hotspots { source: s, common } => config(CommandConfig::Hotspots, source(s)?, common),
        Command::Verify { source: s, mut checks, common } => {
            if checks.is_empty() {
                checks = Check::ALL.to_vec();
            }
            config(CommandConfig::Verify { checks }, source(s)?, common)
        }
        Command::Reproduce { example, params, common } => {
            let src = GraphSource::Example {
                id: example.parse()?,
                params: Params::parse(&params)?,
            };
            config(CommandConfig::Reproduce, src, common)
        }
        Command::Sweep {
            source: s,
            edge,
            lengths,
            index,
            common,
        } => config(
            CommandConfig::Sweep {
                edges: edge,
                lengths,
                index,
            },
            source(s)?,
            common,
        ),
        Command::Plot { source: s, index, common } => config(CommandConfig::Plot { index }, source(s)?, common),
        Command::Replay { report, out } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| Failure::Input(format!("cannot read report `{}`: {e}", report.display())))?;
            let parsed: Report =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("malformed report: {e}")))?;
            return Ok((parsed.config, out));
        }
    };
    let out = cfg.out.clone();
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let (cfg, dest) = match parse() {
        Ok(c) => c,
        Err(f) => return fail(f),
    };
    let output = match commands::run(&cfg) {
        Ok(o) => o,
        Err(f) => return fail(f),
    };
    if let Err(e) = write_output(dest.as_deref(), &output.text) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    for line in &output.summary {
        eprintln!("{line}");
    }
    if output.report.failed() {
        ExitCode::from(EXIT_VERIFIER)
    } else {
        ExitCode::SUCCESS
    }
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Input(m) => {
            eprintln!("input error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Failure::Numerical(m) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::rewrite_reproduce;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn example_flags_become_params() {
        assert_eq!(
            rewrite_reproduce(args("qghot reproduce krpamm_tree --eps 0.05 --m=20 --seed 3")),
            args("qghot reproduce krpamm_tree --param eps=0.05 --param m=20 --seed 3")
        );
        assert_eq!(rewrite_reproduce(args("qghot solve --eps 1")), args("qghot solve --eps 1"));
        assert_eq!(rewrite_reproduce(args("qghot reproduce nonesuch --eps 1")), args("qghot reproduce nonesuch --eps 1"));
    }
}
