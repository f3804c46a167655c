use qghot_core::catalog::{limit_compare, LimitFamily};
use qghot_core::hotspots::{
    hotspot_sets_with, reverify, star_diameter_check, verify_location, verify_no_disconnect, verify_tree_boundary,
    Component, HotspotReport, Shape, Status, VerifierOutcome,
};
use qghot_core::spectral::{eigenvalues_with, Backend, EigenPair};
use qghot_core::{Error, MetricGraph};

use crate::config::{BackendChoice, Check, CommandConfig, Format, RunConfig};
use crate::report::{
    table, Report, SpectrumEntry, SweepRow, SOLVE_CSV_HEADER, SWEEP_CSV_HEADER, SWEEP_LIMIT_CSV_HEADER,
    VERIFY_CSV_HEADER,
};
use crate::{plot, reproduce, Failure};

/// The rendered primary output plus the structured report behind it.
pub struct Output {
    pub report: Report,
    pub text: String,
    /// One line per verifier or fact, for the terminal.
    pub summary: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<Output, Failure> {
    let start = std::time::Instant::now();
    let g = cfg.source.load()?;
    let mut report = Report::new(cfg.clone(), &g);
    let text = match &cfg.command {
        CommandConfig::Solve { count } => solve(cfg, &g, *count, &mut report)?,
        CommandConfig::Hotspots => hotspots(cfg, &g, &mut report)?,
        CommandConfig::Verify { checks } => verify(cfg, &g, checks, &mut report)?,
        CommandConfig::Reproduce => reproduce::run(cfg, &g, &mut report)?,
        CommandConfig::Sweep { edges, lengths, index } => sweep(cfg, &g, edges, lengths, *index, &mut report)?,
        CommandConfig::Plot { index } => plot::run(cfg, &g, *index, &mut report)?,
    };
    if cfg.timing {
        report.timing_seconds = Some(start.elapsed().as_secs_f64());
    }
    let summary = summary_lines(&report);
    let text = match text {
        Some(t) => t,
        None => report.to_json(),
    };
    Ok(Output { report, text, summary })
}

fn summary_lines(report: &Report) -> Vec<String> {
    let mut out: Vec<String> = report
        .verifiers
        .iter()
        .map(|v| {
            let status = match v.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Inapplicable => "INAPPLICABLE",
            };
            format!("{status} {}: {}", v.check, v.detail)
        })
        .collect();
    out.extend(report.facts.iter().map(|f| {
        format!(
            "{} {}: expected {}, observed {}",
            if f.pass { "PASS" } else { "FAIL" },
            f.name,
            f.expected,
            f.observed
        )
    }));
    if let Some(t) = report.timing_seconds {
        out.push(format!("time {t:.3} s"));
    }
    out
}

fn need_secular(cfg: &RunConfig) -> Result<(), Failure> {
    match cfg.backend {
        BackendChoice::Secular => Ok(()),
        BackendChoice::Fem => Err(Failure::Input(format!(
            "`{}` needs eigenfunctions; only `solve` accepts --backend fem",
            cfg.command.name()
        ))),
    }
}

/// The secular eigenpair containing index `j` and the next eigenvalue, if computed.
pub fn pair_with(cfg: &RunConfig, g: &MetricGraph, j: usize) -> Result<(EigenPair, Option<f64>), Error> {
    if j == 0 {
        return Err(Error::IndexOutOfRange(0));
    }
    let pairs = eigenvalues_with(g, j + 1, Backend::Secular, &cfg.solver())?;
    let pos = pairs.iter().position(|p| p.contains_index(j)).ok_or(Error::IndexOutOfRange(j))?;
    let next = pairs.get(pos + 1).map(|p| p.mu);
    Ok((pairs[pos].clone(), next))
}

pub fn spectrum_entry(g: &MetricGraph, p: &EigenPair) -> SpectrumEntry {
    let diagnostics = !p.basis.is_empty();
    SpectrumEntry {
        first_index: p.index_range.0,
        last_index: p.index_range.1,
        mu: p.mu,
        k: p.k,
        multiplicity: p.multiplicity,
        residual: diagnostics.then(|| p.basis.iter().map(|f| f.residuals(g).max()).fold(0.0, f64::max)),
        gram_error: diagnostics.then(|| p.gram_error(g)),
        derivative_bounds_hold: diagnostics.then(|| p.basis.iter().all(|f| f.derivative_bounds(g).holds)),
    }
}

fn solve(cfg: &RunConfig, g: &MetricGraph, count: usize, report: &mut Report) -> Result<Option<String>, Failure> {
    let backend = match cfg.backend {
        BackendChoice::Secular => Backend::Secular,
        BackendChoice::Fem => Backend::Fem { h: cfg.h },
    };
    let pairs = eigenvalues_with(g, count, backend, &cfg.solver())?;
    report.spectrum = pairs
        .iter()
        .filter(|p| p.index_range.0 <= count)
        .map(|p| spectrum_entry(g, p))
        .collect();
    Ok(match cfg.format {
        Format::Report => None,
        Format::Csv => Some(table(
            SOLVE_CSV_HEADER,
            report.spectrum.iter().flat_map(|e| {
                (e.first_index..=e.last_index.min(count))
                    .map(|i| vec![i.to_string(), e.mu.to_string(), e.k.to_string(), e.multiplicity.to_string()])
            }),
        )),
    })
}

/// `μ₂` eigenpair and its hot-spot report.
pub fn mu2_hotspots(cfg: &RunConfig, g: &MetricGraph) -> Result<(EigenPair, HotspotReport), Failure> {
    let (pair, _) = pair_with(cfg, g, 2)?;
    let hs = hotspot_sets_with(g, &pair, &cfg.sampling, &cfg.tolerances)?;
    Ok((pair, hs))
}

fn no_disconnect(g: &MetricGraph, pair: &EigenPair) -> Result<VerifierOutcome, Failure> {
    let mut outcomes = pair
        .basis
        .iter()
        .map(|f| verify_no_disconnect(g, f))
        .collect::<Result<Vec<_>, _>>()?;
    let mut first = outcomes.remove(0);
    for o in outcomes {
        if o.failed() {
            first.status = Status::Fail;
        }
        first.witnesses.extend(o.witnesses);
        first.detail = format!("{}; {}", first.detail, o.detail);
    }
    Ok(first)
}

fn boundary_note(g: &MetricGraph, hs: &HotspotReport) -> VerifierOutcome {
    let boundary = g.boundary();
    let hits: Vec<String> = hs
        .global
        .iter()
        .flat_map(Component::endpoints)
        .filter(|p| boundary.contains(g, p))
        .map(|p| g.describe_point(&p))
        .collect();
    let detail = if hits.is_empty() {
        "M ∩ ∂Γ = ∅".to_string()
    } else {
        format!("M ∩ ∂Γ = {{{}}}", hits.join(", "))
    };
    VerifierOutcome {
        check: "boundary-note".into(),
        status: Status::Pass,
        witnesses: Vec::new(),
        tolerances: Default::default(),
        detail,
    }
}

fn hotspots(cfg: &RunConfig, g: &MetricGraph, report: &mut Report) -> Result<Option<String>, Failure> {
    need_secular(cfg)?;
    let (pair, hs) = mu2_hotspots(cfg, g)?;
    report.spectrum = vec![spectrum_entry(g, &pair)];
    report.verifiers = vec![
        verify_location(g, &hs),
        verify_tree_boundary(g, &hs),
        no_disconnect(g, &pair)?,
        reverify(g, &pair, &hs),
        boundary_note(g, &hs),
    ];
    let csv = hs.to_csv(g);
    report.hotspots = Some(hs);
    Ok(match cfg.format {
        Format::Report => None,
        Format::Csv => Some(csv),
    })
}

fn verify(cfg: &RunConfig, g: &MetricGraph, checks: &[Check], report: &mut Report) -> Result<Option<String>, Failure> {
    need_secular(cfg)?;
    let needs_pair = checks.iter().any(|c| *c != Check::StarDiameter);
    let computed = if needs_pair { Some(mu2_hotspots(cfg, g)?) } else { None };
    for check in checks {
        let outcome = match (check, &computed) {
            (Check::StarDiameter, _) => match star_diameter_check(g) {
                Err(Error::NotAStar) => VerifierOutcome::inapplicable("star-diameter", "graph is neither a star nor a flower"),
                other => other?,
            },
            (Check::Location, Some((_, hs))) => verify_location(g, hs),
            (Check::TreeBoundary, Some((_, hs))) => verify_tree_boundary(g, hs),
            (Check::NoDisconnect, Some((pair, _))) => no_disconnect(g, pair)?,
            (Check::Reverify, Some((pair, hs))) => reverify(g, pair, hs),
            (_, None) => unreachable!("pair computed for every check but star-diameter"),
        };
        report.verifiers.push(outcome);
    }
    if let Some((pair, hs)) = computed {
        report.spectrum = vec![spectrum_entry(g, &pair)];
        report.hotspots = Some(hs);
    }
    Ok(match cfg.format {
        Format::Report => None,
        Format::Csv => {
            let rows = report.verifiers.iter().map(|v| {
                let status = serde_json::to_value(v.status).expect("status serializes");
                vec![
                    v.check.clone(),
                    status.as_str().unwrap_or_default().to_string(),
                    v.witnesses.join(";"),
                    v.detail.clone(),
                ]
            });
            Some(table(VERIFY_CSV_HEADER, rows))
        }
    })
}

pub fn describe_component(g: &MetricGraph, c: &Component) -> String {
    match c.shape {
        Shape::Point { location, .. } => format!("{}:{}", g.describe_point(&location), c.kind.as_str()),
        Shape::Segment { edge, from, to } => {
            format!("{}@[{from:.12},{to:.12}]:{}", g.edge(edge).id, c.kind.as_str())
        }
    }
}

fn hotspot_labels(g: &MetricGraph, hs: &HotspotReport) -> Vec<String> {
    hs.global.iter().map(|c| describe_component(g, c)).collect()
}

fn sweep(
    cfg: &RunConfig,
    g: &MetricGraph,
    edges: &[String],
    ladder: &[f64],
    index: usize,
    report: &mut Report,
) -> Result<Option<String>, Failure> {
    need_secular(cfg)?;
    if index < 2 {
        return Err(Error::IndexOutOfRange(index).into());
    }
    let ids = edges
        .iter()
        .map(|e| g.edge_index(e).ok_or_else(|| Error::UnknownEdge(e.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    if ids.is_empty() || ladder.is_empty() {
        return Err(Failure::Input("sweep needs at least one edge and one length".into()));
    }
    let to_limit = ladder.last() == Some(&0.0);
    let positive = if to_limit { &ladder[..ladder.len() - 1] } else { ladder };
    if let Some(bad) = positive.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Failure::Input(format!(
            "ladder lengths must be positive (0 is allowed only as the last entry), got {bad}"
        )));
    }
    // Vertex values of the previous row, for keeping one sign along the ladder.
    let mut previous: Option<Vec<f64>> = None;
    for &length in positive {
        let mut lens = g.lengths().to_vec();
        for &e in &ids {
            lens[e] = length;
        }
        let gl = g.with_lengths(lens)?;
        let (mut pair, next) = pair_with(cfg, &gl, index)?;
        if !pair.is_simple() {
            return Err(Error::MultiplicityChange {
                length,
                multiplicity: pair.multiplicity,
            }
            .into());
        }
        let values = (0..gl.vertex_count()).map(|v| pair.basis[0].vertex_value(&gl, v)).collect();
        previous = Some(follow(&mut pair, values, previous.as_deref()));
        let hs = hotspot_sets_with(&gl, &pair, &cfg.sampling, &cfg.tolerances)?;
        report.sweep.push(SweepRow {
            length,
            mu: pair.mu,
            gap: next.map(|n| n - pair.mu),
            hotspots: hotspot_labels(&gl, &hs),
            eig_err: None,
            supnorm_err: None,
        });
    }
    if to_limit {
        let fam = LimitFamily::from_graph(g, &ids)?;
        if !positive.is_empty() {
            let rows = limit_compare(&fam, positive, index)?;
            for (row, cmp) in report.sweep.iter_mut().zip(rows) {
                row.eig_err = Some(cmp.eig_err);
                row.supnorm_err = Some(cmp.supnorm_err);
            }
        }
        let (mut pair, next) = pair_with(cfg, &fam.limit, index)?;
        if !pair.is_simple() {
            return Err(Error::MultiplicityChange {
                length: 0.0,
                multiplicity: pair.multiplicity,
            }
            .into());
        }
        let values = fam
            .vertex_map
            .iter()
            .map(|&v| pair.basis[0].vertex_value(&fam.limit, v))
            .collect();
        follow(&mut pair, values, previous.as_deref());
        let hs = hotspot_sets_with(&fam.limit, &pair, &cfg.sampling, &cfg.tolerances)?;
        report.sweep.push(SweepRow {
            length: 0.0,
            mu: pair.mu,
            gap: next.map(|n| n - pair.mu),
            hotspots: hotspot_labels(&fam.limit, &hs),
            eig_err: None,
            supnorm_err: None,
        });
    }
    Ok(match cfg.format {
        Format::Report => None,
        Format::Csv => Some(sweep_csv(&report.sweep, to_limit)),
    })
}

/// Flips a simple pair when its vertex values oppose the previous row's;
/// returns the vertex values after the flip.
fn follow(pair: &mut EigenPair, mut values: Vec<f64>, previous: Option<&[f64]>) -> Vec<f64> {
    let dot: f64 = previous.map_or(0.0, |p| p.iter().zip(&values).map(|(a, b)| a * b).sum());
    if dot < 0.0 {
        pair.basis[0] = pair.basis[0].scaled(-1.0);
        values.iter_mut().for_each(|v| *v = -*v);
    }
    values
}

fn sweep_csv(rows: &[SweepRow], with_limit: bool) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let header = if with_limit { SWEEP_LIMIT_CSV_HEADER } else { SWEEP_CSV_HEADER };
    table(
        header,
        rows.iter().map(|r| {
            let mut row = vec![r.length.to_string(), r.mu.to_string(), opt(r.gap), r.hotspots.join(";")];
            if with_limit {
                row.extend([opt(r.eig_err), opt(r.supnorm_err)]);
            }
            row
        }),
    )
}
