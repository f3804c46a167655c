use std::f64::consts::PI;

use qghot_core::catalog::{krpamm_eigenfunction, krpamm_ratio, ExampleId, Params};
use qghot_core::graph::diameter;
use qghot_core::hotspots::{
    extrema_distance_ratio_single, extrema_single, star_diameter_check, verify_location, verify_tree_boundary,
    Component, HotspotReport, Shape,
};
use qghot_core::spectral::{eigenvalues_with, Backend, EigenPair};
use qghot_core::{GraphPoint, MetricGraph};

use crate::commands::{describe_component, mu2_hotspots, spectrum_entry};
use crate::config::{Format, GraphSource, RunConfig};
use crate::report::{table, Fact, Report, FACTS_CSV_HEADER};
use crate::Failure;

const REL: f64 = 1e-9;

fn close(name: &str, expected: f64, observed: f64, tol: f64) -> Fact {
    Fact {
        name: name.into(),
        expected: format!("{expected}"),
        observed: format!("{observed}"),
        pass: (observed - expected).abs() <= tol * expected.abs().max(1.0),
    }
}

fn equal<T: PartialEq + std::fmt::Display>(name: &str, expected: T, observed: T) -> Fact {
    Fact {
        name: name.into(),
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass: expected == observed,
    }
}

fn holds(name: &str, expected: &str, observed: String, pass: bool) -> Fact {
    Fact {
        name: name.into(),
        expected: expected.into(),
        observed,
        pass,
    }
}

fn labels(g: &MetricGraph, comps: &[Component]) -> String {
    comps.iter().map(|c| describe_component(g, c)).collect::<Vec<_>>().join(" ")
}

/// The global set is exactly the given points, one component each.
fn global_is(g: &MetricGraph, hs: &HotspotReport, points: &[GraphPoint]) -> Fact {
    let pass = hs.global.len() == points.len()
        && hs.global.iter().all(|c| !c.is_segment())
        && points.iter().all(|p| hs.global_contains(g, p));
    let want: Vec<String> = points.iter().map(|p| g.describe_point(p)).collect();
    holds("global hot spots", &format!("{{{}}}", want.join(", ")), labels(g, &hs.global), pass)
}

/// Every local component is a point at the midpoint of its edge.
fn local_at_midpoints(g: &MetricGraph, hs: &HotspotReport, tol: f64) -> Fact {
    let pass = !hs.local.is_empty()
        && hs.local.iter().all(|c| match c.shape {
            Shape::Point { location, .. } => (location.offset - 0.5 * g.length(location.edge)).abs() <= tol,
            Shape::Segment { .. } => false,
        });
    holds("local hot spots at edge midpoints", "all", labels(g, &hs.local), pass)
}

fn equilateral(g: &MetricGraph) -> Option<f64> {
    let l = g.length(0);
    g.lengths().iter().all(|&x| x == l).then_some(l)
}

fn vertex(g: &MetricGraph, id: &str) -> GraphPoint {
    g.vertex_point(g.vertex_index(id).expect("builder vertex"))
}

fn edge_mid(g: &MetricGraph, id: &str) -> GraphPoint {
    let e = g.edge_index(id).expect("builder edge");
    GraphPoint::new(e, 0.5 * g.length(e))
}

pub fn run(cfg: &RunConfig, g: &MetricGraph, report: &mut Report) -> Result<Option<String>, Failure> {
    let (id, params) = match &cfg.source {
        GraphSource::Example { id, params } => (*id, params),
        GraphSource::File { .. } => return Err(Failure::Input("reproduce needs an example id".into())),
    };
    let (pair, hs) = mu2_hotspots(cfg, g)?;
    report.spectrum = vec![spectrum_entry(g, &pair)];
    report.verifiers = vec![verify_location(g, &hs)];
    let mu = pair.mu;
    let mut facts = Vec::new();
    match id {
        ExampleId::Path => {
            let l = g.total_length();
            facts.push(close("mu2", (PI / l).powi(2), mu, REL));
            facts.push(equal("multiplicity", 1, pair.multiplicity));
            facts.push(global_is(g, &hs, &[g.vertex_point(0), g.vertex_point(g.vertex_count() - 1)]));
        }
        ExampleId::Cycle => {
            facts.push(close("mu2", (2.0 * PI / g.total_length()).powi(2), mu, REL));
            facts.push(equal("multiplicity", 2, pair.multiplicity));
        }
        ExampleId::Pumpkin => {
            if let Some(l) = equilateral(g) {
                facts.push(close("mu2", (PI / l).powi(2), mu, REL));
                facts.push(equal("multiplicity", g.edge_count(), pair.multiplicity));
            }
        }
        ExampleId::Star => {
            if let Some(l) = equilateral(g) {
                facts.push(close("mu2", (PI / (2.0 * l)).powi(2), mu, REL));
                facts.push(equal("multiplicity", g.edge_count() - 1, pair.multiplicity));
            }
            report.verifiers.push(verify_tree_boundary(g, &hs));
            report.verifiers.push(star_diameter_check(g)?);
        }
        ExampleId::Flower | ExampleId::Figure8 => {
            facts.push(local_at_midpoints(g, &hs, 1e-8));
        }
        ExampleId::Complete => {
            let v = g.vertex_count();
            let k = (-1.0 / (v as f64 - 1.0)).acos() / g.length(0);
            facts.push(close("mu2", k * k, mu, REL));
            facts.push(equal("multiplicity", v - 1, pair.multiplicity));
        }
        ExampleId::Lasso => {
            facts.push(global_is(g, &hs, &[vertex(g, "v1"), edge_mid(g, "loop")]));
        }
        ExampleId::PerturbedFigure8 => {
            facts.push(close("mu2", 1.0, mu, 1e-8));
            let boundary = g.boundary();
            let hits = hs
                .global
                .iter()
                .flat_map(Component::endpoints)
                .filter(|p| boundary.contains(g, p))
                .count();
            facts.push(equal("global hot spots on the boundary", 0, hits));
        }
        ExampleId::LoopDumbbell => {
            facts.push(global_is(g, &hs, &[edge_mid(g, "l1"), edge_mid(g, "l2")]));
        }
        ExampleId::KrpammTree => krpamm_facts(cfg, g, params, &pair, &mut facts)?,
        ExampleId::NStarLongShort => {
            let n = g.edge_count();
            facts.push(equal("multiplicity", 1, pair.multiplicity));
            facts.push(equal("|M|", n, hs.global.len()));
            facts.push(equal("|M_loc|", n, hs.local.len()));
        }
        ExampleId::PumpkinOnStick | ExampleId::PumpkinNecklace | ExampleId::FigM3 => {}
    }
    report.hotspots = Some(hs);
    report.facts = facts;
    Ok(match cfg.format {
        Format::Report => None,
        Format::Csv => Some(table(
            FACTS_CSV_HEADER,
            report.facts.iter().map(|f| {
                let status = if f.pass { "PASS" } else { "FAIL" };
                vec![f.name.clone(), f.expected.clone(), f.observed.clone(), status.to_string()]
            }),
        )),
    })
}

fn krpamm_facts(
    cfg: &RunConfig,
    g: &MetricGraph,
    params: &Params,
    pair: &EigenPair,
    facts: &mut Vec<Fact>,
) -> Result<(), Failure> {
    let eps = params.f64_or("eps", 0.05)?;
    let m = params.usize_or("m", 20)?;
    let delta = params.f64_or("delta", 0.0)?;
    if delta > 0.0 {
        facts.push(holds("mu2 below pi^2", "< 9.8696", format!("{}", pair.mu), pair.mu < PI * PI));
        facts.push(equal("multiplicity", 1, pair.multiplicity));
        let f = &pair.basis[0];
        let sup = f.sup(g);
        for id in ["e1", "e3"] {
            let e = g.edge_index(id).expect("builder edge");
            let on = f.trace(e).sup(g.length(e)) / sup;
            facts.push(holds(&format!("relative sup on {id}"), "<= 1e-9", format!("{on:e}"), on <= 1e-9));
        }
        return Ok(());
    }
    facts.push(close("diameter", 1.0, diameter(g), 0.0));
    let pairs = eigenvalues_with(g, 6, Backend::Secular, &cfg.solver())?;
    let pi2 = pairs.iter().find(|p| (p.mu - PI * PI).abs() <= REL * PI * PI);
    facts.push(equal("multiplicity of pi^2", 3, pi2.map_or(0, |p| p.multiplicity)));
    let f = krpamm_eigenfunction(g, eps, m)?;
    let ratio = extrema_distance_ratio_single(g, &extrema_single(g, &f)?);
    facts.push(close("extrema distance ratio", krpamm_ratio(eps, m), ratio, 1e-6));
    Ok(())
}
