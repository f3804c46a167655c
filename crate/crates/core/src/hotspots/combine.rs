use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::extrema::{crest_at_end, extrema_single, ExtremumKind};
use crate::error::{Error, Result};
use crate::graph::{End, GraphPoint, MetricGraph};
use crate::spectral::{EdgeTrace, EigenFunction, SignConvention};

/// `f0/R0 + α·f1/R1`, with `R0, R1` the amplitudes of the two traces on the
/// edge of `y`, so that both summands are unit crests `cos(k(x − x_i))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub function: EigenFunction,
    pub alpha: f64,
    pub edge: usize,
    pub x1: f64,
    pub x2: f64,
    /// Weights on `f0` and `f1` actually used.
    pub weights: (f64, f64),
}

/// The coefficient placing the crest of `cos(k(x − x1)) + α cos(k(x − x2))` at `y`.
pub fn combination_alpha(k: f64, x1: f64, x2: f64, y: f64) -> f64 {
    -(k * (y - x1)).sin() / (k * (y - x2)).sin()
}

/// Offsets on `edge` where `f` has a positive crest that is also a local
/// maximum of `f` on the graph.
pub(crate) fn crest_maxima(g: &MetricGraph, f: &EigenFunction, edge: usize) -> Result<Vec<f64>> {
    let ex = extrema_single(g, f)?;
    let len = g.length(edge);
    let e = g.edge(edge);
    let mut out = Vec::new();
    for p in ex.local.iter().filter(|p| p.kind == ExtremumKind::Max) {
        match p.vertex {
            None if p.location.edge == edge => out.push(p.location.offset),
            Some(v) => {
                if e.from == v && crest_at_end(g, f, edge, End::Origin) {
                    out.push(0.0);
                }
                if e.to == v && crest_at_end(g, f, edge, End::Terminal) {
                    out.push(len);
                }
            }
            None => {}
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Combines two eigenfunctions (same eigenvalue) with crest maxima `x1, x2`
/// on the edge of `y`, `y` between them, into one with its crest at `y`.
pub fn combine(g: &MetricGraph, f0: &EigenFunction, f1: &EigenFunction, y: &GraphPoint) -> Result<Combination> {
    g.check_point(y)?;
    let k = f0.k;
    let edge = y.edge;
    let yo = y.offset.clamp(0.0, g.length(edge));
    let m0 = crest_maxima(g, f0, edge)?;
    let m1 = crest_maxima(g, f1, edge)?;
    if m0.is_empty() || m1.is_empty() {
        let which = if m0.is_empty() { "f0" } else { "f1" };
        return Err(Error::NotMaxima(format!("{which} has no crest maximum on edge `{}`", g.edge(edge).id)));
    }
    let ptol = g.point_tolerance();
    let mut best: Option<(f64, f64)> = None;
    for &a in &m0 {
        for &b in &m1 {
            let (lo, hi) = (a.min(b), a.max(b));
            if yo >= lo - ptol && yo <= hi + ptol && best.map_or(true, |(p, q)| (b - a).abs() < (q - p).abs()) {
                best = Some((a, b));
            }
        }
    }
    let (x1, x2) = best.ok_or_else(|| {
        Error::NotMaxima(format!(
            "no pair of crest maxima brackets offset {yo} on edge `{}`",
            g.edge(edge).id
        ))
    })?;
    let limit = PI / (2.0 * k);
    if (x2 - x1).abs() > limit * (1.0 + 1e-12) {
        return Err(Error::TooFarApart {
            distance: (x2 - x1).abs(),
            limit,
        });
    }
    let r0 = f0.trace(edge).polar().0;
    let r1 = f1.trace(edge).polar().0;
    let (alpha, weights) = if (yo - x2).abs() <= ptol && (x1 - x2).abs() > ptol {
        (f64::INFINITY, (0.0, 1.0 / r1))
    } else {
        let alpha = if (yo - x1).abs() <= ptol { 0.0 } else { combination_alpha(k, x1, x2, yo) };
        (alpha, (1.0 / r0, alpha / r1))
    };
    let mut function = f0.scaled(weights.0).add_scaled(f1, weights.1);
    function.sign = SignConvention::Aligned;
    Ok(Combination {
        function,
        alpha,
        edge,
        x1,
        x2,
        weights,
    })
}

/// Continuous function with the given vertex values that solves `−ψ'' = k²ψ`
/// on every edge. Needs `sin(k L(e)) ≠ 0`.
pub(crate) fn from_vertex_values(g: &MetricGraph, k: f64, values: &[f64]) -> EigenFunction {
    let traces = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (s, c) = (k * g.length(i)).sin_cos();
            let (fa, fb) = (values[e.from], values[e.to]);
            EdgeTrace::new(i, fa, (fb - fa * c) / s, k)
        })
        .collect();
    EigenFunction {
        k,
        traces,
        norm: f64::NAN,
        sign: SignConvention::Unnormalized,
    }
}

/// On an equilateral complete graph: the second eigenfunction equal to 1 at
/// `apex` and `−1/(V−1)` at every other vertex (before normalization).
pub fn complete_apex_eigenfunction(g: &MetricGraph, apex: usize) -> Result<EigenFunction> {
    let v = g.vertex_count();
    let l = g.length(0);
    let simple = g.edges().iter().all(|e| !e.is_loop());
    let mut seen = std::collections::BTreeSet::new();
    let complete = simple
        && g.edge_count() == v * (v - 1) / 2
        && g.edges().iter().all(|e| seen.insert((e.from.min(e.to), e.from.max(e.to))));
    let equilateral = g.lengths().iter().all(|&x| (x - l).abs() <= 1e-12 * l);
    if v < 3 || !complete || !equilateral {
        return Err(Error::BadParameter {
            name: "graph".into(),
            reason: "need an equilateral complete graph on at least 3 vertices".into(),
        });
    }
    if apex >= v {
        return Err(Error::UnknownVertex(format!("#{apex}")));
    }
    let low = -1.0 / (v as f64 - 1.0);
    let k = low.acos() / l;
    let values: Vec<f64> = (0..v).map(|i| if i == apex { 1.0 } else { low }).collect();
    let mut f = from_vertex_values(g, k, &values).normalized(g);
    f.sign = SignConvention::Aligned;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn alpha_values() {
        assert_eq!(combination_alpha(PI, 0.0, 0.5, 0.25), 1.0);
        let a = combination_alpha(PI, 0.0, 0.5, 0.1);
        assert!((a - (0.1 * PI).sin() / (0.4 * PI).sin()).abs() < 1e-15);
        assert!((a - 0.324920).abs() < 1e-6);
    }

    #[test]
    fn k4_apex_function() {
        let g = catalog::complete(4, 1.0).unwrap();
        let f = complete_apex_eigenfunction(&g, 0).unwrap();
        assert!(f.residuals(&g).max() < 1e-12);
        let mu2 = crate::spectral::mu2_pair(&g).unwrap();
        assert!((f.mu() - mu2.mu).abs() < 1e-9 * mu2.mu);
        assert_eq!(mu2.multiplicity, 3);
    }
}
