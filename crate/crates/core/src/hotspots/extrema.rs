use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{End, GraphPoint, MetricGraph};
use crate::spectral::EigenFunction;
use crate::tol::{self, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

impl ExtremumKind {
    pub fn sign(self) -> f64 {
        match self {
            ExtremumKind::Max => 1.0,
            ExtremumKind::Min => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Local,
    Global,
}

/// A nonzero local (or global) extremum of one eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumPoint {
    pub location: GraphPoint,
    /// Set when the point is a vertex.
    pub vertex: Option<usize>,
    pub value: f64,
    pub kind: ExtremumKind,
    pub scope: Scope,
    /// Coefficients of the witness in the eigenspace basis (empty if unknown).
    pub source: Vec<f64>,
}

/// `M_ψ` (global) and `M_{ψ,loc}` (local) for one eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub global: Vec<ExtremumPoint>,
    pub local: Vec<ExtremumPoint>,
}

impl Extrema {
    pub fn global_max(&self) -> impl Iterator<Item = &ExtremumPoint> {
        self.global.iter().filter(|p| p.kind == ExtremumKind::Max)
    }

    pub fn global_min(&self) -> impl Iterator<Item = &ExtremumPoint> {
        self.global.iter().filter(|p| p.kind == ExtremumKind::Min)
    }

    pub fn local_max(&self) -> impl Iterator<Item = &ExtremumPoint> {
        self.local.iter().filter(|p| p.kind == ExtremumKind::Max)
    }
}

pub fn extrema_single(g: &MetricGraph, f: &EigenFunction) -> Result<Extrema> {
    extrema_with(g, f, &Tolerances::default(), Vec::new())
}

/// Exact extremum sets from the sinusoid form. Interior critical points sit
/// at `x = (φ + jπ)/k`; a vertex is a local max iff `ψ(v) > 0` and no
/// outgoing derivative is positive (a vanishing one is resolved by
/// `ψ'' = −μψ`), and symmetrically for minima. Zero-valued points are skipped.
pub fn extrema_with(g: &MetricGraph, f: &EigenFunction, tol: &Tolerances, source: Vec<f64>) -> Result<Extrema> {
    let amp = f.max_amplitude();
    if !(amp > 0.0) || f.k <= 0.0 {
        return Err(Error::ZeroEigenfunction);
    }
    let k = f.k;
    let ptol = tol.point_rel * g.total_length();
    let tiny = 1e-12 * amp;
    let dtol = tol.eig * k * amp;
    let mut local = Vec::new();

    for v in 0..g.vertex_count() {
        let val = f.vertex_value(g, v);
        if val.abs() <= tiny {
            continue;
        }
        let kind = if val > 0.0 { ExtremumKind::Max } else { ExtremumKind::Min };
        let ok = g
            .incidence(v)
            .iter()
            .all(|ee| kind.sign() * f.outgoing_derivative(g, ee.edge, ee.end) <= dtol);
        if ok {
            local.push(ExtremumPoint {
                location: g.vertex_point(v),
                vertex: Some(v),
                value: val,
                kind,
                scope: Scope::Local,
                source: source.clone(),
            });
        }
    }

    for (e, t) in f.traces.iter().enumerate() {
        let (r, phi) = t.polar();
        if r <= tiny {
            continue;
        }
        let len = g.length(e);
        let pi = std::f64::consts::PI;
        let mut j = ((k * ptol - phi) / pi).ceil();
        loop {
            let x = (phi + j * pi) / k;
            if x >= len - ptol {
                break;
            }
            if x > ptol {
                let value = t.value(x);
                let kind = if value > 0.0 { ExtremumKind::Max } else { ExtremumKind::Min };
                local.push(ExtremumPoint {
                    location: GraphPoint::new(e, x),
                    vertex: None,
                    value,
                    kind,
                    scope: Scope::Local,
                    source: source.clone(),
                });
            }
            j += 1.0;
        }
    }

    let top = local.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    let bottom = local.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let tie = tol.tie * top.abs().max(bottom.abs());
    let global = local
        .iter()
        .filter(|p| match p.kind {
            ExtremumKind::Max => p.value >= top - tie,
            ExtremumKind::Min => p.value <= bottom + tie,
        })
        .map(|p| ExtremumPoint {
            scope: Scope::Global,
            ..p.clone()
        })
        .collect();
    Ok(Extrema { global, local })
}

/// Whether the trace of `f` on `edge` has a crest (a critical point of the
/// sinusoid) at the given end, as opposed to a vertex extremum with a kink.
pub(crate) fn crest_at_end(g: &MetricGraph, f: &EigenFunction, edge: usize, end: End) -> bool {
    let t = f.trace(edge);
    t.a.hypot(t.b) > 0.0 && f.outgoing_derivative(g, edge, end).abs() <= tol::EIG * f.k * f.max_amplitude()
}
