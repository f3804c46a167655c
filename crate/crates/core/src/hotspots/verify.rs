use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::extrema::{extrema_single, Extrema, ExtremumKind};
use super::report::{directions, HotspotReport, Sampling, Shape};
use crate::catalog;
use crate::error::{Error, Result};
use crate::graph::{diameter, disconnect_points, distance_with, vertex_distances, End, GraphPoint, MetricGraph};
use crate::spectral::{mu2_pair, EigenFunction, EigenPair};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierOutcome {
    pub check: String,
    pub status: Status,
    /// Offending points or values when the check fails.
    pub witnesses: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub detail: String,
}

impl VerifierOutcome {
    fn new(check: &str, witnesses: Vec<String>, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            status: if witnesses.is_empty() { Status::Pass } else { Status::Fail },
            witnesses,
            tolerances: BTreeMap::new(),
            detail: detail.into(),
        }
    }

    pub fn inapplicable(check: &str, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            status: Status::Inapplicable,
            witnesses: Vec::new(),
            tolerances: BTreeMap::new(),
            detail: detail.into(),
        }
    }

    fn tol(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.into(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Every reported point lies on the boundary or in the interior of the
/// doubly connected part.
pub fn verify_location(g: &MetricGraph, report: &HotspotReport) -> VerifierOutcome {
    let dcp = g.doubly_connected_part();
    let boundary = g.boundary();
    let allowed = |p: &GraphPoint| boundary.contains(g, p) || dcp.interior.contains(g, p);
    let mut bad = Vec::new();
    for c in report.global.iter().chain(&report.local) {
        let inside = match c.shape {
            Shape::Point { location, .. } => allowed(&location),
            Shape::Segment { edge, .. } => {
                dcp.interior.edges.contains(&edge) && c.endpoints().iter().all(|p| allowed(p))
            }
        };
        if !inside {
            for p in c.endpoints() {
                let label = g.describe_point(&p);
                if !bad.contains(&label) {
                    bad.push(label);
                }
            }
        }
    }
    VerifierOutcome::new(
        "location",
        bad,
        format!(
            "{} global and {} local components checked against the boundary and the interior of the doubly connected part",
            report.global.len(),
            report.local.len()
        ),
    )
    .tol("point", g.point_tolerance())
}

/// On trees: all extrema at leaves. Inapplicable elsewhere.
pub fn verify_tree_boundary(g: &MetricGraph, report: &HotspotReport) -> VerifierOutcome {
    if !g.is_tree() {
        return VerifierOutcome::inapplicable("tree-boundary", format!("betti number {}", g.betti()));
    }
    let mut out = verify_location(g, report);
    out.check = "tree-boundary".into();
    out
}

/// Number of components after cutting the graph at the given extrema of `f`.
pub fn disconnect_extrema(g: &MetricGraph, f: &EigenFunction, kinds: &[ExtremumKind]) -> Result<usize> {
    let ex = extrema_single(g, f)?;
    let pts: Vec<GraphPoint> = ex.local.iter().filter(|p| kinds.contains(&p.kind)).map(|p| p.location).collect();
    Ok(disconnect_points(g, &pts)?.len())
}

/// Cutting the graph at all nonzero local maxima of `f` keeps it connected.
pub fn verify_no_disconnect(g: &MetricGraph, f: &EigenFunction) -> Result<VerifierOutcome> {
    let ex = extrema_single(g, f)?;
    let pts: Vec<GraphPoint> = ex.local_max().map(|p| p.location).collect();
    let parts = disconnect_points(g, &pts)?;
    let witnesses = if parts.len() == 1 {
        Vec::new()
    } else {
        pts.iter().map(|p| g.describe_point(p)).collect()
    };
    Ok(VerifierOutcome::new(
        "no-disconnect",
        witnesses,
        format!("{} local maxima cut, {} component(s)", pts.len(), parts.len()),
    ))
}

/// Largest distance between two of the points, over the diameter.
pub fn distance_ratio(g: &MetricGraph, points: &[GraphPoint]) -> f64 {
    let dv = vertex_distances(g);
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(distance_with(g, &dv, p, q));
        }
    }
    best / diameter(g)
}

/// Ratio of the largest distance between global extrema to the diameter.
/// Segments are sampled at 64 points.
pub fn extrema_distance_ratio(g: &MetricGraph, report: &HotspotReport) -> f64 {
    let pts: Vec<GraphPoint> = report.global.iter().flat_map(|c| c.sample_points(64)).collect();
    distance_ratio(g, &pts)
}

/// Same ratio for the global extrema of a single eigenfunction.
pub fn extrema_distance_ratio_single(g: &MetricGraph, ex: &Extrema) -> f64 {
    let pts: Vec<GraphPoint> = ex.global.iter().map(|p| p.location).collect();
    distance_ratio(g, &pts)
}

/// Centre of a star: every edge joins it to a distinct leaf.
pub fn star_center(g: &MetricGraph) -> Option<usize> {
    if g.edge_count() < 2 || g.edges().iter().any(|e| e.is_loop()) || !g.is_tree() {
        return None;
    }
    (0..g.vertex_count()).find(|&v| g.degree(v) == g.edge_count())
}

fn is_flower(g: &MetricGraph) -> bool {
    g.vertex_count() == 1 && g.edges().iter().all(|e| e.is_loop())
}

/// Directions checked on stars: the basis plus 64 sampled combinations.
const STAR_DIRECTIONS: usize = 64;

/// On a star every `μ₂` eigenfunction has its maximum and minimum at distance
/// `diam Γ`; when `ψ(v₀) = F ≠ 0` each edge satisfies `L(e_j) ≡ arctan(A_j/F)/k`
/// modulo `π/k` and the leaf value is `±√(A_j² + F²)`, with `A_j = ψ'_j(v₀)/k`.
/// Flowers are checked directly and through the star with half-petal lengths.
pub fn star_diameter_check(g: &MetricGraph) -> Result<VerifierOutcome> {
    if is_flower(g) {
        if g.edge_count() < 2 {
            return Err(Error::NotAStar);
        }
        let half: Vec<f64> = g.lengths().iter().map(|l| 0.5 * l).collect();
        let star = catalog::star(&half)?;
        let mut direct = star_pairs(g, &mu2_pair(g)?);
        let reduced = star_check(&star)?;
        direct.extend(reduced.witnesses.iter().map(|w| format!("reduced star: {w}")));
        return Ok(VerifierOutcome::new(
            "star-diameter",
            direct,
            format!("flower with {} petals; {}", g.edge_count(), reduced.detail),
        )
        .tol("point", g.point_tolerance())
        .tol("relation", RELATION_TOL));
    }
    star_check(g)
}

const RELATION_TOL: f64 = 1e-8;

fn star_check(g: &MetricGraph) -> Result<VerifierOutcome> {
    let center = star_center(g).ok_or(Error::NotAStar)?;
    let pair = mu2_pair(g)?;
    let mut bad = star_pairs(g, &pair);
    let mut relations = 0;
    for f in &pair.basis {
        let amp = f.max_amplitude();
        let big_f = f.vertex_value(g, center);
        if big_f.abs() <= 1e-9 * amp {
            continue;
        }
        for ee in g.incidence(center) {
            let e = ee.edge;
            let a = f.outgoing_derivative(g, e, ee.end) / f.k;
            let r = (f.k * g.length(e) - (a / big_f).atan()) / std::f64::consts::PI;
            let leaf = f.end_value(g, e, ee.end.opposite());
            if (r - r.round()).abs() > RELATION_TOL {
                bad.push(format!("edge `{}`: length relation off by {:.3e}", g.edge(e).id, r - r.round()));
            }
            if (leaf.abs() - a.hypot(big_f)).abs() > RELATION_TOL * amp {
                bad.push(format!("edge `{}`: leaf value {} vs {}", g.edge(e).id, leaf.abs(), a.hypot(big_f)));
            }
            relations += 1;
        }
    }
    Ok(VerifierOutcome::new(
        "star-diameter",
        bad,
        format!(
            "multiplicity {}, {} edge relations checked",
            pair.multiplicity, relations
        ),
    )
    .tol("point", g.point_tolerance())
    .tol("relation", RELATION_TOL))
}

/// Offending (max, min) pairs whose distance is not the diameter.
fn star_pairs(g: &MetricGraph, pair: &EigenPair) -> Vec<String> {
    let diam = diameter(g);
    let dv = vertex_distances(g);
    let tol = g.point_tolerance();
    let mut bad = Vec::new();
    for c in directions(pair.multiplicity, &Sampling::uniform(STAR_DIRECTIONS)) {
        let f = pair.combination(&c);
        let Ok(ex) = extrema_single(g, &f) else { continue };
        for x in ex.global_max() {
            for y in ex.global_min() {
                let d = distance_with(g, &dv, &x.location, &y.location);
                if (d - diam).abs() > tol {
                    bad.push(format!(
                        "{} to {}: {d} vs diameter {diam}",
                        g.describe_point(&x.location),
                        g.describe_point(&y.location)
                    ));
                }
            }
        }
    }
    bad
}

/// Re-checks every reported point against its witness: the witness value at
/// the point dominates (or is dominated by) its values on a small net along
/// every incident direction, and nonzero maxima are positive.
pub fn reverify(g: &MetricGraph, pair: &EigenPair, report: &HotspotReport) -> VerifierOutcome {
    let radius = 1e-3 * g.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    let mut bad = Vec::new();
    for c in report.global.iter().chain(&report.local) {
        for (p, w) in c.endpoints().iter().zip(c.witnesses.iter().cycle()) {
            let f = pair.combination(w);
            let s = if c.is_segment() { 1.0 } else { c.kind.sign() };
            let here = s * f.value_at(g, p);
            let ok = here > 0.0
                && neighbours(g, p, radius).iter().all(|q| s * f.value_at(g, q) <= here + tol::EIG * f.max_amplitude());
            if !ok {
                bad.push(g.describe_point(p));
            }
        }
    }
    VerifierOutcome::new("reverify", bad, format!("net radius {radius:.3e}")).tol("net_radius", radius)
}

/// Points at distances `radius·j/8` from `p` along every incident direction.
fn neighbours(g: &MetricGraph, p: &GraphPoint, radius: f64) -> Vec<GraphPoint> {
    let mut dirs: Vec<(usize, f64, f64)> = Vec::new();
    match g.locate(p) {
        crate::graph::Location::Vertex(v) => {
            for ee in g.incidence(v) {
                let (start, sign) = match ee.end {
                    End::Origin => (0.0, 1.0),
                    End::Terminal => (g.length(ee.edge), -1.0),
                };
                dirs.push((ee.edge, start, sign));
            }
        }
        crate::graph::Location::Interior { edge, offset } => {
            dirs.push((edge, offset, 1.0));
            dirs.push((edge, offset, -1.0));
        }
    }
    let mut out = Vec::new();
    for (edge, start, sign) in dirs {
        for j in 1..=8 {
            let o = start + sign * radius * j as f64 / 8.0;
            if o >= 0.0 && o <= g.length(edge) {
                out.push(GraphPoint::new(edge, o));
            }
        }
    }
    out
}
