use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::combine::combination_alpha;
use super::extrema::{crest_at_end, extrema_with, ExtremumKind, ExtremumPoint};
use crate::error::Result;
use crate::graph::{End, GraphPoint, MetricGraph};
use crate::spectral::{EigenFunction, EigenPair};
use crate::tol::Tolerances;

/// Interior probes used to confirm a global segment.
const GLOBAL_PROBES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    /// Directions on the unit circle for a double eigenvalue.
    pub circle: usize,
    /// Low-discrepancy points on the sphere for multiplicity three and up.
    pub sphere: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            circle: 720,
            sphere: 4096,
        }
    }
}

impl Sampling {
    /// Same budget for every multiplicity.
    pub fn uniform(n: usize) -> Self {
        Self { circle: n, sphere: n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Shape {
    Point { location: GraphPoint, vertex: Option<usize> },
    Segment { edge: usize, from: f64, to: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub shape: Shape,
    /// Kind relative to the first witness.
    pub kind: ExtremumKind,
    /// Value of the first witness at the point (segment start for segments).
    pub value: f64,
    /// Unit coefficient vectors in the eigenspace basis; a segment carries
    /// the witnesses of its two ends.
    pub witnesses: Vec<Vec<f64>>,
    /// Produced by merging two nearby maxima into a segment.
    pub closure: bool,
}

impl Component {
    pub fn is_segment(&self) -> bool {
        matches!(self.shape, Shape::Segment { .. })
    }

    /// Representative points: the point itself, or both segment ends.
    pub fn endpoints(&self) -> Vec<GraphPoint> {
        match self.shape {
            Shape::Point { location, .. } => vec![location],
            Shape::Segment { edge, from, to } => vec![GraphPoint::new(edge, from), GraphPoint::new(edge, to)],
        }
    }

    /// `samples + 1` evenly spaced points along a segment (one point otherwise).
    pub fn sample_points(&self, samples: usize) -> Vec<GraphPoint> {
        match self.shape {
            Shape::Point { location, .. } => vec![location],
            Shape::Segment { edge, from, to } => (0..=samples.max(1))
                .map(|i| GraphPoint::new(edge, from + (to - from) * i as f64 / samples.max(1) as f64))
                .collect(),
        }
    }

    pub fn contains(&self, g: &MetricGraph, p: &GraphPoint) -> bool {
        match self.shape {
            Shape::Point { location, .. } => g.same_point(&location, p),
            Shape::Segment { edge, from, to } => {
                let tol = g.point_tolerance();
                (p.edge == edge && p.offset >= from - tol && p.offset <= to + tol)
                    || g.same_point(&GraphPoint::new(edge, from), p)
                    || g.same_point(&GraphPoint::new(edge, to), p)
            }
        }
    }
}

/// Hot-spot sets of a `μ₂` eigenspace: exact for a simple eigenvalue, a
/// certified subset (direction sampling plus segment closure) otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotspotReport {
    pub mu: f64,
    pub k: f64,
    pub multiplicity: usize,
    /// Components of `M` (global extrema of some eigenfunction).
    pub global: Vec<Component>,
    /// Components of `M_loc` (nonzero local extrema).
    pub local: Vec<Component>,
    pub directions: usize,
    pub closure_applications: usize,
    pub subset_certified: bool,
    pub equality_claimed: bool,
    /// Finitely many components holds by construction for sampled reports
    /// and says nothing about the true sets.
    pub finiteness_by_construction: bool,
}

impl HotspotReport {
    pub fn component_count(&self) -> usize {
        self.local.len().max(self.global.len())
    }

    pub fn global_contains(&self, g: &MetricGraph, p: &GraphPoint) -> bool {
        self.global.iter().any(|c| c.contains(g, p))
    }

    pub fn local_contains(&self, g: &MetricGraph, p: &GraphPoint) -> bool {
        self.local.iter().any(|c| c.contains(g, p))
    }

    /// Rows `edge,offset,value,kind`; segments give one row per end with kinds
    /// `<scope>_<kind>_segment_start` / `_end`.
    pub fn to_csv(&self, g: &MetricGraph) -> String {
        let mut out = String::from("edge,offset,value,kind\n");
        for (scope, comps) in [("global", &self.global), ("local", &self.local)] {
            for c in comps {
                match c.shape {
                    Shape::Point { location, .. } => {
                        out.push_str(&format!(
                            "{},{:.12},{:.12},{}_{}\n",
                            g.edge(location.edge).id,
                            location.offset,
                            c.value,
                            scope,
                            c.kind.as_str()
                        ));
                    }
                    Shape::Segment { edge, from, to } => {
                        for (o, tag) in [(from, "start"), (to, "end")] {
                            out.push_str(&format!(
                                "{},{:.12},{:.12},{}_{}_segment_{}\n",
                                g.edge(edge).id,
                                o,
                                c.value,
                                scope,
                                c.kind.as_str(),
                                tag
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn hotspot_sets(g: &MetricGraph, pair: &EigenPair, sampling: &Sampling) -> Result<HotspotReport> {
    hotspot_sets_with(g, pair, sampling, &Tolerances::default())
}

pub fn hotspot_sets_with(g: &MetricGraph, pair: &EigenPair, sampling: &Sampling, tol: &Tolerances) -> Result<HotspotReport> {
    let d = pair.multiplicity;
    let dirs = directions(d, sampling);
    let mut local_raw = Vec::new();
    let mut global_raw = Vec::new();
    for c in &dirs {
        let f = pair.combination(c);
        let ex = extrema_with(g, &f, tol, c.clone())?;
        local_raw.extend(ex.local);
        global_raw.extend(ex.global);
    }
    let local_pts = dedupe(g, local_raw);
    let global_pts = dedupe(g, global_raw);

    let mut applications = 0;
    let (local, global) = if d == 1 {
        (points_only(&local_pts), points_only(&global_pts))
    } else {
        let (local, n1) = close(g, pair, &local_pts, false, tol);
        let (global, n2) = close(g, pair, &global_pts, true, tol);
        applications = n1 + n2;
        (local, global)
    };
    Ok(HotspotReport {
        mu: pair.mu,
        k: pair.k,
        multiplicity: d,
        global,
        local,
        directions: dirs.len(),
        closure_applications: applications,
        subset_certified: true,
        equality_claimed: d == 1,
        finiteness_by_construction: d > 1,
    })
}

/// Unit coefficient vectors: the basis function alone when simple, otherwise
/// `±` each basis vector followed by the sampled ones.
pub(crate) fn directions(d: usize, sampling: &Sampling) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut c = vec![0.0; d];
            c[i] = s;
            out.push(c);
        }
    }
    match d {
        2 => {
            let n = sampling.circle;
            out.extend((0..n).map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                vec![t.cos(), t.sin()]
            }));
        }
        _ => out.extend(sphere_points(d, sampling.sphere)),
    }
    out
}

/// Halton points pushed through Box–Muller and normalized.
fn sphere_points(d: usize, n: usize) -> Vec<Vec<f64>> {
    let dims = d + d % 2;
    let bases = primes(dims);
    (1..=n)
        .map(|i| {
            let u: Vec<f64> = bases.iter().map(|&b| radical_inverse(i, b)).collect();
            let mut z = Vec::with_capacity(dims);
            for pair in u.chunks(2) {
                let r = (-2.0 * pair[0].max(f64::MIN_POSITIVE).ln()).sqrt();
                let t = 2.0 * PI * pair[1];
                z.push(r * t.cos());
                z.push(r * t.sin());
            }
            z.truncate(d);
            let n = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            z.iter().map(|x| x / n).collect()
        })
        .collect()
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn primes(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Collapses coincident points (first witness wins, maxima before minima).
fn dedupe(g: &MetricGraph, mut pts: Vec<ExtremumPoint>) -> Vec<ExtremumPoint> {
    let tol = g.point_tolerance();
    let key = |p: &ExtremumPoint| match p.vertex {
        Some(v) => (0usize, v, 0.0),
        None => (1usize, p.location.edge, p.location.offset),
    };
    pts.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(a.kind.cmp(&b.kind))
    });
    let mut out: Vec<ExtremumPoint> = Vec::new();
    for p in pts {
        let dup = out.last().map_or(false, |q| {
            let (kp, kq) = (key(&p), key(q));
            kp.0 == kq.0 && kp.1 == kq.1 && (kp.2 - kq.2).abs() <= tol
        });
        if !dup {
            out.push(p);
        }
    }
    out
}

fn point_component(p: &ExtremumPoint) -> Component {
    Component {
        shape: Shape::Point {
            location: p.location,
            vertex: p.vertex,
        },
        kind: p.kind,
        value: p.value,
        witnesses: vec![p.source.clone()],
        closure: false,
    }
}

fn points_only(pts: &[ExtremumPoint]) -> Vec<Component> {
    pts.iter().map(point_component).collect()
}

/// A crest maximum on one edge with its witness oriented to be a maximum.
#[derive(Debug, Clone)]
struct Crest {
    offset: f64,
    witness: Vec<f64>,
    value: f64,
}

fn oriented(p: &ExtremumPoint) -> Vec<f64> {
    p.source.iter().map(|c| c * p.kind.sign()).collect()
}

/// Segment closure: consecutive crest maxima on an edge at most `π/(2k)`
/// apart are joined. Global segments are kept only if every probe
/// combination attains its global maximum at the probe.
fn close(g: &MetricGraph, pair: &EigenPair, pts: &[ExtremumPoint], global: bool, tol: &Tolerances) -> (Vec<Component>, usize) {
    let k = pair.k;
    let limit = PI / (2.0 * k) * (1.0 + 1e-12);
    let ptol = g.point_tolerance();
    let mut per_edge: Vec<Vec<Crest>> = vec![Vec::new(); g.edge_count()];
    for p in pts {
        let w = oriented(p);
        match p.vertex {
            None => per_edge[p.location.edge].push(Crest {
                offset: p.location.offset,
                witness: w,
                value: p.value.abs(),
            }),
            Some(v) => {
                let f = pair.combination(&w);
                for ee in g.incidence(v) {
                    if crest_at_end(g, &f, ee.edge, ee.end) {
                        let offset = match ee.end {
                            End::Origin => 0.0,
                            End::Terminal => g.length(ee.edge),
                        };
                        per_edge[ee.edge].push(Crest {
                            offset,
                            witness: w.clone(),
                            value: p.value.abs(),
                        });
                    }
                }
            }
        }
    }

    let mut applications = 0;
    let mut segments: Vec<(usize, f64, f64, Vec<f64>, Vec<f64>, f64)> = Vec::new();
    for (e, crests) in per_edge.iter_mut().enumerate() {
        crests.sort_by(|a, b| a.offset.total_cmp(&b.offset));
        let mut current: Option<(f64, f64, Vec<f64>, Vec<f64>, f64)> = None;
        for w in crests.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let gap = b.offset - a.offset;
            let joinable = gap > ptol && gap <= limit && (!global || probes_pass(g, pair, e, a, b, tol));
            if joinable {
                applications += 1;
                current = match current {
                    Some((from, to, w0, _, v0)) if (a.offset - to).abs() <= ptol => {
                        Some((from, b.offset, w0, b.witness.clone(), v0))
                    }
                    other => {
                        if let Some((from, to, w0, w1, v0)) = other {
                            segments.push((e, from, to, w0, w1, v0));
                        }
                        Some((a.offset, b.offset, a.witness.clone(), b.witness.clone(), a.value))
                    }
                };
            } else if gap > ptol {
                if let Some((from, to, w0, w1, v0)) = current.take() {
                    segments.push((e, from, to, w0, w1, v0));
                }
            }
        }
        if let Some((from, to, w0, w1, v0)) = current {
            segments.push((e, from, to, w0, w1, v0));
        }
    }

    let mut out: Vec<Component> = segments
        .into_iter()
        .map(|(edge, from, to, w0, w1, value)| Component {
            shape: Shape::Segment { edge, from, to },
            kind: ExtremumKind::Max,
            value,
            witnesses: vec![w0, w1],
            closure: true,
        })
        .collect();
    let covered = |p: &GraphPoint, segs: &[Component]| segs.iter().any(|c| c.contains(g, p));
    let singles: Vec<Component> = pts
        .iter()
        .filter(|p| !covered(&p.location, &out))
        .map(point_component)
        .collect();
    out.extend(singles);
    (out, applications)
}

/// Combination with its crest at `y` built from two oriented crest witnesses.
fn crest_combination(pair: &EigenPair, edge: usize, a: &Crest, b: &Crest, y: f64) -> EigenFunction {
    let fa = pair.combination(&a.witness);
    let fb = pair.combination(&b.witness);
    let ra = fa.trace(edge).polar().0;
    let rb = fb.trace(edge).polar().0;
    let alpha = combination_alpha(pair.k, a.offset, b.offset, y);
    let coeffs: Vec<f64> = a
        .witness
        .iter()
        .zip(&b.witness)
        .map(|(x, z)| x / ra + alpha * z / rb)
        .collect();
    let n = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let coeffs: Vec<f64> = coeffs.iter().map(|c| c / n).collect();
    pair.combination(&coeffs)
}

fn probes_pass(g: &MetricGraph, pair: &EigenPair, edge: usize, a: &Crest, b: &Crest, tol: &Tolerances) -> bool {
    (1..=GLOBAL_PROBES).all(|i| {
        let y = a.offset + (b.offset - a.offset) * i as f64 / (GLOBAL_PROBES + 1) as f64;
        let f = crest_combination(pair, edge, a, b, y);
        let at = f.evaluate(&GraphPoint::new(edge, y));
        match extrema_with(g, &f, tol, Vec::new()) {
            Ok(ex) => {
                let top = ex.global_max().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
                at >= top - tol.tie * top.abs()
            }
            Err(_) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit_and_spread() {
        let pts = sphere_points(3, 512);
        assert!(pts.iter().all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12));
        let mean: Vec<f64> = (0..3).map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / 512.0).collect();
        assert!(mean.iter().all(|m| m.abs() < 0.1));
        assert_eq!(primes(5), vec![2, 3, 5, 7, 11]);
    }
}
