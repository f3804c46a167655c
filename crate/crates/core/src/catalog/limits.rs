use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DiscreteGraph, GraphBuilder, MetricGraph};
use crate::hotspots::{extrema_single, ExtremumKind, ExtremumPoint, Status, VerifierOutcome};
use crate::spectral::{mu2_pair, pair_at, EdgeTrace, EigenFunction};

/// Which edges of a topology carry length 1 while the rest shrink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementMode {
    /// One pendant edge: an extremum at its leaf.
    I,
    /// Two pendant edges: maximum and minimum at their leaves.
    Ii,
    /// One cycle edge and one pendant edge: an extremum inside the cycle edge.
    Iii,
    /// Two cycle edges in different cycles: both extrema inside them.
    Iv,
}

impl PlacementMode {
    pub const ALL: [PlacementMode; 4] = [PlacementMode::I, PlacementMode::Ii, PlacementMode::Iii, PlacementMode::Iv];

    pub fn as_str(self) -> &'static str {
        match self {
            PlacementMode::I => "i",
            PlacementMode::Ii => "ii",
            PlacementMode::Iii => "iii",
            PlacementMode::Iv => "iv",
        }
    }
}

impl fmt::Display for PlacementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlacementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlacementMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::BadParameter {
                name: "mode".into(),
                reason: format!("expected one of i, ii, iii, iv, got `{s}`"),
            })
    }
}

/// Edges of a BFS spanning tree's complement, in edge order.
fn cotree_edges(g: &DiscreteGraph) -> Vec<usize> {
    let mut seen = vec![false; g.vertex_count()];
    let mut tree = vec![false; g.edge_count()];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for ee in g.incidence(v) {
            let w = g.edge(ee.edge).vertex(ee.end.opposite());
            if !seen[w] {
                seen[w] = true;
                tree[ee.edge] = true;
                queue.push_back(w);
            }
        }
    }
    (0..g.edge_count()).filter(|&e| !tree[e]).collect()
}

fn unmet(mode: PlacementMode, why: &str) -> Error {
    Error::PreconditionUnmet(format!("mode {mode}: {why}"))
}

/// The unit edges for `mode`, and the mode actually realised: a graph with
/// cycles but no leaves is handled as mode iv when mode iii is requested.
pub fn mode_edges(g: &DiscreteGraph, mode: PlacementMode) -> Result<(Vec<usize>, PlacementMode)> {
    let leaves = g.boundary_vertices();
    let pendant = |v: usize| g.incidence(v)[0].edge;
    let cotree = cotree_edges(g);
    match mode {
        PlacementMode::I => {
            let &l = leaves.first().ok_or_else(|| unmet(mode, "no boundary vertex"))?;
            Ok((vec![pendant(l)], mode))
        }
        PlacementMode::Ii => {
            if leaves.len() < 2 {
                return Err(unmet(mode, "fewer than two boundary vertices"));
            }
            let mut edges = vec![pendant(leaves[0]), pendant(leaves[1])];
            edges.dedup();
            Ok((edges, mode))
        }
        PlacementMode::Iii => {
            if cotree.is_empty() {
                return Err(unmet(mode, "the graph has no cycle"));
            }
            if cotree.len() == 1 && leaves.is_empty() {
                return Err(unmet(mode, "the graph is a cycle"));
            }
            match leaves.first() {
                Some(&l) => Ok((vec![cotree[0], pendant(l)], mode)),
                None => mode_edges(g, PlacementMode::Iv),
            }
        }
        PlacementMode::Iv => {
            if cotree.len() < 2 {
                return Err(unmet(mode, "first Betti number below two"));
            }
            Ok((cotree[..2].to_vec(), mode))
        }
    }
}

/// A topology whose `unit_edges` keep fixed lengths (1 unless built with
/// [`LimitFamily::from_graph`]) and whose other edges share a common length
/// `δ`, together with the `δ → 0` limit graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFamily {
    pub name: String,
    pub topology: DiscreteGraph,
    pub unit_edges: Vec<usize>,
    pub shrinking_edges: Vec<usize>,
    pub limit: MetricGraph,
    /// Limit vertex of every topology vertex.
    pub vertex_map: Vec<usize>,
    /// Limit edge of every topology edge that survives.
    pub edge_map: Vec<Option<usize>>,
    base: Vec<f64>,
}

impl LimitFamily {
    pub fn new(name: impl Into<String>, topology: &DiscreteGraph, unit_edges: &[usize]) -> Result<Self> {
        Self::build(name.into(), topology, unit_edges, vec![1.0; topology.edge_count()])
    }

    /// Shrinks `shrinking` and keeps every other edge at its length in `g`.
    pub fn from_graph(g: &MetricGraph, shrinking: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = (0..g.edge_count()).filter(|e| !shrinking.contains(e)).collect();
        if shrinking.is_empty() || shrinking.iter().any(|&e| e >= g.edge_count()) {
            return Err(Error::BadParameter {
                name: "shrinking".into(),
                reason: "need at least one valid edge index".into(),
            });
        }
        Self::build(g.name().to_string(), g.discrete(), &keep, g.lengths().to_vec())
    }

    fn build(name: String, topology: &DiscreteGraph, unit_edges: &[usize], base: Vec<f64>) -> Result<Self> {
        let m = topology.edge_count();
        if unit_edges.is_empty() || unit_edges.iter().any(|&e| e >= m) {
            return Err(Error::BadParameter {
                name: "unit_edges".into(),
                reason: "need at least one valid edge index".into(),
            });
        }
        let shrinking: Vec<usize> = (0..m).filter(|e| !unit_edges.contains(e)).collect();
        let n = topology.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &e in &shrinking {
            let (a, b) = (topology.edge(e).from, topology.edge(e).to);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut class: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertex_map = vec![0; n];
        let mut reps = Vec::new();
        for (v, slot) in vertex_map.iter_mut().enumerate() {
            let r = find(&mut parent, v);
            let next = class.len();
            *slot = *class.entry(r).or_insert_with(|| {
                reps.push(topology.vertex_id(v).to_string());
                next
            });
        }
        let mut b = GraphBuilder::new(format!("{name}-limit")).vertices(reps.clone());
        let mut edge_map = vec![None; m];
        for (i, &e) in unit_edges.iter().enumerate() {
            let ed = topology.edge(e);
            b = b.edge(ed.id.clone(), reps[vertex_map[ed.from]].clone(), reps[vertex_map[ed.to]].clone(), base[e]);
            edge_map[e] = Some(i);
        }
        let limit = b.build()?;
        Ok(Self {
            name,
            topology: topology.clone(),
            unit_edges: unit_edges.to_vec(),
            shrinking_edges: shrinking,
            limit,
            vertex_map,
            edge_map,
            base,
        })
    }

    pub fn for_mode(name: impl Into<String>, topology: &DiscreteGraph, mode: PlacementMode) -> Result<Self> {
        let (edges, _) = mode_edges(topology, mode)?;
        Self::new(name, topology, &edges)
    }

    pub fn lengths(&self, delta: f64) -> Vec<f64> {
        (0..self.topology.edge_count())
            .map(|e| if self.edge_map[e].is_some() { self.base[e] } else { delta })
            .collect()
    }

    /// `Γ(ℓ)` with shrinking length `delta`.
    pub fn at(&self, delta: f64) -> Result<MetricGraph> {
        MetricGraph::new(format!("{}@{delta}", self.name), self.topology.clone(), self.lengths(delta))
    }
}

/// The image of a limit-graph function on `Γ(ℓ)`: surviving edges carry the
/// linearly rescaled trace times `√(L̃/L)`, shrinking edges the constant
/// value at the vertex they collapse to. Pieces are `k = 0` traces for
/// constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledFunction {
    pub source: EigenFunction,
    pub lengths: Vec<f64>,
    pub pieces: Vec<EdgeTrace>,
}

impl RescaledFunction {
    pub fn new(fam: &LimitFamily, source: &EigenFunction, lengths: &[f64]) -> Self {
        let pieces = (0..fam.topology.edge_count())
            .map(|e| match fam.edge_map[e] {
                Some(le) => {
                    let t = source.trace(le);
                    let lt = fam.limit.length(le);
                    let c = (lt / lengths[e]).sqrt();
                    EdgeTrace::new(e, c * t.a, c * t.b, t.k * lt / lengths[e])
                }
                None => {
                    let v = fam.vertex_map[fam.topology.edge(e).from];
                    EdgeTrace::new(e, source.vertex_value(&fam.limit, v), 0.0, 0.0)
                }
            })
            .collect();
        Self {
            source: source.clone(),
            lengths: lengths.to_vec(),
            pieces,
        }
    }

    pub fn value(&self, edge: usize, x: f64) -> f64 {
        self.pieces[edge].value(x)
    }

    /// `‖J f‖²` restricted to surviving edges, in closed form.
    pub fn surviving_norm_sq(&self, fam: &LimitFamily) -> f64 {
        fam.unit_edges.iter().map(|&e| self.pieces[e].norm_sq(self.lengths[e])).sum()
    }

    /// `∫ f · J` over `Γ(ℓ)`.
    pub fn dot(&self, f: &EigenFunction) -> f64 {
        self.pieces
            .iter()
            .zip(&self.lengths)
            .map(|(p, &l)| {
                if p.k == 0.0 {
                    p.a * f.trace(p.edge).integral(l)
                } else {
                    p.dot(f.trace(p.edge), l)
                }
            })
            .sum()
    }
}

/// `sup |s − t|` over `[0, len]` for two traces, by branch and bound with
/// the second-order bound `|h''| ≤ k₁²R₁ + k₂²R₂`, to absolute accuracy `tol`.
pub fn sup_difference(s: &EdgeTrace, t: &EdgeTrace, len: f64, tol: f64) -> f64 {
    let h = |x: f64| (s.value(x) - t.value(x), s.derivative(x) - t.derivative(x));
    let curv = s.k * s.k * s.polar().0 + t.k * t.k * t.polar().0;
    let mut best = h(0.0).0.abs().max(h(len).0.abs());
    let pieces = 64;
    let mut stack: Vec<(f64, f64)> = (0..pieces)
        .map(|i| (len * i as f64 / pieces as f64, len * (i + 1) as f64 / pieces as f64))
        .collect();
    while let Some((a, b)) = stack.pop() {
        let m = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let (v, d) = h(m);
        best = best.max(v.abs());
        let bound = v.abs() + d.abs() * r + 0.5 * curv * r * r;
        if bound > best + tol && r > f64::EPSILON * len {
            stack.push((a, m));
            stack.push((m, b));
        }
    }
    best
}

pub const SUPNORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub mu: f64,
    pub mu_limit: f64,
    pub eig_err: f64,
    pub supnorm_err: f64,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("delta,eig_err,supnorm_err\n");
    for r in rows {
        out.push_str(&format!("{:e},{:e},{:e}\n", r.delta, r.eig_err, r.supnorm_err));
    }
    out
}

/// Compares the `index`-th eigenpair of `Γ(ℓ)` with the rescaled limit
/// eigenfunction for every `δ`, aligning signs through the inner product.
/// The `δ` values run in parallel.
pub fn limit_compare(fam: &LimitFamily, deltas: &[f64], index: usize) -> Result<Vec<ConvergenceRow>> {
    let (limit_pair, _) = pair_at(&fam.limit, index)?;
    if !limit_pair.is_simple() {
        return Err(Error::LimitEigenvalueMultiple {
            index,
            multiplicity: limit_pair.multiplicity,
        });
    }
    let psi = &limit_pair.basis[0];
    std::thread::scope(|scope| {
        let handles: Vec<_> = deltas
            .iter()
            .map(|&delta| scope.spawn(move || compare_one(fam, psi, limit_pair.mu, delta, index)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("comparison thread panicked")).collect()
    })
}

fn compare_one(fam: &LimitFamily, psi: &EigenFunction, mu_limit: f64, delta: f64, index: usize) -> Result<ConvergenceRow> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadParameter {
            name: "delta".into(),
            reason: format!("need a positive length, got {delta}"),
        });
    }
    let g = fam.at(delta)?;
    let (pair, _) = pair_at(&g, index)?;
    if !pair.is_simple() {
        return Err(Error::NotSimple {
            index,
            multiplicity: pair.multiplicity,
        });
    }
    let j = RescaledFunction::new(fam, psi, g.lengths());
    let mut f = pair.basis[0].clone();
    if j.dot(&f) < 0.0 {
        f = f.scaled(-1.0);
    }
    let sup = (0..g.edge_count())
        .map(|e| sup_difference(f.trace(e), &j.pieces[e], g.length(e), SUPNORM_TOL))
        .fold(0.0, f64::max);
    Ok(ConvergenceRow {
        delta,
        mu: pair.mu,
        mu_limit,
        eig_err: (pair.mu - mu_limit).abs(),
        supnorm_err: sup,
    })
}

/// A graph realising the placement claim of a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub graph: MetricGraph,
    pub mode: PlacementMode,
    pub delta: f64,
    pub unit_edges: Vec<String>,
    pub outcome: VerifierOutcome,
}

pub const PLACEMENT_DELTA_START: f64 = 0.1;
pub const PLACEMENT_DELTA_FLOOR: f64 = 1e-5;

/// Sets the mode's edges to length 1 and all others to `δ`, halving `δ`
/// from 0.1 until `μ₂` is simple and its extrema sit where the mode says.
pub fn topology_placement(topology: &DiscreteGraph, mode: PlacementMode) -> Result<Placement> {
    let (edges, effective) = mode_edges(topology, mode)?;
    let fam = LimitFamily::new("placement", topology, &edges)?;
    let mut delta = PLACEMENT_DELTA_START;
    while delta >= PLACEMENT_DELTA_FLOOR {
        let g = fam.at(delta)?;
        let pair = mu2_pair(&g)?;
        if pair.is_simple() {
            let ex = extrema_single(&g, &pair.basis[0])?;
            let (ok, detail) = placement_claim(&g, &edges, effective, &ex.global);
            if ok {
                let mut tolerances = BTreeMap::new();
                tolerances.insert("point".to_string(), g.point_tolerance());
                let outcome = VerifierOutcome {
                    check: format!("placement-{effective}"),
                    status: Status::Pass,
                    witnesses: Vec::new(),
                    tolerances,
                    detail: format!("delta = {delta:e}; {detail}"),
                };
                return Ok(Placement {
                    unit_edges: edges.iter().map(|&e| g.edge(e).id.clone()).collect(),
                    graph: g,
                    mode: effective,
                    delta,
                    outcome,
                });
            }
        }
        delta *= 0.5;
    }
    Err(Error::NoWitnessFound {
        delta_floor: PLACEMENT_DELTA_FLOOR,
    })
}

fn placement_claim(g: &MetricGraph, edges: &[usize], mode: PlacementMode, global: &[ExtremumPoint]) -> (bool, String) {
    let set = |kind: ExtremumKind| global.iter().filter(move |p| p.kind == kind);
    let at_leaf_of = |e: usize, kind: ExtremumKind| {
        let ed = g.edge(e);
        let leaf = [ed.from, ed.to].into_iter().find(|&v| g.degree(v) == 1);
        let mut pts = set(kind);
        leaf.is_some() && pts.all(|p| p.vertex == leaf)
    };
    let inside = |e: usize, kind: ExtremumKind| set(kind).all(|p| p.vertex.is_none() && p.location.edge == e);
    use ExtremumKind::{Max, Min};
    let first = edges[0];
    let second = edges.get(1).copied().unwrap_or(first);
    let ok = match mode {
        PlacementMode::I => at_leaf_of(first, Max) || at_leaf_of(first, Min),
        PlacementMode::Ii if first == second => {
            let ed = g.edge(first);
            let ends = |p: &ExtremumPoint| p.vertex == Some(ed.from) || p.vertex == Some(ed.to);
            global.iter().all(ends)
        }
        PlacementMode::Ii => {
            (at_leaf_of(first, Max) && at_leaf_of(second, Min)) || (at_leaf_of(first, Min) && at_leaf_of(second, Max))
        }
        PlacementMode::Iii => inside(first, Max) || inside(first, Min),
        PlacementMode::Iv => (inside(first, Max) && inside(second, Min)) || (inside(first, Min) && inside(second, Max)),
    };
    let pts: Vec<String> = global
        .iter()
        .map(|p| format!("{} {}", p.kind.as_str(), g.describe_point(&p.location)))
        .collect();
    (ok, format!("global extrema: {}", pts.join(", ")))
}
