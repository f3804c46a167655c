use std::collections::{BTreeMap, BTreeSet};

use super::{DiscreteGraph, GraphPoint, Location, MetricGraph};

/// A closed or partially open piece of a graph: whole edges (interiors),
/// individual vertices, and optional closed sub-intervals of edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Subgraph {
    pub edges: BTreeSet<usize>,
    pub vertices: BTreeSet<usize>,
    pub intervals: BTreeMap<usize, Vec<(f64, f64)>>,
}

impl Subgraph {
    pub fn from_vertices(vertices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            vertices: vertices.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.vertices.is_empty() && self.intervals.values().all(|v| v.is_empty())
    }

    /// Membership up to the graph's point tolerance.
    pub fn contains(&self, g: &MetricGraph, p: &GraphPoint) -> bool {
        match g.locate(p) {
            Location::Vertex(v) => self.vertices.contains(&v),
            Location::Interior { edge, offset } => {
                if self.edges.contains(&edge) {
                    return true;
                }
                let tol = g.point_tolerance();
                self.intervals
                    .get(&edge)
                    .map(|ivs| ivs.iter().any(|&(a, b)| offset >= a - tol && offset <= b + tol))
                    .unwrap_or(false)
            }
        }
    }
}

/// Tarjan low-link over edge ids; parallel edges and loops are handled by
/// skipping only the tree edge itself when walking back to the parent.
pub(crate) fn bridges(g: &DiscreteGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = Vec::new();
    let mut time = 0;

    // iterative DFS: (vertex, parent edge, next incidence index)
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, parent_edge, ref mut next)) = stack.last_mut() {
            let inc = g.incidence(v);
            if *next < inc.len() {
                let ee = inc[*next];
                *next += 1;
                if Some(ee.edge) == parent_edge {
                    continue;
                }
                let e = g.edge(ee.edge);
                if e.is_loop() {
                    continue;
                }
                let w = e.vertex(ee.end.opposite());
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, Some(ee.edge), 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(pe), Some(&(u, _, _))) = (parent_edge, stack.last()) {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        out.push(pe);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The doubly connected part `D` (all points on some cycle) and its interior.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyConnectedPart {
    /// Closed: non-bridge edges together with all their endpoints.
    pub closed: Subgraph,
    /// `Γ \ closure(Γ \ closure(D))`: drops vertices touched by a bridge.
    pub interior: Subgraph,
}

impl DoublyConnectedPart {
    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }
}

pub(crate) fn doubly_connected_part(g: &MetricGraph) -> DoublyConnectedPart {
    // Peeling pendant edges and bridges to a fixed point leaves exactly the
    // non-bridge edges, since an edge lies on a cycle iff it is not a bridge.
    let bridges: BTreeSet<usize> = g.bridges().into_iter().collect();
    let edges: BTreeSet<usize> = (0..g.edge_count()).filter(|e| !bridges.contains(e)).collect();
    let mut closed_vertices = BTreeSet::new();
    for &e in &edges {
        closed_vertices.insert(g.edge(e).from);
        closed_vertices.insert(g.edge(e).to);
    }
    let interior_vertices = closed_vertices
        .iter()
        .copied()
        .filter(|&v| g.incidence(v).iter().all(|ee| !bridges.contains(&ee.edge)))
        .collect();
    DoublyConnectedPart {
        closed: Subgraph {
            edges: edges.clone(),
            vertices: closed_vertices,
            intervals: BTreeMap::new(),
        },
        interior: Subgraph {
            edges,
            vertices: interior_vertices,
            intervals: BTreeMap::new(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn lasso() -> MetricGraph {
        GraphBuilder::new("lasso")
            .vertices(["v0", "v1"])
            .edge("loop", "v0", "v0", 1.0)
            .edge("tail", "v0", "v1", 1.0)
            .build()
            .unwrap()
    }

    /// Brute force: an edge is a bridge iff removing it disconnects the graph.
    fn brute_bridges(g: &MetricGraph) -> Vec<usize> {
        (0..g.edge_count()).filter(|&e| g.discrete().component_labels(&[e]).0 > 1).collect()
    }

    #[test]
    fn lasso_bridges_and_core() {
        let g = lasso();
        assert_eq!(g.bridges(), vec![1]);
        assert_eq!(g.bridges(), brute_bridges(&g));
        let d = g.doubly_connected_part();
        assert_eq!(d.closed.edges.iter().copied().collect::<Vec<_>>(), vec![0]);
        // the loop vertex carries the tail, so it is not interior
        assert!(d.interior.vertices.is_empty());
        assert!(d.closed.contains(&g, &GraphPoint::new(0, 0.0)));
        assert!(!d.interior.contains(&g, &GraphPoint::new(0, 0.0)));
        assert!(d.interior.contains(&g, &GraphPoint::new(0, 0.5)));
        assert!(!d.interior.contains(&g, &GraphPoint::new(1, 0.5)));
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let g = GraphBuilder::new("p")
            .vertices(["a", "b", "c"])
            .edge("e1", "a", "b", 1.0)
            .edge("e2", "a", "b", 1.0)
            .edge("e3", "b", "c", 1.0)
            .build()
            .unwrap();
        assert_eq!(g.bridges(), vec![2]);
        assert_eq!(g.bridges(), brute_bridges(&g));
    }

    #[test]
    fn tree_everything_is_bridge() {
        let g = GraphBuilder::new("t")
            .vertices(["c", "a", "b", "d"])
            .edge("1", "c", "a", 1.0)
            .edge("2", "c", "b", 0.5)
            .edge("3", "c", "d", 0.3)
            .build()
            .unwrap();
        assert_eq!(g.bridges(), vec![0, 1, 2]);
        assert!(g.doubly_connected_part().is_empty());
        assert_eq!(g.boundary_vertices(), vec![1, 2, 3]);
    }
}
