//! Local modifications of metric graphs.
//!
//! All operations work on the named description so that ids stay stable; new
//! vertices and edges get fresh ids derived from the ones they replace.

use std::collections::{BTreeMap, HashSet};

use super::{EdgeRecord, GraphDescription, GraphPoint, Location, MetricGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Surgery {
    AttachPendant { at: GraphPoint, length: f64 },
    SplitEdge { at: GraphPoint },
    Glue { first: usize, second: usize },
    Disconnect { at: GraphPoint },
    ShrinkEdge { edge: usize, length: f64 },
}

/// Applies one action. Only `Disconnect` can return more than one component.
pub fn surgery(g: &MetricGraph, action: &Surgery) -> Result<Vec<MetricGraph>> {
    match *action {
        Surgery::AttachPendant { at, length } => attach_pendant(g, &at, length).map(|g| vec![g]),
        Surgery::SplitEdge { at } => split_edge(g, &at).map(|(g, _)| vec![g]),
        Surgery::Glue { first, second } => glue(g, first, second).map(|g| vec![g]),
        Surgery::Disconnect { at } => disconnect(g, &at),
        Surgery::ShrinkEdge { edge, length } => shrink_edge(g, edge, length).map(|g| vec![g]),
    }
}

fn fresh(base: &str, taken: &mut HashSet<String>) -> String {
    if taken.insert(base.to_string()) {
        return base.to_string();
    }
    let mut i = 1;
    loop {
        let cand = format!("{base}~{i}");
        if taken.insert(cand.clone()) {
            return cand;
        }
        i += 1;
    }
}

fn taken_ids(d: &GraphDescription) -> HashSet<String> {
    d.vertices.iter().chain(d.edges.iter().map(|e| &e.id)).cloned().collect()
}

/// Cuts edges at the given interior offsets. Returns the new description and,
/// for every requested point (in input order), the id of the vertex now there.
fn subdivide(g: &MetricGraph, points: &[GraphPoint]) -> Result<(GraphDescription, Vec<String>)> {
    let mut d = g.to_description();
    let mut taken = taken_ids(&d);
    let mut cuts: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut located = Vec::with_capacity(points.len());
    for p in points {
        g.check_point(p)?;
        let loc = g.locate(p);
        if let Location::Interior { edge, offset } = loc {
            let list = cuts.entry(edge).or_default();
            if !list.iter().any(|&s| (s - offset).abs() <= g.point_tolerance()) {
                list.push(offset);
            }
        }
        located.push(loc);
    }
    let mut cut_ids: BTreeMap<usize, Vec<(f64, String)>> = BTreeMap::new();
    let mut edges = Vec::with_capacity(d.edges.len() + points.len());
    for (i, rec) in d.edges.iter().enumerate() {
        match cuts.get_mut(&i) {
            None => edges.push(rec.clone()),
            Some(offs) => {
                offs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut prev_v = rec.from.clone();
                let mut prev_s = 0.0;
                let mut ids = Vec::new();
                for (j, &s) in offs.iter().enumerate() {
                    let vid = fresh(&format!("{}@{}", rec.id, j), &mut taken);
                    d.vertices.push(vid.clone());
                    let eid = fresh(&format!("{}.{}", rec.id, j), &mut taken);
                    edges.push(EdgeRecord {
                        id: eid,
                        from: prev_v,
                        to: vid.clone(),
                        length: s - prev_s,
                    });
                    ids.push((s, vid.clone()));
                    prev_v = vid;
                    prev_s = s;
                }
                let eid = fresh(&format!("{}.{}", rec.id, offs.len()), &mut taken);
                edges.push(EdgeRecord {
                    id: eid,
                    from: prev_v,
                    to: rec.to.clone(),
                    length: g.length(i) - prev_s,
                });
                cut_ids.insert(i, ids);
            }
        }
    }
    d.edges = edges;
    let tol = g.point_tolerance();
    let ids = located
        .iter()
        .map(|loc| match *loc {
            Location::Vertex(v) => g.vertex_id(v).to_string(),
            Location::Interior { edge, offset } => cut_ids[&edge]
                .iter()
                .find(|(s, _)| (s - offset).abs() <= tol)
                .map(|(_, id)| id.clone())
                .expect("cut recorded"),
        })
        .collect();
    Ok((d, ids))
}

/// Inserts a degree-two vertex at `at`; a point already at a vertex is a no-op.
/// Returns the new graph and the index of the vertex at `at`.
pub fn split_edge(g: &MetricGraph, at: &GraphPoint) -> Result<(MetricGraph, usize)> {
    let (d, ids) = subdivide(g, std::slice::from_ref(at))?;
    let out = d.build()?;
    let v = out.vertex_index(&ids[0]).expect("vertex exists");
    Ok((out, v))
}

/// Inserts vertices at all the given points at once. Returns the new graph
/// and the vertex index at each point, in input order.
pub fn split_points(g: &MetricGraph, points: &[GraphPoint]) -> Result<(MetricGraph, Vec<usize>)> {
    let (d, ids) = subdivide(g, points)?;
    let out = d.build()?;
    let vs = ids.iter().map(|id| out.vertex_index(id).expect("vertex exists")).collect();
    Ok((out, vs))
}

pub fn attach_pendant(g: &MetricGraph, at: &GraphPoint, length: f64) -> Result<MetricGraph> {
    let (mut d, ids) = subdivide(g, std::slice::from_ref(at))?;
    let mut taken = taken_ids(&d);
    let leaf = fresh(&format!("{}^", ids[0]), &mut taken);
    let eid = fresh(&format!("pendant@{}", ids[0]), &mut taken);
    d.vertices.push(leaf.clone());
    d.edges.push(EdgeRecord {
        id: eid.clone(),
        from: ids[0].clone(),
        to: leaf,
        length,
    });
    d.build().map_err(|e| match e {
        Error::NonpositiveLength { .. } => Error::NonpositiveLength { edge: eid, length },
        other => other,
    })
}

/// Identifies vertex `second` with vertex `first`.
pub fn glue(g: &MetricGraph, first: usize, second: usize) -> Result<MetricGraph> {
    if first >= g.vertex_count() || second >= g.vertex_count() || first == second {
        return Err(Error::InvalidPoint(format!("cannot glue vertices {first} and {second}")));
    }
    let mut d = g.to_description();
    let (keep, drop) = (g.vertex_id(first).to_string(), g.vertex_id(second).to_string());
    d.vertices.retain(|v| *v != drop);
    for e in &mut d.edges {
        if e.from == drop {
            e.from = keep.clone();
        }
        if e.to == drop {
            e.to = keep.clone();
        }
    }
    d.build()
}

pub fn shrink_edge(g: &MetricGraph, edge: usize, length: f64) -> Result<MetricGraph> {
    if edge >= g.edge_count() {
        return Err(Error::InvalidPoint(format!("edge index {edge} out of range")));
    }
    let mut lengths = g.lengths().to_vec();
    lengths[edge] = length;
    g.with_lengths(lengths)
}

/// Replaces the point by `deg` new degree-one vertices, one per incident edge end.
pub fn disconnect(g: &MetricGraph, at: &GraphPoint) -> Result<Vec<MetricGraph>> {
    disconnect_points(g, std::slice::from_ref(at))
}

/// Disconnects all given points simultaneously; returns the connected components.
pub fn disconnect_points(g: &MetricGraph, points: &[GraphPoint]) -> Result<Vec<MetricGraph>> {
    let (mut d, ids) = subdivide(g, points)?;
    let targets: HashSet<String> = ids.into_iter().collect();
    let mut taken = taken_ids(&d);
    let mut counter: BTreeMap<String, usize> = BTreeMap::new();
    let mut new_vertices = Vec::new();
    for e in &mut d.edges {
        for endpoint in [&mut e.from, &mut e.to] {
            if targets.contains(endpoint.as_str()) {
                let c = counter.entry(endpoint.clone()).or_insert(0);
                let id = fresh(&format!("{}#{}", endpoint, c), &mut taken);
                *c += 1;
                new_vertices.push(id.clone());
                *endpoint = id;
            }
        }
    }
    d.vertices.retain(|v| !targets.contains(v));
    d.vertices.extend(new_vertices);
    split_components(&d)
}

/// Splits a possibly disconnected description into connected graphs.
fn split_components(d: &GraphDescription) -> Result<Vec<MetricGraph>> {
    let index: BTreeMap<&str, usize> = d.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let n = d.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for e in &d.edges {
        let a = find(&mut parent, index[e.from.as_str()]);
        let b = find(&mut parent, index[e.to.as_str()]);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut groups: BTreeMap<usize, GraphDescription> = BTreeMap::new();
    for (i, v) in d.vertices.iter().enumerate() {
        let r = find(&mut parent, i);
        if !roots.contains(&r) {
            roots.push(r);
        }
        groups
            .entry(r)
            .or_insert_with(|| GraphDescription {
                name: String::new(),
                vertices: Vec::new(),
                edges: Vec::new(),
            })
            .vertices
            .push(v.clone());
    }
    for e in &d.edges {
        let r = find(&mut parent, index[e.from.as_str()]);
        groups.get_mut(&r).unwrap().edges.push(e.clone());
    }
    let multiple = roots.len() > 1;
    roots
        .iter()
        .enumerate()
        .map(|(c, r)| {
            let mut desc = groups.remove(r).unwrap();
            desc.name = if multiple {
                format!("{}[{c}]", d.name)
            } else {
                d.name.clone()
            };
            desc.build()
        })
        .collect()
}

/// Merges the two edges at every degree-two vertex (other than the marker
/// vertex of a pure cycle) into one edge of summed length.
pub fn suppress_degree_two(g: &MetricGraph) -> MetricGraph {
    let mut d = g.to_description();
    loop {
        let current = d.build().expect("suppression keeps validity");
        let target = (0..current.vertex_count()).find(|&v| {
            let inc = current.incidence(v);
            inc.len() == 2 && inc[0].edge != inc[1].edge
        });
        let Some(v) = target else {
            return current;
        };
        let inc = current.incidence(v);
        let (first, second) = (inc[0], inc[1]);
        let e1 = current.edge(first.edge);
        let e2 = current.edge(second.edge);
        let a = current.vertex_id(e1.vertex(first.end.opposite())).to_string();
        let b = current.vertex_id(e2.vertex(second.end.opposite())).to_string();
        let merged = EdgeRecord {
            id: e1.id.clone(),
            from: a,
            to: b,
            length: current.length(first.edge) + current.length(second.edge),
        };
        let (lo, hi) = (first.edge.min(second.edge), first.edge.max(second.edge));
        d.edges[lo] = merged;
        d.edges.remove(hi);
        let vid = current.vertex_id(v).to_string();
        d.vertices.retain(|x| *x != vid);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    #[test]
    fn collinear_path_merges() {
        let g = GraphBuilder::new("p")
            .vertices(["a", "m", "b"])
            .edge("1", "a", "m", 0.4)
            .edge("2", "m", "b", 0.6)
            .build()
            .unwrap();
        let s = suppress_degree_two(&g);
        assert_eq!(s.edge_count(), 1);
        assert!((s.length(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subdivided_cycle_keeps_marker() {
        let g = GraphBuilder::new("c")
            .vertices(["a", "b", "c", "d"])
            .edge("1", "a", "b", 0.25)
            .edge("2", "b", "c", 0.25)
            .edge("3", "c", "d", 0.25)
            .edge("4", "d", "a", 0.25)
            .build()
            .unwrap();
        let s = suppress_degree_two(&g);
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edge_count(), 1);
        assert!(s.edge(0).is_loop());
        assert!((s.length(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn star_unchanged() {
        let g = GraphBuilder::new("s")
            .vertices(["c", "1", "2", "3"])
            .edge("a", "c", "1", 1.0)
            .edge("b", "c", "2", 1.0)
            .edge("d", "c", "3", 1.0)
            .build()
            .unwrap();
        assert_eq!(suppress_degree_two(&g), g);
    }

    #[test]
    fn pendant_on_loop_gives_lasso() {
        let g = GraphBuilder::new("c").vertex("v").edge("e", "v", "v", 1.0).build().unwrap();
        let l = attach_pendant(&g, &GraphPoint::new(0, 0.3), 1.0).unwrap();
        assert_eq!(l.edge_count(), 3);
        assert_eq!(l.boundary_vertices().len(), 1);
        let s = suppress_degree_two(&l);
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.betti(), 1);
    }

    #[test]
    fn disconnect_tree_edge_and_loop() {
        let p = GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap();
        assert_eq!(disconnect(&p, &GraphPoint::new(0, 0.5)).unwrap().len(), 2);
        let c = GraphBuilder::new("c").vertex("v").edge("e", "v", "v", 1.0).build().unwrap();
        let parts = disconnect(&c, &GraphPoint::new(0, 0.5)).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].is_tree());
        let both = disconnect_points(&c, &[GraphPoint::new(0, 0.0), GraphPoint::new(0, 0.5)]).unwrap();
        assert_eq!(both.len(), 2);
    }

    #[test]
    fn glue_validates() {
        let p = GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap();
        let c = glue(&p, 0, 1).unwrap();
        assert!(c.edge(0).is_loop());
        assert!(glue(&p, 0, 0).is_err());
        assert!(matches!(shrink_edge(&p, 0, -1.0), Err(Error::NonpositiveLength { .. })));
        assert!(matches!(
            attach_pendant(&p, &GraphPoint::new(0, 2.0), 1.0),
            Err(Error::InvalidPoint(_))
        ));
    }
}
