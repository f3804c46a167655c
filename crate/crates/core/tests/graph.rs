use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qghot_core::catalog;
use qghot_core::graph::{
    diameter, disconnect, distance_with, glue, suppress_degree_two, vertex_distances, GraphBuilder, GraphPoint,
};
use qghot_core::spectral::{eigenvalue_list, Backend};
use qghot_core::MetricGraph;

fn random_point(g: &MetricGraph, rng: &mut ChaCha8Rng) -> GraphPoint {
    let e = rng.gen_range(0..g.edge_count());
    GraphPoint::new(e, rng.gen_range(0.0..=g.length(e)))
}

/// Edges left over by a union-find spanning tree.
fn cotree_count(g: &MetricGraph) -> usize {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(p: &mut Vec<usize>, v: usize) -> usize {
        if p[v] != v {
            let r = find(p, p[v]);
            p[v] = r;
        }
        p[v]
    }
    let mut rejected = 0;
    for e in g.edges() {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a == b {
            rejected += 1;
        } else {
            parent[a] = b;
        }
    }
    rejected
}

fn check_metric(g: &MetricGraph, seed: u64, triples: usize) {
    let dv = vertex_distances(g);
    let scale = diameter(g);
    let tol = 1e-12 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..triples {
        let (p, q, r) = (random_point(g, &mut rng), random_point(g, &mut rng), random_point(g, &mut rng));
        let (pq, qp) = (distance_with(g, &dv, &p, &q), distance_with(g, &dv, &q, &p));
        assert!((pq - qp).abs() <= tol, "{}: asymmetric {pq} {qp}", g.name());
        let pr = distance_with(g, &dv, &p, &r);
        let qr = distance_with(g, &dv, &q, &r);
        assert!(pr <= pq + qr + tol, "{}: triangle {pr} > {pq} + {qr}", g.name());
    }
}

fn grid_diameter(g: &MetricGraph, step: f64) -> f64 {
    let dv = vertex_distances(g);
    let mut pts = Vec::new();
    for e in 0..g.edge_count() {
        let n = (g.length(e) / step).ceil() as usize;
        pts.extend((0..=n).map(|i| GraphPoint::new(e, g.length(e) * i as f64 / n as f64)));
    }
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max(distance_with(g, &dv, p, q));
        }
    }
    best
}

/// Each connected piece of the doubly connected part as its own graph.
fn dcp_pieces(g: &MetricGraph) -> Vec<MetricGraph> {
    let dcp = g.doubly_connected_part();
    let edges: Vec<usize> = dcp.closed.edges.iter().copied().collect();
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for &e in &edges {
        let ends = [g.edge(e).from, g.edge(e).to];
        let hit: Vec<usize> = (0..pieces.len())
            .filter(|&i| pieces[i].iter().any(|&f| ends.contains(&g.edge(f).from) || ends.contains(&g.edge(f).to)))
            .collect();
        let mut merged = vec![e];
        for &i in hit.iter().rev() {
            merged.extend(pieces.remove(i));
        }
        pieces.push(merged);
    }
    pieces
        .into_iter()
        .map(|es| {
            let mut b = GraphBuilder::new("piece");
            let mut seen = Vec::new();
            for &e in &es {
                for v in [g.edge(e).from, g.edge(e).to] {
                    if !seen.contains(&v) {
                        seen.push(v);
                        b = b.vertex(g.vertex_id(v));
                    }
                }
            }
            for &e in &es {
                let ed = g.edge(e);
                b = b.edge(ed.id.clone(), g.vertex_id(ed.from), g.vertex_id(ed.to), g.length(e));
            }
            b.build().unwrap()
        })
        .collect()
}

fn shape(g: &MetricGraph) -> (usize, usize, Vec<usize>, Vec<u64>) {
    let s = suppress_degree_two(g);
    let mut degrees: Vec<usize> = (0..s.vertex_count()).map(|v| s.degree(v)).collect();
    degrees.sort_unstable();
    let mut lengths: Vec<u64> = s.lengths().iter().map(|l| (l * 1e9).round() as u64).collect();
    lengths.sort_unstable();
    (s.vertex_count(), s.edge_count(), degrees, lengths)
}

fn check_structure(g: &MetricGraph) {
    assert_eq!(g.betti(), cotree_count(g), "{}", g.name());
    let s = suppress_degree_two(g);
    // one rounding per merged edge
    let merges = (g.edge_count() - s.edge_count()) as f64;
    let slack = (merges + 1.0) * f64::EPSILON * g.total_length();
    assert!((s.total_length() - g.total_length()).abs() <= slack, "{}", g.name());
    for piece in dcp_pieces(g) {
        assert!(piece.bridges().is_empty(), "{}: bridge inside the doubly connected part", g.name());
        assert_eq!(piece.doubly_connected_part().closed.edges.len(), piece.edge_count());
    }
    let bridges = g.bridges();
    if let Some(e) = (0..g.edge_count()).find(|e| !bridges.contains(e)) {
        let p = GraphPoint::new(e, 0.37 * g.length(e));
        let parts = disconnect(g, &p).unwrap();
        assert_eq!(parts.len(), 1);
        let cut = &parts[0];
        let id = g.edge(e).id.clone();
        let a = cut.vertex_index(&format!("{id}@0#0")).unwrap();
        let b = cut.vertex_index(&format!("{id}@0#1")).unwrap();
        let back = glue(cut, a, b).unwrap();
        assert_eq!(shape(&back), shape(g), "{}", g.name());
        assert!((diameter(&back) - diameter(g)).abs() < 1e-12 * diameter(g));
    }
}

#[test]
fn corpus_metric_properties() {
    for (i, g) in catalog::corpus().iter().enumerate() {
        check_metric(g, i as u64, 1000);
        let dv = vertex_distances(g);
        let vmax = dv.iter().flatten().cloned().fold(0.0, f64::max);
        let d = diameter(g);
        assert!(d >= vmax - 1e-12, "{}", g.name());
        let step = 0.01;
        let grid = grid_diameter(g, step);
        assert!(grid <= d + 1e-12 && d - grid <= 2.0 * step, "{}: {d} vs grid {grid}", g.name());
    }
}

#[test]
fn corpus_structure_properties() {
    for g in catalog::corpus() {
        check_structure(&g);
    }
}

#[test]
fn suppression_keeps_eigenvalues_on_corpus() {
    for g in catalog::corpus() {
        let s = suppress_degree_two(&g);
        let a = eigenvalue_list(&g, 6, Backend::Secular).unwrap();
        let b = eigenvalue_list(&s, 6, Backend::Secular).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{}: {a:?} vs {b:?}", g.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_graph_metric(seed in 0u64..10_000, v in 1usize..7, extra in 0usize..4) {
        prop_assume!(v > 1 || extra > 0);
        let g = catalog::random_graph(seed, v, extra).unwrap();
        check_metric(&g, seed, 100);
        let d = diameter(&g);
        let grid = grid_diameter(&g, 0.05);
        prop_assert!(grid <= d + 1e-12 && d - grid <= 0.1);
    }

    #[test]
    fn random_graph_structure(seed in 0u64..10_000, v in 1usize..7, extra in 0usize..4) {
        prop_assume!(v > 1 || extra > 0);
        check_structure(&catalog::random_graph(seed, v, extra).unwrap());
    }

    #[test]
    fn random_tree_is_all_bridges(seed in 0u64..10_000) {
        let t = catalog::random_tree(seed, 12).unwrap();
        prop_assert_eq!(t.bridges().len(), t.edge_count());
        prop_assert!(t.doubly_connected_part().is_empty());
    }
}
