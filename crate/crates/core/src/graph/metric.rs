//! Shortest-path metric and exact diameter.

use super::{GraphPoint, MetricGraph};

/// All-pairs vertex distances (Floyd–Warshall; corpus graphs are small).
pub fn vertex_distances(g: &MetricGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for (i, e) in g.edges().iter().enumerate() {
        let l = g.length(i);
        if l < d[e.from][e.to] {
            d[e.from][e.to] = l;
            d[e.to][e.from] = l;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k][j];
                if cand < d[i][j] {
                    d[i][j] = cand;
                }
            }
        }
    }
    d
}

/// An affine function `c0 + cs*s + ct*t` of the two edge parameters.
#[derive(Debug, Clone, Copy)]
struct Affine {
    c0: f64,
    cs: f64,
    ct: f64,
}

impl Affine {
    fn eval(&self, s: f64, t: f64) -> f64 {
        self.c0 + self.cs * s + self.ct * t
    }
}

/// Route functions whose pointwise minimum is `dist((e,s), (f,t))`.
fn routes(g: &MetricGraph, dv: &[Vec<f64>], e: usize, f: usize) -> Vec<Affine> {
    let (le, lf) = (g.length(e), g.length(f));
    let (ea, eb) = (g.edge(e).from, g.edge(e).to);
    let (fc, fd) = (g.edge(f).from, g.edge(f).to);
    let mut out = vec![
        Affine { c0: dv[ea][fc], cs: 1.0, ct: 1.0 },
        Affine { c0: dv[ea][fd] + lf, cs: 1.0, ct: -1.0 },
        Affine { c0: le + dv[eb][fc], cs: -1.0, ct: 1.0 },
        Affine { c0: le + dv[eb][fd] + lf, cs: -1.0, ct: -1.0 },
    ];
    if e == f {
        out.push(Affine { c0: 0.0, cs: 1.0, ct: -1.0 });
        out.push(Affine { c0: 0.0, cs: -1.0, ct: 1.0 });
    }
    out
}

fn route_min(routes: &[Affine], s: f64, t: f64, same_edge: bool) -> f64 {
    let mut m = routes[..4].iter().map(|a| a.eval(s, t)).fold(f64::INFINITY, f64::min);
    if same_edge {
        m = m.min((s - t).abs());
    }
    m
}

/// Shortest-path distance between two points of `g`.
pub fn distance(g: &MetricGraph, p: &GraphPoint, q: &GraphPoint) -> f64 {
    let dv = vertex_distances(g);
    distance_with(g, &dv, p, q)
}

/// [`distance`] with the vertex distance matrix supplied.
pub fn distance_with(g: &MetricGraph, dv: &[Vec<f64>], p: &GraphPoint, q: &GraphPoint) -> f64 {
    let r = routes(g, dv, p.edge, q.edge);
    route_min(&r, p.offset, q.offset, p.edge == q.edge).max(0.0)
}

/// Exact diameter: for each edge pair the distance is the minimum of a few
/// affine route functions on the parameter rectangle, so its maximum is
/// attained at a corner, where two routes cross on the rectangle boundary,
/// or where three routes meet in the interior.
pub fn diameter(g: &MetricGraph) -> f64 {
    let dv = vertex_distances(g);
    let mut best = 0.0f64;
    for e in 0..g.edge_count() {
        for f in e..g.edge_count() {
            best = best.max(pair_max(g, &dv, e, f));
        }
    }
    best
}

fn pair_max(g: &MetricGraph, dv: &[Vec<f64>], e: usize, f: usize) -> f64 {
    let (le, lf) = (g.length(e), g.length(f));
    let r = routes(g, dv, e, f);
    let same = e == f;
    let inside = |s: f64, t: f64| s >= -1e-14 * le && s <= le * (1.0 + 1e-14) && t >= -1e-14 * lf && t <= lf * (1.0 + 1e-14);
    let mut cands: Vec<(f64, f64)> = vec![(0.0, 0.0), (le, 0.0), (0.0, lf), (le, lf)];

    // pairwise crossings on the four sides of the rectangle
    for i in 0..r.len() {
        for j in (i + 1)..r.len() {
            let (a, b) = (r[i], r[j]);
            let (dc, ds, dt) = (a.c0 - b.c0, a.cs - b.cs, a.ct - b.ct);
            // dc + ds*s + dt*t = 0
            if dt.abs() > 0.0 {
                for s in [0.0, le] {
                    cands.push((s, -(dc + ds * s) / dt));
                }
            }
            if ds.abs() > 0.0 {
                for t in [0.0, lf] {
                    cands.push((-(dc + dt * t) / ds, t));
                }
            }
            // triple points
            for k in (j + 1)..r.len() {
                let c = r[k];
                let (dc2, ds2, dt2) = (a.c0 - c.c0, a.cs - c.cs, a.ct - c.ct);
                let det = ds * dt2 - dt * ds2;
                if det.abs() > 1e-12 {
                    let s = (-dc * dt2 + dt * dc2) / det;
                    let t = (-ds * dc2 + ds2 * dc) / det;
                    cands.push((s, t));
                }
            }
        }
    }
    cands
        .into_iter()
        .filter(|&(s, t)| s.is_finite() && t.is_finite() && inside(s, t))
        .map(|(s, t)| route_min(&r, s.clamp(0.0, le), t.clamp(0.0, lf), same))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn unit_loop() -> MetricGraph {
        GraphBuilder::new("loop").vertex("v").edge("e", "v", "v", 1.0).build().unwrap()
    }

    #[test]
    fn loop_distances() {
        let g = unit_loop();
        let d = distance(&g, &GraphPoint::new(0, 0.1), &GraphPoint::new(0, 0.4));
        assert!((d - 0.3).abs() < 1e-15);
        let d = distance(&g, &GraphPoint::new(0, 0.1), &GraphPoint::new(0, 0.9));
        assert!((d - 0.2).abs() < 1e-15);
        assert!((diameter(&g) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interval_diameter() {
        let g = GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap();
        assert_eq!(diameter(&g), 1.0);
    }
}
