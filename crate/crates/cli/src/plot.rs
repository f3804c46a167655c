use std::f64::consts::PI;

use qghot_core::hotspots::{hotspot_sets_with, Shape};
use qghot_core::spectral::EigenFunction;
use qghot_core::{Error, GraphPoint, MetricGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svg::node::element::{Circle, Group, Line, Polyline, Rectangle, Text, Title};
use svg::Document;

use crate::commands::{pair_with, spectrum_entry};
use crate::config::{Format, RunConfig};
use crate::report::{table, Marker, Report, MARKER_CSV_HEADER};
use crate::Failure;

/// Largest eigenfunction index accepted for plotting.
pub const MAX_INDEX: usize = 200;

const LAYOUT: f64 = 480.0;
const MARGIN: f64 = 40.0;
const PANEL_X: f64 = LAYOUT + 2.0 * MARGIN;
const PANEL_W: f64 = 420.0;
const ROW_H: f64 = 60.0;
const PIECES: usize = 32;

type Pt = (f64, f64);

/// Fruchterman–Reingold on the vertex set, started from seeded random positions.
fn layout(g: &MetricGraph, seed: u64) -> Vec<Pt> {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Pt> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    if n == 1 {
        return vec![(0.5, 0.5)];
    }
    let k = (1.0 / n as f64).sqrt();
    let mut temp = 0.1;
    for _ in 0..400 {
        let mut disp = vec![(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let d = (dx * dx + dy * dy).sqrt().max(1e-6);
                let f = k * k / d;
                disp[i].0 += dx / d * f;
                disp[i].1 += dy / d * f;
            }
        }
        for e in g.edges().iter().filter(|e| !e.is_loop()) {
            let (dx, dy) = (pos[e.from].0 - pos[e.to].0, pos[e.from].1 - pos[e.to].1);
            let d = (dx * dx + dy * dy).sqrt().max(1e-6);
            let f = d * d / k;
            disp[e.from].0 -= dx / d * f;
            disp[e.from].1 -= dy / d * f;
            disp[e.to].0 += dx / d * f;
            disp[e.to].1 += dy / d * f;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt().max(1e-12);
            p.0 += d.0 / len * len.min(temp);
            p.1 += d.1 / len * len.min(temp);
        }
        temp *= 0.99;
    }
    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &pos {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
    pos.iter()
        .map(|p| (MARGIN + 0.15 * LAYOUT + 0.7 * LAYOUT * (p.0 - lo.0) / span, MARGIN + 0.15 * LAYOUT + 0.7 * LAYOUT * (p.1 - lo.1) / span))
        .collect()
}

/// Drawn curve of every edge as a function of `t ∈ [0, 1]`.
struct Curves {
    pos: Vec<Pt>,
    centroid: Pt,
    /// Bend of each edge: rank among edges sharing its endpoints.
    bend: Vec<f64>,
    scale: f64,
}

impl Curves {
    fn new(g: &MetricGraph, pos: Vec<Pt>) -> Self {
        let n = pos.len() as f64;
        let centroid = (pos.iter().map(|p| p.0).sum::<f64>() / n, pos.iter().map(|p| p.1).sum::<f64>() / n);
        let mut bend = vec![0.0; g.edge_count()];
        for (i, e) in g.edges().iter().enumerate() {
            let key = (e.from.min(e.to), e.from.max(e.to));
            let siblings: Vec<usize> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, f)| (f.from.min(f.to), f.from.max(f.to)) == key)
                .map(|(j, _)| j)
                .collect();
            let rank = siblings.iter().position(|&j| j == i).unwrap_or(0) as f64;
            bend[i] = if e.is_loop() { rank } else { rank - 0.5 * (siblings.len() as f64 - 1.0) };
        }
        let scale = 0.25 * LAYOUT / g.max_edge_length();
        Self { pos, centroid, bend, scale }
    }

    fn at(&self, g: &MetricGraph, e: usize, t: f64) -> Pt {
        let ed = g.edge(e);
        let a = self.pos[ed.from];
        if ed.is_loop() {
            let mut dir = (a.0 - self.centroid.0, a.1 - self.centroid.1);
            let norm = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
            dir = if norm < 1e-9 { (0.0, -1.0) } else { (dir.0 / norm, dir.1 / norm) };
            let turn = 0.9 * self.bend[e];
            dir = (dir.0 * turn.cos() - dir.1 * turn.sin(), dir.0 * turn.sin() + dir.1 * turn.cos());
            let r = (g.length(e) * self.scale / (2.0 * PI)).clamp(8.0, 0.15 * LAYOUT);
            let c = (a.0 + r * dir.0, a.1 + r * dir.1);
            let phi = (-dir.1).atan2(-dir.0) + 2.0 * PI * t;
            return (c.0 + r * phi.cos(), c.1 + r * phi.sin());
        }
        let b = self.pos[ed.to];
        let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let ctrl = (mid.0 - dy * 0.35 * self.bend[e], mid.1 + dx * 0.35 * self.bend[e]);
        let s = 1.0 - t;
        (
            s * s * a.0 + 2.0 * s * t * ctrl.0 + t * t * b.0,
            s * s * a.1 + 2.0 * s * t * ctrl.1 + t * t * b.1,
        )
    }
}

/// Blue for negative, white at zero, red for positive values of `v / sup`.
fn colour(v: f64) -> String {
    let t = v.clamp(-1.0, 1.0);
    let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
    let (r, g, b) = if t >= 0.0 { (255, fade(t), fade(t)) } else { (fade(t), fade(t), 255) };
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn marker_shape(x: f64, y: f64, kind: &str) -> Circle {
    Circle::new()
        .set("cx", x)
        .set("cy", y)
        .set("r", 5)
        .set("fill", if kind.starts_with("max") { "#8b0000" } else { "#00008b" })
        .set("stroke", "black")
        .set("class", format!("hotspot {kind}"))
}

fn round(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn run(cfg: &RunConfig, g: &MetricGraph, index: usize, report: &mut Report) -> Result<Option<String>, Failure> {
    if index == 0 || index > MAX_INDEX {
        return Err(Error::IndexOutOfRange(index).into());
    }
    let (pair, _) = pair_with(cfg, g, index)?;
    report.spectrum = vec![spectrum_entry(g, &pair)];
    let f: &EigenFunction = &pair.basis[0];
    let hs = hotspot_sets_with(g, &pair, &cfg.sampling, &cfg.tolerances)?;
    let sup = f.sup(g).max(1e-300);

    let curves = Curves::new(g, layout(g, cfg.seed));
    let mut graph_layer = Group::new().set("id", "layout");
    for e in 0..g.edge_count() {
        for i in 0..PIECES {
            let (t0, t1) = (i as f64 / PIECES as f64, (i + 1) as f64 / PIECES as f64);
            let (p, q) = (curves.at(g, e, t0), curves.at(g, e, t1));
            let v = f.evaluate(&GraphPoint::new(e, 0.5 * (t0 + t1) * g.length(e)));
            graph_layer = graph_layer.add(
                Line::new()
                    .set("x1", p.0)
                    .set("y1", p.1)
                    .set("x2", q.0)
                    .set("y2", q.1)
                    .set("stroke", colour(v / sup))
                    .set("stroke-width", 4),
            );
        }
    }
    for (v, p) in curves.pos.iter().enumerate() {
        graph_layer = graph_layer
            .add(Circle::new().set("cx", p.0).set("cy", p.1).set("r", 3).set("fill", "black"))
            .add(Text::new(g.vertex_id(v)).set("x", p.0 + 6.0).set("y", p.1 - 6.0).set("font-size", 11));
    }

    // Hot-spot points: isolated points, plus both ends of segments.
    let mut spots: Vec<(GraphPoint, String)> = Vec::new();
    for c in &hs.global {
        match c.shape {
            Shape::Point { location, .. } => spots.push((location, c.kind.as_str().to_string())),
            Shape::Segment { .. } => {
                for p in c.endpoints() {
                    spots.push((p, format!("{}_segment", c.kind.as_str())));
                }
            }
        }
    }
    // A vertex hot spot is drawn once, on its first incident edge.
    let mut seen: Vec<GraphPoint> = Vec::new();
    spots.retain(|(p, _)| {
        let fresh = !seen.iter().any(|q| g.same_point(p, q));
        seen.push(*p);
        fresh
    });
    for (p, kind) in &spots {
        let xy = curves.at(g, p.edge, p.offset / g.length(p.edge));
        graph_layer = graph_layer.add(marker_shape(xy.0, xy.1, kind));
    }

    // Unrolled panel: one row per edge, offset to the right, value upwards.
    let lmax = g.max_edge_length();
    let mut panel = Group::new().set("id", "unrolled");
    let row_y = |e: usize| MARGIN + ROW_H * (e as f64 + 0.5);
    let to_xy = |e: usize, x: f64, v: f64| (round(PANEL_X + PANEL_W * x / lmax), round(row_y(e) - 0.4 * ROW_H * v / sup));
    for e in 0..g.edge_count() {
        let len = g.length(e);
        let points: Vec<String> = (0..=4 * PIECES)
            .map(|i| {
                let x = len * i as f64 / (4 * PIECES) as f64;
                let (px, py) = to_xy(e, x, f.trace(e).value(x));
                format!("{px},{py}")
            })
            .collect();
        panel = panel
            .add(
                Line::new()
                    .set("x1", PANEL_X)
                    .set("y1", row_y(e))
                    .set("x2", round(PANEL_X + PANEL_W * len / lmax))
                    .set("y2", row_y(e))
                    .set("stroke", "#bbbbbb"),
            )
            .add(Polyline::new().set("points", points.join(" ")).set("fill", "none").set("stroke", "black"))
            .add(Text::new(g.edge(e).id.as_str()).set("x", PANEL_X - 30.0).set("y", row_y(e) + 4.0).set("font-size", 11));
    }
    // Panel markers are semantic: every edge copy of each hot spot is listed.
    let mut markers = Vec::new();
    for c in &hs.global {
        let pts: Vec<(GraphPoint, String)> = match c.shape {
            Shape::Point { location, .. } => vec![(location, c.kind.as_str().to_string())],
            Shape::Segment { .. } => c.endpoints().into_iter().map(|p| (p, format!("{}_segment", c.kind.as_str()))).collect(),
        };
        for (p, kind) in pts {
            for q in copies(g, &p) {
                let (x, y) = to_xy(q.edge, q.offset, f.trace(q.edge).value(q.offset));
                markers.push(Marker {
                    edge: g.edge(q.edge).id.clone(),
                    offset: q.offset,
                    kind: kind.clone(),
                    x,
                    y,
                });
            }
        }
    }
    for m in &markers {
        panel = panel.add(marker_shape(m.x, m.y, &m.kind));
    }

    let height = (MARGIN * 2.0 + LAYOUT).max(MARGIN * 2.0 + ROW_H * g.edge_count() as f64);
    let width = PANEL_X + PANEL_W + MARGIN;
    let doc = Document::new()
        .set("viewBox", (0, 0, width, height))
        .set("width", width)
        .set("height", height)
        .add(Title::new(format!("{} eigenfunction {index}, mu = {}", g.name(), pair.mu)))
        .add(Rectangle::new().set("width", width).set("height", height).set("fill", "white"))
        .add(graph_layer)
        .add(panel);
    let svg = format!("{doc}\n");
    report.hotspots = Some(hs);
    report.markers = markers;
    Ok(Some(match cfg.format {
        Format::Report => svg,
        Format::Csv => table(
            MARKER_CSV_HEADER,
            report.markers.iter().map(|m| {
                vec![m.edge.clone(), m.offset.to_string(), m.kind.clone(), m.x.to_string(), m.y.to_string()]
            }),
        ),
    }))
}

/// The point as seen from every edge end it sits on (one copy if interior).
fn copies(g: &MetricGraph, p: &GraphPoint) -> Vec<GraphPoint> {
    let tol = g.point_tolerance();
    let at_start = p.offset <= tol;
    let at_end = p.offset >= g.length(p.edge) - tol;
    if !at_start && !at_end {
        return vec![*p];
    }
    let v = if at_start { g.edge(p.edge).from } else { g.edge(p.edge).to };
    let mut out = Vec::new();
    for (e, ed) in g.edges().iter().enumerate() {
        if ed.from == v {
            out.push(GraphPoint::new(e, 0.0));
        }
        if ed.to == v {
            out.push(GraphPoint::new(e, g.length(e)));
        }
    }
    out
}
