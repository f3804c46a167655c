//! Constructors for the named graph families.
//!
//! Stars, pumpkins and flowers orient every edge away from the central
//! vertex; paths run left to right.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MetricGraph};

fn bad(name: &str, reason: impl Into<String>) -> Error {
    Error::BadParameter {
        name: name.into(),
        reason: reason.into(),
    }
}

fn nonempty(name: &str, lengths: &[f64]) -> Result<()> {
    if lengths.is_empty() {
        return Err(bad(name, "need at least one length"));
    }
    Ok(())
}

/// Vertices `v0..vn` joined left to right by edges `e1..en`.
pub fn path(lengths: &[f64]) -> Result<MetricGraph> {
    nonempty("lengths", lengths)?;
    let mut b = GraphBuilder::new("path").vertices((0..=lengths.len()).map(|i| format!("v{i}")));
    for (i, &l) in lengths.iter().enumerate() {
        b = b.edge(format!("e{}", i + 1), format!("v{i}"), format!("v{}", i + 1), l);
    }
    b.build()
}

/// A single loop with one marker vertex.
pub fn cycle(length: f64) -> Result<MetricGraph> {
    GraphBuilder::new("cycle").vertex("v0").edge("e1", "v0", "v0", length).build()
}

/// Two vertices joined by parallel edges.
pub fn pumpkin(lengths: &[f64]) -> Result<MetricGraph> {
    nonempty("lengths", lengths)?;
    let mut b = GraphBuilder::new("pumpkin").vertices(["v1", "v2"]);
    for (i, &l) in lengths.iter().enumerate() {
        b = b.edge(format!("e{}", i + 1), "v1", "v2", l);
    }
    b.build()
}

/// Central vertex `v0` with leaves `v1..vE`.
pub fn star(lengths: &[f64]) -> Result<MetricGraph> {
    nonempty("lengths", lengths)?;
    let mut b = GraphBuilder::new("star").vertex("v0");
    for (i, &l) in lengths.iter().enumerate() {
        b = b.vertex(format!("v{}", i + 1)).edge(format!("e{}", i + 1), "v0", format!("v{}", i + 1), l);
    }
    b.build()
}

/// Loops (petals) at a single vertex.
pub fn flower(lengths: &[f64]) -> Result<MetricGraph> {
    nonempty("lengths", lengths)?;
    let mut b = GraphBuilder::new("flower").vertex("v0");
    for (i, &l) in lengths.iter().enumerate() {
        b = b.edge(format!("p{}", i + 1), "v0", "v0", l);
    }
    b.build()
}

/// Complete graph on `v` vertices with all edges of length `length`; edge
/// `e{i}{j}` runs from `v{i}` to `v{j}` with `i < j`.
pub fn complete(v: usize, length: f64) -> Result<MetricGraph> {
    if v < 2 {
        return Err(bad("V", "need at least two vertices"));
    }
    let mut b = GraphBuilder::new("complete").vertices((0..v).map(|i| format!("v{i}")));
    for i in 0..v {
        for j in (i + 1)..v {
            b = b.edge(format!("e{i}{j}"), format!("v{i}"), format!("v{j}"), length);
        }
    }
    b.build()
}

/// Loop at `v0` plus a pendant edge to the leaf `v1`.
pub fn lasso(loop_length: f64, tail: f64) -> Result<MetricGraph> {
    GraphBuilder::new("lasso")
        .vertices(["v0", "v1"])
        .edge("loop", "v0", "v0", loop_length)
        .edge("tail", "v0", "v1", tail)
        .build()
}

pub fn figure8(first: f64, second: f64) -> Result<MetricGraph> {
    Ok(flower(&[first, second])?.with_name("figure8"))
}

/// Two loops of length `π` at `v0` and two pendant edges of length `eps`.
pub fn perturbed_figure8(eps: f64) -> Result<MetricGraph> {
    GraphBuilder::new("perturbed_figure8")
        .vertices(["v0", "v1", "v2"])
        .edge("a", "v0", "v0", PI)
        .edge("b", "v0", "v0", PI)
        .edge("p1", "v0", "v1", eps)
        .edge("p2", "v0", "v2", eps)
        .build()
}

/// The interval `[0, length]` with a loop of length `loop_length` at each end.
pub fn loop_dumbbell(length: f64, loop_length: f64) -> Result<MetricGraph> {
    GraphBuilder::new("loop_dumbbell")
        .vertices(["v1", "v2"])
        .edge("l1", "v1", "v1", loop_length)
        .edge("bar", "v1", "v2", length)
        .edge("l2", "v2", "v2", loop_length)
        .build()
}

/// Star with one unit edge and `n − 1` edges of length `eps`.
pub fn n_star_long_short(n: usize, eps: f64) -> Result<MetricGraph> {
    if n < 2 {
        return Err(bad("n", "need n >= 2"));
    }
    let mut lengths = vec![1.0];
    lengths.extend(std::iter::repeat(eps).take(n - 1));
    Ok(star(&lengths)?.with_name("n_star_long_short"))
}

/// A pumpkin between `a` and `b` with a stick at each end: `s1` from `a` to
/// the leaf `c`, the pumpkin edges `p1..`, then `s2` from `b` to the leaf `d`.
pub fn pumpkin_on_stick(sticks: [f64; 2], pumpkin: &[f64]) -> Result<MetricGraph> {
    nonempty("pumpkin", pumpkin)?;
    let mut b = GraphBuilder::new("pumpkin_on_stick")
        .vertices(["a", "b", "c", "d"])
        .edge("s1", "a", "c", sticks[0]);
    for (i, &l) in pumpkin.iter().enumerate() {
        b = b.edge(format!("p{}", i + 1), "a", "b", l);
    }
    b.edge("s2", "b", "d", sticks[1]).build()
}

/// Two thick equilateral pumpkins `a–b` and `c–d` joined by a short bridge
/// `b–c` and closed up by a long arc `a–d`.
pub fn pumpkin_necklace(thickness: usize, pumpkin_length: f64, gap: f64, arc: f64) -> Result<MetricGraph> {
    if thickness < 1 {
        return Err(bad("thickness", "need at least one edge per pumpkin"));
    }
    let mut b = GraphBuilder::new("pumpkin_necklace").vertices(["a", "b", "c", "d"]);
    for i in 0..thickness {
        b = b.edge(format!("l{}", i + 1), "a", "b", pumpkin_length);
    }
    b = b.edge("gap", "b", "c", gap);
    for i in 0..thickness {
        b = b.edge(format!("r{}", i + 1), "c", "d", pumpkin_length);
    }
    b.edge("arc", "d", "a", arc).build()
}

/// The tree with a long edge `e−` at `v0`, an edge `e3` to `v3`, and an edge
/// `e0` to an inner vertex `w` carrying the leaves `v1` (`e1`) and `v2` (`e2`).
/// Lengths in the order `e−, e0, e1, e2, e3`.
pub fn fig_m3(lengths: [f64; 5]) -> Result<MetricGraph> {
    let [lm, l0, l1, l2, l3] = lengths;
    GraphBuilder::new("fig_m3")
        .vertices(["v-", "v0", "w", "v1", "v2", "v3"])
        .edge("e-", "v-", "v0", lm)
        .edge("e0", "v0", "w", l0)
        .edge("e1", "w", "v1", l1)
        .edge("e2", "w", "v2", l2)
        .edge("e3", "v0", "v3", l3)
        .build()
}
