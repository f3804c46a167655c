//! The close-hot-spots tree: a unit path through `v0` with `m` short leaves
//! split off symmetrically at distance `ε` on both sides of `v0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MetricGraph};
use crate::spectral::{EdgeTrace, EigenFunction, SignConvention};

fn check(eps: f64, m: usize) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::BadParameter {
            name: "eps".into(),
            reason: format!("need 0 < eps < 1/2, got {eps}"),
        });
    }
    if m == 0 {
        return Err(Error::BadParameter {
            name: "m".into(),
            reason: "need m >= 1".into(),
        });
    }
    Ok(())
}

/// `arctan(A/(mF))/π` with `A = cos(πε)`, `F = sin(πε)`.
pub fn krpamm_leaf_length(eps: f64, m: usize) -> f64 {
    ((PI * (0.5 - eps)).tan() / m as f64).atan() / PI
}

/// Distance between the maximum and minimum sets of the explicit eigenfunction.
pub fn krpamm_ratio(eps: f64, m: usize) -> f64 {
    2.0 * eps + 2.0 * krpamm_leaf_length(eps, m)
}

/// Edges: `e1` (`v1→v0`), `e3` (`v0→v3`), `e4` (`v0→x+`), `e2` (`v0→x-`),
/// then the leaves `p1..pm` at `x+` and `q1..qm` at `x-`.
pub fn krpamm_tree(eps: f64, m: usize) -> Result<MetricGraph> {
    krpamm_lengthened(eps, m, 0.0)
}

/// [`krpamm_tree`] with every leaf lengthened by `delta`, which pushes `μ₂`
/// below `π²` and makes it simple, supported away from `e1` and `e3`.
pub fn krpamm_lengthened(eps: f64, m: usize, delta: f64) -> Result<MetricGraph> {
    check(eps, m)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::BadParameter {
            name: "delta".into(),
            reason: format!("need delta >= 0, got {delta}"),
        });
    }
    let leaf = krpamm_leaf_length(eps, m) + delta;
    let mut b = GraphBuilder::new("krpamm_tree")
        .vertices(["v1", "v0", "v3", "x+", "x-"])
        .edge("e1", "v1", "v0", 0.5)
        .edge("e3", "v0", "v3", 0.5)
        .edge("e4", "v0", "x+", eps)
        .edge("e2", "v0", "x-", eps);
    for j in 1..=m {
        b = b.vertex(format!("p{j}")).edge(format!("ep{j}"), "x+", format!("p{j}"), leaf);
    }
    for j in 1..=m {
        b = b.vertex(format!("q{j}")).edge(format!("eq{j}"), "x-", format!("q{j}"), leaf);
    }
    b.build()
}

/// The explicit `π²` eigenfunction: zero on `e1, e3`, `±sin(πt)` on the
/// central edges and `±(F cos + (A/m) sin)` on the leaves, normalized.
pub fn krpamm_eigenfunction(g: &MetricGraph, eps: f64, m: usize) -> Result<EigenFunction> {
    check(eps, m)?;
    let (a, f) = ((PI * eps).cos(), (PI * eps).sin());
    let slope = a / m as f64;
    let mut traces = vec![
        EdgeTrace::new(0, 0.0, 0.0, PI),
        EdgeTrace::new(1, 0.0, 0.0, PI),
        EdgeTrace::new(2, 0.0, 1.0, PI),
        EdgeTrace::new(3, 0.0, -1.0, PI),
    ];
    for j in 0..m {
        traces.push(EdgeTrace::new(4 + j, f, slope, PI));
    }
    for j in 0..m {
        traces.push(EdgeTrace::new(4 + m + j, -f, -slope, PI));
    }
    let ef = EigenFunction {
        k: PI,
        traces,
        norm: f64::NAN,
        sign: SignConvention::Unnormalized,
    };
    let mut out = ef.normalized(g);
    out.sign = SignConvention::Aligned;
    Ok(out)
}
