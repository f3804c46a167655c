use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{attach_pendant, split_points, MetricGraph};
use crate::hotspots::extrema_single;
use crate::spectral::{mu2_pair, pair_at};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreatedVertex {
    pub vertex: String,
    /// Number of edge ends at the vertex before the pendant is attached.
    pub degree: usize,
    pub value: f64,
    pub eta: f64,
    pub leaf: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Straightening {
    pub graph: MetricGraph,
    pub treated: Vec<TreatedVertex>,
    pub mu_before: f64,
    pub mu_after: f64,
    pub multiplicity_after: usize,
    /// `μ₃ − μ₂` on the new graph.
    pub gap_after: Option<f64>,
    /// Every global extremum of the new `μ₂` eigenfunction is a leaf.
    pub boundary_only: bool,
    pub extremum_count: usize,
}

impl Straightening {
    pub fn mu_rel_change(&self) -> f64 {
        (self.mu_after - self.mu_before).abs() / self.mu_before
    }

    /// `μ₂` kept within `1e-9` relative, still simple, extrema on the boundary.
    pub fn preserved(&self) -> bool {
        self.mu_rel_change() <= 1e-9 && self.multiplicity_after == 1 && self.boundary_only
    }
}

/// Pendant length putting the crest of `F cos(kx₀) cos(kx) + dF sin(kx₀) sin(kx)`
/// at its free end: the first positive root of `tan(kη) = d tan(kx₀)`.
pub fn pendant_length(k: f64, degree: usize, x0: f64) -> f64 {
    (degree as f64 * (k * x0).tan()).atan() / k
}

/// Moves every global extremum of the `μ₂` eigenfunction that is not a leaf
/// onto a new pendant: edges at the extremum are shortened by `x0` and a
/// pendant of the matching length is attached there.
pub fn straighten_maxima(g: &MetricGraph, x0: f64) -> Result<Straightening> {
    let pair = mu2_pair(g)?;
    if !pair.is_simple() {
        return Err(Error::NotSimple {
            index: 2,
            multiplicity: pair.multiplicity,
        });
    }
    let k = pair.k;
    if !(x0 > 0.0 && k * x0 < FRAC_PI_2) {
        return Err(Error::BadParameter {
            name: "x0".into(),
            reason: format!("need 0 < x0 < π/(2k) = {}", FRAC_PI_2 / k),
        });
    }
    let f = &pair.basis[0];
    let ex = extrema_single(g, f)?;
    let inner: Vec<_> = ex
        .global
        .iter()
        .filter(|p| p.vertex.map_or(true, |v| g.degree(v) > 1))
        .collect();
    let before = pair.mu;
    if inner.is_empty() {
        return Ok(Straightening {
            graph: g.clone(),
            treated: Vec::new(),
            mu_before: before,
            mu_after: before,
            multiplicity_after: 1,
            gap_after: pair_at(g, 2)?.1.map(|m| m - before),
            boundary_only: true,
            extremum_count: ex.global.len(),
        });
    }
    for p in &inner {
        if p.value.abs() <= 1e-12 * f.max_amplitude() {
            return Err(Error::ExtremumAtVertexValueZero(g.describe_point(&p.location)));
        }
    }

    let points: Vec<_> = inner.iter().map(|p| p.location).collect();
    let (h, vs) = split_points(g, &points)?;
    let mut lengths = h.lengths().to_vec();
    for &v in &vs {
        for ee in h.incidence(v) {
            lengths[ee.edge] -= x0;
        }
    }
    for (e, &l) in lengths.iter().enumerate() {
        if l <= 0.0 {
            return Err(Error::ShorteningTooLarge {
                shortening: h.length(e) - l,
                length: h.length(e),
            });
        }
    }
    let mut out = h.with_lengths(lengths)?;
    let mut treated = Vec::new();
    for (&v, p) in vs.iter().zip(&inner) {
        let id = h.vertex_id(v).to_string();
        let degree = h.degree(v);
        let eta = pendant_length(k, degree, x0);
        let at = out.vertex_index(&id).expect("vertex kept");
        out = attach_pendant(&out, &out.vertex_point(at), eta)?;
        treated.push(TreatedVertex {
            vertex: id,
            degree,
            value: p.value,
            eta,
            leaf: out.vertex_id(out.vertex_count() - 1).to_string(),
        });
    }
    let out = out.with_name(format!("{}-straightened", g.name()));

    let (after, next) = pair_at(&out, 2)?;
    let ex2 = extrema_single(&out, &after.basis[0])?;
    let boundary_only = ex2.global.iter().all(|p| p.vertex.is_some_and(|v| out.degree(v) == 1));
    Ok(Straightening {
        mu_after: after.mu,
        multiplicity_after: after.multiplicity,
        gap_after: next.map(|m| m - after.mu),
        boundary_only,
        extremum_count: ex2.global.len(),
        graph: out,
        treated,
        mu_before: before,
    })
}
