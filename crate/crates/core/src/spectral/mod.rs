//! Eigenvalues and eigenfunctions of the standard Laplacian.
//!
//! The secular backend finds `k > 0` where the vertex-condition matrix `M(k)`
//! is singular; eigenfunctions come out in exact per-edge sinusoid form. The
//! FEM backend is an independent P1 discretization used as a cross-check.

mod eigen;
mod fem;
pub(crate) mod quad;
mod rayleigh;
mod secular;

pub use eigen::{BoundCheck, EdgeTrace, EigenFunction, EigenPair, Residuals, SignConvention};
pub use fem::{fem_solve, FemMesh, FemSolution};
pub use rayleigh::{rayleigh_quadrature, rayleigh_quotient, TestFunction};
pub use secular::{counting_function, find_roots, nullity, secular_matrix, sigma_min, Root};


use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::tol::{self, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Backend {
    Secular,
    Fem { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: Tolerances,
    /// Golden-section refinement stops below `refine_rel · k`.
    pub refine_rel: f64,
    /// Upper end of the scan window; derived from the edge lengths when unset.
    pub k_max: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            refine_rel: tol::REFINE,
            k_max: None,
        }
    }
}

/// The first `n` eigenvalues (with multiplicity) grouped into eigenpairs.
/// The last pair may extend past index `n`.
pub fn eigenvalues(g: &MetricGraph, n: usize, backend: Backend) -> Result<Vec<EigenPair>> {
    eigenvalues_with(g, n, backend, &SolverConfig::default())
}

pub fn eigenvalues_with(g: &MetricGraph, n: usize, backend: Backend, cfg: &SolverConfig) -> Result<Vec<EigenPair>> {
    if n == 0 {
        return Err(Error::BadParameter {
            name: "n".into(),
            reason: "need at least one eigenvalue".into(),
        });
    }
    match backend {
        Backend::Secular => {
            let mut pairs = vec![constant_pair(g)];
            let mut next = 2;
            for root in find_roots(g, n, cfg)? {
                let pair = eigenbasis(g, &root, next, cfg)?;
                next += pair.multiplicity;
                pairs.push(pair);
            }
            Ok(pairs)
        }
        Backend::Fem { h } => {
            let sol = fem_solve(g, h, n)?;
            Ok(group_values(&sol.eigenvalues))
        }
    }
}

/// The first `n` eigenvalues as a flat list with repetition.
pub fn eigenvalue_list(g: &MetricGraph, n: usize, backend: Backend) -> Result<Vec<f64>> {
    match backend {
        Backend::Fem { h } => Ok(fem_solve(g, h, n)?.eigenvalues),
        Backend::Secular => {
            let mut out = vec![0.0];
            for r in find_roots(g, n, &SolverConfig::default())? {
                out.extend(std::iter::repeat(r.k * r.k).take(r.multiplicity));
            }
            out.truncate(n);
            Ok(out)
        }
    }
}

/// The eigenpair containing `μ₂`.
pub fn mu2_pair(g: &MetricGraph) -> Result<EigenPair> {
    let pairs = eigenvalues(g, 2, Backend::Secular)?;
    Ok(pairs[1].clone())
}

/// The eigenpair containing index `j` (1-based), plus the next eigenvalue
/// above it when available.
pub fn pair_at(g: &MetricGraph, j: usize) -> Result<(EigenPair, Option<f64>)> {
    if j == 0 {
        return Err(Error::IndexOutOfRange(0));
    }
    let pairs = eigenvalues(g, j + 1, Backend::Secular)?;
    let pos = pairs.iter().position(|p| p.contains_index(j)).ok_or(Error::IndexOutOfRange(j))?;
    let next = pairs.get(pos + 1).map(|p| p.mu);
    Ok((pairs[pos].clone(), next))
}

fn constant_pair(g: &MetricGraph) -> EigenPair {
    EigenPair {
        mu: 0.0,
        k: 0.0,
        multiplicity: 1,
        basis: vec![EigenFunction::constant(g, 1.0 / g.total_length().sqrt())],
        index_range: (1, 1),
    }
}

fn group_values(values: &[f64]) -> Vec<EigenPair> {
    let scale = values.last().copied().unwrap_or(1.0).abs().max(1e-300);
    let mut out: Vec<EigenPair> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let v = if v.abs() < 1e-9 * scale { 0.0 } else { v };
        match out.last_mut() {
            Some(p) if (v - p.mu).abs() <= 1e-6 * v.abs().max(1e-9 * scale) => {
                p.multiplicity += 1;
                p.index_range.1 = i + 1;
            }
            _ => out.push(EigenPair {
                mu: v,
                k: v.max(0.0).sqrt(),
                multiplicity: 1,
                basis: Vec::new(),
                index_range: (i + 1, i + 1),
            }),
        }
    }
    out
}

/// Orthonormal eigenbasis at a located root: nullspace of `M(k)`, reduced to
/// a canonical echelon form in `(A_e, B_e)` column order, then Gram–Schmidt
/// in `L²(Γ)` and the canonical sign.
pub fn eigenbasis(g: &MetricGraph, root: &Root, first_index: usize, cfg: &SolverConfig) -> Result<EigenPair> {
    let k = root.k;
    let c = root.multiplicity;
    let (sv, vecs) = secular::svd_ascending(secular_matrix(g, k));
    let smax = secular::null_scale(&sv);
    if c > sv.len() || sv[c - 1] > 1e2 * cfg.tol.null * smax {
        return Err(Error::NullspaceDimensionMismatch {
            expected: c,
            found: root.nullity,
        });
    }
    let mut rows: Vec<Vec<f64>> = vecs[..c].iter().map(|v| v.iter().copied().collect()).collect();
    echelon(&mut rows);
    let mut basis: Vec<EigenFunction> = Vec::with_capacity(c);
    for row in rows {
        let mut f = EigenFunction::from_coefficients(k, &row);
        for _ in 0..2 {
            for q in &basis {
                let p = f.dot(q, g);
                f = f.add_scaled(q, -p);
            }
        }
        basis.push(f.normalized(g).canonical_sign(g));
    }
    Ok(EigenPair {
        mu: k * k,
        k,
        multiplicity: c,
        basis,
        index_range: (first_index, first_index + c - 1),
    })
}

/// Greedy reduced row-echelon form with pivots taken in column order.
fn echelon(rows: &mut [Vec<f64>]) {
    let c = rows.len();
    let width = rows[0].len();
    let mut pivots = 0;
    for col in 0..width {
        if pivots == c {
            break;
        }
        let (best, mag) = (pivots..c)
            .map(|r| (r, rows[r][col].abs()))
            .fold((pivots, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 1e-6 {
            continue;
        }
        rows.swap(pivots, best);
        let p = rows[pivots][col];
        rows[pivots].iter_mut().for_each(|x| *x /= p);
        let pivot_row = rows[pivots].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivots {
                let f = row[col];
                row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
            }
        }
        pivots += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckRow {
    pub index: usize,
    pub secular: f64,
    pub fem: f64,
    pub rel_diff: f64,
}

/// Compares the first `n` eigenvalues of both backends. Fails when the FEM
/// value falls below the exact one (P1 is conforming, so it overestimates)
/// or exceeds it by more than `μ h²` relative.
pub fn cross_check(g: &MetricGraph, n: usize, h: f64) -> Result<Vec<CrossCheckRow>> {
    let sec = eigenvalue_list(g, n, Backend::Secular)?;
    let fem = eigenvalue_list(g, n, Backend::Fem { h })?;
    let mut rows = Vec::with_capacity(n);
    for (i, (&s, &f)) in sec.iter().zip(&fem).enumerate() {
        let rel = if s == 0.0 { f.abs() } else { (f - s) / s };
        let bound = if s == 0.0 { 1e-8 } else { s * h * h };
        if rel.abs() > bound.max(1e-9) || rel < -1e-9 {
            return Err(Error::BackendDisagreement {
                index: i + 1,
                secular: s,
                fem: f,
            });
        }
        rows.push(CrossCheckRow {
            index: i + 1,
            secular: s,
            fem: f,
            rel_diff: rel,
        });
    }
    Ok(rows)
}
