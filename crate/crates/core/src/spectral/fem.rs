//! Piecewise-linear finite elements on the graph.
//!
//! Unknowns: one per vertex (shared by incident edges, so continuity is built
//! in and Kirchhoff is natural), then the interior nodes of each edge in edge
//! order. The lowest eigenpairs of `K x = λ M x` come from shift-invert
//! subspace iteration; the shifted operator is solved by eliminating edge
//! interiors (tridiagonal) and factoring the small vertex Schur complement.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct FemMesh {
    /// Elements per edge.
    pub intervals: Vec<usize>,
    /// Index of the first interior node of each edge.
    pub offsets: Vec<usize>,
    pub vertex_count: usize,
    pub unknowns: usize,
}

impl FemMesh {
    pub fn new(g: &MetricGraph, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::BadParameter {
                name: "h".into(),
                reason: format!("mesh size must be positive, got {h}"),
            });
        }
        let mut intervals = Vec::with_capacity(g.edge_count());
        let mut offsets = Vec::with_capacity(g.edge_count());
        let mut next = g.vertex_count();
        for e in 0..g.edge_count() {
            let n = (g.length(e) / h).ceil() as usize;
            if n < 2 {
                return Err(Error::MeshTooCoarse {
                    edge: g.edge(e).id.clone(),
                    intervals: n,
                });
            }
            intervals.push(n);
            offsets.push(next);
            next += n - 1;
        }
        Ok(Self {
            intervals,
            offsets,
            vertex_count: g.vertex_count(),
            unknowns: next,
        })
    }

    /// Global node index of node `j ∈ 0..=n_e` along edge `e`.
    pub fn node(&self, g: &MetricGraph, e: usize, j: usize) -> usize {
        let n = self.intervals[e];
        if j == 0 {
            g.edge(e).from
        } else if j == n {
            g.edge(e).to
        } else {
            self.offsets[e] + j - 1
        }
    }

    /// Nodal values along edge `e` from origin to terminal.
    pub fn edge_values(&self, g: &MetricGraph, x: &[f64], e: usize) -> Vec<f64> {
        (0..=self.intervals[e]).map(|j| x[self.node(g, e, j)]).collect()
    }
}

/// `y = a·K x + b·M x`.
fn apply(g: &MetricGraph, mesh: &FemMesh, a: f64, b: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    for e in 0..g.edge_count() {
        let n = mesh.intervals[e];
        let h = g.length(e) / n as f64;
        let (kd, md, mo) = (a / h, b * h / 3.0, b * h / 6.0);
        for j in 0..n {
            let (p, q) = (mesh.node(g, e, j), mesh.node(g, e, j + 1));
            let (xp, xq) = (x[p], x[q]);
            y[p] += kd * (xp - xq) + md * xp + mo * xq;
            y[q] += kd * (xq - xp) + md * xq + mo * xp;
        }
    }
}

/// Factorized `K + σM`.
struct ShiftedSolver {
    /// Per edge: Thomas elimination factors `(c', 1/denominator)` and the coupling entry.
    edges: Vec<(Vec<f64>, Vec<f64>, f64)>,
    schur: Cholesky<f64, nalgebra::Dyn>,
}

impl ShiftedSolver {
    fn new(g: &MetricGraph, mesh: &FemMesh, sigma: f64) -> Result<Self> {
        let nv = g.vertex_count();
        let mut schur = DMatrix::<f64>::zeros(nv, nv);
        let mut edges = Vec::with_capacity(g.edge_count());
        for e in 0..g.edge_count() {
            let n = mesh.intervals[e];
            let h = g.length(e) / n as f64;
            let diag = 2.0 / h + 2.0 * sigma * h / 3.0;
            let off = -1.0 / h + sigma * h / 6.0;
            let end_diag = 1.0 / h + sigma * h / 3.0;
            let m = n - 1;
            let mut cp = vec![0.0; m];
            let mut inv = vec![0.0; m];
            for i in 0..m {
                let denom = diag - if i > 0 { off * cp[i - 1] } else { 0.0 };
                inv[i] = 1.0 / denom;
                cp[i] = off * inv[i];
            }
            let (a, b) = (g.edge(e).from, g.edge(e).to);
            schur[(a, a)] += end_diag;
            schur[(b, b)] += end_diag;
            let first = thomas(&cp, &inv, off, &unit(m, 0));
            let last = thomas(&cp, &inv, off, &unit(m, m - 1));
            let o2 = off * off;
            schur[(a, a)] -= o2 * first[0];
            schur[(b, b)] -= o2 * last[m - 1];
            schur[(a, b)] -= o2 * first[m - 1];
            schur[(b, a)] -= o2 * last[0];
            edges.push((cp, inv, off));
        }
        let schur = Cholesky::new(schur).ok_or_else(|| Error::Factorization("vertex Schur complement".into()))?;
        Ok(Self { edges, schur })
    }

    fn solve(&self, g: &MetricGraph, mesh: &FemMesh, rhs: &[f64]) -> Vec<f64> {
        let nv = g.vertex_count();
        let mut r = nalgebra::DVector::from_column_slice(&rhs[..nv]);
        let mut interior: Vec<Vec<f64>> = Vec::with_capacity(self.edges.len());
        for (e, (cp, inv, off)) in self.edges.iter().enumerate() {
            let m = mesh.intervals[e] - 1;
            let o = mesh.offsets[e];
            let y = thomas(cp, inv, *off, &rhs[o..o + m]);
            r[g.edge(e).from] -= off * y[0];
            r[g.edge(e).to] -= off * y[m - 1];
            interior.push(rhs[o..o + m].to_vec());
        }
        let xv = self.schur.solve(&r);
        let mut x = vec![0.0; mesh.unknowns];
        x[..nv].copy_from_slice(xv.as_slice());
        for (e, (cp, inv, off)) in self.edges.iter().enumerate() {
            let m = mesh.intervals[e] - 1;
            let o = mesh.offsets[e];
            let b = &mut interior[e];
            b[0] -= off * xv[g.edge(e).from];
            b[m - 1] -= off * xv[g.edge(e).to];
            let y = thomas(cp, inv, *off, b);
            x[o..o + m].copy_from_slice(&y);
        }
        x
    }
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

/// Solves the constant-coefficient symmetric tridiagonal system from its
/// precomputed elimination factors.
fn thomas(cp: &[f64], inv: &[f64], off: f64, d: &[f64]) -> Vec<f64> {
    let m = d.len();
    let mut y = vec![0.0; m];
    for i in 0..m {
        let prev = if i > 0 { off * y[i - 1] } else { 0.0 };
        y[i] = (d[i] - prev) * inv[i];
    }
    for i in (0..m.saturating_sub(1)).rev() {
        y[i] -= cp[i] * y[i + 1];
    }
    y
}

#[derive(Debug, Clone)]
pub struct FemSolution {
    pub mesh: FemMesh,
    pub eigenvalues: Vec<f64>,
    /// `M`-orthonormal nodal vectors, one per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
}

/// Lowest `n` eigenvalues of the P1 discretization with mesh size `h`.
pub fn fem_solve(g: &MetricGraph, h: f64, n: usize) -> Result<FemSolution> {
    let mesh = FemMesh::new(g, h)?;
    let dim = mesh.unknowns;
    let p = (n + n.max(8)).min(dim);
    let sigma = 0.5 * (std::f64::consts::PI / g.total_length()).powi(2);
    let solver = ShiftedSolver::new(g, &mesh, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect()).collect();
    let mut mx = vec![0.0; dim];
    let mut prev: Vec<f64> = vec![f64::INFINITY; n];
    let mut ritz = Vec::new();
    let mut iterations = 0;
    for it in 0..2000 {
        iterations = it + 1;
        // X ← (K + σM)⁻¹ M X
        for col in x.iter_mut() {
            apply(g, &mesh, 0.0, 1.0, col, &mut mx);
            *col = solver.solve(g, &mesh, &mx);
        }
        m_orthonormalize(g, &mesh, &mut x);
        m_orthonormalize(g, &mesh, &mut x);
        let (vals, rotated) = rayleigh_ritz(g, &mesh, &x)?;
        x = rotated;
        ritz = vals;
        let scale = ritz[n - 1].abs().max(1e-300);
        let change = ritz[..n]
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs() / scale)
            .fold(0.0, f64::max);
        prev = ritz[..n].to_vec();
        if change < 1e-13 && it > 2 {
            break;
        }
    }
    x.truncate(n);
    Ok(FemSolution {
        mesh,
        eigenvalues: ritz[..n].to_vec(),
        vectors: x,
        iterations,
    })
}

fn m_orthonormalize(g: &MetricGraph, mesh: &FemMesh, x: &mut [Vec<f64>]) {
    let dim = mesh.unknowns;
    let mut mq: Vec<Vec<f64>> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        for (j, mqj) in mq.iter().enumerate() {
            let c: f64 = x[i].iter().zip(mqj).map(|(a, b)| a * b).sum();
            let (head, tail) = x.split_at_mut(i);
            for (t, s) in tail[0].iter_mut().zip(&head[j]) {
                *t -= c * s;
            }
        }
        let mut m = vec![0.0; dim];
        apply(g, mesh, 0.0, 1.0, &x[i], &mut m);
        let nrm = x[i].iter().zip(&m).map(|(a, b)| a * b).sum::<f64>().sqrt();
        x[i].iter_mut().for_each(|v| *v /= nrm);
        m.iter_mut().for_each(|v| *v /= nrm);
        mq.push(m);
    }
}

fn rayleigh_ritz(g: &MetricGraph, mesh: &FemMesh, x: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = x.len();
    let dim = mesh.unknowns;
    let mut kx = vec![vec![0.0; dim]; p];
    let mut mx = vec![vec![0.0; dim]; p];
    for i in 0..p {
        apply(g, mesh, 1.0, 0.0, &x[i], &mut kx[i]);
        apply(g, mesh, 0.0, 1.0, &x[i], &mut mx[i]);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let kr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&x[i], &kx[j]) + dot(&x[j], &kx[i])));
    let mr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&x[i], &mx[j]) + dot(&x[j], &mx[i])));
    let chol = Cholesky::new(mr).ok_or_else(|| Error::Factorization("Ritz mass matrix".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().expect("triangular factor invertible");
    let c = &linv * kr * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let y = linv.transpose() * &eig.eigenvectors;
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let rotated = order
        .iter()
        .map(|&j| {
            let mut col = vec![0.0; dim];
            for (i, xi) in x.iter().enumerate() {
                let w = y[(i, j)];
                for (c, v) in col.iter_mut().zip(xi) {
                    *c += w * v;
                }
            }
            col
        })
        .collect();
    Ok((vals, rotated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use std::f64::consts::PI;

    #[test]
    fn path_second_eigenvalue() {
        let g = GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap();
        let sol = fem_solve(&g, 1e-3, 3).unwrap();
        assert!(sol.eigenvalues[0].abs() < 1e-9);
        assert!((sol.eigenvalues[1] - PI * PI).abs() / (PI * PI) < 1e-4);
        assert!((sol.eigenvalues[2] - 4.0 * PI * PI).abs() / (4.0 * PI * PI) < 1e-4);
    }

    #[test]
    fn loop_pair() {
        let g = GraphBuilder::new("c").vertex("v").edge("e", "v", "v", 1.0).build().unwrap();
        let sol = fem_solve(&g, 1e-3, 3).unwrap();
        let t = 4.0 * PI * PI;
        assert!((sol.eigenvalues[1] - t).abs() / t < 1e-4);
        assert!((sol.eigenvalues[2] - t).abs() / t < 1e-4);
    }

    #[test]
    fn too_coarse() {
        let g = GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap();
        assert!(matches!(fem_solve(&g, 1.5, 2), Err(Error::MeshTooCoarse { .. })));
    }
}
