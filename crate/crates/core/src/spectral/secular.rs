//! Secular matrix, exact eigenvalue counting and root isolation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::f64::consts::PI;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::graph::{End, MetricGraph};

/// The `2E × 2E` vertex-condition matrix acting on `(A_e, B_e)` columns.
///
/// Rows per vertex: value at the first incident end minus value at each other
/// end, then the sum of outgoing derivatives divided by `k`. Rows are scaled
/// by fixed factors (`1/√2` and `1/√deg`) so entries stay `O(1)` without
/// introducing any `k` dependence.
pub fn secular_matrix(g: &MetricGraph, k: f64) -> DMatrix<f64> {
    let e_count = g.edge_count();
    let mut m = DMatrix::zeros(2 * e_count, 2 * e_count);
    let value = |e: usize, end: End| -> (f64, f64) {
        match end {
            End::Origin => (1.0, 0.0),
            End::Terminal => {
                let (s, c) = (k * g.length(e)).sin_cos();
                (c, s)
            }
        }
    };
    let flux = |e: usize, end: End| -> (f64, f64) {
        match end {
            End::Origin => (0.0, 1.0),
            End::Terminal => {
                let (s, c) = (k * g.length(e)).sin_cos();
                (s, -c)
            }
        }
    };
    let mut row = 0;
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    for v in 0..g.vertex_count() {
        let inc = g.incidence(v);
        let first = inc[0];
        let (a0, b0) = value(first.edge, first.end);
        for ee in &inc[1..] {
            let (a, b) = value(ee.edge, ee.end);
            m[(row, 2 * first.edge)] += r2 * a0;
            m[(row, 2 * first.edge + 1)] += r2 * b0;
            m[(row, 2 * ee.edge)] -= r2 * a;
            m[(row, 2 * ee.edge + 1)] -= r2 * b;
            row += 1;
        }
        let w = 1.0 / (inc.len() as f64).sqrt();
        for ee in inc {
            let (a, b) = flux(ee.edge, ee.end);
            m[(row, 2 * ee.edge)] += w * a;
            m[(row, 2 * ee.edge + 1)] += w * b;
        }
        row += 1;
    }
    debug_assert_eq!(row, 2 * e_count);
    m
}

/// Singular values (ascending) and the matching right singular vectors.
pub(crate) fn svd_ascending(m: DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].partial_cmp(&svd.singular_values[j]).unwrap());
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = order.iter().map(|&i| vt.row(i).transpose()).collect();
    (values, vectors)
}

fn singular_values(g: &MetricGraph, k: f64) -> Vec<f64> {
    let mut sv: Vec<f64> = secular_matrix(g, k).singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sv
}

pub fn sigma_min(g: &MetricGraph, k: f64) -> f64 {
    singular_values(g, k)[0]
}

/// Reference scale for null tests. Entries of `M(k)` are `O(1)`, so the scale
/// never drops below one even when `M(k)` vanishes entirely (a lone loop).
pub(crate) fn null_scale(sv: &[f64]) -> f64 {
    sv.last().copied().unwrap_or(0.0).max(1.0)
}

/// Number of singular values below `null_tol · max(σ_max, 1)`.
pub fn nullity(g: &MetricGraph, k: f64, null_tol: f64) -> usize {
    let sv = singular_values(g, k);
    let cut = null_tol * null_scale(&sv);
    sv.iter().filter(|&&s| s < cut).count()
}

/// `#{j : μ_j < k²}`, counted with multiplicity.
///
/// Edgewise Dirichlet eigenvalues below `k²` plus the number of negative
/// eigenvalues of the vertex Dirichlet-to-Neumann form. Exact away from the
/// edge Dirichlet poles; `k` is nudged off a pole when it lands on one.
pub fn counting_function(g: &MetricGraph, k: f64) -> usize {
    let mut k = k;
    while g.lengths().iter().any(|&l| (k * l).sin().abs() < 1e-12) {
        k *= 1.0 + 1e-11;
    }
    let n = g.vertex_count();
    let mut lam = DMatrix::<f64>::zeros(n, n);
    let mut dirichlet = 0usize;
    for (e, edge) in g.edges().iter().enumerate() {
        let theta = k * g.length(e);
        dirichlet += (theta / PI).floor() as usize;
        let t = (0.5 * theta).tan();
        if edge.is_loop() {
            lam[(edge.from, edge.from)] += -2.0 * k * t;
        } else {
            let (alpha, beta) = (-k * t, k / t);
            let (a, b) = (edge.from, edge.to);
            lam[(a, a)] += 0.5 * (alpha + beta);
            lam[(b, b)] += 0.5 * (alpha + beta);
            lam[(a, b)] += 0.5 * (alpha - beta);
            lam[(b, a)] += 0.5 * (alpha - beta);
        }
    }
    let negative = SymmetricEigen::new(lam).eigenvalues.iter().filter(|&&x| x < 0.0).count();
    dirichlet + negative
}

/// A located root of the secular equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub k: f64,
    /// From the counting function.
    pub multiplicity: usize,
    /// Singular values of `M(k)` below the null tolerance.
    pub nullity: usize,
    pub sigma_min: f64,
}

/// Width below which a counted bracket is handed to golden-section refinement.
const ISOLATION_REL: f64 = 1e-7;

/// Positive roots in increasing order until, together with `μ₁ = 0`, at least
/// `n` eigenvalues are covered.
pub fn find_roots(g: &MetricGraph, n: usize, cfg: &SolverConfig) -> Result<Vec<Root>> {
    let total = g.total_length();
    let edges = g.edge_count() as f64;
    let dk = (PI / (4.0 * g.max_edge_length())).min(PI / (4.0 * total / edges));
    // μ₂ ≥ π²/L², so only the constant lies below this point
    let k_start = 0.5 * PI / total;
    let k_cap = cfg
        .k_max
        .unwrap_or_else(|| 4.0 * PI * (n as f64 + 1.0) / g.max_edge_length());
    let mut roots = Vec::new();
    let mut lo = k_start;
    let mut n_lo = counting_function(g, lo);
    let mut i = 0usize;
    while n_lo < n {
        let hi = k_start + (i as f64 + 0.236_067_977_5) * dk;
        i += 1;
        if hi > k_cap {
            return Err(Error::ScanExhausted {
                found: n_lo,
                requested: n,
                k_max: k_cap,
            });
        }
        let n_hi = counting_function(g, hi);
        if n_hi > n_lo {
            isolate(g, lo, hi, n_lo, n_hi, cfg, &mut roots);
        }
        lo = hi;
        n_lo = n_hi;
    }
    Ok(merge_close(roots))
}

fn isolate(g: &MetricGraph, lo: f64, hi: f64, n_lo: usize, n_hi: usize, cfg: &SolverConfig, out: &mut Vec<Root>) {
    if n_hi <= n_lo {
        return;
    }
    if hi - lo <= ISOLATION_REL * hi {
        let k = golden_min(|k| sigma_min(g, k), lo, hi, cfg.refine_rel * hi);
        let sv = singular_values(g, k);
        let cut = cfg.tol.null * null_scale(&sv);
        out.push(Root {
            k,
            multiplicity: n_hi - n_lo,
            nullity: sv.iter().filter(|&&s| s < cut).count(),
            sigma_min: sv[0],
        });
        return;
    }
    let mid = 0.5 * (lo + hi);
    let n_mid = counting_function(g, mid).clamp(n_lo, n_hi);
    isolate(g, lo, mid, n_lo, n_mid, cfg, out);
    isolate(g, mid, hi, n_mid, n_hi, cfg, out);
}

/// Roots split across a bisection point land on the same `k`.
fn merge_close(roots: Vec<Root>) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(prev) if (r.k - prev.k).abs() <= 1e-9 * r.k => {
                prev.multiplicity += r.multiplicity;
                if r.sigma_min < prev.sigma_min {
                    prev.k = r.k;
                    prev.sigma_min = r.sigma_min;
                }
                prev.nullity = prev.nullity.max(r.nullity);
            }
            _ => out.push(r),
        }
    }
    out
}

pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn path() -> MetricGraph {
        GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap()
    }

    fn unit_loop() -> MetricGraph {
        GraphBuilder::new("c").vertex("v").edge("e", "v", "v", 1.0).build().unwrap()
    }

    #[test]
    fn path_matrix_nullity() {
        let g = path();
        let m = secular_matrix(&g, PI);
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(nullity(&g, PI, 1e-8), 1);
        assert_eq!(nullity(&g, PI / 2.0, 1e-8), 0);
    }

    #[test]
    fn loop_matrix_nullity() {
        assert_eq!(nullity(&unit_loop(), 2.0 * PI, 1e-8), 2);
    }

    #[test]
    fn counting_on_path_and_loop() {
        let g = path();
        assert_eq!(counting_function(&g, 0.5), 1);
        assert_eq!(counting_function(&g, PI + 0.1), 2);
        assert_eq!(counting_function(&g, 2.0 * PI + 0.1), 3);
        let c = unit_loop();
        assert_eq!(counting_function(&c, 2.0 * PI - 0.1), 1);
        assert_eq!(counting_function(&c, 2.0 * PI + 0.1), 3);
        assert_eq!(counting_function(&c, 4.0 * PI + 0.1), 5);
    }
}
