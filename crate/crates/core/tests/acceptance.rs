//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every eigenfunction produced along the way is checked against the
//! derivative bounds `sup|ψ| ≤ √(μL)` and `sup|ψ'| ≤ μL·sup|ψ|`; a violation
//! aborts the run.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use qghot_core::catalog::{self, LimitFamily, PlacementMode};
use qghot_core::graph::{diameter, GraphPoint};
use qghot_core::hotspots::{
    combine, complete_apex_eigenfunction, extrema_distance_ratio, extrema_distance_ratio_single, extrema_single,
    hotspot_sets, star_diameter_check, verify_location, verify_no_disconnect, verify_tree_boundary, ExtremumKind,
    HotspotReport, Sampling, Shape,
};
use qghot_core::spectral::{
    eigenvalues, fem_solve, mu2_pair, pair_at, Backend, EdgeTrace, EigenFunction, EigenPair, SignConvention,
};
use qghot_core::MetricGraph;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

static AUDITED: AtomicUsize = AtomicUsize::new(0);

fn audit_fn(g: &MetricGraph, f: &EigenFunction) {
    let b = f.derivative_bounds(g);
    assert!(
        b.holds,
        "derivative bounds violated on `{}` at μ = {}: sup {} vs {}, sup' {} vs {}",
        g.name(),
        f.mu(),
        b.sup,
        b.value_bound,
        b.sup_derivative,
        b.derivative_bound
    );
    AUDITED.fetch_add(1, Ordering::Relaxed);
}

fn audit(g: &MetricGraph, p: &EigenPair) {
    p.basis.iter().for_each(|f| audit_fn(g, f));
}

fn spectrum(g: &MetricGraph, n: usize) -> Result<Vec<EigenPair>, String> {
    let pairs = eigenvalues(g, n, Backend::Secular).map_err(fail)?;
    pairs.iter().for_each(|p| audit(g, p));
    Ok(pairs)
}

fn mu2(g: &MetricGraph) -> Result<EigenPair, String> {
    let p = mu2_pair(g).map_err(fail)?;
    audit(g, &p);
    Ok(p)
}

fn report(g: &MetricGraph) -> Result<(EigenPair, HotspotReport), String> {
    let p = mu2(g)?;
    let r = hotspot_sets(g, &p, &Sampling::default()).map_err(fail)?;
    Ok((p, r))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Eigenvalues `μ_1 ≤ μ_2 ≤ …` with repetition.
fn flat(pairs: &[EigenPair]) -> Vec<f64> {
    pairs.iter().flat_map(|p| std::iter::repeat(p.mu).take(p.multiplicity)).collect()
}

fn canonical_spectra() -> Outcome {
    let h = 1e-3;
    let fem = |g: &MetricGraph, n: usize| fem_solve(g, h, n).map(|s| s.eigenvalues).map_err(fail);
    let mut checked = 0;

    let path = catalog::path(&[1.0]).map_err(fail)?;
    let p = mu2(&path)?;
    ensure!(rel(p.mu, PI * PI) <= 1e-9 && p.multiplicity == 1, "path μ₂ = {}", p.mu);
    let f = fem(&path, 2)?;
    ensure!(rel(f[1], PI * PI) <= 1e-4, "path FEM μ₂ = {}", f[1]);
    checked += 1;

    let cycle = catalog::cycle(1.0).map_err(fail)?;
    let s = flat(&spectrum(&cycle, 3)?);
    let want = 4.0 * PI * PI;
    ensure!(rel(s[1], want) <= 1e-9 && rel(s[2], want) <= 1e-9, "cycle {s:?}");
    let f = fem(&cycle, 3)?;
    ensure!(rel(f[1], want) <= 1e-4 && rel(f[2], want) <= 1e-4, "cycle FEM {f:?}");
    checked += 1;

    for e in [2, 3, 5] {
        let g = catalog::pumpkin(&vec![1.0; e]).map_err(fail)?;
        let p = mu2(&g)?;
        ensure!(rel(p.mu, PI * PI) <= 1e-9 && p.multiplicity == e, "{e}-pumpkin: μ₂ {} ×{}", p.mu, p.multiplicity);
        let f = fem(&g, e + 1)?;
        ensure!(f[1..].iter().all(|&x| rel(x, PI * PI) <= 1e-4), "{e}-pumpkin FEM {f:?}");
        checked += 1;
    }
    for e in [3, 4, 6] {
        let g = catalog::star(&vec![1.0; e]).map_err(fail)?;
        let p = mu2(&g)?;
        let want = PI * PI / 4.0;
        ensure!(rel(p.mu, want) <= 1e-9 && p.multiplicity == e - 1, "{e}-star: μ₂ {} ×{}", p.mu, p.multiplicity);
        let f = fem(&g, e)?;
        ensure!(f[1..].iter().all(|&x| rel(x, want) <= 1e-4), "{e}-star FEM {f:?}");
        checked += 1;
    }
    Ok(format!("{checked} graphs, secular ≤ 1e-9, FEM(h=1e-3) ≤ 1e-4"))
}

/// Least-squares slope of `log y` against `log x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

fn backend_cross_check() -> Outcome {
    let hs = [4e-3, 2e-3, 1e-3];
    let corpus = catalog::corpus();
    let results: Vec<Result<(f64, f64), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = corpus
            .iter()
            .map(|g| {
                s.spawn(move || -> Result<(f64, f64), String> {
                    let sec = flat(&spectrum(g, 6)?);
                    let fem: Vec<Vec<f64>> = hs
                        .iter()
                        .map(|&h| fem_solve(g, h, 6).map(|s| s.eigenvalues).map_err(fail))
                        .collect::<Result<_, _>>()?;
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for j in 1..6 {
                        let errs: Vec<f64> = fem.iter().map(|f| (f[j] - sec[j]) / sec[j]).collect();
                        for (e, h) in errs.iter().zip(&hs) {
                            ensure!(
                                *e > 0.0 && *e <= sec[j] * h * h,
                                "{}: μ_{} FEM error {e:e} at h = {h}",
                                g.name(),
                                j + 1
                            );
                        }
                        let p = slope(&hs, &errs);
                        lo = lo.min(p);
                        hi = hi.max(p);
                    }
                    Ok((lo, hi))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("cross-check thread")).collect()
    });
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (g, r) in corpus.iter().zip(results) {
        let (a, b) = r?;
        ensure!((1.8..=2.2).contains(&a) && (1.8..=2.2).contains(&b), "{}: fitted orders in [{a:.3}, {b:.3}]", g.name());
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok(format!("{} graphs, μ₂..μ₆, fitted orders in [{lo:.3}, {hi:.3}]", corpus.len()))
}

fn point_labels(g: &MetricGraph, r: &HotspotReport, local: bool) -> Vec<String> {
    let comps = if local { &r.local } else { &r.global };
    let mut v: Vec<String> = comps.iter().flat_map(|c| c.endpoints()).map(|p| g.describe_point(&p)).collect();
    v.sort();
    v.dedup();
    v
}

fn hotspot_locations() -> Outcome {
    let lasso = catalog::lasso(1.0, 1.0).map_err(fail)?;
    let (_, r) = report(&lasso)?;
    let labels = point_labels(&lasso, &r, false);
    let leaf = lasso.vertex_point(1);
    let mid = GraphPoint::new(0, 0.5);
    ensure!(
        r.global.len() == 2 && r.global_contains(&lasso, &leaf) && r.global_contains(&lasso, &mid),
        "lasso M = {labels:?}"
    );

    let flower = catalog::flower(&[1.0, 1.2]).map_err(fail)?;
    let (_, r) = report(&flower)?;
    let mut seen = [false; 2];
    for c in &r.local {
        let Shape::Point { location, .. } = c.shape else {
            return Err(format!("flower: segment in M_loc"));
        };
        let half = 0.5 * flower.length(location.edge);
        ensure!((location.offset - half).abs() <= 1e-8, "flower: local extremum at {}", flower.describe_point(&location));
        seen[location.edge] = true;
    }
    ensure!(seen == [true, true], "flower: M_loc = {:?}", point_labels(&flower, &r, true));

    let f8 = catalog::perturbed_figure8(0.05).map_err(fail)?;
    let (p, r) = report(&f8)?;
    ensure!((p.mu - 1.0).abs() <= 1e-8, "perturbed figure-8 μ₂ = {}", p.mu);
    let boundary = f8.boundary();
    let hits: Vec<String> = r
        .global
        .iter()
        .flat_map(|c| c.sample_points(64))
        .filter(|q| boundary.contains(&f8, q))
        .map(|q| f8.describe_point(&q))
        .collect();
    ensure!(hits.is_empty(), "perturbed figure-8: M ∩ ∂Γ = {hits:?}");
    Ok(format!(
        "lasso {:?}; flower M_loc at midpoints; figure-8 μ₂ = {:.12}, M ∩ ∂Γ = ∅",
        labels, p.mu
    ))
}

fn verifiers() -> Outcome {
    let mut located = 0;
    let mut no_disc = 0;
    let mut disc_check = |g: &MetricGraph, p: &EigenPair| -> Result<(), String> {
        for f in &p.basis {
            for s in [1.0, -1.0] {
                let out = verify_no_disconnect(g, &f.scaled(s)).map_err(fail)?;
                ensure!(out.passed(), "{}: no-disconnect fails at {:?}", g.name(), out.witnesses);
                no_disc += 1;
            }
        }
        Ok(())
    };
    for g in catalog::corpus() {
        let (p, r) = report(&g)?;
        let out = verify_location(&g, &r);
        ensure!(out.passed(), "{}: containment fails at {:?}", g.name(), out.witnesses);
        located += 1;
        disc_check(&g, &p)?;
    }
    for seed in 0..50 {
        let t = catalog::random_tree(seed, 12).map_err(fail)?;
        let (p, r) = report(&t)?;
        let out = verify_tree_boundary(&t, &r);
        ensure!(out.passed(), "tree {seed}: extrema off the leaves at {:?}", out.witnesses);
        disc_check(&t, &p)?;
    }
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let s = catalog::random_star(1000 + seed, 8).map_err(fail)?;
        let out = star_diameter_check(&s).map_err(fail)?;
        ensure!(out.passed(), "star {seed}: {:?}", out.witnesses);
        let (p, r) = report(&s)?;
        let ratio = extrema_distance_ratio(&s, &r);
        worst = worst.max((ratio - 1.0).abs());
        ensure!((ratio - 1.0).abs() <= 1e-9, "star {seed}: extrema distance ratio {ratio}");
        disc_check(&s, &p)?;
    }
    Ok(format!(
        "containment on {located} corpus graphs, 50 trees, no-disconnect on {no_disc} eigenfunctions, 20 stars (|ratio − 1| ≤ {worst:.1e})"
    ))
}

fn combination_machinery() -> Outcome {
    let g = catalog::pumpkin(&[1.0; 3]).map_err(fail)?;
    let p = mu2(&g)?;
    ensure!(p.multiplicity == 3, "3-pumpkin multiplicity {}", p.multiplicity);
    let mut f0 = p.basis[0].clone();
    if f0.vertex_value(&g, g.edge(0).from) < 0.0 {
        f0 = f0.scaled(-1.0);
    }
    let mut f1 = p.basis[1..]
        .iter()
        .max_by(|a, b| a.trace(0).polar().0.total_cmp(&b.trace(0).polar().0))
        .cloned()
        .ok_or("no second basis function")?;
    if f1.trace(0).value(0.5) < 0.0 {
        f1 = f1.scaled(-1.0);
    }
    let quarter = combine(&g, &f0, &f1, &GraphPoint::new(0, 0.25)).map_err(fail)?;
    ensure!((quarter.alpha - 1.0).abs() <= 1e-12, "α at 1/4 = {}", quarter.alpha);
    // with crests exactly at 0 and 1/2 the symmetry makes α exactly 1
    let exact = |b: [f64; 3], a: f64| EigenFunction {
        k: PI,
        traces: (0..3).map(|e| EdgeTrace::new(e, a, b[e], PI)).collect(),
        norm: f64::NAN,
        sign: SignConvention::Unnormalized,
    };
    let (cosine, sine) = (exact([0.0; 3], 1.0), exact([1.0, -1.0, 0.0], 0.0));
    for h in [&cosine, &sine] {
        ensure!(h.residuals(&g).max() <= 1e-12, "closed-form function is not an eigenfunction");
    }
    let sym = combine(&g, &cosine, &sine, &GraphPoint::new(0, 0.25)).map_err(fail)?;
    ensure!(sym.alpha == 1.0, "closed-form α at 1/4 = {}", sym.alpha);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let y = 0.5 * (i as f64 + 0.5) / 100.0;
        let c = combine(&g, &f0, &f1, &GraphPoint::new(0, y)).map_err(fail)?;
        let ex = extrema_single(&g, &c.function).map_err(fail)?;
        let tops: Vec<_> = ex.global_max().collect();
        ensure!(tops.len() == 1 && tops[0].location.edge == 0, "y = {y}: maxima {}", tops.len());
        let off = (tops[0].location.offset - y).abs();
        worst = worst.max(off);
        ensure!(off <= 1e-9, "y = {y}: max at {}", tops[0].location.offset);
    }

    let k4 = catalog::complete(4, 1.0).map_err(fail)?;
    let f = complete_apex_eigenfunction(&k4, 0).map_err(fail)?;
    audit_fn(&k4, &f);
    let ex = extrema_single(&k4, &f).map_err(fail)?;
    ensure!(ex.local.len() == 4, "K4: {} critical points", ex.local.len());
    let max: Vec<_> = ex.global_max().collect();
    ensure!(max.len() == 1 && max[0].vertex == Some(0), "K4 max not at v0");
    let mins: Vec<_> = ex.global_min().collect();
    ensure!(mins.len() == 3, "K4: {} minima", mins.len());
    for m in mins {
        let e = k4.edge(m.location.edge);
        ensure!(
            m.vertex.is_none() && e.from != 0 && e.to != 0 && (m.location.offset - 0.5).abs() <= 1e-12,
            "K4 min at {}",
            k4.describe_point(&m.location)
        );
    }
    Ok(format!("α(1/4) = 1 exactly (computed basis {:.1e} off), 100 crests within {worst:.1e}; K4 apex function max at v0, 3 opposite midpoint minima, no other critical points", (quarter.alpha - 1.0).abs()))
}

fn krpamm() -> Outcome {
    let mut last = (0usize, f64::INFINITY);
    let mut rows = Vec::new();
    for (eps, m) in [(0.05, 5), (0.05, 20), (0.02, 40)] {
        let g = catalog::krpamm_tree(eps, m).map_err(fail)?;
        let d = diameter(&g);
        ensure!(d == 1.0, "ε={eps}, m={m}: diameter {d:.17}");
        let pairs = spectrum(&g, 5)?;
        let pi2 = pairs.iter().find(|p| rel(p.mu, PI * PI) <= 1e-9).ok_or(format!("ε={eps}, m={m}: π² missing"))?;
        ensure!(pi2.multiplicity == 3, "ε={eps}, m={m}: π² has multiplicity {}", pi2.multiplicity);
        let f = catalog::krpamm_eigenfunction(&g, eps, m).map_err(fail)?;
        ensure!(f.residuals(&g).max() <= 1e-9, "ε={eps}, m={m}: residual {:e}", f.residuals(&g).max());
        audit_fn(&g, &f.normalized(&g));
        let ex = extrema_single(&g, &f).map_err(fail)?;
        let ratio = extrema_distance_ratio_single(&g, &ex);
        let want = 2.0 * eps + 2.0 / PI * ((PI * (0.5 - eps)).tan() / m as f64).atan();
        ensure!((ratio - want).abs() <= 1e-6, "ε={eps}, m={m}: ratio {ratio} vs {want}");
        ensure!(m > last.0 && ratio < last.1, "ratio not decreasing at m={m}");
        last = (m, ratio);
        rows.push(format!("{ratio:.6}"));
    }
    Ok(format!("diameter 1, π² ×3, ratios {}", rows.join(" > ")))
}

fn straightening() -> Outcome {
    let lasso = catalog::lasso(1.0, 1.0).map_err(fail)?;
    let random = (0..200u64)
        .filter_map(|s| catalog::random_graph(s, 4, 2).ok())
        .find(|g| {
            mu2_pair(g).is_ok_and(|p| {
                p.is_simple()
                    && extrema_single(g, &p.basis[0])
                        .is_ok_and(|ex| ex.global.iter().any(|q| q.vertex.map_or(true, |v| g.degree(v) > 1)))
            })
        })
        .ok_or("no random graph with an interior extremum")?;
    let mut notes = Vec::new();
    for g in [&lasso, &random] {
        audit(g, &mu2(g)?);
        let mut etas = Vec::new();
        for x0 in [0.1, 0.05, 0.01] {
            let s = catalog::straighten_maxima(g, x0).map_err(|e| format!("{} x0={x0}: {e}", g.name()))?;
            ensure!(!s.treated.is_empty(), "{}: nothing treated", g.name());
            ensure!(s.mu_rel_change() <= 1e-9, "{} x0={x0}: μ₂ moved by {:e}", g.name(), s.mu_rel_change());
            ensure!(s.multiplicity_after == 1, "{} x0={x0}: multiplicity {}", g.name(), s.multiplicity_after);
            ensure!(s.gap_after.is_some_and(|gap| gap > 0.0), "{} x0={x0}: no gap", g.name());
            ensure!(s.boundary_only && s.extremum_count == 2, "{} x0={x0}: |M| = {}, on boundary: {}", g.name(), s.extremum_count, s.boundary_only);
            audit(&s.graph, &mu2(&s.graph)?);
            etas.push(s.treated.iter().map(|t| t.eta).fold(0.0, f64::max));
        }
        ensure!(etas.windows(2).all(|w| w[1] < w[0]), "{}: η not decreasing {etas:?}", g.name());
        notes.push(format!("{} η {:.4}/{:.4}/{:.4}", g.name(), etas[0], etas[1], etas[2]));
    }
    Ok(notes.join("; "))
}

fn convergence() -> Outcome {
    let stick = catalog::pumpkin_on_stick([1.0, 1.0], &[1.0; 3]).map_err(fail)?;
    let k4 = catalog::complete(4, 1.0).map_err(fail)?;
    let deltas = [1e-1, 1e-2, 1e-3];
    let mut notes = Vec::new();
    for mode in PlacementMode::ALL {
        let topo = if mode == PlacementMode::Iv { &k4 } else { &stick };
        let fam = LimitFamily::for_mode(format!("{}-{mode}", topo.name()), topo.discrete(), mode).map_err(fail)?;
        audit(&fam.limit, &pair_at(&fam.limit, 2).map_err(fail)?.0);
        let rows = catalog::limit_compare(&fam, &deltas, 2).map_err(fail)?;
        for &d in &deltas {
            let g = fam.at(d).map_err(fail)?;
            audit(&g, &pair_at(&g, 2).map_err(fail)?.0);
        }
        for w in rows.windows(2) {
            ensure!(w[1].eig_err < w[0].eig_err, "mode {mode}: eigenvalue error not decreasing {rows:?}");
            ensure!(w[1].supnorm_err < w[0].supnorm_err, "mode {mode}: sup-norm error not decreasing {rows:?}");
        }
        ensure!(rows[2].supnorm_err < 5e-2, "mode {mode}: final sup-norm error {}", rows[2].supnorm_err);
        notes.push(format!("{mode}: {:.1e}/{:.1e}", rows[2].eig_err, rows[2].supnorm_err));
    }
    Ok(format!("final eig/sup errors {}", notes.join(", ")))
}

fn star_sizes() -> Outcome {
    for n in [2, 3, 5, 8] {
        let g = catalog::n_star_long_short(n, 0.1).map_err(fail)?;
        let (p, r) = report(&g)?;
        ensure!(p.is_simple(), "n={n}: multiplicity {}", p.multiplicity);
        let m = r.global.iter().filter(|c| !c.is_segment()).count();
        let ml = r.local.iter().filter(|c| !c.is_segment()).count();
        ensure!(
            m == n && ml == n && r.global.len() == n && r.local.len() == n,
            "n={n}: |M| = {m}, |M_loc| = {ml}"
        );
        let maxima = r.global.iter().filter(|c| c.kind == ExtremumKind::Max).count();
        ensure!(maxima == 1 || maxima == n - 1, "n={n}: {maxima} maxima");
    }
    Ok("|M| = |M_loc| = n for n ∈ {2, 3, 5, 8}, μ₂ simple".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("canonical spectra", canonical_spectra),
        ("backend cross-check", backend_cross_check),
        ("hot-spot locations", hotspot_locations),
        ("structural verifiers", verifiers),
        ("combination machinery", combination_machinery),
        ("balanced tree example", krpamm),
        ("pendant straightening", straightening),
        ("limit convergence", convergence),
        ("long-short star sizes", star_sizes),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("derivative bounds held for {} eigenfunctions", AUDITED.load(Ordering::Relaxed));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
