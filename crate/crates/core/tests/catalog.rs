use std::f64::consts::PI;

use qghot_core::catalog::{self, LimitFamily, PlacementMode};
use qghot_core::hotspots::extrema_single;
use qghot_core::spectral::mu2_pair;
use qghot_core::Error;

#[test]
fn straighten_lasso() {
    let g = catalog::lasso(1.0, 1.0).unwrap();
    let s = catalog::straighten_maxima(&g, 0.05).unwrap();
    assert_eq!(s.treated.len(), 1);
    assert_eq!(s.treated[0].degree, 2);
    assert!(s.mu_rel_change() < 1e-9, "{} vs {}", s.mu_after, s.mu_before);
    assert_eq!(s.multiplicity_after, 1);
    assert!(s.gap_after.unwrap() > 0.0);
    assert!(s.boundary_only);
    assert_eq!(s.extremum_count, 2);
    assert!(s.preserved());
    assert_eq!(s.graph.boundary_vertices().len(), 2);
}

#[test]
fn eta_shrinks_with_x0() {
    let g = catalog::lasso(1.0, 1.0).unwrap();
    let etas: Vec<f64> = [0.1, 0.05, 0.01]
        .iter()
        .map(|&x0| catalog::straighten_maxima(&g, x0).unwrap().treated[0].eta)
        .collect();
    assert!(etas.windows(2).all(|w| w[1] < w[0]), "{etas:?}");
    let k = mu2_pair(&g).unwrap().k;
    assert!((etas[2] - (2.0 * (0.01 * k).tan()).atan() / k).abs() < 1e-15);
}

#[test]
fn straighten_identity_and_errors() {
    let g = catalog::path(&[1.0]).unwrap();
    let s = catalog::straighten_maxima(&g, 0.1).unwrap();
    assert!(s.treated.is_empty());
    assert_eq!(s.graph, g);
    // the loop midpoint splits the loop into two halves of length 0.5
    let lasso = catalog::lasso(1.0, 1.0).unwrap();
    assert!(mu2_pair(&lasso).unwrap().k * 0.6 < PI / 2.0);
    assert!(matches!(
        catalog::straighten_maxima(&lasso, 0.6),
        Err(Error::ShorteningTooLarge { .. })
    ));
    let cyc = catalog::cycle(1.0).unwrap();
    assert!(matches!(catalog::straighten_maxima(&cyc, 0.1), Err(Error::NotSimple { .. })));
}

#[test]
fn perturb_equilateral_star() {
    let g = catalog::star(&[1.0; 3]).unwrap();
    let p = catalog::boundary_distinct_perturb(&g, 0.1, 7).unwrap();
    assert!(!p.changes.is_empty());
    let vals: Vec<f64> = p.leaf_values.iter().map(|x| x.1).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            assert!((vals[i] - vals[j]).abs() > 1e-6, "{vals:?}");
        }
    }
    assert!(mu2_pair(&p.graph).unwrap().is_simple());
    for c in &p.changes {
        let a = p.graph.edge_index(&c.first).unwrap();
        let b = p.graph.edge_index(&c.second).unwrap();
        assert_eq!(p.graph.length(a) + p.graph.length(b), c.sum);
        assert!(c.delta < 0.1);
    }
    let again = catalog::boundary_distinct_perturb(&g, 0.1, 7).unwrap();
    assert_eq!(again.graph, p.graph);
}

#[test]
fn perturb_identity_and_errors() {
    let g = catalog::path(&[1.0]).unwrap();
    let p = catalog::boundary_distinct_perturb(&g, 0.1, 1).unwrap();
    assert!(p.changes.is_empty());
    assert_eq!(p.graph, g);
    assert!(p.leaf_values[0].1 * p.leaf_values[1].1 < 0.0);
    let s = catalog::star(&[1.0, 0.7, 0.4]).unwrap();
    assert!(catalog::boundary_distinct_perturb(&s, 0.1, 1).unwrap().changes.is_empty());
    let c = catalog::cycle(1.0).unwrap();
    assert!(matches!(catalog::boundary_distinct_perturb(&c, 0.1, 1), Err(Error::NoBoundary)));
}

fn stick() -> qghot_core::graph::DiscreteGraph {
    catalog::pumpkin_on_stick([1.0, 1.0], &[1.0; 3]).unwrap().discrete().clone()
}

#[test]
fn limit_graphs_per_mode() {
    let topo = stick();
    let shapes: Vec<(usize, usize, usize)> = PlacementMode::ALL
        .iter()
        .map(|&m| {
            let f = LimitFamily::for_mode("stick", &topo, m).unwrap();
            (f.limit.vertex_count(), f.limit.edge_count(), f.limit.betti())
        })
        .collect();
    assert_eq!(shapes, vec![(2, 1, 0), (3, 2, 0), (2, 2, 1), (1, 2, 2)]);
    let fam = LimitFamily::for_mode("stick", &topo, PlacementMode::Ii).unwrap();
    assert!((mu2_pair(&fam.limit).unwrap().mu - PI * PI / 4.0).abs() < 1e-9);
}

#[test]
fn rescaling_preserves_surviving_norm() {
    let topo = stick();
    let fam = LimitFamily::for_mode("stick", &topo, PlacementMode::Iii).unwrap();
    let psi = mu2_pair(&fam.limit).unwrap().basis[0].clone();
    let n = psi.norm_sq(&fam.limit);
    let mut lengths = fam.lengths(0.01);
    for &e in &fam.unit_edges {
        lengths[e] = 1.7;
    }
    let j = qghot_core::catalog::RescaledFunction::new(&fam, &psi, &lengths);
    assert!((j.surviving_norm_sq(&fam) - n).abs() < 1e-12);
    let e = fam.unit_edges[0];
    let le = fam.edge_map[e].unwrap();
    let x = 0.3;
    let want = (1.0f64 / 1.7).sqrt() * psi.trace(le).value(x / 1.7);
    assert!((j.value(e, x) - want).abs() < 1e-14);
}

#[test]
fn limit_tables_decrease() {
    let topo = stick();
    let k4 = catalog::complete(4, 1.0).unwrap().discrete().clone();
    for mode in PlacementMode::ALL {
        let t = if mode == PlacementMode::Iv { &k4 } else { &topo };
        let fam = LimitFamily::for_mode("family", t, mode).unwrap();
        let rows = catalog::limit_compare(&fam, &[0.1, 0.01, 0.001], 2).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].eig_err < w[0].eig_err, "{mode}: {rows:?}");
            assert!(w[1].supnorm_err < w[0].supnorm_err, "{mode}: {rows:?}");
        }
        assert!(rows[2].supnorm_err < 5e-2, "{mode}: {rows:?}");
    }
}

#[test]
fn sup_difference_matches_closed_form() {
    use qghot_core::spectral::EdgeTrace;
    let s = EdgeTrace::new(0, 1.0, 0.0, PI);
    let t = EdgeTrace::new(0, 0.0, 0.0, 0.0);
    assert!((catalog::sup_difference(&s, &t, 0.75, 1e-10) - 1.0).abs() < 1e-10);
    let t = EdgeTrace::new(0, 0.0, 1.0, PI);
    let got = catalog::sup_difference(&s, &t, 1.0, 1e-10);
    assert!((got - 2f64.sqrt()).abs() < 1e-10, "{got}");
}

#[test]
fn placement_modes() {
    let topo = stick();
    let ii = catalog::topology_placement(&topo, PlacementMode::Ii).unwrap();
    assert!(ii.outcome.passed());
    let ex = extrema_single(&ii.graph, &mu2_pair(&ii.graph).unwrap().basis[0]).unwrap();
    assert!(ex.global.iter().all(|p| p.vertex.is_some_and(|v| ii.graph.degree(v) == 1)));
    let iv = catalog::topology_placement(&topo, PlacementMode::Iv).unwrap();
    assert!(iv.outcome.passed());
    let ex = extrema_single(&iv.graph, &mu2_pair(&iv.graph).unwrap().basis[0]).unwrap();
    let edges: Vec<usize> = ex.global.iter().map(|p| p.location.edge).collect();
    assert!(ex.global.iter().all(|p| p.vertex.is_none()));
    assert_ne!(edges[0], edges[1]);
    for m in [PlacementMode::I, PlacementMode::Iii] {
        assert!(catalog::topology_placement(&topo, m).unwrap().outcome.passed());
    }
    let star = catalog::star(&[1.0; 3]).unwrap();
    assert!(matches!(
        catalog::topology_placement(star.discrete(), PlacementMode::Iii),
        Err(Error::PreconditionUnmet(_))
    ));
    let cyc = catalog::cycle(1.0).unwrap();
    assert!(matches!(
        catalog::topology_placement(cyc.discrete(), PlacementMode::Iii),
        Err(Error::PreconditionUnmet(_))
    ));
    let k4 = catalog::complete(4, 1.0).unwrap();
    let p = catalog::topology_placement(k4.discrete(), PlacementMode::Iii).unwrap();
    assert_eq!(p.mode, PlacementMode::Iv);
}

#[test]
fn parallel_loops_keep_an_exact_eigenfunction() {
    let fam = LimitFamily::for_mode("stick", &stick(), PlacementMode::Iv).unwrap();
    let rows = catalog::limit_compare(&fam, &[0.1, 0.01], 2).unwrap();
    assert!(rows.iter().all(|r| r.eig_err < 1e-9 && r.supnorm_err < 1e-9), "{rows:?}");
}

#[test]
fn lengthened_krpamm_concentrates_near_centre() {
    use qghot_core::graph::distance;
    use qghot_core::hotspots::{hotspot_sets, Sampling};

    for (eps, m, delta) in [(0.05, 5, 0.01), (0.05, 5, 0.1), (0.02, 20, 0.001)] {
        let g = catalog::krpamm_lengthened(eps, m, delta).unwrap();
        let pair = mu2_pair(&g).unwrap();
        assert!(pair.is_simple(), "ε={eps}, m={m}, δ={delta}");
        assert!(pair.mu < PI * PI, "{}", pair.mu);
        let f = &pair.basis[0];
        let sup = f.sup(&g);
        for id in ["e1", "e3"] {
            let e = g.edge_index(id).unwrap();
            assert!(f.trace(e).sup(g.length(e)) <= 1e-9 * sup, "{id} carries mass");
        }
        let hs = hotspot_sets(&g, &pair, &Sampling::default()).unwrap();
        assert_eq!(hs.global.len(), 2 * m);
        let leaves = g.boundary();
        let pts: Vec<_> = hs.global.iter().flat_map(|c| c.endpoints()).collect();
        assert!(pts.iter().all(|p| leaves.contains(&g, p)));
        let want = 2.0 * eps + 2.0 * (catalog::krpamm_leaf_length(eps, m) + delta);
        let g = &g;
        let max = pts.iter().flat_map(|p| pts.iter().map(move |q| distance(g, p, q))).fold(0.0, f64::max);
        assert!((max - want).abs() <= 1e-9, "{max} vs {want}");
    }
    assert!(catalog::krpamm_lengthened(0.05, 5, -1.0).is_err());
}
