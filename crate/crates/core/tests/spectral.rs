use std::f64::consts::PI;

use qghot_core::catalog;
use qghot_core::graph::{suppress_degree_two, GraphBuilder, GraphPoint, MetricGraph};
use qghot_core::spectral::{
    counting_function, cross_check, eigenvalue_list, eigenvalues, fem_solve, rayleigh_quotient, Backend, TestFunction,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn assert_pair_healthy(g: &MetricGraph, n: usize) {
    for pair in eigenvalues(g, n, Backend::Secular).unwrap() {
        assert!(pair.gram_error(g) < 1e-9, "{}: gram {}", g.name(), pair.gram_error(g));
        for f in &pair.basis {
            let r = f.residuals(g);
            assert!(r.max() < 1e-9, "{}: residuals {r:?} at mu {}", g.name(), pair.mu);
            assert!(f.derivative_bounds(g).holds, "{}: derivative bounds", g.name());
        }
    }
}

#[test]
fn unit_path_spectrum() {
    let g = catalog::path(&[1.0]).unwrap();
    let v = eigenvalue_list(&g, 3, Backend::Secular).unwrap();
    assert_eq!(v[0], 0.0);
    assert!(rel(v[1], PI * PI) < 1e-12);
    assert!(rel(v[2], 4.0 * PI * PI) < 1e-12);
    let f = &eigenvalues(&g, 2, Backend::Secular).unwrap()[1].basis[0];
    assert!((f.evaluate(&GraphPoint::new(0, 0.0)) - 2f64.sqrt()).abs() < 1e-12);
    assert!(f.evaluate(&GraphPoint::new(0, 0.5)).abs() < 1e-12);
    assert!(f.derivative(&GraphPoint::new(0, 1.0)).abs() < 1e-9);
}

#[test]
fn unit_cycle_double() {
    let g = catalog::cycle(1.0).unwrap();
    let pairs = eigenvalues(&g, 3, Backend::Secular).unwrap();
    assert_eq!(pairs[1].multiplicity, 2);
    assert!(rel(pairs[1].mu, 4.0 * PI * PI) < 1e-12);
}

#[test]
fn pumpkins_and_stars() {
    for e in [2usize, 3, 5] {
        let g = catalog::pumpkin(&vec![1.0; e]).unwrap();
        let pairs = eigenvalues(&g, 2, Backend::Secular).unwrap();
        assert_eq!(pairs[1].multiplicity, e, "pumpkin {e}");
        assert!(rel(pairs[1].mu, PI * PI) < 1e-9);
    }
    for e in [3usize, 4, 6] {
        let g = catalog::star(&vec![1.0; e]).unwrap();
        let pairs = eigenvalues(&g, 2, Backend::Secular).unwrap();
        assert_eq!(pairs[1].multiplicity, e - 1, "star {e}");
        assert!(rel(pairs[1].mu, PI * PI / 4.0) < 1e-9);
        // each basis function lives on two edges after the echelon reduction
        for f in &pairs[1].basis {
            let support = f.traces.iter().filter(|t| t.a.hypot(t.b) > 1e-9).count();
            assert!(support >= 2);
        }
    }
}

#[test]
fn fem_matches_closed_forms() {
    let g = catalog::path(&[1.0]).unwrap();
    let sol = fem_solve(&g, 1e-3, 2).unwrap();
    assert!(rel(sol.eigenvalues[1], PI * PI) < 1e-4);
    let g = catalog::lasso(1.0, 1.0).unwrap();
    let sec = eigenvalues(&g, 3, Backend::Secular).unwrap();
    assert!(sec[1].is_simple());
    let fem = fem_solve(&g, 1e-3, 3).unwrap();
    assert!(rel(fem.eigenvalues[1], sec[1].mu) < 1e-4);
}

#[test]
fn healthy_bases_across_examples() {
    for id in catalog::ExampleId::ALL {
        let g = catalog::build_example(id, &catalog::Params::new()).unwrap();
        assert_pair_healthy(&g, 6);
    }
}

#[test]
fn rayleigh_of_eigenfunctions() {
    for g in [catalog::lasso(1.0, 1.0).unwrap(), catalog::star(&[1.0, 0.7, 0.4]).unwrap()] {
        let pair = &eigenvalues(&g, 2, Backend::Secular).unwrap()[1];
        let q = rayleigh_quotient(&g, TestFunction::Traces(&pair.basis[0]), false).unwrap();
        assert!(rel(q, pair.mu) < 1e-10);
    }
}

#[test]
fn suppression_keeps_spectrum() {
    let g = GraphBuilder::new("chain")
        .vertices(["a", "m", "b", "c"])
        .edge("1", "a", "m", 0.3)
        .edge("2", "m", "b", 0.5)
        .edge("3", "b", "c", 0.7)
        .edge("4", "b", "b", 0.4)
        .build()
        .unwrap();
    let s = suppress_degree_two(&g);
    assert_eq!(s.total_length(), g.total_length());
    let a = eigenvalue_list(&g, 6, Backend::Secular).unwrap();
    let b = eigenvalue_list(&s, 6, Backend::Secular).unwrap();
    for (x, y) in a.iter().zip(&b).skip(1) {
        assert!(rel(*x, *y) < 1e-9);
    }
}

#[test]
fn counting_agrees_with_fem() {
    let g = catalog::fig_m3([3.0, 0.3, 0.4, 0.6, 0.9]).unwrap();
    let fem = fem_solve(&g, 2e-3, 10).unwrap();
    let k = (0.5 * (fem.eigenvalues[8] + fem.eigenvalues[9])).sqrt();
    assert_eq!(counting_function(&g, k), 9);
    cross_check(&g, 8, 2e-3).unwrap();
}
