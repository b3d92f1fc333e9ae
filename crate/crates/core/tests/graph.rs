mod common;

use anomedge_core::datagen::{generate_sbm, SbmConfig};
use anomedge_core::graph::{
    adjacency_from_laplacian, inject_anomalies, laplacian_from_adjacency, smoothness, validate_laplacian,
};
use anomedge_core::{GraphData, Matrix};
use common::*;
use proptest::prelude::*;

fn adjacency() -> impl Strategy<Value = Matrix> {
    (2usize..9).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..3.0], n * (n - 1) / 2).prop_map(move |w| {
            let mut a = Matrix::zeros(n, n);
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    a[(i, j)] = w[k];
                    a[(j, i)] = w[k];
                    k += 1;
                }
            }
            a
        })
    })
}

proptest! {
    #[test]
    fn adjacency_round_trip(a in adjacency()) {
        let l = laplacian_from_adjacency(&a).unwrap();
        prop_assert_eq!(adjacency_from_laplacian(&l, 1e-12).unwrap(), a);
    }

    #[test]
    fn laplacian_invariants(a in adjacency()) {
        let g = GraphData::from_adjacency(a).unwrap();
        let report = validate_laplacian(g.laplacian(), 1e-12);
        prop_assert!(report.max_abs_row_sum <= 1e-12);
        prop_assert_eq!(report.max_asymmetry, 0.0);
        prop_assert!(report.max_positive_offdiag <= 0.0);
    }

    #[test]
    fn smoothness_nonnegative_and_additive(a in adjacency(), seed in 0u64..1000) {
        let l = laplacian_from_adjacency(&a).unwrap();
        let n = l.nrows();
        let mut rng = rng(seed);
        let x = uniform(n, 2, -2.0, 2.0, &mut rng);
        let total = smoothness(&x, &l).unwrap();
        let parts = smoothness(&x.columns(0, 1).into_owned(), &l).unwrap()
            + smoothness(&x.columns(1, 1).into_owned(), &l).unwrap();
        prop_assert!(total >= -1e-10);
        prop_assert!((total - parts).abs() <= 1e-12 * total.abs().max(1.0));
    }
}

#[test]
fn smoothness_double_sum() {
    let mut rng = rng(1);
    let l = random_laplacian(6, 0.5, &mut rng);
    let a = adjacency_from_laplacian(&l, 1e-12).unwrap();
    let x = uniform(6, 3, -1.0, 1.0, &mut rng);
    let mut expected = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            let d: f64 = (0..3).map(|f| (x[(i, f)] - x[(j, f)]).powi(2)).sum();
            expected += 0.5 * a[(i, j)] * d;
        }
    }
    assert!((smoothness(&x, &l).unwrap() - expected).abs() <= 1e-10);
    let two = laplacian_from_adjacency(&Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    assert_eq!(smoothness(&Matrix::from_row_slice(2, 1, &[0.0, 1.0]), &two).unwrap(), 1.0);
    assert!(smoothness(&Matrix::from_element(6, 2, 0.7), &l).unwrap().abs() < 1e-12);
}

#[test]
fn injection_on_sbm() {
    let (g, _) = generate_sbm(&SbmConfig { n_nodes: 20, ..SbmConfig::new(2, 2) }.with_seed(4)).unwrap();
    let candidates = g.non_edges(|_, _| true);
    let (perturbed, truth) = inject_anomalies(&g, &candidates, 5, 9).unwrap();
    assert_eq!(perturbed.n_edges(), g.n_edges() + 5);
    assert!(truth.iter().all(|(i, j)| !g.has_edge(i, j) && perturbed.has_edge(i, j)));
    let (again, truth2) = inject_anomalies(&g, &candidates, 5, 9).unwrap();
    assert_eq!(again, perturbed);
    assert_eq!(truth2, truth);
}

#[test]
fn validation_examples() {
    let k3 = laplacian_from_adjacency(&Matrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap();
    assert!(validate_laplacian(&k3, 1e-12).valid);
    assert!(!validate_laplacian(&Matrix::identity(3, 3), 1e-6).valid);
    let mut bad = Matrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
    bad[(0, 1)] += 0.5;
    let report = validate_laplacian(&bad, 1e-6);
    assert!(!report.valid && report.max_positive_offdiag <= 0.0 && report.max_abs_row_sum > 0.0);
}
