use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;

use torus_vandermonde::bounds::{theorem41_value, weakest_beta_choice};
use torus_vandermonde::certificate::{robust_duality_bound, CertificateSpec};
use torus_vandermonde::geometry::{decompose_clusters, geometry_summary, wrap_distance, NodeSet};
use torus_vandermonde::harness::{run_experiment, ExperimentConfig, ExperimentId};
use torus_vandermonde::spectra::{
    adjoint_apply_norm, gram_matrix, pair_sigma, smallest_singular_value, triple_cluster_sigma, TripleClusterConfig,
};

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, d)
}

fn nodes(d: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0..1.0f64, d), 1..=max)
}

/// One to three clusters of at most three nodes, each within `0.9/N` of an
/// anchor at `c / L`.
fn clustered(d: usize, big_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let n = big_n as f64;
    prop::collection::vec((1..=3usize, prop::collection::vec(0.0..0.9f64, 3 * d)), 1..=3).prop_map(move |clusters| {
        let count = clusters.len() as f64;
        let mut out = Vec::new();
        for (c, (size, offsets)) in clusters.into_iter().enumerate() {
            let anchor = c as f64 / count;
            for k in 0..size {
                out.push((0..d).map(|l| anchor + offsets[k * d + l] / n).collect());
            }
        }
        out
    })
}

fn partition(ns: &NodeSet, labels: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    let cd = decompose_clusters(ns);
    (0..ns.len())
        .map(|j| cd.cluster_of(j).iter().map(|&k| labels[k]).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metric_on_random_triples((a, b, c) in (1..=3usize).prop_flat_map(|d| (point(d), point(d), point(d)))) {
        let ab = wrap_distance(&a, &b).unwrap();
        let bc = wrap_distance(&b, &c).unwrap();
        let ac = wrap_distance(&a, &c).unwrap();
        prop_assert_eq!(ab, wrap_distance(&b, &a).unwrap());
        prop_assert!(ac <= ab + bc + 1e-15);
        prop_assert!((0.0..=0.5).contains(&ab));
        prop_assert_eq!(wrap_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn clusters_are_permutation_invariant(pts in nodes(2, 12), perm_seed in any::<u64>()) {
        let ns = NodeSet::new(2, 15, &pts).unwrap();
        let mut order: Vec<usize> = (0..pts.len()).collect();
        let mut s = perm_seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted: Vec<Vec<f64>> = order.iter().map(|&j| pts[j].clone()).collect();
        let ps = NodeSet::new(2, 15, &permuted).unwrap();
        let identity: Vec<usize> = (0..pts.len()).collect();
        prop_assert_eq!(partition(&ns, &identity), partition(&ps, &order));
    }

    #[test]
    fn complexity_against_tau(pts in clustered(1, 200)) {
        let ns = NodeSet::new(1, 199, &pts).unwrap();
        let cd = decompose_clusters(&ns);
        prop_assume!(cd.valid && pts.len() > 1);
        let gs = geometry_summary(&ns, &cd);
        let cap = gs.tau.powi(1 - gs.lambda as i32);
        prop_assert!(gs.complexity <= cap * (1.0 + 1e-12));
        if gs.lambda <= 2 {
            prop_assert!((gs.complexity - cap).abs() <= 1e-9 * cap);
        }
    }

    #[test]
    fn theorem_value_halves_when_complexity_doubles(d in 1..=3usize, lambda in 1..=6usize, c in 1.0..1e6f64) {
        let beta = 2 * d;
        let v1 = theorem41_value(d, 1000, lambda, beta, c);
        let v2 = theorem41_value(d, 1000, lambda, beta, 2.0 * c);
        prop_assert!((v1 / v2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weakest_beta_is_even(d in 1..=3usize, lambda in 1..=10usize, c in 1.0..1e12f64) {
        let beta = weakest_beta_choice(d, lambda, c);
        prop_assert!(beta >= 2 && beta % 2 == 0);
    }

    #[test]
    fn gram_is_hermitian_with_exact_diagonal(pts in nodes(2, 8)) {
        let ns = NodeSet::new(2, 9, &pts).unwrap();
        let g = gram_matrix(&ns);
        prop_assert!(g.hermitian_defect() <= 1e-13 * g.frobenius_norm());
        for j in 0..pts.len() {
            prop_assert_eq!(g[(j, j)], Complex64::new(100.0, 0.0));
        }
    }

    #[test]
    fn adding_a_node_never_increases_sigma(pts in nodes(1, 6), extra in 0.0..1.0f64) {
        let ns = NodeSet::new(1, 31, &pts).unwrap();
        let bigger = ns.with_node(&[extra]).unwrap();
        let s = smallest_singular_value(&ns).unwrap().sigma_min;
        let t = smallest_singular_value(&bigger).unwrap().sigma_min;
        prop_assert!(t <= s * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn pair_closed_form_matches_gram(a in point(2), gap in 1e-4..0.5f64, big_n in 2..200usize) {
        let b = vec![a[0] + gap, a[1] - 0.3 * gap];
        let ns = NodeSet::new(2, big_n - 1, &[a, b]).unwrap();
        let closed = pair_sigma(&ns).unwrap().sigma_min;
        let gram = smallest_singular_value(&ns).unwrap().sigma_min;
        prop_assert!((closed - gram).abs() <= 1e-12 * gram);
    }

    #[test]
    fn triple_formula_matches_eigensolver(theta in 0.0..std::f64::consts::TAU, opening in 0.0..std::f64::consts::FRAC_PI_2, nu in 1e-4..0.5f64) {
        let a = [theta.cos(), theta.sin()];
        let phi = theta + std::f64::consts::FRAC_PI_2 + opening;
        let b = [phi.cos(), phi.sin()];
        let cfg = TripleClusterConfig::new(100, nu, a, b).unwrap();
        let r = triple_cluster_sigma(&cfg).unwrap();
        prop_assume!(!r.degenerate);
        prop_assert!((r.via_formula - r.sigma_min).abs() <= 1e-8 * r.sigma_min);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certificate_bounds_the_supplied_vector(pts in clustered(1, 400), raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9)) {
        let ns = NodeSet::new(1, 399, &pts).unwrap();
        let cd = decompose_clusters(&ns);
        prop_assume!(cd.valid);
        let spec = CertificateSpec::new(&ns, &cd, 2).unwrap();
        let v: Vec<Complex64> = raw[..pts.len()].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        let cert = robust_duality_bound(&ns, &cd, &spec, &v).unwrap();
        if let Some(b) = cert.lower_bound {
            prop_assert!(b <= adjoint_apply_norm(&ns, &v).unwrap() * (1.0 + 1e-9));
        }
    }
}

#[test]
fn experiment_csv_is_deterministic() {
    let mut cfg = ExperimentConfig::default_for(ExperimentId::Pair2d);
    cfg.big_n = 64;
    cfg.count = 6;
    cfg.trials = 8;
    let a = run_experiment(&cfg).unwrap().csv();
    let b = run_experiment(&cfg).unwrap().csv();
    assert_eq!(a, b);
    cfg.seed += 1;
    assert_ne!(a, run_experiment(&cfg).unwrap().csv());
}
