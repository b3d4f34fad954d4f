#![allow(dead_code)]

use std::io::Write;

use rand::Rng;
use torus_vandermonde::geometry::{decompose_clusters, wrap_distance, ClusterDecomposition, NodeSet};

/// Writes straight to the process stderr so the line shows up even when the
/// test harness captures output.
pub fn report(criterion: usize, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "acceptance {criterion:>2} [{tag}] {name}: {detail}");
}

pub struct ClusterPlan {
    pub dim: usize,
    pub big_n: usize,
    /// Size of each cluster; the first is the largest.
    pub sizes: Vec<usize>,
    /// Smallest allowed `N * distance` between two nodes.
    pub min_tau: f64,
    /// Smallest allowed `N * distance` between anchors.
    pub anchor_gap: f64,
}

/// Random clustered configuration: every cluster lives in `anchor + [0, 0.9/N)^d`
/// and anchors keep `anchor_gap / N` apart, so clusters come out as planned.
pub fn random_clustered(plan: &ClusterPlan, rng: &mut impl Rng) -> Option<(NodeSet, ClusterDecomposition)> {
    let n = plan.big_n as f64;
    let d = plan.dim;
    let mut anchors: Vec<Vec<f64>> = Vec::new();
    let mut tries = 0;
    while anchors.len() < plan.sizes.len() {
        tries += 1;
        if tries > 10_000 {
            return None;
        }
        let cand: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        if anchors
            .iter()
            .all(|a| wrap_distance(a, &cand).unwrap() * n >= plan.anchor_gap)
        {
            anchors.push(cand);
        }
    }
    let mut nodes: Vec<Vec<f64>> = Vec::new();
    for (anchor, &size) in anchors.iter().zip(&plan.sizes) {
        let mut placed = 0;
        let mut tries = 0;
        while placed < size {
            tries += 1;
            if tries > 10_000 {
                return None;
            }
            let cand: Vec<f64> = anchor.iter().map(|&a| a + rng.gen_range(0.0..0.9) / n).collect();
            if nodes
                .iter()
                .all(|t| wrap_distance(t, &cand).unwrap() * n >= plan.min_tau)
            {
                nodes.push(cand);
                placed += 1;
            }
        }
    }
    let ns = NodeSet::new(d, plan.big_n - 1, &nodes).ok()?;
    let cd = decompose_clusters(&ns);
    let lambda = plan.sizes.iter().copied().max().unwrap_or(0);
    (cd.valid && cd.lambda == lambda && cd.cluster_count() == plan.sizes.len()).then_some((ns, cd))
}

/// Cluster sizes with a largest cluster of exactly `lambda`.
pub fn random_sizes(lambda: usize, clusters: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut sizes = vec![lambda];
    sizes.extend((1..clusters).map(|_| rng.gen_range(1..=lambda)));
    sizes
}
