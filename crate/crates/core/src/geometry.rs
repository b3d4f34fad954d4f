//! Node sets on the torus `[0,1)^d`, the wrap-around max-norm metric, cluster
//! decomposition and the scalar geometry measures (cluster separation `rho`,
//! minimal separation `tau`, cluster complexity and distance shells).

use crate::error::{Error, Result};

/// Absolute slack used whenever a distance is compared against `1/N`.
pub const DISTANCE_TOLERANCE: f64 = 1e-12;

/// A set of `M` nodes in `[0,1)^d` together with the polynomial degree `n`.
///
/// Coordinates are reduced modulo 1 on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    dim: usize,
    degree: usize,
    coords: Vec<f64>,
}

impl NodeSet {
    pub fn new(dim: usize, degree: usize, nodes: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(nodes.len() * dim);
        for node in nodes {
            if node.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: node.len(),
                });
            }
            coords.extend_from_slice(node);
        }
        Self::from_flat(dim, degree, coords)
    }

    /// Builds a node set from row-major coordinates (`M * d` values).
    pub fn from_flat(dim: usize, degree: usize, mut coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidNodeSet("dimension must be positive".into()));
        }
        if degree == 0 {
            return Err(Error::InvalidNodeSet("degree must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidNodeSet("at least one node is required".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: coords.len() % dim,
            });
        }
        for x in coords.iter_mut() {
            if !x.is_finite() {
                return Err(Error::InvalidNodeSet("non-finite coordinate".into()));
            }
            *x = reduce_unit(*x);
        }
        Ok(Self { dim, degree, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Polynomial degree `n`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of frequencies per coordinate, `N = n + 1`.
    pub fn bandwidth(&self) -> usize {
        self.degree + 1
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `N^d` as a float (the number of columns of the Vandermonde matrix).
    pub fn column_count(&self) -> f64 {
        (self.bandwidth() as f64).powi(self.dim as i32)
    }

    /// Whether `M < N^d`, the rectangular setting the bounds are stated for.
    pub fn is_rectangular(&self) -> bool {
        (self.len() as f64) < self.column_count()
    }

    /// Wrap-around distance between nodes `j` and `k`.
    pub fn distance(&self, j: usize, k: usize) -> f64 {
        wrap_distance_unchecked(self.node(j), self.node(k))
    }

    /// Node set restricted to the given indices (in that order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &j in indices {
            coords.extend_from_slice(self.node(j));
        }
        Self::from_flat(self.dim, self.degree, coords)
    }

    /// Node set with one more node appended.
    pub fn with_node(&self, node: &[f64]) -> Result<Self> {
        if node.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: node.len(),
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(node);
        Self::from_flat(self.dim, self.degree, coords)
    }
}

fn reduce_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance of a real number to the nearest integer.
pub fn wrap_scalar(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Wrap-around max-norm distance `min_r ||t - t' + r||_inf` over integer shifts.
pub fn wrap_distance(t: &[f64], other: &[f64]) -> Result<f64> {
    if t.len() != other.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            actual: other.len(),
        });
    }
    Ok(wrap_distance_unchecked(t, other))
}

pub(crate) fn wrap_distance_unchecked(t: &[f64], other: &[f64]) -> f64 {
    t.iter().zip(other).map(|(a, b)| wrap_scalar(a - b)).fold(0.0, f64::max)
}

/// Wrap-around norm of a single difference vector.
pub fn wrap_norm(delta: &[f64]) -> f64 {
    delta.iter().map(|&x| wrap_scalar(x)).fold(0.0, f64::max)
}

/// Partition of the node indices into clusters, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDecomposition {
    pub clusters: Vec<Vec<usize>>,
    /// `membership[j]` is the position of node `j`'s cluster in `clusters`.
    pub membership: Vec<usize>,
    pub lambda: usize,
    pub valid: bool,
    pub message: Option<String>,
}

impl ClusterDecomposition {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, j: usize) -> &[usize] {
        &self.clusters[self.membership[j]]
    }

    pub fn same_cluster(&self, j: usize, k: usize) -> bool {
        self.membership[j] == self.membership[k]
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the graph linking nodes at wrap distance `<= 1/N`,
/// validated against the cluster diameter and separation requirements.
pub fn decompose_clusters(ns: &NodeSet) -> ClusterDecomposition {
    let m = ns.len();
    let threshold = 1.0 / ns.bandwidth() as f64 + DISTANCE_TOLERANCE;
    let mut parent: Vec<usize> = (0..m).collect();
    for j in 0..m {
        for k in (j + 1)..m {
            if ns.distance(j, k) <= threshold {
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; m];
    for j in 0..m {
        let r = find(&mut parent, j);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(j);
    }
    // members are ascending already; order by size, then by first member
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let mut membership = vec![0; m];
    for (l, g) in groups.iter().enumerate() {
        for &j in g {
            membership[j] = l;
        }
    }

    let mut valid = true;
    let mut message = None;
    'outer: for g in &groups {
        for (a, &j) in g.iter().enumerate() {
            for &k in &g[a + 1..] {
                if ns.distance(j, k) > threshold {
                    valid = false;
                    message = Some("cluster diameter exceeds 1/N".to_string());
                    break 'outer;
                }
            }
        }
    }

    let lambda = groups.first().map_or(0, Vec::len);
    let mut cd = ClusterDecomposition {
        clusters: groups,
        membership,
        lambda,
        valid,
        message,
    };
    if cd.valid {
        let rho = cluster_separation(ns, &cd);
        if rho <= 1.0 + DISTANCE_TOLERANCE {
            cd.valid = false;
            cd.message = Some(format!("cluster separation rho = {rho} <= 1"));
        }
    }
    cd
}

/// `N` times the minimal wrap distance between distinct clusters (`inf` for one cluster).
pub fn cluster_separation(ns: &NodeSet, cd: &ClusterDecomposition) -> f64 {
    let mut best = f64::INFINITY;
    for j in 0..ns.len() {
        for k in (j + 1)..ns.len() {
            if !cd.same_cluster(j, k) {
                best = best.min(ns.distance(j, k));
            }
        }
    }
    best * ns.bandwidth() as f64
}

/// `N` times the minimal pairwise wrap distance (`inf` for a single node).
pub fn minimal_separation(ns: &NodeSet) -> f64 {
    let mut best = f64::INFINITY;
    for j in 0..ns.len() {
        for k in (j + 1)..ns.len() {
            best = best.min(ns.distance(j, k));
        }
    }
    best * ns.bandwidth() as f64
}

/// Product of inverted normalized distances from node `j` to its neighbours
/// within `1/N`. Returns 1 for isolated nodes.
pub fn node_complexity(ns: &NodeSet, j: usize) -> f64 {
    let big_n = ns.bandwidth() as f64;
    let threshold = 1.0 / big_n + DISTANCE_TOLERANCE;
    (0..ns.len())
        .filter(|&k| k != j)
        .map(|k| ns.distance(j, k))
        .filter(|&dist| dist > 0.0 && dist <= threshold)
        .map(|dist| 1.0 / (big_n * dist))
        .product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySummary {
    pub dim: usize,
    pub degree: usize,
    pub node_count: usize,
    pub cluster_count: usize,
    pub lambda: usize,
    pub rho: f64,
    pub tau: f64,
    pub complexity: f64,
    /// Node attaining the maximum in the complexity; shells are centred here.
    pub shell_center: usize,
    /// `|J_m ∩ Ω|` for `m = 0..=floor(N / (2 rho))`.
    pub shell_counts: Vec<usize>,
    pub valid: bool,
}

impl GeometrySummary {
    pub fn bandwidth(&self) -> usize {
        self.degree + 1
    }

    /// CSV header matching [`GeometrySummary::csv_row`].
    pub const CSV_HEADER: &'static str = "d,n,N,M,L,lambda,rho,tau,complexity,valid";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.dim,
            self.degree,
            self.bandwidth(),
            self.node_count,
            self.cluster_count,
            self.lambda,
            fmt_f64(self.rho),
            fmt_f64(self.tau),
            fmt_f64(self.complexity),
            self.valid
        )
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn geometry_summary(ns: &NodeSet, cd: &ClusterDecomposition) -> GeometrySummary {
    let rho = cluster_separation(ns, cd);
    let tau = minimal_separation(ns);
    let (shell_center, complexity) =
        (0..ns.len())
            .map(|j| (j, node_complexity(ns, j)))
            .fold(
                (0, f64::NEG_INFINITY),
                |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                },
            );
    GeometrySummary {
        dim: ns.dim(),
        degree: ns.degree(),
        node_count: ns.len(),
        cluster_count: cd.cluster_count(),
        lambda: cd.lambda,
        rho,
        tau,
        complexity,
        shell_center,
        shell_counts: shell_counts(ns, shell_center, rho),
        valid: cd.valid,
    }
}

/// Node counts per shell `J_m = {t : m rho <= N |t - t_c| < (m+1) rho}` around `center`.
pub fn shell_counts(ns: &NodeSet, center: usize, rho: f64) -> Vec<usize> {
    let big_n = ns.bandwidth() as f64;
    if !rho.is_finite() {
        return vec![ns.len()];
    }
    let last = (big_n / (2.0 * rho)).floor() as usize;
    let mut counts = vec![0; last + 1];
    for k in 0..ns.len() {
        let x = big_n * ns.distance(center, k) / rho;
        // exact multiples of rho belong to the outer shell
        let m = ((x + 1e-9).floor() as usize).min(last);
        counts[m] += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellCheck {
    pub m: usize,
    pub count: usize,
    pub bound: f64,
    pub pass: bool,
}

/// Packing bound `|J_m ∩ Ω| <= 2^d (2^d - 1) m^(d-1) lambda` for every shell `m >= 1`.
pub fn shell_packing_check(ns: &NodeSet, gs: &GeometrySummary, center_index: usize) -> Vec<ShellCheck> {
    let counts = shell_counts(ns, center_index, gs.rho);
    let d = ns.dim() as i32;
    let pow = 2f64.powi(d);
    counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, &count)| {
            let bound = pow * (pow - 1.0) * (m as f64).powi(d - 1) * gs.lambda as f64;
            ShellCheck {
                m,
                count,
                bound,
                pass: count as f64 <= bound,
            }
        })
        .collect()
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn factorial(k: usize) -> f64 {
    (2..=k).map(|i| i as f64).product()
}

/// Worst-case cluster complexity over all configurations with separation `tau`
/// and largest cluster `lambda`: `tau^(1-lambda) / (floor((lambda-1)/2)! ceil((lambda-1)/2)!)`.
pub fn max_complexity(lambda: usize, tau: f64) -> Result<f64> {
    if lambda == 0 {
        return Err(Error::InvalidArgument("lambda must be at least 1".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    let lo = (lambda - 1) / 2;
    let hi = lambda - 1 - lo;
    if lambda > 20 {
        let ln = (1.0 - lambda as f64) * tau.ln() - ln_factorial(lo) - ln_factorial(hi);
        Ok(ln.exp())
    } else {
        Ok(tau.powi(1 - lambda as i32) / (factorial(lo) * factorial(hi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns1(n: usize, pts: &[f64]) -> NodeSet {
        let nodes: Vec<Vec<f64>> = pts.iter().map(|&x| vec![x]).collect();
        NodeSet::new(1, n, &nodes).unwrap()
    }

    #[test]
    fn wrap_distance_examples() {
        assert_eq!(wrap_distance(&[0.0], &[0.0]).unwrap(), 0.0);
        assert!((wrap_distance(&[0.9], &[0.1]).unwrap() - 0.2).abs() < 1e-15);
        assert!((wrap_distance(&[0.95, 0.10], &[0.05, 0.40]).unwrap() - 0.30).abs() < 1e-15);
        assert!(matches!(
            wrap_distance(&[0.1], &[0.1, 0.2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn wrap_distance_matches_shift_enumeration() {
        // all 9 integer shifts in {-1,0,1}^2
        let (a, b) = ([0.95, 0.10], [0.05, 0.40]);
        let mut best = f64::INFINITY;
        for r0 in -1..=1 {
            for r1 in -1..=1 {
                let x = (a[0] - b[0] + r0 as f64).abs();
                let y = (a[1] - b[1] + r1 as f64).abs();
                best = best.min(x.max(y));
            }
        }
        assert!((wrap_distance(&a, &b).unwrap() - best).abs() < 1e-15);
    }

    #[test]
    fn coordinates_are_reduced() {
        let ns = NodeSet::new(2, 4, &[vec![-0.25, 1.5]]).unwrap();
        assert_eq!(ns.node(0), &[0.75, 0.5]);
        assert!(NodeSet::new(1, 4, &[]).is_err());
        assert!(NodeSet::new(1, 0, &[vec![0.1]]).is_err());
    }

    #[test]
    fn single_node_is_one_cluster() {
        let ns = ns1(9, &[0.3]);
        let cd = decompose_clusters(&ns);
        assert_eq!(cd.clusters, vec![vec![0]]);
        assert_eq!(cd.lambda, 1);
        assert!(cd.valid);
        let gs = geometry_summary(&ns, &cd);
        assert!(gs.rho.is_infinite() && gs.tau.is_infinite());
        assert_eq!(gs.complexity, 1.0);
    }

    #[test]
    fn pair_and_singleton() {
        let ns = ns1(99, &[0.0, 0.005, 0.5]);
        let cd = decompose_clusters(&ns);
        assert_eq!(cd.clusters, vec![vec![0, 1], vec![2]]);
        assert_eq!(cd.lambda, 2);
        assert!(cd.valid);
    }

    #[test]
    fn chained_nodes_are_invalid() {
        let ns = ns1(9, &[0.0, 0.08, 0.16]);
        let cd = decompose_clusters(&ns);
        assert_eq!(cd.cluster_count(), 1);
        assert!(!cd.valid);
        assert_eq!(cd.message.as_deref(), Some("cluster diameter exceeds 1/N"));
    }

    #[test]
    fn summary_two_singletons() {
        let ns = ns1(9, &[0.0, 0.5]);
        let gs = geometry_summary(&ns, &decompose_clusters(&ns));
        assert!((gs.rho - 5.0).abs() < 1e-12);
        assert!((gs.tau - 5.0).abs() < 1e-12);
        assert_eq!(gs.complexity, 1.0);
    }

    #[test]
    fn pair_complexity_is_inverse_tau() {
        let tau = 0.01;
        let ns = ns1(99, &[0.0, tau / 100.0]);
        let gs = geometry_summary(&ns, &decompose_clusters(&ns));
        assert!((gs.complexity - 1.0 / tau).abs() / 100.0 < 1e-9);
    }

    #[test]
    fn equispaced_five_cluster_complexity() {
        let tau = 0.1;
        let big_n = 100.0;
        let pts: Vec<f64> = (0..5).map(|k| 0.3 + k as f64 * tau / big_n).collect();
        let ns = ns1(99, &pts);
        let gs = geometry_summary(&ns, &decompose_clusters(&ns));
        // centre node: distances tau, tau, 2 tau, 2 tau
        let direct = 1.0 / (tau * tau * (2.0 * tau) * (2.0 * tau));
        assert!((gs.complexity - direct).abs() / direct < 1e-9);
        assert_eq!(gs.shell_center, 2);
        let worst = max_complexity(5, tau).unwrap();
        assert!((gs.complexity - worst).abs() / worst < 1e-9);
        assert!((worst - 2500.0).abs() < 1e-9);
    }

    #[test]
    fn max_complexity_values() {
        assert_eq!(max_complexity(1, 0.3).unwrap(), 1.0);
        assert!((max_complexity(2, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(max_complexity(0, 0.5).is_err());
        assert!(max_complexity(2, 0.0).is_err());
        // log-space branch is continuous with the exact branch
        let exact = 0.9f64.powi(-20) / (factorial(10) * factorial(10));
        let logspace = max_complexity(21, 0.9).unwrap();
        assert!((logspace - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn full_grid_shells() {
        // N equispaced nodes, lambda = 1, rho = 1: at most two nodes per shell
        let big_n = 16;
        let pts: Vec<f64> = (0..big_n).map(|k| k as f64 / big_n as f64).collect();
        let ns = ns1(big_n - 1, &pts);
        let counts = shell_counts(&ns, 0, 1.0);
        assert_eq!(counts[0], 1);
        assert!(counts[1..].iter().all(|&c| c <= 2));
        assert_eq!(counts.iter().sum::<usize>(), big_n);
    }

    #[test]
    fn single_node_shells_empty() {
        let ns = ns1(31, &[0.2]);
        let gs = GeometrySummary {
            rho: 4.0,
            ..geometry_summary(&ns, &decompose_clusters(&ns))
        };
        let checks = shell_packing_check(&ns, &gs, 0);
        assert_eq!(checks.len(), 4);
        assert!(checks.iter().all(|c| c.count == 0 && c.pass));
    }

    #[test]
    fn csv_row_layout() {
        let ns = ns1(9, &[0.0, 0.5]);
        let gs = geometry_summary(&ns, &decompose_clusters(&ns));
        let row = gs.csv_row();
        assert_eq!(row.split(',').count(), GeometrySummary::CSV_HEADER.split(',').count());
        assert!(row.starts_with("1,9,10,2,2,1,"));
    }
}
