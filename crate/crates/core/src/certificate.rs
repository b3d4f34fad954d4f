//! Lagrange-like basis functions with decay and the robust-duality lower bound
//! on `||A^* v||_2`.
//!
//! Each basis function `I_j = G_j H_j` is a single separable term: per
//! coordinate, a polynomial in `z^Q` (the in-cluster Lagrange factor) times
//! the shifted kernel `d_P^beta(. - t_j)`. Since `P beta <= Q`, the two factors
//! occupy disjoint coefficient blocks and the product is assembled directly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dirichlet::{dirichlet_power_coeffs, dirichlet_power_eval, frac_mul, KernelSpec};
use crate::error::{Error, Result};
use crate::geometry::{wrap_scalar, ClusterDecomposition, NodeSet};
use crate::linalg::vec_norm;
use crate::trigpoly::{TrigPoly, UniPoly};

/// Smallest `|b - a|` accepted in a Lagrange denominator.
const DENOMINATOR_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateSpec {
    pub beta: usize,
    /// Blow-up factor `floor(n / lambda)`.
    pub q: usize,
    /// Kernel degree `floor(n / (lambda beta))`.
    pub p: usize,
    pub lambda: usize,
    pub d: usize,
    /// `n >= 2 beta^2 lambda`.
    pub within_hypotheses: bool,
}

impl CertificateSpec {
    pub fn new(ns: &NodeSet, cd: &ClusterDecomposition, beta: usize) -> Result<Self> {
        if beta == 0 || beta % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "beta must be even and positive, got {beta}"
            )));
        }
        let n = ns.degree();
        let lambda = cd.lambda.max(1);
        let q = n / lambda;
        let p = n / (lambda * beta);
        if q == 0 || p == 0 {
            return Err(Error::InvalidArgument(format!(
                "degree n = {n} too small for lambda = {lambda}, beta = {beta} (need n >= lambda beta)"
            )));
        }
        let used = p * beta + (lambda - 1) * q;
        if used > n {
            return Err(Error::DegreeBudget { used, n });
        }
        Ok(Self {
            beta,
            q,
            p,
            lambda,
            d: ns.dim(),
            within_hypotheses: n >= 2 * beta * beta * lambda,
        })
    }

    pub fn kernel(&self) -> KernelSpec {
        KernelSpec {
            m: self.p,
            beta: self.beta,
            d: self.d,
        }
    }
}

/// Coordinate realizing the wrap-around distance between `t_j` and `t_k`;
/// ties go to the smallest index.
pub fn coordinate_selector(ns: &NodeSet, j: usize, k: usize) -> usize {
    let (a, b) = (ns.node(j), ns.node(k));
    let mut best = 0;
    let mut best_val = -1.0;
    for l in 0..ns.dim() {
        let v = wrap_scalar(a[l] - b[l]).abs();
        if v > best_val {
            best = l;
            best_val = v;
        }
    }
    best
}

/// `e^{2 pi i Q x}` with the product reduced modulo 1 first.
fn blown_up(q: usize, x: f64) -> Complex64 {
    Complex64::cis(2.0 * PI * frac_mul(q, x - x.round()))
}

/// One Lagrange factor `(e(Q t_l) - a) / (b - a)` as `(coordinate, a, 1/(b - a))`.
#[derive(Debug, Clone, Copy)]
struct LagrangeFactor {
    coord: usize,
    a: Complex64,
    inv_den: Complex64,
}

fn lagrange_factors(ns: &NodeSet, cd: &ClusterDecomposition, j: usize, q: usize) -> Result<Vec<LagrangeFactor>> {
    let mut out = Vec::new();
    for &k in cd.cluster_of(j) {
        if k == j {
            continue;
        }
        let coord = coordinate_selector(ns, j, k);
        let a = blown_up(q, ns.node(k)[coord]);
        let b = blown_up(q, ns.node(j)[coord]);
        let den = b - a;
        if den.norm() < DENOMINATOR_GUARD {
            return Err(Error::DegenerateLagrange { j, k });
        }
        out.push(LagrangeFactor {
            coord,
            a,
            inv_den: den.inv(),
        });
    }
    Ok(out)
}

/// Per-coordinate coefficients (in powers of `z^Q`) of the Lagrange product.
fn lagrange_blocks(d: usize, factors: &[LagrangeFactor]) -> Vec<Vec<Complex64>> {
    let mut blocks = vec![vec![Complex64::new(1.0, 0.0)]; d];
    for f in factors {
        let cur = &blocks[f.coord];
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i] -= c * f.a * f.inv_den;
            next[i + 1] += c * f.inv_den;
        }
        blocks[f.coord] = next;
    }
    blocks
}

fn spread(block: &[Complex64], q: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); (block.len() - 1) * q + 1];
    for (i, &c) in block.iter().enumerate() {
        out[i * q] = c;
    }
    out
}

/// In-cluster Lagrange polynomial `G_j` with blow-up factor `q`.
#[allow(non_snake_case)]
pub fn lagrange_G(ns: &NodeSet, cd: &ClusterDecomposition, j: usize, q: usize) -> Result<TrigPoly> {
    if q == 0 {
        return Err(Error::InvalidArgument("blow-up factor Q must be >= 1".into()));
    }
    let factors = lagrange_factors(ns, cd, j, q)?;
    let polys = lagrange_blocks(ns.dim(), &factors)
        .iter()
        .map(|b| UniPoly::new(0, spread(b, q)))
        .collect();
    Ok(TrigPoly::separable(ns.degree(), Complex64::new(1.0, 0.0), polys))
}

/// `G_j(t)` in product form.
fn eval_lagrange(factors: &[LagrangeFactor], q: usize, t: &[f64]) -> Complex64 {
    factors
        .iter()
        .map(|f| (blown_up(q, t[f.coord]) - f.a) * f.inv_den)
        .product()
}

/// `I_j = G_j H_j` with `H_j = d_P^beta(. - t_j)`.
pub fn lagrange_like_basis(
    ns: &NodeSet,
    cd: &ClusterDecomposition,
    spec: &CertificateSpec,
    j: usize,
) -> Result<TrigPoly> {
    let factors = lagrange_factors(ns, cd, j, spec.q)?;
    let blocks = lagrange_blocks(ns.dim(), &factors);
    let kernel = dirichlet_power_coeffs(spec.p, spec.beta);
    let width = kernel.len();
    let tj = ns.node(j);
    let n = ns.degree();
    let mut polys = Vec::with_capacity(ns.dim());
    for (l, block) in blocks.iter().enumerate() {
        let len = (block.len() - 1) * spec.q + width;
        if len > n + 1 {
            return Err(Error::DegreeBudget { used: len - 1, n });
        }
        // d_P^beta(x - t) has coefficients c_k e^{-2 pi i k t}
        let r = tj[l] - tj[l].round();
        let shifted: Vec<Complex64> = kernel
            .iter()
            .enumerate()
            .map(|(k, &c)| Complex64::cis(-2.0 * PI * frac_mul(k, r)) * c)
            .collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (i, &g) in block.iter().enumerate() {
            for (k, &h) in shifted.iter().enumerate() {
                coeffs[i * spec.q + k] += g * h;
            }
        }
        polys.push(UniPoly::new(0, coeffs));
    }
    Ok(TrigPoly::separable(n, Complex64::new(1.0, 0.0), polys))
}

/// Basis functions prepared for product-form evaluation.
struct Basis {
    factors: Vec<Vec<LagrangeFactor>>,
    spec: CertificateSpec,
}

impl Basis {
    fn new(ns: &NodeSet, cd: &ClusterDecomposition, spec: &CertificateSpec) -> Result<Self> {
        let factors = (0..ns.len())
            .into_par_iter()
            .map(|j| lagrange_factors(ns, cd, j, spec.q))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors, spec: *spec })
    }

    fn eval(&self, ns: &NodeSet, j: usize, t: &[f64]) -> Complex64 {
        let diff: Vec<f64> = t.iter().zip(ns.node(j)).map(|(a, b)| a - b).collect();
        eval_lagrange(&self.factors[j], self.spec.q, t) * dirichlet_power_eval(self.spec.kernel(), &diff)
    }
}

/// `I_j(t)` evaluated in product form.
pub fn eval_basis(
    ns: &NodeSet,
    cd: &ClusterDecomposition,
    spec: &CertificateSpec,
    j: usize,
    t: &[f64],
) -> Result<Complex64> {
    let factors = lagrange_factors(ns, cd, j, spec.q)?;
    let diff: Vec<f64> = t.iter().zip(ns.node(j)).map(|(a, b)| a - b).collect();
    Ok(eval_lagrange(&factors, spec.q, t) * dirichlet_power_eval(spec.kernel(), &diff))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateResult {
    pub spec: CertificateSpec,
    pub eps_norm: f64,
    pub f_l2_norm: f64,
    /// `(1 - ||eps||) / ||f||`; `None` when `||eps|| >= 1` (inconclusive).
    pub lower_bound: Option<f64>,
    /// `eps_j = f(t_j) - v_j`.
    pub residuals: Vec<Complex64>,
}

impl CertificateResult {
    pub const CSV_HEADER: &'static str = "beta,Q,P,eps_norm,f_l2_norm,lower_bound,status,within_hypotheses";

    pub fn status(&self) -> &'static str {
        if self.lower_bound.is_some() {
            "conclusive"
        } else {
            "inconclusive"
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{},{},{}",
            self.spec.beta,
            self.spec.q,
            self.spec.p,
            self.eps_norm,
            self.f_l2_norm,
            self.lower_bound
                .map_or("inconclusive".to_string(), |b| format!("{b:e}")),
            self.status(),
            self.spec.within_hypotheses
        )
    }
}

fn check_unit(ns: &NodeSet, v: &[Complex64]) -> Result<()> {
    if v.len() != ns.len() {
        return Err(Error::DimensionMismatch {
            expected: ns.len(),
            actual: v.len(),
        });
    }
    let norm = vec_norm(v);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "vector must have unit norm, got {norm}"
        )));
    }
    Ok(())
}

/// The certificate polynomial `f = sum_k v_k I_k`.
pub fn certificate_polynomial(
    ns: &NodeSet,
    cd: &ClusterDecomposition,
    spec: &CertificateSpec,
    v: &[Complex64],
) -> Result<TrigPoly> {
    check_unit(ns, v)?;
    let bases = (0..ns.len())
        .into_par_iter()
        .map(|j| lagrange_like_basis(ns, cd, spec, j))
        .collect::<Result<Vec<_>>>()?;
    let mut f = TrigPoly::zero(ns.dim(), ns.degree());
    for (b, &vk) in bases.iter().zip(v) {
        f.add_scaled(b, vk);
    }
    Ok(f)
}

/// Certified lower bound on `||A^* v||_2` from the near-interpolant `f`.
pub fn robust_duality_bound(
    ns: &NodeSet,
    cd: &ClusterDecomposition,
    spec: &CertificateSpec,
    v: &[Complex64],
) -> Result<CertificateResult> {
    let f = certificate_polynomial(ns, cd, spec, v)?;
    let basis = Basis::new(ns, cd, spec)?;
    let residuals: Vec<Complex64> = (0..ns.len())
        .into_par_iter()
        .map(|j| {
            let tj = ns.node(j);
            let fj: Complex64 = (0..ns.len()).map(|k| v[k] * basis.eval(ns, k, tj)).sum();
            fj - v[j]
        })
        .collect();
    let eps_norm = vec_norm(&residuals);
    let f_l2_norm = f.norm_sq().sqrt();
    let lower_bound = (eps_norm < 1.0).then(|| (1.0 - eps_norm) / f_l2_norm);
    Ok(CertificateResult {
        spec: *spec,
        eps_norm,
        f_l2_norm,
        lower_bound,
        residuals,
    })
}

/// Pointwise decay estimate `beta^beta lambda^{beta+lambda-1} (2 N dist)^{-beta} C`.
pub fn decay_bound(spec: &CertificateSpec, big_n: usize, complexity: f64, dist: f64) -> f64 {
    let (b, l) = (spec.beta as f64, spec.lambda as f64);
    let ln = b * b.ln() + (b + l - 1.0) * l.ln() - b * (2.0 * big_n as f64 * dist).ln();
    ln.exp() * complexity
}

/// Estimate for `|<I_k, I_j>|`; `dist` is ignored inside a cluster.
pub fn gram_bound(spec: &CertificateSpec, big_n: usize, complexity: f64, same_cluster: bool, dist: f64) -> f64 {
    let (b, l, d, nf) = (spec.beta as f64, spec.lambda as f64, spec.d as f64, big_n as f64);
    let lead = l.powf(d) * b.powf(d / 2.0) / nf.powf(d) * l.powf(2.0 * l - 2.0) * complexity * complexity;
    if same_cluster {
        lead
    } else {
        lead * b.sqrt() / 2.0 * (l * b / (nf * dist)).powf(b)
    }
}

/// Sup-norm estimate `lambda^{lambda-1} C` for `G_j`.
pub fn lagrange_sup_bound(lambda: usize, complexity: f64) -> f64 {
    (lambda as f64).powi(lambda as i32 - 1) * complexity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::kernel_l2_norm_sq;
    use crate::geometry::{decompose_clusters, geometry_summary, wrap_distance};

    fn c1(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn clustered_1d() -> NodeSet {
        let n = 999;
        let big_n = 1000.0;
        NodeSet::new(
            1,
            n,
            &[
                vec![0.1],
                vec![0.1 + 0.3 / big_n],
                vec![0.1 + 0.7 / big_n],
                vec![0.6],
                vec![0.6 + 0.5 / big_n],
            ],
        )
        .unwrap()
    }

    #[test]
    fn singleton_is_shifted_kernel() {
        let ns = NodeSet::new(1, 200, &[vec![0.25]]).unwrap();
        let cd = decompose_clusters(&ns);
        let g = lagrange_G(&ns, &cd, 0, 10).unwrap();
        assert_eq!(g.eval(&[0.7]), c1(1.0));
        let spec = CertificateSpec::new(&ns, &cd, 2).unwrap();
        let i = lagrange_like_basis(&ns, &cd, &spec, 0).unwrap();
        assert!((i.eval(&[0.25]) - c1(1.0)).norm() < 1e-12);
        let r = robust_duality_bound(&ns, &cd, &spec, &[c1(1.0)]).unwrap();
        assert_eq!(r.eps_norm, 0.0);
        let expect = kernel_l2_norm_sq(spec.kernel()).powf(-0.5);
        assert!((r.lower_bound.unwrap() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn pair_interpolation() {
        let ns = NodeSet::new(1, 99, &[vec![0.3], vec![0.3 + 0.4 / 100.0]]).unwrap();
        let cd = decompose_clusters(&ns);
        let g = lagrange_G(&ns, &cd, 0, 49).unwrap();
        assert!((g.eval(&[0.3]) - c1(1.0)).norm() < 1e-12);
        assert!(g.eval(ns.node(1)).norm() < 1e-12);
    }

    #[test]
    fn kronecker_and_degree() {
        let ns = clustered_1d();
        let cd = decompose_clusters(&ns);
        let spec = CertificateSpec::new(&ns, &cd, 2).unwrap();
        for j in 0..ns.len() {
            let i = lagrange_like_basis(&ns, &cd, &spec, j).unwrap();
            assert!(i.within_degree());
            for &k in cd.cluster_of(j) {
                let want = if k == j { 1.0 } else { 0.0 };
                assert!((i.eval(ns.node(k)) - c1(want)).norm() < 1e-10, "j={j} k={k}");
                let prod = eval_basis(&ns, &cd, &spec, j, ns.node(k)).unwrap();
                assert!((prod - c1(want)).norm() < 1e-10);
            }
            // coefficient and product forms agree elsewhere
            for &t in &[0.05, 0.33, 0.61, 0.9] {
                let a = i.eval(&[t]);
                let b = eval_basis(&ns, &cd, &spec, j, &[t]).unwrap();
                assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn dense_oracle_matches_certificate_norm() {
        let ns = clustered_1d();
        let cd = decompose_clusters(&ns);
        let spec = CertificateSpec::new(&ns, &cd, 2).unwrap();
        let v: Vec<Complex64> = (0..5).map(|k| Complex64::new(1.0, k as f64) / 35f64.sqrt()).collect();
        let f = certificate_polynomial(&ns, &cd, &spec, &v).unwrap();
        let dense = f.to_dense(10_000).unwrap();
        let parseval: f64 = dense.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let r = robust_duality_bound(&ns, &cd, &spec, &v).unwrap();
        assert!((parseval - r.f_l2_norm).abs() < 1e-10 * parseval);
        // residuals from dense evaluation
        for j in 0..ns.len() {
            let t = ns.node(j)[0];
            let val: Complex64 = dense
                .iter()
                .enumerate()
                .map(|(k, z)| z * Complex64::cis(2.0 * PI * frac_mul(k, t)))
                .sum();
            assert!((val - v[j] - r.residuals[j]).norm() < 1e-9);
        }
    }

    #[test]
    fn lemma_estimates_hold() {
        let ns = clustered_1d();
        let cd = decompose_clusters(&ns);
        let gs = geometry_summary(&ns, &cd);
        let spec = CertificateSpec::new(&ns, &cd, 2).unwrap();
        let big_n = ns.bandwidth();
        let bases: Vec<_> = (0..ns.len())
            .map(|j| lagrange_like_basis(&ns, &cd, &spec, j).unwrap())
            .collect();
        for j in 0..ns.len() {
            let g = lagrange_G(&ns, &cd, j, spec.q).unwrap();
            let sup = (0..10_000)
                .map(|s| g.eval(&[s as f64 / 10_000.0]).norm())
                .fold(0.0, f64::max);
            assert!(sup <= lagrange_sup_bound(spec.lambda, gs.complexity));
            for s in 0..1000 {
                let t = [(s as f64 + 0.5) / 1000.0];
                if cd
                    .cluster_of(j)
                    .iter()
                    .any(|&k| wrap_distance(&t, ns.node(k)).unwrap() < 1e-9)
                {
                    continue;
                }
                let dist = wrap_distance(&t, ns.node(j)).unwrap();
                assert!(bases[j].eval(&t).norm() <= decay_bound(&spec, big_n, gs.complexity, dist));
            }
            for k in 0..ns.len() {
                let ip = bases[k].inner(&bases[j]).norm();
                let dist = ns.distance(j, k);
                let bound = gram_bound(&spec, big_n, gs.complexity, cd.same_cluster(j, k), dist);
                assert!(ip <= bound, "j={j} k={k} ip={ip} bound={bound}");
            }
        }
    }

    #[test]
    fn spec_checks() {
        let ns = clustered_1d();
        let cd = decompose_clusters(&ns);
        assert!(CertificateSpec::new(&ns, &cd, 3).is_err());
        let s = CertificateSpec::new(&ns, &cd, 2).unwrap();
        assert_eq!((s.q, s.p, s.lambda), (333, 166, 3));
        assert!(s.within_hypotheses);
        let s8 = CertificateSpec::new(&ns, &cd, 14).unwrap();
        assert!(!s8.within_hypotheses);
        let v = vec![c1(1.0); 5];
        assert!(robust_duality_bound(&ns, &cd, &s, &v).is_err());
    }

    #[test]
    fn selector_prefers_first_tie() {
        let ns = NodeSet::new(2, 10, &[vec![0.0, 0.0], vec![0.25, 0.75]]).unwrap();
        assert_eq!(coordinate_selector(&ns, 0, 1), 0);
        let ns = NodeSet::new(2, 10, &[vec![0.0, 0.0], vec![0.25, 0.625]]).unwrap();
        assert_eq!(coordinate_selector(&ns, 0, 1), 1);
    }
}
