//! The modified Dirichlet kernel `d_m(t) = (m+1)^{-1} sum_{k=0}^m e^{2 pi i k t}`
//! and its tensor powers `d_m^beta(t) = (prod_l d_m(t_l))^beta`.
//!
//! Norms and inner products are exact: they are computed from Fourier
//! coefficients, never by quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::wrap_norm;
use crate::trigpoly::{TrigPoly, UniPoly};

const NEAR_ZERO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSpec {
    pub m: usize,
    pub beta: usize,
    pub d: usize,
}

impl KernelSpec {
    pub fn new(m: usize, beta: usize, d: usize) -> Result<Self> {
        if m == 0 || beta == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "kernel needs m, beta, d >= 1 (got m={m}, beta={beta}, d={d})"
            )));
        }
        Ok(Self { m, beta, d })
    }

    /// Whether the decay and norm estimates apply (`m >= beta`).
    pub fn in_estimate_range(&self) -> bool {
        self.m >= self.beta
    }
}

/// `d_m(t)`.
pub fn dirichlet_eval(m: usize, t: f64) -> Complex64 {
    let r = t - t.round();
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let s = (PI * r).sin();
    if s.abs() < NEAR_ZERO {
        let sum: Complex64 = (0..=m).map(|k| Complex64::cis(2.0 * PI * k as f64 * r)).sum();
        return sum / (m + 1) as f64;
    }
    let amp = (PI * (m + 1) as f64 * r).sin() / ((m + 1) as f64 * s);
    Complex64::cis(PI * m as f64 * r) * amp
}

/// `d_m^beta(t)` for a `d`-vector `t`.
pub fn dirichlet_power_eval(spec: KernelSpec, t: &[f64]) -> Complex64 {
    let base: Complex64 = t.iter().map(|&x| dirichlet_eval(spec.m, x)).product();
    base.powu(spec.beta as u32)
}

/// Fourier coefficients of the univariate `d_m^beta` on `{0, ..., m beta}`:
/// the `beta`-fold convolution of the constant vector `1/(m+1)`.
pub fn dirichlet_power_coeffs(m: usize, beta: usize) -> Vec<f64> {
    let w = 1.0 / (m + 1) as f64;
    let mut cur = vec![w; m + 1];
    for _ in 1..beta {
        let mut next = vec![0.0; cur.len() + m];
        for (i, &c) in cur.iter().enumerate() {
            let cw = c * w;
            for slot in &mut next[i..=i + m] {
                *slot += cw;
            }
        }
        cur = next;
    }
    cur
}

/// `d_m^beta` as a univariate trigonometric polynomial of degree `m beta`.
pub fn dirichlet_power_poly(m: usize, beta: usize) -> TrigPoly {
    let coeffs = dirichlet_power_coeffs(m, beta)
        .into_iter()
        .map(|c| Complex64::new(c, 0.0))
        .collect();
    TrigPoly::separable(m * beta, Complex64::new(1.0, 0.0), vec![UniPoly::new(0, coeffs)])
}

/// Fourier coefficients of `d_m^beta`, kept for repeated norm and
/// inner-product queries.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub spec: KernelSpec,
    coeffs: Vec<f64>,
}

impl KernelTable {
    pub fn new(spec: KernelSpec) -> Self {
        Self {
            spec,
            coeffs: dirichlet_power_coeffs(spec.m, spec.beta),
        }
    }

    /// Univariate coefficients on `{0, ..., m beta}`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        let uni: f64 = self.coeffs.iter().map(|c| c * c).sum();
        uni.powi(self.spec.d as i32)
    }

    /// `<d_m^beta, d_m^beta(. - t)>` with `<f, g> = int f conj(g)`.
    pub fn shifted_inner_product(&self, t: &[f64]) -> Complex64 {
        t.iter()
            .map(|&x| {
                let r = x - x.round();
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &ck)| Complex64::cis(2.0 * PI * frac_mul(k, r)) * (ck * ck))
                    .sum::<Complex64>()
            })
            .product()
    }
}

/// `||d_m^beta||^2_{L^2(T^d)}` via Parseval.
pub fn kernel_l2_norm_sq(spec: KernelSpec) -> f64 {
    KernelTable::new(spec).norm_sq()
}

/// `<d_m^beta, d_m^beta(. - t)>` with `<f, g> = int f conj(g)`.
pub fn kernel_shifted_inner_product(spec: KernelSpec, t: &[f64]) -> Complex64 {
    KernelTable::new(spec).shifted_inner_product(t)
}

// k * r reduced to [-1/2, 1/2) without losing digits for large k
pub(crate) fn frac_mul(k: usize, r: f64) -> f64 {
    let x = k as f64 * r;
    x - x.round()
}

/// Pointwise decay estimate for `|d_m^beta(t)|`, `(2 (m+1) |t|)^{-beta}`.
pub fn pointwise_decay_bound(spec: KernelSpec, t: &[f64]) -> f64 {
    (2.0 * (spec.m + 1) as f64 * wrap_norm(t)).powi(-(spec.beta as i32))
}

/// Upper estimate `((m+1)^d beta^{d/2})^{-1}` for the squared norm.
pub fn norm_sq_upper_bound(spec: KernelSpec) -> f64 {
    let mp1 = (spec.m + 1) as f64;
    1.0 / (mp1.powi(spec.d as i32) * (spec.beta as f64).powf(spec.d as f64 / 2.0))
}

/// Upper estimate for the modulus of the shifted inner product at `t != 0`.
pub fn shifted_inner_product_bound(spec: KernelSpec, t: &[f64]) -> f64 {
    let mp1 = (spec.m + 1) as f64;
    let d = spec.d as f64;
    let lead = 1.0 / (2.0 * mp1.powi(spec.d as i32) * (spec.beta as f64).powf((d - 1.0) / 2.0));
    lead * (mp1 * wrap_norm(t)).powi(-(spec.beta as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn eval_special_points() {
        assert_eq!(dirichlet_eval(7, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(dirichlet_eval(7, 3.0), Complex64::new(1.0, 0.0));
        assert!(dirichlet_eval(1, 0.5).norm() < 1e-15);
        assert!(dirichlet_eval(2, 1.0 / 3.0).norm() < 1e-15);
    }

    #[test]
    fn eval_matches_sum_definition() {
        for m in [1, 2, 5, 16, 63] {
            for &t in &[1e-15, 1e-9, 0.013, 0.25, 0.5, 0.77, -0.31] {
                let direct: Complex64 = (0..=m)
                    .map(|k| Complex64::cis(2.0 * PI * k as f64 * t))
                    .sum::<Complex64>()
                    / (m + 1) as f64;
                assert!((dirichlet_eval(m, t) - direct).norm() < 1e-12, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn power_eval_examples() {
        let spec = KernelSpec::new(1, 2, 2).unwrap();
        assert_eq!(dirichlet_power_eval(spec, &[0.0, 0.0]), Complex64::new(1.0, 0.0));
        assert!(dirichlet_power_eval(spec, &[0.5, 0.0]).norm() < 1e-15);
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(dirichlet_power_coeffs(3, 1), vec![0.25; 4]);
        let c = dirichlet_power_coeffs(1, 2);
        assert!(c.iter().zip([0.25, 0.5, 0.25]).all(|(a, b)| (a - b).abs() < 1e-16));
        for (m, beta) in [(4, 3), (10, 6), (33, 8)] {
            let c = dirichlet_power_coeffs(m, beta);
            assert_eq!(c.len(), m * beta + 1);
            assert!(c.iter().all(|&x| x >= 0.0));
            assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn norm_examples() {
        for m in [1, 5, 40] {
            let spec = KernelSpec::new(m, 1, 1).unwrap();
            assert!(close(kernel_l2_norm_sq(spec), 1.0 / (m + 1) as f64, 1e-14));
        }
        let s = KernelSpec::new(2, 2, 1).unwrap();
        assert!(close(kernel_l2_norm_sq(s), 19.0 / 81.0, 1e-14));
        let s = KernelSpec::new(3, 3, 1).unwrap();
        let expected = 0.25 * (11.0 / 20.0 + 1.0 / 64.0 + 1.0 / 1280.0);
        assert!(close(kernel_l2_norm_sq(s), expected, 1e-14));
        let s2 = KernelSpec::new(3, 3, 2).unwrap();
        assert!(close(kernel_l2_norm_sq(s2), expected * expected, 1e-14));
    }

    #[test]
    fn shifted_inner_product_examples() {
        let spec = KernelSpec::new(9, 3, 2).unwrap();
        let at_zero = kernel_shifted_inner_product(spec, &[0.0, 0.0]);
        assert!(close(at_zero.re, kernel_l2_norm_sq(spec), 1e-14) && at_zero.im.abs() < 1e-16);
        let s1 = KernelSpec::new(12, 1, 1).unwrap();
        for &t in &[0.01, 0.2, 0.49, 0.73] {
            let ip = kernel_shifted_inner_product(s1, &[t]);
            let expected = dirichlet_eval(12, t) / 13.0;
            assert!((ip - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn poly_agrees_with_closed_form() {
        let p = dirichlet_power_poly(6, 3);
        for &t in &[0.0, 0.1, 0.37, 0.9] {
            let spec = KernelSpec::new(6, 3, 1).unwrap();
            assert!((p.eval(&[t]) - dirichlet_power_eval(spec, &[t])).norm() < 1e-14);
        }
    }
}
