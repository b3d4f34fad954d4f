//! Extended-precision (256-bit) evaluation of the phase-removed Gram matrix.
//!
//! With `s_N(x) = sin(pi N x) / (N sin(pi x))` the Gram matrix factors as
//! `G = N^d Phi R Phi^*`, `Phi = diag(e^{pi i n sum_l t_jl})`,
//! `R_jk = prod_l s_N(t_jl - t_kl)`. `R` is real symmetric, so its smallest
//! eigenvalue can be resolved far below `f64` resolution of `||G||`: `R` is
//! formed and Cholesky-inverted in 256-bit arithmetic, and the largest
//! eigenpair of the (well-conditioned to represent) inverse is taken in `f64`.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex64;

use crate::geometry::NodeSet;
use crate::linalg::{hermitian_eigen, CMatrix};

pub const PRECISION_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

/// Arithmetic context: precision plus the cache of constants.
pub struct Hp {
    cc: Consts,
    pi: BigFloat,
}

impl Default for Hp {
    fn default() -> Self {
        Self::new()
    }
}

impl Hp {
    pub fn new() -> Self {
        let mut cc = Consts::new().expect("astro-float constant cache");
        let pi = cc.pi(PRECISION_BITS, RM);
        Self { cc, pi }
    }

    pub fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, PRECISION_BITS)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, PRECISION_BITS, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, PRECISION_BITS, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, PRECISION_BITS, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, PRECISION_BITS, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(PRECISION_BITS, RM)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(PRECISION_BITS, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(PRECISION_BITS, RM, &mut self.cc)
    }

    /// `(cos 2 pi x, sin 2 pi x)`.
    pub fn cis_turns(&mut self, x: f64) -> (BigFloat, BigFloat) {
        let two_pi = self.mul(&self.num(2.0), &self.pi);
        let arg = self.mul(&two_pi, &self.num(x));
        (self.cos(&arg), self.sin(&arg))
    }

    /// `s_N(x)` for a real (unreduced) `x`; equals 1 at `x = 0`.
    pub fn sinc_ratio(&mut self, big_n: usize, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return self.num(1.0);
        }
        let px = self.mul(&self.pi, x);
        let n = self.num(big_n as f64);
        let arg = self.mul(&px, &n);
        let top = self.sin(&arg);
        let sp = self.sin(&px);
        let bottom = self.mul(&n, &sp);
        self.div(&top, &bottom)
    }

    /// `prod_l s_N(a_l - b_l)` with the differences formed exactly.
    pub fn sinc_product(&mut self, big_n: usize, a: &[f64], b: &[f64]) -> BigFloat {
        let mut acc = self.num(1.0);
        for (&x, &y) in a.iter().zip(b) {
            let delta = self.sub(&self.num(x), &self.num(y));
            let s = self.sinc_ratio(big_n, &delta);
            acc = self.mul(&acc, &s);
        }
        acc
    }
}

/// Nearest `f64` to a finite `BigFloat`.
pub fn to_f64(x: &BigFloat) -> f64 {
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if x.is_zero() || words.is_empty() {
        return 0.0;
    }
    // value = 0.m * 2^exp with the top word holding the leading bits
    let top = words[words.len() - 1];
    let mut v = top as f64;
    let mut e = exp - 64;
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    v *= 2f64.powi(e);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Real symmetric matrix of `BigFloat`s, row-major.
pub struct HpMatrix {
    pub n: usize,
    pub data: Vec<BigFloat>,
}

impl HpMatrix {
    pub fn get(&self, i: usize, j: usize) -> &BigFloat {
        &self.data[i * self.n + j]
    }
}

/// `R_jk = prod_l s_N(t_jl - t_kl)` in extended precision.
pub fn phase_removed_gram(ns: &NodeSet, hp: &mut Hp) -> HpMatrix {
    let m = ns.len();
    let big_n = ns.bandwidth();
    let mut data = vec![hp.num(1.0); m * m];
    for j in 0..m {
        for k in (j + 1)..m {
            let v = hp.sinc_product(big_n, ns.node(j), ns.node(k));
            data[k * m + j] = v.clone();
            data[j * m + k] = v;
        }
    }
    HpMatrix { n: m, data }
}

/// Phases `Phi_j = e^{pi i n sum_l t_jl}` linking `R` to `G`.
pub fn gram_phases(ns: &NodeSet) -> Vec<Complex64> {
    let n = ns.degree() as f64;
    ns.nodes()
        .map(|t| {
            let s: f64 = t.iter().sum();
            let x = (n * s).rem_euclid(2.0);
            Complex64::cis(std::f64::consts::PI * x)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PreciseMinEigen {
    /// Smallest eigenvalue of `R`.
    pub value: f64,
    /// Unit eigenvector of `R`.
    pub vector: Vec<f64>,
    /// `||R y - value y|| / ||R||_F`, evaluated in extended precision.
    pub relative_residual: f64,
}

/// Smallest eigenpair of a symmetric positive definite `R`. Returns `None`
/// when the extended-precision Cholesky factorization breaks down.
pub fn min_eigen_spd(r: &HpMatrix, hp: &mut Hp) -> Option<PreciseMinEigen> {
    let n = r.n;
    let zero = hp.num(0.0);
    // lower Cholesky factor
    let mut l = vec![zero.clone(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = r.get(i, j).clone();
            for k in 0..j {
                s = hp.sub(&s, &hp.mul(&l[i * n + k], &l[j * n + k]));
            }
            if i == j {
                if !s.is_positive() || s.is_zero() {
                    return None;
                }
                l[i * n + i] = hp.sqrt(&s);
            } else {
                l[i * n + j] = hp.div(&s, &l[j * n + j]);
            }
        }
    }
    // W = L^{-1}, lower triangular
    let mut w = vec![zero.clone(); n * n];
    for j in 0..n {
        w[j * n + j] = hp.div(&hp.num(1.0), &l[j * n + j]);
        for i in (j + 1)..n {
            let mut s = zero.clone();
            for k in j..i {
                s = hp.add(&s, &hp.mul(&l[i * n + k], &w[k * n + j]));
            }
            w[i * n + j] = hp.div(&s, &l[i * n + i]).neg();
        }
    }
    // R^{-1} = W^T W, rounded to f64 after exact-enough accumulation
    let mut inv = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut s = zero.clone();
            for k in j..n {
                s = hp.add(&s, &hp.mul(&w[k * n + i], &w[k * n + j]));
            }
            let v = to_f64(&s);
            inv[(i, j)] = Complex64::new(v, 0.0);
            inv[(j, i)] = Complex64::new(v, 0.0);
        }
    }
    let eig = hermitian_eigen(&inv).ok()?;
    let top = n - 1;
    let mu = eig.values[top];
    if !(mu > 0.0) {
        return None;
    }
    let raw = eig.vectors.column(top);
    // the eigenvector of a real symmetric matrix is real up to a global phase
    let pivot = raw
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let align = pivot.conj() / pivot.norm();
    let mut y: Vec<f64> = raw.iter().map(|z| (z * align).re).collect();
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    y.iter_mut().for_each(|v| *v /= norm);

    // one inverse-iteration step in extended precision, y <- W^T W y, so the
    // Rayleigh quotient is not polluted by the f64 rounding of y
    let yh: Vec<BigFloat> = y.iter().map(|&v| hp.num(v)).collect();
    let mut wy = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = zero.clone();
        for k in 0..=i {
            s = hp.add(&s, &hp.mul(&w[i * n + k], &yh[k]));
        }
        wy.push(s);
    }
    let mut z = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = zero.clone();
        for k in i..n {
            s = hp.add(&s, &hp.mul(&w[k * n + i], &wy[k]));
        }
        z.push(s);
    }
    let (value, relative_residual) = rayleigh_and_residual(r, &z, hp);
    let mut vector: Vec<f64> = z.iter().map(to_f64).collect();
    let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    vector.iter_mut().for_each(|v| *v /= norm);
    Some(PreciseMinEigen {
        value,
        vector,
        relative_residual,
    })
}

fn rayleigh_and_residual(r: &HpMatrix, y: &[BigFloat], hp: &mut Hp) -> (f64, f64) {
    let n = r.n;
    let mut ry = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = hp.num(0.0);
        for k in 0..n {
            s = hp.add(&s, &hp.mul(r.get(i, k), &y[k]));
        }
        ry.push(s);
    }
    let mut num = hp.num(0.0);
    let mut den = hp.num(0.0);
    for i in 0..n {
        num = hp.add(&num, &hp.mul(&y[i], &ry[i]));
        den = hp.add(&den, &hp.mul(&y[i], &y[i]));
    }
    let rq = hp.div(&num, &den);
    let mut res = hp.num(0.0);
    let mut fro = 0.0;
    let norm_y = to_f64(&den).sqrt();
    for i in 0..n {
        let e = hp.sub(&ry[i], &hp.mul(&rq, &y[i]));
        res = hp.add(&res, &hp.mul(&e, &e));
        for k in 0..n {
            fro += to_f64(r.get(i, k)).powi(2);
        }
    }
    (to_f64(&rq), to_f64(&res).sqrt() / (norm_y * fro.sqrt()))
}

/// `1 - prod_l |s_N(delta_l)|`, i.e. `1 - |d_n(delta)|`, without cancellation.
pub fn one_minus_abs_dirichlet(big_n: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut hp = Hp::new();
    let p = hp.sinc_product(big_n, a, b);
    let mut abs = p.clone();
    if abs.is_negative() {
        abs = abs.neg();
    }
    to_f64(&hp.sub(&hp.num(1.0), &abs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_round_trips() {
        for &x in &[1.0, -2.5, 1e-30, 3.0e-200, 123456.789, f64::MIN_POSITIVE * 4.0] {
            let b = BigFloat::from_f64(x, PRECISION_BITS);
            assert_eq!(to_f64(&b), x);
        }
        assert_eq!(to_f64(&BigFloat::from_f64(0.0, PRECISION_BITS)), 0.0);
    }

    #[test]
    fn sinc_ratio_matches_f64() {
        let mut hp = Hp::new();
        for &x in &[0.013, 0.25, -0.4, 1e-3] {
            let big_n = 17;
            let expect =
                (std::f64::consts::PI * big_n as f64 * x).sin() / (big_n as f64 * (std::f64::consts::PI * x).sin());
            let got = to_f64(&hp.sinc_ratio(big_n, &hp.num(x)));
            assert!((got - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn tiny_gap_keeps_digits() {
        // 1 - s_N(x) ~ pi^2 (N^2 - 1) x^2 / 6
        let big_n = 1001;
        let x = 1e-12;
        let v = one_minus_abs_dirichlet(big_n, &[x], &[0.0]);
        let approx = std::f64::consts::PI.powi(2) * ((big_n * big_n - 1) as f64) * x * x / 6.0;
        assert!((v - approx).abs() / approx < 1e-9);
    }

    #[test]
    fn min_eigen_of_known_matrix() {
        let mut hp = Hp::new();
        // [[1, c], [c, 1]] has eigenvalues 1 +- c
        let c = 1.0 - 1e-12;
        let data = vec![hp.num(1.0), hp.num(c), hp.num(c), hp.num(1.0)];
        let r = HpMatrix { n: 2, data };
        let e = min_eigen_spd(&r, &mut hp).unwrap();
        // 1 - c is not exact in f64; compare against the stored value
        let exact = to_f64(&hp.sub(&hp.num(1.0), &hp.num(c)));
        assert!((e.value - exact).abs() / exact < 1e-12);
        assert!(e.relative_residual < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut hp = Hp::new();
        let data = vec![hp.num(1.0); 4];
        assert!(min_eigen_spd(&HpMatrix { n: 2, data }, &mut hp).is_none());
    }
}
