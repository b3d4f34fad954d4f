//! Multivariate trigonometric polynomials stored as sums of separable terms.
//!
//! A [`TrigPoly`] is `sum_r c_r prod_l p_{r,l}(t_l)` with univariate factors
//! [`UniPoly`]. This keeps `d`-variate objects of degree `n` at `O(d n)` storage
//! per term; inner products factor over coordinates.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `sum_k coeffs[k] e^{2 pi i (offset + k) t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    pub offset: i64,
    pub coeffs: Vec<Complex64>,
}

impl UniPoly {
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        Self { offset, coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn min_index(&self) -> i64 {
        self.offset
    }

    pub fn max_index(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    /// Multiplication by `e^{2 pi i s t}`.
    pub fn shifted(&self, s: i64) -> Self {
        Self::new(self.offset + s, self.coeffs.clone())
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let r = t - t.round();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let x = (self.offset + k as i64) as f64 * r;
                c * Complex64::cis(2.0 * PI * (x - x.round()))
            })
            .sum()
    }

    /// `int_0^1 self(t) conj(other(t)) dt`.
    pub fn inner(&self, other: &UniPoly) -> Complex64 {
        let lo = self.min_index().max(other.min_index());
        let hi = self.max_index().min(other.max_index());
        let mut acc = Complex64::new(0.0, 0.0);
        for idx in lo..=hi {
            let a = self.coeffs[(idx - self.offset) as usize];
            let b = other.coeffs[(idx - other.offset) as usize];
            acc += a * b.conj();
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub coeff: Complex64,
    pub factors: Vec<UniPoly>,
}

impl SeparableTerm {
    pub fn eval(&self, t: &[f64]) -> Complex64 {
        self.factors
            .iter()
            .zip(t)
            .fold(self.coeff, |acc, (p, &x)| acc * p.eval(x))
    }

    pub fn inner(&self, other: &SeparableTerm) -> Complex64 {
        self.factors
            .iter()
            .zip(&other.factors)
            .fold(self.coeff * other.coeff.conj(), |acc, (a, b)| acc * a.inner(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    degree: usize,
    terms: Vec<SeparableTerm>,
}

impl TrigPoly {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            terms: Vec::new(),
        }
    }

    pub fn separable(degree: usize, coeff: Complex64, factors: Vec<UniPoly>) -> Self {
        Self {
            dim: factors.len(),
            degree,
            terms: vec![SeparableTerm { coeff, factors }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nominal max-degree `n`; coefficients are expected on `{0, ..., n}^d`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }

    pub fn push_term(&mut self, term: SeparableTerm) {
        debug_assert_eq!(term.factors.len(), self.dim);
        self.terms.push(term);
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &TrigPoly, s: Complex64) {
        for t in &other.terms {
            self.terms.push(SeparableTerm {
                coeff: t.coeff * s,
                factors: t.factors.clone(),
            });
        }
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// `int_{T^d} self conj(other)`, exact.
    pub fn inner(&self, other: &TrigPoly) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                acc += a.inner(b);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).re.max(0.0)
    }

    /// Per-coordinate `(min, max)` frequency index over all stored factors.
    pub fn support(&self) -> Vec<(i64, i64)> {
        let mut out = vec![(i64::MAX, i64::MIN); self.dim];
        for term in &self.terms {
            for (slot, p) in out.iter_mut().zip(&term.factors) {
                slot.0 = slot.0.min(p.min_index());
                slot.1 = slot.1.max(p.max_index());
            }
        }
        out
    }

    /// Whether every stored frequency lies in `{0, ..., n}^d`.
    pub fn within_degree(&self) -> bool {
        self.support()
            .iter()
            .all(|&(lo, hi)| self.terms.is_empty() || (lo >= 0 && hi <= self.degree as i64))
    }

    /// Dense coefficient tensor over `{0, ..., n}^d`, row-major with the first
    /// coordinate slowest.
    pub fn to_dense(&self, limit: usize) -> Result<Vec<Complex64>> {
        let side = self.degree + 1;
        let total = side
            .checked_pow(self.dim as u32)
            .filter(|&c| c <= limit)
            .ok_or(Error::SizeGuard {
                columns: side.saturating_pow(self.dim as u32),
                limit,
            })?;
        if !self.within_degree() {
            return Err(Error::InvalidArgument(
                "polynomial has coefficients outside {0,...,n}^d".into(),
            ));
        }
        let mut dense = vec![Complex64::new(0.0, 0.0); total];
        let mut idx = vec![0usize; self.dim];
        for term in &self.terms {
            let lens: Vec<usize> = term.factors.iter().map(|p| p.coeffs.len()).collect();
            idx.iter_mut().for_each(|i| *i = 0);
            'walk: loop {
                let mut value = term.coeff;
                let mut flat = 0usize;
                for (l, p) in term.factors.iter().enumerate() {
                    value *= p.coeffs[idx[l]];
                    flat = flat * side + (p.offset as usize + idx[l]);
                }
                dense[flat] += value;
                for l in (0..self.dim).rev() {
                    idx[l] += 1;
                    if idx[l] < lens[l] {
                        continue 'walk;
                    }
                    idx[l] = 0;
                }
                break;
            }
        }
        Ok(dense)
    }

    /// Writes `index,re,im` rows for every nonzero dense coefficient; the
    /// multi-index is joined with `:`.
    pub fn write_csv<W: Write>(&self, mut w: W, limit: usize) -> Result<()> {
        let dense = self.to_dense(limit)?;
        let side = self.degree + 1;
        writeln!(w, "index,re,im")?;
        for (flat, c) in dense.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let mut rem = flat;
            let mut parts = vec![0usize; self.dim];
            for l in (0..self.dim).rev() {
                parts[l] = rem % side;
                rem /= side;
            }
            let label: Vec<String> = parts.iter().map(usize::to_string).collect();
            writeln!(w, "{},{:e},{:e}", label.join(":"), c.re, c.im)?;
        }
        Ok(())
    }
}
