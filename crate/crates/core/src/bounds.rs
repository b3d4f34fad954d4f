//! Closed-form lower and upper bounds on `sigma_min` with their
//! preconditions. Every report carries the full checklist of conditions with
//! evaluated sides; nothing is assumed.

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::geometry::{fmt_f64, ln_factorial, max_complexity, ClusterDecomposition, GeometrySummary, NodeSet};
use crate::precise::one_minus_abs_dirichlet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Upper,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Eq,
}

impl Relation {
    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Eq => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub description: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub pass: bool,
}

impl Condition {
    pub fn new(description: impl Into<String>, lhs: f64, relation: Relation, rhs: f64) -> Self {
        Self {
            description: description.into(),
            lhs,
            relation,
            rhs,
            pass: relation.holds(lhs, rhs),
        }
    }

    fn flag(description: impl Into<String>, ok: bool) -> Self {
        Self::new(description, if ok { 1.0 } else { 0.0 }, Relation::Eq, 1.0)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.description,
            fmt_f64(self.lhs),
            self.relation.symbol(),
            fmt_f64(self.rhs),
            if self.pass { "pass" } else { "fail" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub direction: Direction,
    pub conditions: Vec<Condition>,
    /// `None` when the formula cannot be evaluated (e.g. a required witness is missing).
    pub value: Option<f64>,
    pub applicable: bool,
    pub beta: Option<usize>,
    pub caveat: Option<&'static str>,
    pub formula: &'static str,
}

impl BoundReport {
    fn new(
        name: &'static str,
        direction: Direction,
        formula: &'static str,
        conditions: Vec<Condition>,
        value: Option<f64>,
    ) -> Self {
        let applicable = value.is_some() && conditions.iter().all(|c| c.pass);
        Self {
            name,
            direction,
            conditions,
            value,
            applicable,
            beta: None,
            caveat: None,
            formula,
        }
    }

    fn with_beta(mut self, beta: usize) -> Self {
        self.beta = Some(beta);
        self
    }

    /// Whether the report is applicable and contradicts `sigma_min` beyond a
    /// relative slack.
    pub fn violated_by(&self, sigma_min: f64, rel_tol: f64) -> bool {
        match (self.applicable, self.value) {
            (true, Some(v)) => match self.direction {
                Direction::Lower => v > sigma_min * (1.0 + rel_tol),
                Direction::Upper => v < sigma_min * (1.0 - rel_tol),
            },
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// zeta

fn zeta_cache() -> &'static RwLock<HashMap<u64, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Riemann zeta for real `s > 1`: partial sum plus the midpoint of the
/// integral tail bracket.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("zeta needs s > 1, got {s}")));
    }
    let key = s.to_bits();
    if let Some(&v) = zeta_cache().read().expect("zeta cache").get(&key) {
        return Ok(v);
    }
    // the bracket half-width is about s K^{-s} / 2 / (s - 1)
    let k = (2e12 * s / (s - 1.0)).powf(1.0 / s).ceil().max(10.0) as u64;
    let v = zeta_with_terms(s, k);
    zeta_cache().write().expect("zeta cache").insert(key, v);
    Ok(v)
}

pub(crate) fn zeta_with_terms(s: f64, k: u64) -> f64 {
    let integer = s.fract() == 0.0 && s < 64.0;
    let term = |j: u64| {
        if integer {
            (j as f64).powi(-(s as i32))
        } else {
            (j as f64).powf(-s)
        }
    };
    let partial: f64 = (1..=k).rev().map(term).sum();
    let lo = ((k + 1) as f64).powf(1.0 - s) / (s - 1.0);
    let hi = (k as f64).powf(1.0 - s) / (s - 1.0);
    partial + 0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// shared pieces

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn validity(gs: &GeometrySummary) -> Condition {
    Condition::flag("clustered configuration valid", gs.valid)
}

fn theorem_preconditions(gs: &GeometrySummary, beta: usize) -> Vec<Condition> {
    let d = gs.dim;
    vec![
        validity(gs),
        Condition::flag("beta even", beta % 2 == 0 && beta > 0),
        Condition::new("beta >= d + 1", beta as f64, Relation::Ge, (d + 1) as f64),
        Condition::new(
            "N > 2 beta^2 lambda",
            gs.bandwidth() as f64,
            Relation::Gt,
            2.0 * (beta * beta * gs.lambda) as f64,
        ),
    ]
}

/// `ln(2^d (2^d - 1))`.
fn ln_packing(d: usize) -> f64 {
    let p = 2f64.powi(d as i32);
    (p * (p - 1.0)).ln()
}

fn lambda_ln_lambda(lambda: usize) -> f64 {
    let l = lambda as f64;
    l * l.ln()
}

/// Separation threshold `lambda beta (beta^{1/2} 2^d (2^d-1) lambda^lambda zeta(beta-d+1) C)^{1/beta}`.
pub fn theorem41_threshold(d: usize, lambda: usize, beta: usize, complexity: f64) -> Result<f64> {
    if beta < d + 1 {
        return Err(Error::InvalidArgument(format!(
            "beta = {beta} < d + 1 makes zeta(beta - d + 1) diverge"
        )));
    }
    let z = zeta((beta - d + 1) as f64)?;
    let b = beta as f64;
    let ln_inner = 0.5 * b.ln() + ln_packing(d) + lambda_ln_lambda(lambda) + z.ln() + complexity.ln();
    Ok(lambda as f64 * b * (ln_inner / b).exp())
}

/// `(1.5 beta^{d/4} lambda^{lambda+d/2-1/2})^{-1} N^{d/2} / C`.
pub fn theorem41_value(d: usize, big_n: usize, lambda: usize, beta: usize, complexity: f64) -> f64 {
    let (df, l) = (d as f64, lambda as f64);
    let ln = 0.5 * df * (big_n as f64).ln()
        - 1.5f64.ln()
        - 0.25 * df * (beta as f64).ln()
        - (l + 0.5 * df - 0.5) * l.ln()
        - complexity.ln();
    ln.exp()
}

// ---------------------------------------------------------------------------
// lower bounds

pub fn theorem41(gs: &GeometrySummary, beta: usize) -> BoundReport {
    let d = gs.dim;
    let mut conditions = theorem_preconditions(gs, beta);
    let value = theorem41_value(d, gs.bandwidth(), gs.lambda, beta, gs.complexity);
    match theorem41_threshold(d, gs.lambda, beta, gs.complexity) {
        Ok(t) => conditions.push(Condition::new("rho >= separation threshold", gs.rho, Relation::Ge, t)),
        Err(_) => conditions.push(Condition::flag("separation threshold defined", false)),
    }
    BoundReport::new(
        "theorem41",
        Direction::Lower,
        "rho >= lambda beta (beta^(1/2) 2^d (2^d-1) lambda^lambda zeta(beta-d+1) C)^(1/beta) \
         => sigma_min >= N^(d/2) / (1.5 beta^(d/4) lambda^(lambda+d/2-1/2) C)",
        conditions,
        Some(value),
    )
    .with_beta(beta)
}

/// `d = 1`, `beta = 2`, complexity replaced by its worst case over separation `tau`.
pub fn corollary42(gs: &GeometrySummary) -> Result<BoundReport> {
    if gs.dim != 1 {
        return Err(Error::InvalidArgument("corollary42 requires d = 1".into()));
    }
    let lambda = gs.lambda;
    let tau = gs.tau;
    let worst = if lambda == 1 { 1.0 } else { max_complexity(lambda, tau)? };
    let mut conditions = theorem_preconditions(gs, 2);
    conditions.push(Condition::new(
        "rho >= separation threshold (worst-case C)",
        gs.rho,
        Relation::Ge,
        theorem41_threshold(1, lambda, 2, worst)?,
    ));
    let l1 = lambda as f64 - 1.0;
    let tau_term = if lambda == 1 { 0.0 } else { l1 * tau.ln() };
    let ln = 0.5 * (gs.bandwidth() as f64).ln() + tau_term - 1.8f64.ln() - l1 * (2.0 * E).ln();
    Ok(BoundReport::new(
        "corollary42",
        Direction::Lower,
        "sigma_min >= sqrt(N) tau^(lambda-1) / (1.8 (2e)^(lambda-1))",
        conditions,
        Some(ln.exp()),
    )
    .with_beta(2))
}

/// Smallest even `beta >= d + 1`.
pub fn best_beta_choice(d: usize) -> usize {
    if d % 2 == 1 {
        d + 1
    } else {
        d + 2
    }
}

/// `beta = 2 ceil(ln(2^d (2^d-1) lambda^lambda zeta(2) C) / 2)`, at least 2.
pub fn weakest_beta_choice(d: usize, lambda: usize, complexity: f64) -> usize {
    let z2 = PI * PI / 6.0;
    let x = ln_packing(d) + lambda_ln_lambda(lambda) + z2.ln() + complexity.ln();
    (2 * (0.5 * x).ceil().max(1.0) as usize).max(2)
}

pub fn best_beta(gs: &GeometrySummary) -> BoundReport {
    let d = gs.dim;
    let (df, l) = (d as f64, gs.lambda as f64);
    let beta = best_beta_choice(d);
    let mut conditions = theorem_preconditions(gs, beta);
    let threshold = 6.0 * df * l * ((lambda_ln_lambda(gs.lambda) + gs.complexity.ln()) / (df + 1.0)).exp();
    conditions.push(Condition::new(
        "rho >= 6 d lambda (lambda^lambda C)^(1/(d+1))",
        gs.rho,
        Relation::Ge,
        threshold,
    ));
    let ln = 0.5 * df * (gs.bandwidth() as f64).ln()
        - 3f64.ln()
        - 0.25 * df * df.ln()
        - (l + 0.5 * df - 0.5) * l.ln()
        - gs.complexity.ln();
    BoundReport::new(
        "best_beta",
        Direction::Lower,
        "rho >= 6 d lambda (lambda^lambda C)^(1/(d+1)) \
         => sigma_min >= N^(d/2) / (3 d^(d/4) lambda^(lambda+d/2-1/2) C)",
        conditions,
        Some(ln.exp()),
    )
    .with_beta(beta)
}

/// `2.5 + 1.4 d + lambda ln lambda + ln C`.
fn weakest_core(d: usize, lambda: usize, complexity: f64) -> f64 {
    2.5 + 1.4 * d as f64 + lambda_ln_lambda(lambda) + complexity.ln()
}

pub fn weakest_condition(gs: &GeometrySummary) -> BoundReport {
    let d = gs.dim;
    let (df, l) = (d as f64, gs.lambda as f64);
    let beta = weakest_beta_choice(d, gs.lambda, gs.complexity);
    let core = weakest_core(d, gs.lambda, gs.complexity);
    let mut conditions = theorem_preconditions(gs, beta);
    conditions.push(Condition::new(
        "rho >= 3.3 lambda (2.5 + 1.4 d + lambda ln lambda + ln C)",
        gs.rho,
        Relation::Ge,
        3.3 * l * core,
    ));
    let ln = 0.5 * df * (gs.bandwidth() as f64).ln()
        - 1.5f64.ln()
        - 0.25 * df * core.ln()
        - (l + 0.5 * df - 0.5) * l.ln()
        - gs.complexity.ln();
    BoundReport::new(
        "weakest_condition",
        Direction::Lower,
        "rho >= 3.3 lambda X, X = 2.5 + 1.4 d + lambda ln lambda + ln C \
         => sigma_min >= N^(d/2) / (1.5 X^(d/4) lambda^(lambda+d/2-1/2) C)",
        conditions,
        Some(ln.exp()),
    )
    .with_beta(beta)
}

pub fn well_separated(gs: &GeometrySummary) -> BoundReport {
    let d = gs.dim;
    let df = d as f64;
    let beta = best_beta_choice(d);
    let mut conditions = theorem_preconditions(gs, beta);
    conditions.push(Condition::new("lambda == 1", gs.lambda as f64, Relation::Eq, 1.0));
    conditions.push(Condition::new("rho >= 6 d", gs.rho, Relation::Ge, 6.0 * df));
    let value = (gs.bandwidth() as f64).powf(df / 2.0) / (3.0 * df.powf(df / 4.0));
    BoundReport::new(
        "well_separated",
        Direction::Lower,
        "lambda = 1, rho >= 6 d => sigma_min >= N^(d/2) / (3 d^(d/4))",
        conditions,
        Some(value),
    )
    .with_beta(beta)
}

pub fn pair_cluster(gs: &GeometrySummary) -> BoundReport {
    let d = gs.dim;
    let df = d as f64;
    let beta = best_beta_choice(d);
    let tau = gs.tau;
    let mut conditions = theorem_preconditions(gs, beta);
    conditions.push(Condition::new("lambda == 2", gs.lambda as f64, Relation::Eq, 2.0));
    conditions.push(Condition::new(
        "rho >= 12 d (4/tau)^(1/(d+1))",
        gs.rho,
        Relation::Ge,
        pair_cluster_threshold(d, tau),
    ));
    BoundReport::new(
        "pair_cluster",
        Direction::Lower,
        "lambda = 2, rho >= 12 d (4/tau)^(1/(d+1)) \
         => sigma_min >= tau N^(d/2) / (12 2^((d-1)/2) d^(d/4))",
        conditions,
        Some(tau * (gs.bandwidth() as f64).powf(df / 2.0) / pair_cluster_denominator(d)),
    )
    .with_beta(beta)
}

pub fn pair_cluster_threshold(d: usize, tau: f64) -> f64 {
    12.0 * d as f64 * (4.0 / tau).powf(1.0 / (d as f64 + 1.0))
}

/// `12 2^((d-1)/2) d^(d/4)`.
pub fn pair_cluster_denominator(d: usize) -> f64 {
    let df = d as f64;
    12.0 * 2f64.powf((df - 1.0) / 2.0) * df.powf(df / 4.0)
}

/// Sharpened Lagrange constant `(1 - pi^2/(3 lambda^2))^{-1/2} ((N/lambda) / floor(n/lambda)) / pi`
/// (1 for `lambda = 1`).
pub fn lagrange_c0(lambda: usize, degree: usize) -> f64 {
    if lambda <= 1 {
        return 1.0;
    }
    let l = lambda as f64;
    let q = (degree / lambda) as f64;
    (1.0 - PI * PI / (3.0 * l * l)).powf(-0.5) * (((degree + 1) as f64 / l) / q) / PI
}

/// The `theorem41` bound at `beta = 2 lambda` in one dimension, optionally with the
/// sharpened Lagrange constant `c0`.
pub fn two_lambda(gs: &GeometrySummary, c0: f64) -> BoundReport {
    let l = gs.lambda as f64;
    let mut conditions = vec![
        validity(gs),
        Condition::new("d == 1", gs.dim as f64, Relation::Eq, 1.0),
        Condition::new("N > 2 lambda^3", gs.bandwidth() as f64, Relation::Gt, 2.0 * l.powi(3)),
    ];
    let threshold = 4.4 * l.powf(2.5) * (gs.complexity.ln() / (2.0 * l)).exp();
    conditions.push(Condition::new(
        "rho >= 4.4 lambda^(5/2) C^(1/(2 lambda))",
        gs.rho,
        Relation::Ge,
        threshold,
    ));
    let ln = 0.5 * (gs.bandwidth() as f64).ln()
        - 1.8f64.ln()
        - (l - 1.0) * c0.ln()
        - (l + 0.25) * l.ln()
        - gs.complexity.ln();
    BoundReport::new(
        "two_lambda",
        Direction::Lower,
        "d = 1, N > 2 lambda^3, rho >= 4.4 lambda^(5/2) C^(1/(2 lambda)) \
         => sigma_min >= sqrt(N) / (1.8 C0^(lambda-1) lambda^(lambda+1/4) C)",
        conditions,
        Some(ln.exp()),
    )
    .with_beta(2 * gs.lambda)
}

fn pair_table_conditions(gs: &GeometrySummary) -> Vec<Condition> {
    vec![
        validity(gs),
        Condition::new("d == 1", gs.dim as f64, Relation::Eq, 1.0),
        Condition::new("lambda == 2", gs.lambda as f64, Relation::Eq, 2.0),
    ]
}

/// Table transcription of the LiLi17 pair-cluster result.
pub fn lili17(gs: &GeometrySummary, m: usize) -> BoundReport {
    let mf = m as f64;
    let mut conditions = pair_table_conditions(gs);
    conditions.push(Condition::new(
        "N > 2 lambda^2",
        gs.bandwidth() as f64,
        Relation::Gt,
        8.0,
    ));
    conditions.push(Condition::new(
        "rho >= 42.5 M^(1/4) / tau^(1/4)",
        gs.rho,
        Relation::Ge,
        42.5 * (mf / gs.tau).powf(0.25),
    ));
    BoundReport::new(
        "lili17",
        Direction::Lower,
        "rho >= 42.5 (M/tau)^(1/4) => sigma_min >= tau sqrt(N) / (4.5 sqrt(M))",
        conditions,
        Some(gs.tau * (gs.bandwidth() as f64).sqrt() / (4.5 * mf.sqrt())),
    )
}

/// LiLi17 for general cluster size.
pub fn lili17_general(gs: &GeometrySummary, m: usize, c0: f64) -> BoundReport {
    let (l, mf) = (gs.lambda as f64, m as f64);
    let conditions = vec![
        validity(gs),
        Condition::new("d == 1", gs.dim as f64, Relation::Eq, 1.0),
        Condition::new("N > 2 lambda^2", gs.bandwidth() as f64, Relation::Gt, 2.0 * l * l),
        Condition::new(
            "rho >= 10 lambda^(5/2) (M C)^(1/(2 lambda))",
            gs.rho,
            Relation::Ge,
            10.0 * l.powf(2.5) * ((mf.ln() + gs.complexity.ln()) / (2.0 * l)).exp(),
        ),
    ];
    let ln = 0.5 * (gs.bandwidth() as f64).ln()
        - 1.5f64.ln()
        - (l - 1.0) * c0.ln()
        - 0.5 * mf.ln()
        - lambda_ln_lambda(gs.lambda)
        - gs.complexity.ln();
    BoundReport::new(
        "lili17_general",
        Direction::Lower,
        "d = 1, N > 2 lambda^2, rho >= 10 lambda^(5/2) (M C)^(1/(2 lambda)) \
         => sigma_min >= sqrt(N) / (1.5 C0^(lambda-1) sqrt(M) lambda^lambda C)",
        conditions,
        Some(ln.exp()),
    )
}

pub const KUNA18_CAVEAT: &str = "assumes all nodes inside the clusters have the same separation (not validated)";

/// Table transcription of the KuNa18 pair-cluster result.
pub fn kuna18(gs: &GeometrySummary, m: usize) -> BoundReport {
    let mut conditions = pair_table_conditions(gs);
    conditions.push(Condition::new("M >= 4", m as f64, Relation::Ge, 4.0));
    conditions.push(Condition::flag("N odd", gs.bandwidth() % 2 == 1));
    let threshold = if m >= 4 {
        25.0 * (((m / 4) as f64).ln() + 1.0)
    } else {
        f64::INFINITY
    };
    conditions.push(Condition::new(
        "rho >= 25 (ln floor(M/4) + 1)",
        gs.rho,
        Relation::Ge,
        threshold,
    ));
    let mut r = BoundReport::new(
        "kuna18",
        Direction::Lower,
        "rho >= 25 (ln floor(M/4) + 1) => sigma_min >= tau sqrt(N) / 3.5",
        conditions,
        Some(gs.tau * (gs.bandwidth() as f64).sqrt() / 3.5),
    );
    r.caveat = Some(KUNA18_CAVEAT);
    r
}

/// Table transcription of the Di19 pair-cluster result.
pub fn di19(gs: &GeometrySummary) -> BoundReport {
    let mut conditions = pair_table_conditions(gs);
    conditions.push(Condition::new("tau <= 1", gs.tau, Relation::Le, 1.0));
    conditions.push(Condition::new("rho >= 3", gs.rho, Relation::Ge, 3.0));
    BoundReport::new(
        "di19",
        Direction::Lower,
        "rho >= 3 => sigma_min >= tau sqrt(N) / 1.7",
        conditions,
        Some(gs.tau * (gs.bandwidth() as f64).sqrt() / 1.7),
    )
}

/// Preset choices of `beta`: the smallest admissible even value and the
/// logarithmic choice giving the weakest separation condition.
pub fn preset_beta_bounds(gs: &GeometrySummary) -> Vec<BoundReport> {
    vec![best_beta(gs), weakest_condition(gs)]
}

/// The pair-cluster comparison: three variants of the main theorem and the
/// external results, plus the general-lambda LiLi17 form.
pub fn comparison_bounds(gs: &GeometrySummary, m: usize) -> Vec<BoundReport> {
    let c0 = lagrange_c0(gs.lambda, gs.degree);
    vec![
        theorem41(gs, 2),
        weakest_condition(gs),
        two_lambda(gs, 1.0),
        lili17(gs, m),
        kuna18(gs, m),
        di19(gs),
        lili17_general(gs, m, c0),
    ]
}

// ---------------------------------------------------------------------------
// upper bounds

/// `C(lambda) = 2 pi sum_{l=0}^{lambda} binom(lambda-1, l) l^lambda / lambda!`.
pub fn upper_constant(lambda: usize) -> f64 {
    let lf = lambda as f64;
    let sum: f64 = (1..lambda)
        .map(|l| (ln_binom(lambda - 1, l) + lf * (l as f64).ln() - ln_factorial(lambda)).exp())
        .sum();
    2.0 * PI * sum
}

/// `(pi lambda)^{1/4} pi^{lambda-1} sqrt(N) tau^{lambda-1} (1 + tau C(lambda) sqrt(N))`.
pub fn upper_equispaced_value(lambda: usize, tau: f64, big_n: usize) -> Result<f64> {
    if lambda < 2 {
        return Err(Error::InvalidArgument("upper bound needs lambda >= 2".into()));
    }
    let (l, sn) = (lambda as f64, (big_n as f64).sqrt());
    let ln = 0.25 * (PI * l).ln() + (l - 1.0) * (PI.ln() + tau.ln()) + sn.ln();
    Ok(ln.exp() * (1.0 + tau * upper_constant(lambda) * sn))
}

pub fn upper_bound_equispaced(lambda: usize, tau: f64, big_n: usize) -> Result<BoundReport> {
    let value = upper_equispaced_value(lambda, tau, big_n)?;
    Ok(BoundReport::new(
        "upper_equispaced",
        Direction::Upper,
        "configurations containing lambda equispaced nodes at spacing tau/N: \
         sigma_min <= (pi lambda)^(1/4) pi^(lambda-1) sqrt(N) tau^(lambda-1) (1 + tau C(lambda) sqrt(N))",
        vec![Condition::new("lambda >= 2", lambda as f64, Relation::Ge, 2.0)],
        Some(value),
    ))
}

/// Largest cluster of a 1-d configuration whose nodes are equispaced, as
/// `(size, N * spacing)`; ties go to the smallest spacing.
pub fn find_equispaced_cluster(ns: &NodeSet, cd: &ClusterDecomposition) -> Option<(usize, f64)> {
    if ns.dim() != 1 {
        return None;
    }
    let big_n = ns.bandwidth() as f64;
    let mut best: Option<(usize, f64)> = None;
    for cluster in cd.clusters.iter().filter(|c| c.len() >= 2) {
        // unwrap positions around the first member
        let base = ns.node(cluster[0])[0];
        let mut pos: Vec<f64> = cluster
            .iter()
            .map(|&j| {
                let x = ns.node(j)[0] - base;
                x - x.round()
            })
            .collect();
        pos.sort_by(f64::total_cmp);
        let gaps: Vec<f64> = pos.windows(2).map(|w| w[1] - w[0]).collect();
        let g0 = gaps[0];
        if g0 <= 0.0 || gaps.iter().any(|g| (g - g0).abs() > 1e-9 * g0) {
            continue;
        }
        let cand = (cluster.len(), g0 * big_n);
        best = match best {
            None => Some(cand),
            Some(b) if cand.0 > b.0 || (cand.0 == b.0 && cand.1 < b.1) => Some(cand),
            keep => keep,
        };
    }
    best
}

/// Equispaced upper bound using a witness cluster of the configuration.
pub fn upper_equispaced_for(ns: &NodeSet, cd: &ClusterDecomposition) -> BoundReport {
    match find_equispaced_cluster(ns, cd) {
        Some((lambda, tau)) => {
            upper_bound_equispaced(lambda, tau, ns.bandwidth()).expect("witness cluster has at least two nodes")
        }
        None => BoundReport::new(
            "upper_equispaced",
            Direction::Upper,
            "requires an equispaced cluster of at least two nodes (d = 1)",
            vec![Condition::flag("equispaced witness cluster found", false)],
            None,
        ),
    }
}

/// Closest pair `(j, k, N * distance)`.
pub fn closest_pair(ns: &NodeSet) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 0..ns.len() {
        for k in (j + 1)..ns.len() {
            let dist = ns.distance(j, k);
            if best.is_none_or(|b| dist < b.2) {
                best = Some((j, k, dist));
            }
        }
    }
    best.map(|(j, k, dist)| (j, k, dist * ns.bandwidth() as f64))
}

/// Interlacing bound `sigma_min^2 <= N^d (1 - |d_n(t_1 - t_2)|)` and its
/// closed-form majorant `pi^2 tau^2 d N^d / 6`, both witnessed by the closest pair.
pub fn upper_bound_pair(ns: &NodeSet) -> Vec<BoundReport> {
    let Some((j, k, tau)) = closest_pair(ns) else {
        let none = |name| {
            BoundReport::new(
                name,
                Direction::Upper,
                "requires two nodes",
                vec![Condition::flag("at least two nodes", false)],
                None,
            )
        };
        return vec![none("upper_pair"), none("upper_pair_closed")];
    };
    let scale = ns.column_count();
    let gap = one_minus_abs_dirichlet(ns.bandwidth(), ns.node(j), ns.node(k));
    let cond = || vec![Condition::new("pair tau <= 1", tau, Relation::Le, 1.0)];
    vec![
        BoundReport::new(
            "upper_pair",
            Direction::Upper,
            "sigma_min^2 <= N^d (1 - |d_n(t_j - t_k)|) for the closest pair",
            cond(),
            Some((scale * gap).max(0.0).sqrt()),
        ),
        BoundReport::new(
            "upper_pair_closed",
            Direction::Upper,
            "sigma_min^2 <= pi^2 tau^2 d N^d / 6",
            cond(),
            Some(PI * tau * (ns.dim() as f64 * scale / 6.0).sqrt()),
        ),
    ]
}

/// Every report that makes sense for the configuration.
pub fn all_reports(ns: &NodeSet, cd: &ClusterDecomposition, gs: &GeometrySummary) -> Vec<BoundReport> {
    let mut out = vec![theorem41(gs, 2), theorem41(gs, best_beta_choice(gs.dim))];
    out[1].name = "theorem41_best";
    out.extend(preset_beta_bounds(gs));
    out.push(well_separated(gs));
    out.push(pair_cluster(gs));
    if gs.dim == 1 {
        if let Ok(r) = corollary42(gs) {
            out.push(r);
        }
        let c0 = lagrange_c0(gs.lambda, gs.degree);
        out.push(two_lambda(gs, 1.0));
        out.push(lili17(gs, ns.len()));
        out.push(kuna18(gs, ns.len()));
        out.push(di19(gs));
        out.push(lili17_general(gs, ns.len(), c0));
        out.push(upper_equispaced_for(ns, cd));
    }
    out.extend(upper_bound_pair(ns));
    out
}
