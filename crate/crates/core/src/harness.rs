//! Seeded generators and runners for the four numerical experiments, with
//! CSV and gnuplot-script output.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. Trial `k`
//! draws from stream `k + 1`; shared cluster anchors draw from stream 0. Rows
//! are therefore independent of thread scheduling.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{all_reports, lagrange_c0, pair_cluster_threshold, two_lambda, BoundReport, Direction};
use crate::error::{Error, Result};
use crate::geometry::{decompose_clusters, geometry_summary, wrap_distance, GeometrySummary, NodeSet};
use crate::spectra::{loglog_slope, smallest_singular_value, triple_cluster_sigma, TripleClusterConfig};

/// Relative slack used when counting bound violations.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Pair1d,
    Cluster1d,
    Pair2d,
    Triple2d,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [
        ExperimentId::Pair1d,
        ExperimentId::Cluster1d,
        ExperimentId::Pair2d,
        ExperimentId::Triple2d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Pair1d => "pair1d",
            ExperimentId::Cluster1d => "cluster1d",
            ExperimentId::Pair2d => "pair2d",
            ExperimentId::Triple2d => "triple2d",
        }
    }

    fn extra_label(self) -> &'static str {
        match self {
            ExperimentId::Pair1d => "delta of the second cluster (0 if none)",
            ExperimentId::Cluster1d | ExperimentId::Pair2d => "rho",
            ExperimentId::Triple2d => "a",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    /// Frequencies per coordinate, `N = n + 1`.
    pub big_n: usize,
    /// Node count `M` for `pair1d`, cluster count `L` for `cluster1d` and
    /// `pair2d`; unused by `triple2d`.
    pub count: usize,
    pub trials: usize,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub seed: u64,
    /// Displacement parameter of `triple2d`.
    pub a: f64,
}

impl ExperimentConfig {
    /// Full-scale parameters: grid size, cluster count, trials and tau range.
    pub fn default_for(id: ExperimentId) -> Self {
        let (big_n, count, trials, tau_lo, tau_hi) = match id {
            ExperimentId::Pair1d => ((1 << 15) + 1, 4, 50, 1e-12, 1.0),
            ExperimentId::Cluster1d => (1 << 15, 2, 100, 1e-4, 0.25),
            ExperimentId::Pair2d => (1000, 2, 100, 1e-3, 1.0),
            ExperimentId::Triple2d => (100, 3, 100, 1e-6, 0.5),
        };
        Self {
            id,
            big_n,
            count,
            trials,
            tau_lo,
            tau_hi,
            seed: 1,
            a: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.big_n < 2 {
            return bad(format!("N = {} must be at least 2", self.big_n));
        }
        if !(self.tau_lo > 0.0 && self.tau_lo <= self.tau_hi && self.tau_hi.is_finite()) {
            return bad(format!(
                "tau range [{}, {}] is not a positive interval",
                self.tau_lo, self.tau_hi
            ));
        }
        match self.id {
            ExperimentId::Pair1d => {
                if self.count < 2 || self.count % 2 == 1 {
                    return bad(format!("pair1d needs an even M >= 2, got {}", self.count));
                }
                if self.tau_hi > 1.0 {
                    return bad("pair1d needs tau <= 1".into());
                }
            }
            ExperimentId::Cluster1d => {
                if self.count == 0 {
                    return bad("cluster1d needs L >= 1".into());
                }
                if self.tau_hi > 0.25 {
                    return bad("cluster1d needs tau <= 1/4 so a cluster fits in 1/N".into());
                }
            }
            ExperimentId::Pair2d => {
                if self.count == 0 {
                    return bad("pair2d needs L >= 1".into());
                }
                if self.tau_hi > 1.0 {
                    return bad("pair2d needs tau <= 1".into());
                }
            }
            ExperimentId::Triple2d => {
                if !(0.0..1.0).contains(&self.a) {
                    return bad(format!("a = {} outside [0, 1)", self.a));
                }
                if self.tau_lo > triple_tau_cap(self.a) {
                    return bad(format!("tau_lo above the cap {}", triple_tau_cap(self.a)));
                }
            }
        }
        Ok(())
    }

    /// Upper end of the sampled range after experiment-specific caps.
    pub fn effective_tau_hi(&self) -> f64 {
        match self.id {
            ExperimentId::Triple2d => self.tau_hi.min(triple_tau_cap(self.a)),
            _ => self.tau_hi,
        }
    }

    fn header(&self) -> String {
        let count = match self.id {
            ExperimentId::Pair1d => format!("M={}", self.count),
            ExperimentId::Triple2d => format!("a={}", self.a),
            _ => format!("L={}", self.count),
        };
        format!(
            "# config id={} N={} {} trials={} tau_lo={:e} tau_hi={:e} seed={}\n\
             # rng ChaCha8 seed_from_u64({}); trial k uses stream k+1, anchors use stream 0\n\
             # extra = {}\n",
            self.id,
            self.big_n,
            count,
            self.trials,
            self.tau_lo,
            self.effective_tau_hi(),
            self.seed,
            self.seed,
            self.id.extra_label()
        )
    }
}

/// Largest `tau` for which the triple cluster keeps `nu <= 1/2`.
pub fn triple_tau_cap(a: f64) -> f64 {
    0.5 * (1.0 - a * a).sqrt()
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

pub fn anchor_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

pub fn sample_tau(cfg: &ExperimentConfig, rng: &mut impl Rng) -> f64 {
    let (lo, hi) = (cfg.tau_lo.ln(), cfg.effective_tau_hi().ln());
    if lo == hi {
        return cfg.tau_lo;
    }
    rng.gen_range(lo..=hi).exp()
}

/// One generated configuration.
#[derive(Debug, Clone)]
pub struct Sample {
    pub nodes: NodeSet,
    pub tau: f64,
    pub extra: f64,
    pub triple: Option<TripleClusterConfig>,
}

/// `M/2` pairs anchored at `l/L`: the first `{0, tau/N}`, the rest with an
/// in-pair gap `delta/N`, `delta` uniform in `[tau, 2 tau]`.
pub fn gen_pair1d(cfg: &ExperimentConfig, tau: f64, rng: &mut impl Rng) -> Result<Sample> {
    let big_n = cfg.big_n as f64;
    let l_count = cfg.count / 2;
    let mut coords = Vec::with_capacity(cfg.count);
    let mut extra = 0.0;
    for l in 0..l_count {
        let anchor = l as f64 / l_count as f64;
        let delta = if l == 0 { tau } else { rng.gen_range(tau..=2.0 * tau) };
        if l == 1 {
            extra = delta;
        }
        coords.push(anchor);
        coords.push(anchor + delta / big_n);
    }
    Ok(Sample {
        nodes: NodeSet::from_flat(1, cfg.big_n - 1, coords)?,
        tau,
        extra,
        triple: None,
    })
}

/// `L` clusters at `l/L`, each five nodes spaced `tau/N`.
pub fn gen_cluster1d(cfg: &ExperimentConfig, tau: f64) -> Result<Sample> {
    let big_n = cfg.big_n as f64;
    let l_count = cfg.count;
    let mut coords = Vec::with_capacity(5 * l_count);
    for l in 0..l_count {
        let anchor = l as f64 / l_count as f64;
        for k in 0..5 {
            coords.push(anchor + k as f64 * tau / big_n);
        }
    }
    let nodes = NodeSet::from_flat(1, cfg.big_n - 1, coords)?;
    let extra = big_n * (1.0 / l_count as f64 - 4.0 * tau / big_n);
    Ok(Sample {
        nodes,
        tau,
        extra: if l_count == 1 { f64::INFINITY } else { extra },
        triple: None,
    })
}

/// Separation the bivariate pair bound needs at the bottom of the range.
pub fn pair2d_rho_min(cfg: &ExperimentConfig) -> f64 {
    pair_cluster_threshold(2, cfg.tau_lo)
}

/// Cluster anchors for `pair2d`: two anchors a distance `(rho_min + 1)/N`
/// apart (capped at 1/2), the rest uniform with pairwise distance `>= 3/N`.
pub fn pair2d_anchors(cfg: &ExperimentConfig) -> Result<Vec<[f64; 2]>> {
    let big_n = cfg.big_n as f64;
    let mut rng = anchor_rng(cfg.seed);
    let mut anchors = vec![[0.0, 0.0]];
    if cfg.count >= 2 {
        let x = ((pair2d_rho_min(cfg) + 1.0) / big_n).min(0.5);
        anchors.push([x, 0.0]);
    }
    let min_gap = 3.0 / big_n;
    let mut attempts = 0usize;
    while anchors.len() < cfg.count {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::InvalidArgument(format!(
                "could not place {} anchors with spacing 3/N",
                cfg.count
            )));
        }
        let cand = [rng.gen::<f64>(), rng.gen::<f64>()];
        if anchors
            .iter()
            .all(|a| wrap_distance(a, &cand).is_ok_and(|dist| dist >= min_gap))
        {
            anchors.push(cand);
        }
    }
    Ok(anchors)
}

/// Pairs `{(0,0), (a,1) or (1,a)}` scaled by `tau/N` and moved to the anchors.
pub fn gen_pair2d(cfg: &ExperimentConfig, anchors: &[[f64; 2]], tau: f64, rng: &mut impl Rng) -> Result<Sample> {
    let h = tau / cfg.big_n as f64;
    let mut coords = Vec::with_capacity(4 * anchors.len());
    for anchor in anchors {
        let a: f64 = rng.gen_range(0.0..=1.0);
        let offset = if rng.gen::<bool>() { [a, 1.0] } else { [1.0, a] };
        coords.extend_from_slice(anchor);
        coords.push(anchor[0] + h * offset[0]);
        coords.push(anchor[1] + h * offset[1]);
    }
    let nodes = NodeSet::from_flat(2, cfg.big_n - 1, coords)?;
    let cd = decompose_clusters(&nodes);
    let extra = geometry_summary(&nodes, &cd).rho;
    Ok(Sample {
        nodes,
        tau,
        extra,
        triple: None,
    })
}

/// Triple cluster `0`, `(-sqrt(1-a^2), a) nu/N`, `(1, 0) nu/N` with
/// `tau = nu sqrt(1 - a^2)`.
pub fn gen_triple2d(cfg: &ExperimentConfig, tau: f64) -> Result<TripleClusterConfig> {
    let c = (1.0 - cfg.a * cfg.a).sqrt();
    TripleClusterConfig::new(cfg.big_n, tau / c, [1.0, 0.0], [-c, cfg.a])
}

/// Reports tracked for an experiment, in column order.
pub fn report_names(id: ExperimentId) -> Vec<&'static str> {
    let base: &[&str] = &[
        "theorem41",
        "theorem41_best",
        "best_beta",
        "weakest_condition",
        "well_separated",
        "pair_cluster",
    ];
    let one_d: &[&str] = &[
        "corollary42",
        "two_lambda",
        "lili17",
        "kuna18",
        "di19",
        "lili17_general",
        "upper_equispaced",
    ];
    let mut out = base.to_vec();
    if matches!(id, ExperimentId::Pair1d | ExperimentId::Cluster1d) {
        out.extend_from_slice(one_d);
    }
    out.extend_from_slice(&["upper_pair", "upper_pair_closed"]);
    out
}

/// Every bound for the sample, with the sharpened Lagrange constant used for
/// `two_lambda` in the bigger-cluster experiment.
pub fn experiment_reports(id: ExperimentId, ns: &NodeSet) -> (GeometrySummary, Vec<BoundReport>) {
    let cd = decompose_clusters(ns);
    let gs = geometry_summary(ns, &cd);
    let mut reports = all_reports(ns, &cd, &gs);
    if id == ExperimentId::Cluster1d {
        let c0 = lagrange_c0(gs.lambda, gs.degree);
        for r in reports.iter_mut().filter(|r| r.name == "two_lambda") {
            *r = two_lambda(&gs, c0);
        }
    }
    (gs, reports)
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub tau: f64,
    pub extra: f64,
    pub sigma_min: Option<f64>,
    /// `(value, applicable)` aligned with [`report_names`].
    pub bounds: Vec<(Option<f64>, bool)>,
    pub directions: Vec<Option<Direction>>,
    pub status: String,
    /// Excluded from the CSV to keep it deterministic.
    pub wall_time: f64,
}

impl TrialRecord {
    /// Names of applicable bounds contradicted by `sigma_min`.
    pub fn violations(&self, names: &[&'static str]) -> Vec<&'static str> {
        let Some(s) = self.sigma_min else {
            return Vec::new();
        };
        names
            .iter()
            .zip(&self.bounds)
            .zip(&self.directions)
            .filter_map(|((name, &(value, applicable)), dir)| {
                let v = value?;
                let broken = applicable
                    && match dir {
                        Some(Direction::Lower) => v > s * (1.0 + VIOLATION_TOLERANCE),
                        Some(Direction::Upper) => v < s * (1.0 - VIOLATION_TOLERANCE),
                        None => false,
                    };
                broken.then_some(*name)
            })
            .collect()
    }
}

fn run_trial(cfg: &ExperimentConfig, anchors: &[[f64; 2]], names: &[&'static str], trial: usize) -> TrialRecord {
    let start = std::time::Instant::now();
    let mut rng = trial_rng(cfg.seed, trial);
    let tau = sample_tau(cfg, &mut rng);
    let mut record = TrialRecord {
        trial,
        tau,
        extra: f64::NAN,
        sigma_min: None,
        bounds: vec![(None, false); names.len()],
        directions: vec![None; names.len()],
        status: "ok".into(),
        wall_time: 0.0,
    };
    let outcome = (|| -> Result<()> {
        let sample = generate(cfg, anchors, tau, &mut rng)?;
        record.extra = sample.extra;
        let sigma = match &sample.triple {
            Some(t) => {
                let r = triple_cluster_sigma(t)?;
                if r.degenerate {
                    r.sigma_min
                } else {
                    r.via_formula
                }
            }
            None => smallest_singular_value(&sample.nodes)?.sigma_min,
        };
        record.sigma_min = Some(sigma);
        let (_, reports) = experiment_reports(cfg.id, &sample.nodes);
        for (slot, name) in names.iter().enumerate() {
            if let Some(r) = reports.iter().find(|r| r.name == *name) {
                record.bounds[slot] = (r.value, r.applicable);
                record.directions[slot] = Some(r.direction);
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        record.status = format!("error: {e}").replace(',', ";");
    }
    record.wall_time = start.elapsed().as_secs_f64();
    record
}

/// Generates the configuration for one trial at separation `tau`.
pub fn generate(cfg: &ExperimentConfig, anchors: &[[f64; 2]], tau: f64, rng: &mut impl Rng) -> Result<Sample> {
    match cfg.id {
        ExperimentId::Pair1d => gen_pair1d(cfg, tau, rng),
        ExperimentId::Cluster1d => gen_cluster1d(cfg, tau),
        ExperimentId::Pair2d => gen_pair2d(cfg, anchors, tau, rng),
        ExperimentId::Triple2d => {
            let triple = gen_triple2d(cfg, tau)?;
            Ok(Sample {
                nodes: triple.node_set()?,
                tau,
                extra: cfg.a,
                triple: Some(triple),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub names: Vec<&'static str>,
    pub records: Vec<TrialRecord>,
    /// `(report name, smallest tau in range at which it applies)`.
    pub thresholds: Vec<(&'static str, f64)>,
    pub rho_min: Option<f64>,
}

impl ExperimentOutput {
    pub fn violation_count(&self) -> usize {
        self.records.iter().map(|r| r.violations(&self.names).len()).sum()
    }

    pub fn csv(&self) -> String {
        let mut out = self.config.header();
        if let Some(rho) = self.rho_min {
            out.push_str(&format!("# rho_min = {rho:e}\n"));
        }
        for (name, t) in &self.thresholds {
            out.push_str(&format!("# threshold {name} tau >= {t:e}\n"));
        }
        let mut cols = vec!["trial".to_string(), "tau".into(), "extra".into(), "sigma_min".into()];
        for name in &self.names {
            cols.push(format!("bound_{name}"));
            cols.push(format!("applicable_{name}"));
        }
        cols.push("status".into());
        out.push_str(&cols.join(","));
        out.push('\n');
        let num = |x: Option<f64>| x.map_or("nan".to_string(), |v| format!("{v:e}"));
        for r in &self.records {
            let mut row = vec![
                r.trial.to_string(),
                num(Some(r.tau)),
                num(Some(r.extra)),
                num(r.sigma_min),
            ];
            for &(value, applicable) in &r.bounds {
                row.push(num(value));
                row.push(u8::from(applicable).to_string());
            }
            row.push(r.status.clone());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Gnuplot script plotting `sigma_min` and every applicable bound against
    /// `tau` on log axes, with admissibility thresholds as vertical lines.
    pub fn plot_script(&self) -> String {
        let id = self.config.id;
        let mut s = String::new();
        s.push_str(&format!("# {id}: sigma_min and bounds against tau\n"));
        s.push_str("set datafile separator ','\nset datafile commentschars '#'\n");
        s.push_str("set key autotitle columnhead\nset logscale xy\nset format xy '10^{%L}'\n");
        s.push_str("set xlabel 'tau'\nset ylabel 'sigma_min'\nset key outside right\n");
        s.push_str(&format!(
            "set xrange [{:e}:{:e}]\n",
            self.config.tau_lo,
            self.config.effective_tau_hi()
        ));
        s.push_str(&format!("set terminal pngcairo size 1100,700\nset output '{id}.png'\n"));
        for (name, t) in &self.thresholds {
            s.push_str(&format!(
                "set arrow from {t:e}, graph 0 to {t:e}, graph 1 nohead dashtype 2 # {name}\n"
            ));
        }
        let mut plots = vec![format!(
            "'{id}.csv' using 2:4 with points pt 7 ps 0.6 title 'sigma_min'"
        )];
        for (k, name) in self.names.iter().enumerate() {
            let value = 5 + 2 * k;
            plots.push(format!(
                "'{id}.csv' using 2:(${}==1 ? ${} : 1/0) with points ps 0.5 title '{name}'",
                value + 1,
                value
            ));
        }
        s.push_str("plot ");
        s.push_str(&plots.join(", \\\n     "));
        s.push('\n');
        s
    }

    /// Writes `<id>.csv` and `<id>.gp` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let id = self.config.id;
        let csv = dir.join(format!("{id}.csv"));
        let gp = dir.join(format!("{id}.gp"));
        fs::write(&csv, self.csv())?;
        fs::write(&gp, self.plot_script())?;
        Ok((csv, gp))
    }

    /// Log-log slope of `sigma_min` against `tau` over trials with `tau` in `[lo, hi]`.
    pub fn slope(&self, lo: f64, hi: f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .records
            .iter()
            .filter(|r| r.tau >= lo && r.tau <= hi)
            .filter_map(|r| r.sigma_min.filter(|s| *s > 0.0).map(|s| (r.tau, s)))
            .collect();
        loglog_slope(&pts)
    }
}

/// Smallest `tau` in `[lo, hi]` with `pred(tau)`: a scan over a log-spaced
/// grid finds the first switch, bisection in `ln tau` refines it. Predicates
/// that fail again further up the range are handled by the scan.
pub fn tau_threshold(lo: f64, hi: f64, mut pred: impl FnMut(f64) -> bool) -> Option<f64> {
    const GRID: usize = 256;
    if pred(lo) {
        return Some(lo);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let at = |k: usize| llo + (lhi - llo) * k as f64 / GRID as f64;
    let first = (1..=GRID).find(|&k| pred(at(k).exp()))?;
    let (mut a, mut b) = (at(first - 1), at(first));
    for _ in 0..200 {
        if b - a < 1e-12 {
            break;
        }
        let mid = 0.5 * (a + b);
        if pred(mid.exp()) {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(b.exp())
}

/// Per-report admissibility thresholds, evaluated on the configuration of
/// trial 0 regenerated at each candidate `tau`.
fn lower_bound_thresholds(
    cfg: &ExperimentConfig,
    anchors: &[[f64; 2]],
    names: &[&'static str],
) -> Vec<(&'static str, f64)> {
    let lo = cfg.tau_lo;
    let hi = cfg.effective_tau_hi();
    let applicable_at = |name: &str, tau: f64| -> bool {
        let mut rng = trial_rng(cfg.seed, 0);
        let _ = sample_tau(cfg, &mut rng);
        let Ok(sample) = generate(cfg, anchors, tau, &mut rng) else {
            return false;
        };
        let (_, reports) = experiment_reports(cfg.id, &sample.nodes);
        reports
            .iter()
            .find(|r| r.name == name)
            .is_some_and(|r| r.applicable && r.direction == Direction::Lower)
    };
    names
        .iter()
        .filter_map(|&name| {
            let t = tau_threshold(lo, hi, |tau| applicable_at(name, tau))?;
            (t > lo).then_some((name, t))
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let anchors = if cfg.id == ExperimentId::Pair2d {
        pair2d_anchors(cfg)?
    } else {
        Vec::new()
    };
    let names = report_names(cfg.id);
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| run_trial(cfg, &anchors, &names, k))
        .collect();
    let thresholds = lower_bound_thresholds(cfg, &anchors, &names);
    Ok(ExperimentOutput {
        config: cfg.clone(),
        names,
        records,
        thresholds,
        rho_min: (cfg.id == ExperimentId::Pair2d).then(|| pair2d_rho_min(cfg)),
    })
}
