use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use torus_vandermonde::bounds::{all_reports, BoundReport};
use torus_vandermonde::certificate::{certificate_polynomial, robust_duality_bound, CertificateSpec};
use torus_vandermonde::error::{Error, Result};
use torus_vandermonde::geometry::{decompose_clusters, geometry_summary, GeometrySummary, NodeSet, DISTANCE_TOLERANCE};
use torus_vandermonde::harness::{run_experiment, ExperimentConfig, ExperimentId};
use torus_vandermonde::nodefile::read_nodes;
use torus_vandermonde::spectra::{explicit_vandermonde_smin, smallest_singular_value, EXPLICIT_GUARD};

#[derive(Parser)]
#[command(
    name = "vandermonde",
    version,
    about = "Smallest singular value of Vandermonde matrices with nodes on the torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Geometry, sigma_min and every bound for a node file, as one CSV row.
    Analyze {
        nodes: PathBuf,
        /// Cross-check against the SVD of the explicit matrix (N^d <= 1e5).
        #[arg(long)]
        oracle: bool,
    },
    /// Bound reports with their conditions.
    Bound {
        nodes: PathBuf,
        #[arg(long, default_value = "all")]
        which: String,
        /// Print the formula behind each report.
        #[arg(long)]
        explain: bool,
    },
    /// Robust-duality certificate for a given vector.
    Certify {
        nodes: PathBuf,
        #[arg(long, default_value_t = 2)]
        beta: usize,
        /// min-singular | uniform | file:<path> (one "re [im]" per line, normalized on load)
        #[arg(long, default_value = "min-singular")]
        vector: String,
        /// Print the per-node residual table.
        #[arg(long)]
        residuals: bool,
        /// Write the certificate polynomial coefficients as CSV.
        #[arg(long)]
        dump_poly: Option<PathBuf>,
    },
    /// Run one of the numerical experiments.
    Experiment {
        /// pair1d | cluster1d | pair2d | triple2d
        id: String,
        #[arg(long = "N")]
        big_n: Option<usize>,
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        tau_lo: Option<f64>,
        #[arg(long)]
        tau_hi: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        a: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { nodes, oracle } => analyze(&nodes, oracle),
        Command::Bound { nodes, which, explain } => bound(&nodes, &which, explain),
        Command::Certify {
            nodes,
            beta,
            vector,
            residuals,
            dump_poly,
        } => certify(&nodes, beta, &vector, residuals, dump_poly),
        Command::Experiment {
            id,
            big_n,
            l,
            m,
            trials,
            tau_lo,
            tau_hi,
            seed,
            out,
            a,
        } => experiment(&id, big_n, l.or(m), trials, tau_lo, tau_hi, seed, &out, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<(NodeSet, GeometrySummary, Vec<BoundReport>)> {
    let ns = read_nodes(path)?;
    let cd = decompose_clusters(&ns);
    let gs = geometry_summary(&ns, &cd);
    let reports = all_reports(&ns, &cd, &gs);
    Ok((ns, gs, reports))
}

fn num(x: Option<f64>) -> String {
    x.map_or("nan".into(), |v| format!("{v:e}"))
}

fn analyze(path: &Path, oracle: bool) -> Result<()> {
    let (ns, gs, reports) = load(path)?;
    let sigma = smallest_singular_value(&ns)?;
    let mut header = vec![
        GeometrySummary::CSV_HEADER.to_string(),
        "sigma_min,method,residual".into(),
    ];
    let mut row = vec![
        gs.csv_row(),
        format!("{:e},{},{:e}", sigma.sigma_min, sigma.method, sigma.residual),
    ];
    if oracle {
        if ns.column_count() > EXPLICIT_GUARD as f64 {
            return Err(Error::SizeGuard {
                columns: ns.column_count() as usize,
                limit: EXPLICIT_GUARD,
            });
        }
        let svd = explicit_vandermonde_smin(&ns)?;
        header.push("sigma_oracle,oracle_rel_diff".into());
        let rel = (svd.sigma_min - sigma.sigma_min).abs() / sigma.sigma_min.max(f64::MIN_POSITIVE);
        row.push(format!("{:e},{rel:e}", svd.sigma_min));
    }
    for r in &reports {
        header.push(format!("{}_{},applicable_{}", r.direction, r.name, r.name));
        row.push(format!("{},{}", num(r.value), r.applicable));
    }
    println!("# cluster threshold 1/N with absolute distance tolerance {DISTANCE_TOLERANCE:e}");
    println!("{}", header.join(","));
    println!("{}", row.join(","));
    Ok(())
}

fn bound(path: &Path, which: &str, explain: bool) -> Result<()> {
    let (_, _, reports) = load(path)?;
    let selected: Vec<&BoundReport> = reports.iter().filter(|r| which == "all" || r.name == which).collect();
    if selected.is_empty() {
        let names: Vec<&str> = reports.iter().map(|r| r.name).collect();
        return Err(Error::InvalidArgument(format!(
            "no report named '{which}'; available: {}",
            names.join(" ")
        )));
    }
    let width = selected.iter().map(|r| r.conditions.len()).max().unwrap_or(0);
    let mut header = vec![
        "name".to_string(),
        "applicable".into(),
        "direction".into(),
        "value".into(),
    ];
    header.extend((1..=width).map(|k| format!("condition_{k}")));
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{}", header.join(","))?;
    for r in &selected {
        let mut row = vec![
            r.name.to_string(),
            r.applicable.to_string(),
            r.direction.to_string(),
            num(r.value),
        ];
        row.extend(r.conditions.iter().map(|c| c.to_string().replace(',', ";")));
        row.resize(width + 4, String::new());
        writeln!(out, "{}", row.join(","))?;
    }
    if explain {
        for r in &selected {
            writeln!(out, "# {}: {}", r.name, r.formula)?;
            if let Some(beta) = r.beta {
                writeln!(out, "#   beta = {beta}")?;
            }
            if let Some(c) = r.caveat {
                writeln!(out, "#   caveat: {c}")?;
            }
        }
    }
    Ok(())
}

fn parse_vector(spec: &str, ns: &NodeSet) -> Result<Vec<Complex64>> {
    let m = ns.len();
    if spec == "min-singular" {
        return smallest_singular_value(ns)?
            .vector
            .ok_or_else(|| Error::InvalidArgument("no singular vector available".into()));
    }
    if spec == "uniform" {
        return Ok(vec![Complex64::new(1.0 / (m as f64).sqrt(), 0.0); m]);
    }
    let Some(path) = spec.strip_prefix("file:") else {
        return Err(Error::InvalidArgument(format!("unknown vector source '{spec}'")));
    };
    let text = std::fs::read_to_string(path)?;
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        };
        let re = parse(parts[0])?;
        let im = parts.get(1).map(|s| parse(s)).transpose()?.unwrap_or(0.0);
        v.push(Complex64::new(re, im));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidArgument(format!("vector in {path} has norm {norm}")));
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

fn certify(path: &Path, beta: usize, vector: &str, residuals: bool, dump: Option<PathBuf>) -> Result<()> {
    let ns = read_nodes(path)?;
    let cd = decompose_clusters(&ns);
    let spec = CertificateSpec::new(&ns, &cd, beta)?;
    let v = parse_vector(vector, &ns)?;
    let res = robust_duality_bound(&ns, &cd, &spec, &v)?;
    println!("{}", torus_vandermonde::certificate::CertificateResult::CSV_HEADER);
    println!("{}", res.csv_row());
    if !spec.within_hypotheses {
        eprintln!("note: outside lemma hypotheses (n < 2 beta^2 lambda)");
    }
    if residuals {
        println!("node,eps_re,eps_im,eps_abs");
        for (j, e) in res.residuals.iter().enumerate() {
            println!("{j},{:e},{:e},{:e}", e.re, e.im, e.norm());
        }
    }
    if let Some(p) = dump {
        let f = certificate_polynomial(&ns, &cd, &spec, &v)?;
        let file = std::fs::File::create(&p)?;
        f.write_csv(io::BufWriter::new(file), 10_000_000)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    id: &str,
    big_n: Option<usize>,
    count: Option<usize>,
    trials: Option<usize>,
    tau_lo: Option<f64>,
    tau_hi: Option<f64>,
    seed: u64,
    out: &Path,
    a: Option<f64>,
) -> Result<()> {
    let id: ExperimentId = id.parse()?;
    let mut cfg = ExperimentConfig::default_for(id);
    cfg.seed = seed;
    if let Some(v) = big_n {
        cfg.big_n = v;
    }
    if let Some(v) = count {
        cfg.count = v;
    }
    if let Some(v) = trials {
        cfg.trials = v;
    }
    if let Some(v) = tau_lo {
        cfg.tau_lo = v;
    }
    if let Some(v) = tau_hi {
        cfg.tau_hi = v;
    }
    if let Some(v) = a {
        cfg.a = v;
    }
    let output = run_experiment(&cfg)?;
    let (csv, gp) = output.write(out)?;
    if let Some(rho) = output.rho_min {
        println!("rho_min = {rho:.3}");
    }
    for (name, t) in &output.thresholds {
        println!("threshold {name}: tau >= {t:.3e}");
    }
    let failed = output.records.iter().filter(|r| r.status != "ok").count();
    println!(
        "{} trials ({} failed), {} bound violations; wrote {} and {}",
        output.records.len(),
        failed,
        output.violation_count(),
        csv.display(),
        gp.display()
    );
    Ok(())
}
