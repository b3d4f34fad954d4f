//! Desk-scale runs of the four experiments. Writes `<id>.csv` and a gnuplot
//! script per experiment into the directory given as the first argument.

use std::path::PathBuf;

use torus_vandermonde::harness::{run_experiment, ExperimentConfig, ExperimentId};

fn main() -> torus_vandermonde::error::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "experiments-out".into()));
    std::fs::create_dir_all(&out)?;
    for id in ExperimentId::ALL {
        let mut cfg = ExperimentConfig::default_for(id);
        cfg.trials = 20;
        cfg.big_n = match id {
            ExperimentId::Pair1d => 513,
            ExperimentId::Cluster1d => 512,
            ExperimentId::Pair2d => 128,
            ExperimentId::Triple2d => 100,
        };
        let result = run_experiment(&cfg)?;
        let (csv, _) = result.write(&out)?;
        println!(
            "{id}: {} trials, {} violations -> {}",
            result.records.len(),
            result.violation_count(),
            csv.display()
        );
        for (name, t) in &result.thresholds {
            println!("  {name} applicable from tau = {t:.3e}");
        }
        if id == ExperimentId::Triple2d {
            println!("  slope {:.3}", result.slope(cfg.tau_lo, cfg.effective_tau_hi())?);
        }
    }
    Ok(())
}
