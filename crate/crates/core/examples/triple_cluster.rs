//! Three nodes in the plane: sigma_min decays like tau^2 for antipodal
//! directions and like tau otherwise.

use torus_vandermonde::spectra::{loglog_slope, triple_cluster_sigma, TripleClusterConfig};

fn main() -> torus_vandermonde::error::Result<()> {
    for a in [0.0f64, 0.1] {
        let c = (1.0 - a * a).sqrt();
        println!("directions (1, 0) and ({:.4}, {a})", -c);
        println!("{:>9} {:>13} {:>13}", "nu", "sigma_min", "formula");
        let mut samples = Vec::new();
        for k in 0..=8 {
            let nu = 10f64.powf(-5.0 + 0.5 * k as f64);
            let cfg = TripleClusterConfig::new(100, nu, [1.0, 0.0], [-c, a])?;
            let r = triple_cluster_sigma(&cfg)?;
            println!("{nu:>9.1e} {:>13.6e} {:>13.6e}", r.sigma_min, r.via_formula);
            if a == 0.0 || nu < a / 10.0 {
                samples.push((nu, r.sigma_min));
            }
        }
        println!("log-log slope: {:.3}\n", loglog_slope(&samples)?);
    }
    Ok(())
}
