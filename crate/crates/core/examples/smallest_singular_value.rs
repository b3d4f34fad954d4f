//! Smallest singular value through the Gram matrix, checked against the SVD of
//! the explicit matrix, down to separations where f64 alone cannot resolve it.

use std::time::Instant;

use torus_vandermonde::geometry::NodeSet;
use torus_vandermonde::spectra::{explicit_vandermonde_smin, pair_sigma, smallest_singular_value};

fn main() -> torus_vandermonde::error::Result<()> {
    let big_n = 64usize;
    println!("pairs at distance tau/N, N = {big_n}");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>5}",
        "tau", "gram", "svd", "closed form", "bits"
    );
    for k in 0..=8 {
        let tau = 10f64.powi(-k);
        let ns = NodeSet::new(1, big_n - 1, &[vec![0.3], vec![0.3 + tau / big_n as f64]])?;
        let g = smallest_singular_value(&ns)?;
        let s = explicit_vandermonde_smin(&ns)?;
        let p = pair_sigma(&ns)?;
        println!(
            "{tau:>8.0e} {:>12.5e} {:>12.5e} {:>12.5e} {:>5}",
            g.sigma_min, s.sigma_min, p.sigma_min, g.precision_bits
        );
    }

    // the Gram route never forms the N^d columns
    let big_n = 1000usize;
    let nodes: Vec<Vec<f64>> = (0..80)
        .map(|j| {
            let x = j as f64 / 80.0;
            vec![x, (x * 7.3).fract()]
        })
        .collect();
    let ns = NodeSet::new(2, big_n - 1, &nodes)?;
    let start = Instant::now();
    let g = smallest_singular_value(&ns)?;
    println!(
        "\nd=2, N={big_n}, M=80 ({:.0e} columns): sigma_min = {:.6e} via {} in {:.1?}",
        ns.column_count(),
        g.sigma_min,
        g.method,
        start.elapsed()
    );
    Ok(())
}
