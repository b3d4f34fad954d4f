//! Lower bounds for a 1-d configuration of pair clusters, next to the exact
//! smallest singular value, across cluster separations.

use torus_vandermonde::bounds::{all_reports, Direction};
use torus_vandermonde::geometry::{decompose_clusters, geometry_summary, NodeSet};
use torus_vandermonde::spectra::smallest_singular_value;

fn main() -> torus_vandermonde::error::Result<()> {
    let big_n = (1usize << 15) + 1;
    let names = [
        "theorem41",
        "weakest_condition",
        "two_lambda",
        "lili17",
        "kuna18",
        "di19",
        "upper_pair",
    ];
    print!("{:>9} {:>11}", "tau", "sigma_min");
    for n in names {
        print!(" {n:>17}");
    }
    println!();
    for k in 0..=10 {
        let tau = 10f64.powi(-k);
        // four pairs with anchors a quarter apart
        let nodes: Vec<Vec<f64>> = (0..4)
            .flat_map(|l| {
                let a = l as f64 / 4.0;
                [vec![a], vec![a + tau / big_n as f64]]
            })
            .collect();
        let ns = NodeSet::new(1, big_n - 1, &nodes)?;
        let cd = decompose_clusters(&ns);
        let gs = geometry_summary(&ns, &cd);
        let sigma = smallest_singular_value(&ns)?.sigma_min;
        let reports = all_reports(&ns, &cd, &gs);
        // the realized separation, which drifts from the nominal one once the
        // offset is a few ulps of the anchor
        print!("{:>9.3e} {sigma:>11.4e}", gs.tau);
        for n in names {
            let r = reports.iter().find(|r| r.name == n).expect("report exists");
            let mark = match (r.applicable, r.direction) {
                (false, _) => ' ',
                (true, Direction::Lower) => '<',
                (true, Direction::Upper) => '>',
            };
            match r.value {
                Some(v) => print!(" {v:>16.4e}{mark}"),
                None => print!(" {:>17}", "-"),
            }
        }
        println!();
    }
    println!("\n'<' marks an applicable lower bound, '>' an applicable upper bound.");
    Ok(())
}
