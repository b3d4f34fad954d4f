//! Cluster decomposition and the geometry measures of a small 1-d configuration.

use torus_vandermonde::geometry::{
    decompose_clusters, geometry_summary, max_complexity, node_complexity, shell_packing_check, NodeSet,
};

fn main() -> torus_vandermonde::error::Result<()> {
    let big_n = 100.0;
    let nodes = vec![
        vec![0.10],
        vec![0.10 + 0.3 / big_n],
        vec![0.10 + 0.7 / big_n],
        vec![0.55],
        vec![0.55 + 0.5 / big_n],
        vec![0.99],
        vec![0.99 + 0.4 / big_n],
    ];
    let ns = NodeSet::new(1, 99, &nodes)?;
    let cd = decompose_clusters(&ns);
    let gs = geometry_summary(&ns, &cd);

    println!("{}", torus_vandermonde::geometry::GeometrySummary::CSV_HEADER);
    println!("{}", gs.csv_row());
    for (c, members) in cd.clusters.iter().enumerate() {
        println!("cluster {c}: nodes {members:?}");
    }
    for j in 0..ns.len() {
        println!("node {j}: complexity {:.3}", node_complexity(&ns, j));
    }
    println!(
        "worst case for lambda={} at tau={:.2}: {:.3}",
        gs.lambda,
        gs.tau,
        max_complexity(gs.lambda, gs.tau)?
    );
    for s in shell_packing_check(&ns, &gs, gs.shell_center) {
        println!("shell {}: {} nodes (bound {})", s.m, s.count, s.bound);
    }
    Ok(())
}
