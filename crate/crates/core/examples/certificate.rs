//! Robust-duality certificate for a clustered configuration: build the
//! Lagrange-like interpolants, assemble `f = sum v_j I_j` and turn the
//! interpolation residual into a lower bound on `||A^* v||`.

use num_complex::Complex64;
use torus_vandermonde::certificate::{
    certificate_polynomial, eval_basis, robust_duality_bound, CertificateResult, CertificateSpec,
};
use torus_vandermonde::geometry::{decompose_clusters, NodeSet};
use torus_vandermonde::spectra::{adjoint_apply_norm, smallest_singular_value};

fn main() -> torus_vandermonde::error::Result<()> {
    let big_n = 1000.0;
    let nodes = vec![
        vec![0.20],
        vec![0.20 + 0.4 / big_n],
        vec![0.20 + 0.8 / big_n],
        vec![0.70],
        vec![0.70 + 0.5 / big_n],
    ];
    let ns = NodeSet::new(1, 999, &nodes)?;
    let cd = decompose_clusters(&ns);
    let spec = CertificateSpec::new(&ns, &cd, 2)?;
    println!(
        "beta={} Q={} P={} lambda={} within hypotheses: {}",
        spec.beta, spec.q, spec.p, spec.lambda, spec.within_hypotheses
    );

    println!("\ninterpolation table I_j(t_k):");
    for j in 0..ns.len() {
        let mut row = Vec::new();
        for k in 0..ns.len() {
            row.push(format!("{:>9.2e}", eval_basis(&ns, &cd, &spec, j, ns.node(k))?.norm()));
        }
        println!("  I_{j}: {}", row.join(" "));
    }

    let sigma = smallest_singular_value(&ns)?;
    let v = sigma.vector.clone().expect("Gram route returns a singular vector");
    let f = certificate_polynomial(&ns, &cd, &spec, &v)?;
    println!(
        "\nf has {} separable terms of degree <= {}",
        f.terms().len(),
        f.degree()
    );

    let res = robust_duality_bound(&ns, &cd, &spec, &v)?;
    println!("{}", CertificateResult::CSV_HEADER);
    println!("{}", res.csv_row());
    println!("sigma_min = {:.6e}", sigma.sigma_min);

    // any unit vector gives a bound on its own ||A^* v||
    let m = ns.len() as f64;
    let w: Vec<Complex64> = (0..ns.len())
        .map(|j| Complex64::from_polar(1.0 / m.sqrt(), j as f64))
        .collect();
    let rw = robust_duality_bound(&ns, &cd, &spec, &w)?;
    println!(
        "spread vector: bound {:?} <= ||A^* w|| = {:.6e}",
        rw.lower_bound,
        adjoint_apply_norm(&ns, &w)?
    );
    Ok(())
}
