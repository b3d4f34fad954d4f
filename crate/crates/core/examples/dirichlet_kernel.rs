//! The modified Dirichlet kernel `d_m^beta`: values, exact norms and the decay
//! estimates that drive the certificate.

use torus_vandermonde::dirichlet::{
    dirichlet_power_eval, norm_sq_upper_bound, pointwise_decay_bound, shifted_inner_product_bound, KernelSpec,
    KernelTable,
};

fn main() -> torus_vandermonde::error::Result<()> {
    let spec = KernelSpec::new(32, 4, 1)?;
    println!("d_m^beta with m={} beta={} d={}", spec.m, spec.beta, spec.d);
    println!("{:>8} {:>12} {:>12}", "t", "|value|", "decay bound");
    for t in [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.25, 0.5] {
        let v = dirichlet_power_eval(spec, &[t]).norm();
        let b = if t > 0.0 {
            pointwise_decay_bound(spec, &[t])
        } else {
            f64::INFINITY
        };
        println!("{t:>8} {v:>12.4e} {b:>12.4e}");
    }

    let table = KernelTable::new(spec);
    println!(
        "\n||d||^2 = {:.6e}, upper estimate {:.6e}",
        table.norm_sq(),
        norm_sq_upper_bound(spec)
    );
    println!("{:>8} {:>12} {:>12}", "shift", "|<d, d(.-t)>|", "bound");
    for t in [0.01, 0.03, 0.1, 0.3] {
        let ip = table.shifted_inner_product(&[t]).norm();
        println!("{t:>8} {ip:>12.4e} {:>12.4e}", shifted_inner_product_bound(spec, &[t]));
    }

    // in d dimensions everything factorizes over coordinates
    let spec2 = KernelSpec::new(32, 4, 2)?;
    println!(
        "\nd=2: ||d||^2 = {:.6e} = ({:.6e})^2",
        KernelTable::new(spec2).norm_sq(),
        table.norm_sq()
    );
    Ok(())
}
