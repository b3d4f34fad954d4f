//! Smallest singular values of Vandermonde matrices with nodes on the torus
//! `T^d = [0, 1)^d`, for node sets that form clusters of size at most `lambda`.
//!
//! - [`geometry`]: wrap-around distances, cluster decomposition, separation
//!   `rho`, normalized minimal distance `tau` and the complexity `C`.
//! - [`dirichlet`]: the normalized Dirichlet kernel `d_m` and its powers, with
//!   exact norms and inner products from Fourier coefficients.
//! - [`certificate`]: Lagrange-like interpolants `I_j` and the robust-duality
//!   lower bound on `||A^* v||`.
//! - [`bounds`]: closed-form lower and upper bounds, each carrying the
//!   conditions under which it holds.
//! - [`spectra`]: `sigma_min` through the `M x M` Gram matrix, an explicit SVD
//!   oracle for small sizes, and closed forms for pairs and planar triples.
//! - [`harness`]: the seeded Monte Carlo sweeps behind the `experiment`
//!   subcommand, written as CSV plus a gnuplot script.
//!
//! ```
//! use torus_vandermonde::geometry::{decompose_clusters, geometry_summary, NodeSet};
//! use torus_vandermonde::spectra::smallest_singular_value;
//!
//! let ns = NodeSet::new(1, 99, &[vec![0.1], vec![0.103], vec![0.6]]).unwrap();
//! let gs = geometry_summary(&ns, &decompose_clusters(&ns));
//! assert_eq!(gs.lambda, 2);
//! let sigma = smallest_singular_value(&ns).unwrap();
//! assert!(sigma.sigma_min > 0.0);
//! ```
//!
//! Run any example with `cargo run --release --example <name>`.

pub mod bounds;
pub mod certificate;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod nodefile;
pub mod precise;
pub mod spectra;
pub mod trigpoly;
