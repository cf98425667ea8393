//! Controllability by rank: the shape fields and their bracket span the
//! sphere, and the lifted fields span position, orientation and shape.
//!
//! Run: `cargo run --release --example rank_certificates`

use amoeba::cli::commands::{lifted_generators, symmetric_points};
use amoeba::control_fields::{lie_bracket, rank_certificate, rank_of, Field, ShapeField};
use amoeba::shape_space::PhysicalConstants;

fn main() -> amoeba::Result<()> {
    let x1 = Field::Shape(ShapeField::two_mode(1));
    let x2 = Field::Shape(ShapeField::two_mode(2));
    let c = [0.3, 0.1, -0.2, 0.25];
    println!("[X1, X2](c) = {:?}", lie_bracket(&x1, &x2, &c));
    let cert = rank_of(&[x1.clone(), x2.clone(), Field::bracket(&x1, &x2)], &c, 0, 1e-10, 2);
    println!("shape sphere: rank {} of {}, singular values {:?}", cert.rank, cert.tangent_dim, cert.singular_values.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>());

    let k = PhysicalConstants::new(1.0, 0.8, 0.6)?;
    for p in symmetric_points(k.mu) {
        let x: Vec<f64> = [0.0, 0.0, 0.0].iter().chain(&p).copied().collect();
        for len in [2, 3, 4] {
            let cert = rank_certificate(&lifted_generators(k), &x, 3, len, 1e-10);
            println!(
                "c = {:+.3?}, brackets up to length {len}: rank {} of {} (sigma_min/sigma_max {:.2e})",
                p,
                cert.rank,
                cert.tangent_dim,
                cert.conditioning()
            );
        }
    }
    Ok(())
}
