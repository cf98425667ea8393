//! Internal forces behind a stroke, the power balance, and recovery of the
//! stroke from its forces.
//!
//! Run: `cargo run --release --example internal_forces`

use std::f64::consts::PI;

use amoeba::internal_forces::{force_from_shape, forces_along, lagrangian_reduced, shape_from_force, cost_functional};
use amoeba::shape_space::PhysicalConstants;
use amoeba::strokes::StrokeProgram;

fn main() -> amoeba::Result<()> {
    let k = PhysicalConstants::neutral(1.0, 0.5)?;
    let stroke = StrokeProgram::preset("straight")?.truncated(2);
    let series = forces_along(&stroke, [0.0, 2.0 * PI], 2e-2, &k)?;
    for i in 0..4 {
        let m = series.iter().map(|(_, f)| f[i].abs()).fold(0.0, f64::max);
        println!("max |F{}| = {m:.6}", i + 1);
    }
    println!("cost of one period = {:.6}", cost_functional(&series));

    // power balance dL/dt = F . cdot by central differences
    let p = StrokeProgram::preset("circular")?.truncated(2);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for i in 1..50 {
        let t = 0.37 * i as f64;
        let (c, cd, cdd) = p.sample(t);
        let f = force_from_shape(&c, &cd, &cdd, &k)?;
        let power: f64 = f.iter().zip(&cd).map(|(a, b)| a * b).sum();
        let (cp, cdp, _) = p.sample(t + h);
        let (cm, cdm, _) = p.sample(t - h);
        let dl = (lagrangian_reduced(&cp, &cdp, &k)? - lagrangian_reduced(&cm, &cdm, &k)?) / (2.0 * h);
        worst = worst.max((dl - power).abs());
    }
    println!("max |dL/dt - F.cdot| on the circular stroke: {worst:.2e}");

    let driver = stroke.clone();
    let mut force = |t: f64| {
        let (c, cd, cdd) = driver.sample(t);
        force_from_shape(&c, &cd, &cdd, &k).expect("forces along the stroke")
    };
    let (c0, cd0, _) = stroke.sample(0.0);
    let path = shape_from_force(&mut force, &c0, &cd0, [0.0, 2.0 * PI], 1e-2, &k)?;
    let err = path
        .iter()
        .map(|s| s.c.iter().zip(stroke.sample(s.t).0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    println!("stroke recovered from its forces, max error {err:.2e}");
    Ok(())
}
