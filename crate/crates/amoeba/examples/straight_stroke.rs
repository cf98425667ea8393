//! Net straight-line swimming from a two-mode stroke, with RK4 convergence.
//!
//! Run: `cargo run --release --example straight_stroke`

use std::f64::consts::PI;

use amoeba::dynamics::{integrate, IntegrateOptions, RigidState};
use amoeba::shape_space::PhysicalConstants;
use amoeba::strokes::StrokeProgram;

fn main() -> amoeba::Result<()> {
    let k = PhysicalConstants::neutral(1.0, 0.5)?;
    let stroke = StrokeProgram::preset("straight")?.truncated(2);
    let q0 = RigidState::default();

    let one = integrate(&stroke, q0, [0.0, 2.0 * PI], &k, IntegrateOptions::checked(1e-2))?;
    let two = integrate(&stroke, q0, [0.0, 4.0 * PI], &k, IntegrateOptions::new(1e-2))?;
    let d1 = one.final_state.r[0];
    let d2 = two.final_state.r[0] - d1;
    println!("displacement per period: {d1:+.10} then {d2:+.10}");
    println!("lateral drift {:.1e}, rotation {:.1e}", two.final_state.r[1].abs(), two.final_state.theta.abs());

    // Endpoint error against a fine reference on a span that is not a full period.
    let span = [0.0, 2.5];
    let reference = integrate(&stroke, q0, span, &k, IntegrateOptions::new(1e-4))?.final_state.r[0];
    let errs: Vec<f64> = [2e-2, 1e-2, 5e-3]
        .iter()
        .map(|&dt| integrate(&stroke, q0, span, &k, IntegrateOptions::new(dt)).map(|t| (t.final_state.r[0] - reference).abs()))
        .collect::<amoeba::Result<_>>()?;
    println!("RK4 errors {:?}, observed orders {:.3} {:.3}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(), (errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2());
    Ok(())
}
