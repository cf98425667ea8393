//! Reciprocal strokes give no net motion: a stroke played forward and then
//! exactly backward returns the body to its start, and any time-warped replay
//! stays inside the flapping ball.
//!
//! Run: `cargo run --release --example scallop`

use std::f64::consts::PI;

use amoeba::dynamics::{flapping_bound, integrate, IntegrateOptions, Reparameterized, Reversed, RigidState};
use amoeba::shape_space::PhysicalConstants;
use amoeba::strokes::StrokeProgram;

fn main() -> amoeba::Result<()> {
    let k = PhysicalConstants::neutral(1.0, 0.5)?;
    let stroke = StrokeProgram::preset("straight")?.truncated(2);
    let q0 = RigidState::new(0.3, -0.2, 0.4);
    let t = 2.0 * PI;

    let fwd = integrate(&stroke, q0, [0.0, t], &k, IntegrateOptions::new(1e-3))?;
    let back = Reversed { base: &stroke, t_end: t, aux_end: fwd.final_aux.clone() };
    let ret = integrate(&back, fwd.final_state, [0.0, t], &k, IntegrateOptions::new(1e-3))?;
    println!("after the forward half:  {:?}", fwd.final_state);
    println!("after retracing:         {:?}  (gap {:.2e})", ret.final_state, ret.final_state.dist(&q0));

    let radius = flapping_bound(&stroke, [0.0, t], &k)?;
    let warp = Reparameterized { base: &stroke, beta: Box::new(move |s: f64| (t * (s / t * PI).sin().abs(), PI * (s / t * PI).cos() * (s / t * PI).sin().signum())) };
    let tr = integrate(&warp, q0, [0.0, t], &k, IntegrateOptions::new(1e-3))?;
    let far = tr.samples.iter().map(|s| s.state.dist(&q0)).fold(0.0, f64::max);
    println!("flapping radius R = {radius:.4}; farthest excursion of a warped replay {far:.4}");
    Ok(())
}
