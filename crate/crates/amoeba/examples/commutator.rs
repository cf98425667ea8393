//! The four-phase loop `X1, X2, -X1, -X2` and its second-order drift.
//!
//! Run: `cargo run --release --example commutator`

use amoeba::control_fields::{commutator_maneuver, commutator_scaling, lie_bracket, loglog_slope, Field, ShapeField};
use amoeba::dynamics::RigidState;
use amoeba::shape_space::PhysicalConstants;

fn main() -> amoeba::Result<()> {
    let k = PhysicalConstants::neutral(1.0, 0.5)?;
    let fields: Vec<ShapeField> = (1..=4).map(ShapeField::two_mode).collect();
    let c0 = [0.5, 0.0, 0.0, 0.0];

    let m = commutator_maneuver(&fields, (0, 1), 0.1, 50, RigidState::default(), &c0, &k, 20)?;
    let last = m.cycle_states.last().unwrap();
    let phase: f64 = m.phase_states.windows(2).map(|w| (w[1].r[0] - w[0].r[0]).hypot(w[1].r[1] - w[0].r[1])).sum::<f64>()
        / (m.phase_states.len() - 1) as f64;
    println!("after 50 cycles: {last:?}");
    println!("net drift per cycle {:.3e} vs mean phase excursion {phase:.3e}", last.r[0].hypot(last.r[1]) / 50.0);

    let table = commutator_scaling(&fields, (0, 1), &[0.1, 0.05, 0.025], &c0, &k, 20)?;
    for (eps, d) in &table {
        println!("eps = {eps:<6} shape drift {d:.4e}  drift/eps^2 = {:.5}", d / (eps * eps));
    }
    let b = lie_bracket(&Field::Shape(fields[1]), &Field::Shape(fields[0]), &c0);
    println!("log-log slope {:.4}; |[X2, X1](c0)| = {:.5}", loglog_slope(&table), b.iter().map(|v| v * v).sum::<f64>().sqrt());
    Ok(())
}
