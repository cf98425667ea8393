//! Steering with `h_1`: the body swims around a closed loop whose period
//! shrinks as the steering rate grows. Writes `circular.svg`.
//!
//! Run: `cargo run --release --example circular_path`

use std::f64::consts::PI;

use amoeba::cli::output::{svg_plot, Series};
use amoeba::dynamics::{integrate, path_summary, IntegrateOptions, RigidState};
use amoeba::shape_space::PhysicalConstants;
use amoeba::strokes::StrokeProgram;

fn main() -> amoeba::Result<()> {
    let k = PhysicalConstants::neutral(1.0, 0.5)?;
    let mut paths = Vec::new();
    for (h, periods) in [(1.0, 24.0), (-1.0, 24.0), (2.0, 12.0), (-1.5, 18.0)] {
        let stroke = StrokeProgram::preset("circular")?.with_steering(h).truncated(2);
        let opts = IntegrateOptions { dt: 1e-2, self_check: false, record_every: 4 };
        let tr = integrate(&stroke, RigidState::default(), [0.0, periods * PI], &k, opts)?;
        let s = path_summary(&tr.samples);
        println!(
            "h1 = {h:+.1} over [0, {periods}pi]: diameter {:.4}, end-to-start {:.4} ({:.1}% of diameter), winding {:+.3} turns",
            s.diameter,
            s.closure_gap,
            100.0 * s.closure_gap / s.diameter,
            s.centroid_winding / (2.0 * PI)
        );
        paths.push((format!("h1 = {h}"), tr.samples.iter().map(|s| (s.state.r[0], s.state.r[1])).collect::<Vec<_>>()));
    }
    let series: Vec<Series> = paths.iter().map(|(l, p)| Series { label: l, points: p.clone() }).collect();
    std::fs::write("circular.svg", svg_plot("circular swimming", &series, true)).expect("write circular.svg");
    println!("wrote circular.svg");
    Ok(())
}
