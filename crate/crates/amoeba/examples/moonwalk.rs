//! Two strokes that look the same but swim in opposite directions.
//!
//! Run: `cargo run --release --example moonwalk [omega]` (default 1e4)

use amoeba::cli::commands::moonwalk;
use amoeba::cli::RunConfig;

fn main() {
    let omega = std::env::args().nth(1).map(|s| s.parse::<f64>().expect("omega must be a number")).unwrap_or(1e4);
    let cfg = RunConfig { omega: Some(omega), ..Default::default() };
    match moonwalk(&cfg) {
        Ok((rep, _)) => {
            println!("omega = {omega:e}, fast step {:.3e}", rep.dt_fast);
            println!("net dr1 without perturbation: {:+.6}", rep.delta_r1_base);
            println!("net dr1 with perturbation:    {:+.6}", rep.delta_r1_reverse);
            println!("largest shape difference (S-norm): {:.4}", rep.shape_gap_s);
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
