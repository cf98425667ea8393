//! Mass matrices of a deformed body and the boundary-data cross-check.
//!
//! Run: `cargo run --example added_mass`

use amoeba::mass_matrices::{assemble, coercivity_constant, det3, k_matrix};
use amoeba::potentials::{boundary_data_fft_oracle, closed_form, PotentialId};
use amoeba::shape_space::{in_domain_d, volume, PhysicalConstants, ShapeCoefficients};

fn print_matrix(name: &str, rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) {
    println!("{name}:");
    for i in 0..rows {
        let line: Vec<String> = (0..cols).map(|j| format!("{:>10.5}", at(i, j))).collect();
        println!("  {}", line.join(" "));
    }
}

fn main() -> amoeba::Result<()> {
    let k = PhysicalConstants::neutral(1.0, 0.5)?;
    let c = ShapeCoefficients::from_axes(vec![0.3, -0.1, 0.12, 0.05])?;
    println!("shape in the admissible domain: {}", in_domain_d(&c));
    println!("volume {:.6}   body density {:.4}", volume(&c)?, k.rho_0);

    let mm = assemble(c.axes(), &k);
    print_matrix("M^r", 3, 3, |i, j| mm.m_r.at(i, j));
    print_matrix("N", 3, 4, |i, j| mm.n_mat.at(i, j));
    print_matrix("M^d", 4, 4, |i, j| mm.m_d.at(i, j));
    let kk = k_matrix(c.axes(), &k)?;
    print_matrix("K (reduced)", 4, 4, |i, j| kk.at(i, j));

    let m = k.mass();
    println!("det M^r = {:.6}  >=  m^2 pi rho_0 / 2 = {:.6}", det3(&mm.m_r), m * m * std::f64::consts::PI * k.rho_0 / 2.0);
    let lmin = kk.to_na().symmetric_eigen().eigenvalues.min();
    println!("lambda_min(K) = {:.6}  >=  2 nu' = {:.6}", lmin, 2.0 * coercivity_constant(2, &k));

    // Coefficients of the elementary potentials against a 256-point FFT of their Neumann data.
    for which in [PotentialId::Rigid(1), PotentialId::Rigid(2), PotentialId::Rigid(3), PotentialId::A(1), PotentialId::B(2)] {
        let exact = closed_form(&c, which);
        let (fft, _) = boundary_data_fft_oracle(&c, which, 256);
        let err = exact
            .cos_part
            .iter()
            .chain(&exact.sin_part)
            .zip(fft.cos_part.iter().chain(&fft.sin_part))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("{which:?}: max |closed form - FFT| = {err:.2e}");
    }
    Ok(())
}
