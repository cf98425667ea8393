//! Shared oracles and generators for the integration and acceptance tests.
#![allow(dead_code)]

use amoeba::potentials::{alpha_coeffs, mu_nu_coeffs, weighted_dot, CoefficientPair};
use rand::Rng;

/// Every two-mode closed-form pairing as `(label, closed form, assembled)`.
pub fn two_mode_table(c: &[f64]) -> Vec<(&'static str, f64, f64)> {
    let (a1, b1, a2, b2) = (c[0], c[1], c[2], c[3]);
    let (mu0, nu0) = mu_nu_coeffs(c, 0);
    let (mu1, nu1) = mu_nu_coeffs(c, 1);
    let (mu2, nu2) = mu_nu_coeffs(c, 2);
    let al = alpha_coeffs(c);
    let d = |u: &CoefficientPair<f64>, v: &CoefficientPair<f64>| weighted_dot(u, v);
    let s1 = a1 * a1 + b1 * b1;
    let s2 = a2 * a2 + b2 * b2;
    vec![
        ("|mu0|^2", (1.0 - a1).powi(2) + b1 * b1 + 2.0 * s2, d(&mu0, &mu0)),
        ("mu0.nu0", -2.0 * b1, d(&mu0, &nu0)),
        ("mu0.alpha", 3.0 * (a2 * b1 - a1 * b2) - 2.0 * a1 * b1 * a2 + b2 * (a1 * a1 - b1 * b1), d(&mu0, &al)),
        ("|nu0|^2", (1.0 + a1).powi(2) + b1 * b1 + 2.0 * s2, d(&nu0, &nu0)),
        ("nu0.alpha", 3.0 * (b1 * b2 + a2 * a1) + 2.0 * a1 * b1 * b2 + a2 * (a1 * a1 - b1 * b1), d(&nu0, &al)),
        ("|alpha|^2", s1 * s2 + 2.0 * s1 + 3.0 * s2, d(&al, &al)),
        ("mu0.mu1", 2.0 * (a2 * a1 + b2 * b1) - 3.0 * a2, d(&mu0, &mu1)),
        ("mu0.nu1", 2.0 * (b2 * a1 - a2 * b1) - 3.0 * b2, d(&mu0, &nu1)),
        ("mu0.mu2", -a1 + a1 * a1 - b1 * b1, d(&mu0, &mu2)),
        ("mu0.nu2", -b1 + 2.0 * a1 * b1, d(&mu0, &nu2)),
        ("nu0.mu1", 2.0 * (a2 * b1 - b2 * a1) - 3.0 * b2, d(&nu0, &mu1)),
        ("nu0.nu1", 2.0 * (b2 * b1 + a2 * a1) + 3.0 * a2, d(&nu0, &nu1)),
        ("nu0.mu2", b1 + 2.0 * a1 * b1, d(&nu0, &mu2)),
        ("nu0.nu2", b1 * b1 - a1 * a1 - a1, d(&nu0, &nu2)),
        ("alpha.mu1", -b1 - 2.0 * b1 * s2, d(&al, &mu1)),
        ("alpha.nu1", a1 + 2.0 * a1 * s2, d(&al, &nu1)),
        ("alpha.mu2", -b2 + b2 * s1, d(&al, &mu2)),
        ("alpha.nu2", a2 - a2 * s1, d(&al, &nu2)),
        ("|mu1|^2", 4.0 * s2 + 0.5, d(&mu1, &mu1)),
        ("mu1.mu2", 2.0 * (a2 * a1 - b2 * b1), d(&mu1, &mu2)),
        ("mu1.nu2", 2.0 * (a2 * b1 + a1 * b2), d(&mu1, &nu2)),
        ("|mu2|^2", s1 + 1.0 / 3.0, d(&mu2, &mu2)),
        ("mu2.nu1", 2.0 * (a1 * b2 + b1 * a2), d(&mu2, &nu1)),
        ("|nu1|^2", 4.0 * s2 + 0.5, d(&nu1, &nu1)),
        ("nu1.nu2", 2.0 * (b1 * b2 - a2 * a1), d(&nu1, &nu2)),
        ("|nu2|^2", s1 + 1.0 / 3.0, d(&nu2, &nu2)),
        ("mu1.nu1", 0.0, d(&mu1, &nu1)),
        ("mu2.nu2", 0.0, d(&mu2, &nu2)),
    ]
}

/// Closed form of `[X^1, X^2](c)`.
pub fn reference_bracket(c: &[f64]) -> [f64; 4] {
    let s = 4.0 / 3.0 * (c[0] * c[0] + c[1] * c[1]);
    [-s * c[1], s * c[0], -3.0 * s * c[3], 3.0 * s * c[2]]
}

/// Uniform point of the ball `‖c‖_T ≤ r` (by rejection in the box).
pub fn random_in_t_ball<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    loop {
        let c: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-r..r)).collect();
        if amoeba::shape_space::norm_t_sq(&c).sqrt() <= r {
            return c;
        }
    }
}

/// Random shape of the admissible domain, drawn with `‖c‖_S < s_max`.
pub fn random_in_domain<R: Rng>(rng: &mut R, n: usize, s_max: f64) -> Vec<f64> {
    loop {
        let c: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-s_max..s_max) / n as f64).collect();
        let cs = amoeba::shape_space::ShapeCoefficients::from_axes(c.clone()).unwrap();
        if amoeba::shape_space::norm_s(&c) < s_max && amoeba::shape_space::in_domain_d(&cs) {
            return c;
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `(M^r, N, M^d)` built only from the two-mode closed-form pairings.
pub fn closed_form_two_mode_matrices(c: &[f64], k: &amoeba::shape_space::PhysicalConstants) -> [Vec<Vec<f64>>; 3] {
    let table = two_mode_table(c);
    let p = |name: &str| -> f64 {
        if let Some(e) = table.iter().find(|e| e.0 == name) {
            return e.1;
        }
        // symmetric counterpart `v.u` of a listed `u.v`
        let (u, v) = name.split_once('.').expect("pairing label");
        table.iter().find(|e| e.0 == format!("{v}.{u}")).map(|e| e.1).unwrap_or_else(|| panic!("no closed-form entry for {name}"))
    };
    let sq = |u: &str| p(&format!("|{u}|^2"));
    let pair = |u: &str, v: &str| if u == v { sq(u) } else { p(&format!("{u}.{v}")) };
    let pi = std::f64::consts::PI;
    let f = pi * k.rho_f;
    let rigid = ["mu0", "nu0", "alpha"];
    let shape = ["mu1", "nu1", "mu2", "nu2"];
    let s1 = c[0] * c[0] + c[1] * c[1];
    let s2 = c[2] * c[2] + c[3] * c[3];
    let mut mr: Vec<Vec<f64>> = rigid.iter().map(|u| rigid.iter().map(|v| f * pair(u, v)).collect()).collect();
    mr[0][0] += pi * k.rho_0;
    mr[1][1] += pi * k.rho_0;
    mr[2][2] += pi * k.rho_0 * (0.5 + s1 / 2.0 + s2 / 3.0);
    let n: Vec<Vec<f64>> = rigid.iter().map(|u| shape.iter().map(|v| f * pair(u, v)).collect()).collect();
    let mut md: Vec<Vec<f64>> = shape.iter().map(|u| shape.iter().map(|v| f * pair(u, v)).collect()).collect();
    for (i, row) in md.iter_mut().enumerate() {
        row[i] += pi * k.rho_0 / (i / 2 + 2) as f64;
    }
    [mr, n, md]
}
