//! Truncated shape space S_N.
//!
//! A shape is the coefficient list `c_k = a_k + i b_k`, `k = 1..N`, stored as a
//! flat real vector in the axis order `(a_1, b_1, a_2, b_2, …, a_N, b_N)`.
//! The body occupies the image of the unit disk under
//! `χ(z) = z + Σ c_k z̄^k`; the fluid occupies the image of its exterior under
//! `φ(z) = z + Σ c_k z^{-k}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default angular resolution of the embedding test.
pub const DOMAIN_SAMPLES: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeCoefficients {
    v: Vec<f64>,
}

/// Shape velocities share the coefficient layout.
pub type ShapeVelocity = ShapeCoefficients;

impl ShapeCoefficients {
    pub fn zeros(n_modes: usize) -> Self {
        assert!(n_modes > 0, "n_modes must be positive");
        ShapeCoefficients { v: vec![0.0; 2 * n_modes] }
    }

    /// Build from the interleaved `(a_1, b_1, …)` layout.
    pub fn from_axes(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                field: "coeffs",
                reason: format!("expected an even, nonzero length, got {}", v.len()),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter { field: "coeffs", reason: "non-finite entry".into() });
        }
        Ok(ShapeCoefficients { v })
    }

    pub fn from_complex(c: &[Complex64]) -> Result<Self> {
        Self::from_axes(c.iter().flat_map(|z| [z.re, z.im]).collect())
    }

    /// Shape with `a_k` / `b_k` set from `(k, a, b)` triples; other modes zero.
    pub fn with_modes(n_modes: usize, modes: &[(usize, f64, f64)]) -> Self {
        let mut c = Self::zeros(n_modes);
        for &(k, a, b) in modes {
            c.set(k, a, b);
        }
        c
    }

    pub fn n_modes(&self) -> usize {
        self.v.len() / 2
    }
    pub fn axes(&self) -> &[f64] {
        &self.v
    }
    pub fn into_axes(self) -> Vec<f64> {
        self.v
    }
    /// `a_k`, 1-based.
    pub fn a(&self, k: usize) -> f64 {
        self.v[2 * (k - 1)]
    }
    /// `b_k`, 1-based.
    pub fn b(&self, k: usize) -> f64 {
        self.v[2 * (k - 1) + 1]
    }
    pub fn set(&mut self, k: usize, a: f64, b: f64) {
        self.v[2 * (k - 1)] = a;
        self.v[2 * (k - 1) + 1] = b;
    }
    pub fn coeff(&self, k: usize) -> Complex64 {
        Complex64::new(self.a(k), self.b(k))
    }

    pub fn norm_s(&self) -> f64 {
        norm_s(&self.v)
    }
    pub fn norm_t(&self) -> f64 {
        norm_t_sq(&self.v).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub rho_f: f64,
    pub rho_0: f64,
    pub mu: f64,
}

impl PhysicalConstants {
    pub fn new(rho_f: f64, rho_0: f64, mu: f64) -> Result<Self> {
        let pos = |field, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { field, reason: format!("must be positive, got {x}") })
            }
        };
        pos("rho_f", rho_f)?;
        pos("rho_0", rho_0)?;
        pos("mu", mu)?;
        Ok(PhysicalConstants { rho_f, rho_0, mu })
    }

    /// Neutrally buoyant body: `ρ_0 = ρ_f (1 − μ²)`.
    pub fn neutral(rho_f: f64, mu: f64) -> Result<Self> {
        if !(mu < 1.0) {
            return Err(Error::InvalidParameter {
                field: "mu",
                reason: format!("neutral buoyancy needs μ < 1, got {mu}"),
            });
        }
        Self::new(rho_f, rho_f * (1.0 - mu * mu), mu)
    }

    /// Body mass `m = π ρ_0`.
    pub fn mass(&self) -> f64 {
        std::f64::consts::PI * self.rho_0
    }

    /// Density ratio `ρ_0 / ρ_f`.
    pub fn ratio(&self) -> f64 {
        self.rho_0 / self.rho_f
    }
}

pub fn norm_s(c: &[f64]) -> f64 {
    c.chunks(2).enumerate().map(|(i, p)| (i + 1) as f64 * (p[0].abs() + p[1].abs())).sum()
}

/// `‖c‖_T²`, generic so it can be differentiated.
pub fn norm_t_sq<S: Scalar>(c: &[S]) -> S {
    let mut s = S::zero();
    for (i, p) in c.chunks(2).enumerate() {
        s += (p[0] * p[0] + p[1] * p[1]).scale((i + 1) as f64);
    }
    s
}

pub fn norm_t(c: &ShapeCoefficients) -> f64 {
    c.norm_t()
}

/// Embedding test: `sup_{|z|=1} |Σ k c_k z^{k-1}| < 1`, sampled on `samples`
/// points with a Lipschitz safety factor `1 + Nπ/samples`.
pub fn in_domain_d_with(c: &ShapeCoefficients, samples: usize) -> bool {
    let n = c.n_modes();
    let mut sup = 0.0f64;
    for s in 0..samples {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / samples as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            acc += c.coeff(k) * zp * k as f64;
            zp *= z;
        }
        sup = sup.max(acc.norm());
    }
    sup * (1.0 + n as f64 * std::f64::consts::PI / samples as f64) < 1.0
}

pub fn in_domain_d(c: &ShapeCoefficients) -> bool {
    in_domain_d_with(c, DOMAIN_SAMPLES)
}

pub fn volume(c: &ShapeCoefficients) -> Result<f64> {
    let t2 = norm_t_sq(c.axes());
    if t2 >= 1.0 {
        return Err(Error::NonPositiveVolume { norm_t: t2.sqrt() });
    }
    Ok(std::f64::consts::PI * (1.0 - t2))
}

/// Moment of inertia `πρ_0 (1/2 + Σ |c_k|²/(k+1))`.
pub fn inertia<S: Scalar>(c: &[S], rho_0: f64) -> S {
    let mut s = S::cst(0.5);
    for (i, p) in c.chunks(2).enumerate() {
        s += (p[0] * p[0] + p[1] * p[1]).scale(1.0 / (i + 2) as f64);
    }
    s.scale(std::f64::consts::PI * rho_0)
}

/// Volume-conservation functional `Σ k (ȧ_k a_k + ḃ_k b_k)`.
pub fn constraint_g<S: Scalar>(c: &[S], cdot: &[S]) -> S {
    let mut s = S::zero();
    for (i, (p, q)) in c.chunks(2).zip(cdot.chunks(2)).enumerate() {
        s += (q[0] * p[0] + q[1] * p[1]).scale((i + 1) as f64);
    }
    s
}

/// Angular self-propulsion functional `Σ (ḃ_k a_k − ȧ_k b_k)/(k+1)`.
pub fn constraint_f<S: Scalar>(c: &[S], cdot: &[S]) -> S {
    let mut s = S::zero();
    for (i, (p, q)) in c.chunks(2).zip(cdot.chunks(2)).enumerate() {
        s += (q[1] * p[0] - q[0] * p[1]).scale(1.0 / (i + 2) as f64);
    }
    s
}

/// Gradient of `constraint_f` with respect to `cdot` (the covector `F(c)`).
pub fn f_covector(c: &[f64]) -> Vec<f64> {
    c.chunks(2)
        .enumerate()
        .flat_map(|(i, p)| {
            let w = 1.0 / (i + 2) as f64;
            [-w * p[1], w * p[0]]
        })
        .collect()
}

/// Gradient of `constraint_g` with respect to `cdot` (the covector `G(c)`).
pub fn g_covector(c: &[f64]) -> Vec<f64> {
    c.chunks(2)
        .enumerate()
        .flat_map(|(i, p)| {
            let w = (i + 1) as f64;
            [w * p[0], w * p[1]]
        })
        .collect()
}

pub fn chi_eval(c: &ShapeCoefficients, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let zb = z.conj();
    let mut acc = z;
    let mut p = zb;
    for k in 1..=c.n_modes() {
        acc += c.coeff(k) * p;
        p *= zb;
    }
    Ok(acc)
}

pub fn phi_eval(c: &ShapeCoefficients, z: Complex64) -> Result<Complex64> {
    if z.norm() < 1.0 - 1e-12 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let zi = z.inv();
    let mut acc = z;
    let mut p = zi;
    for k in 1..=c.n_modes() {
        acc += c.coeff(k) * p;
        p *= zi;
    }
    Ok(acc)
}

/// Jacobian determinant of χ at `z`: `1 − |Σ k c_k z̄^{k−1}|²`.
pub fn jacobian_det(c: &ShapeCoefficients, z: Complex64) -> f64 {
    let zb = z.conj();
    let mut w = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for k in 1..=c.n_modes() {
        w += c.coeff(k) * p * k as f64;
        p *= zb;
    }
    1.0 - w.norm_sqr()
}

/// Body density at the image `χ(z)` of the reference point `z`.
pub fn density_eval(c: &ShapeCoefficients, k: &PhysicalConstants, z: Complex64) -> Result<f64> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let det = jacobian_det(c, z);
    if det <= 1e-14 {
        return Err(Error::SingularJacobian { det });
    }
    Ok(k.rho_0 / det)
}

/// `μ c / ‖c‖_T`.
pub fn project_sphere(c: &ShapeCoefficients, mu: f64) -> Result<ShapeCoefficients> {
    let t = c.norm_t();
    if t == 0.0 {
        return Err(Error::ZeroShape);
    }
    Ok(ShapeCoefficients { v: c.v.iter().map(|x| x * mu / t).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sh(n: usize, modes: &[(usize, f64, f64)]) -> ShapeCoefficients {
        ShapeCoefficients::with_modes(n, modes)
    }

    #[test]
    fn norms() {
        assert_eq!(sh(1, &[(1, 1.0, 0.0)]).norm_s(), 1.0);
        assert!((sh(2, &[(1, 0.3, 0.0), (2, 0.0, 0.2)]).norm_s() - 0.7).abs() < 1e-15);
        assert_eq!(sh(3, &[]).norm_s(), 0.0);
        assert_eq!(sh(1, &[(1, 0.5, 0.0)]).norm_t(), 0.5);
        assert!((sh(2, &[(1, 1.0, 0.0), (2, 1.0, 0.0)]).norm_t() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn domain_membership() {
        assert!(in_domain_d(&sh(2, &[])));
        assert!(in_domain_d(&sh(2, &[(1, 0.5, 0.0)])));
        assert!(!in_domain_d(&sh(2, &[(2, 0.6, 0.0)])));
        assert!(!in_domain_d(&sh(1, &[(1, 1.0, 0.0)])));
    }

    #[test]
    fn volume_and_inertia() {
        assert!((volume(&sh(2, &[])).unwrap() - PI).abs() < 1e-15);
        assert!((volume(&sh(1, &[(1, 0.5, 0.0)])).unwrap() - 0.75 * PI).abs() < 1e-15);
        assert!(matches!(volume(&sh(1, &[(1, 1.0, 0.0)])), Err(Error::NonPositiveVolume { .. })));
        let rho0 = 0.8;
        assert!((inertia(sh(2, &[]).axes(), rho0) - PI * rho0 / 2.0).abs() < 1e-15);
        assert!((inertia(sh(1, &[(1, 0.5, 0.0)]).axes(), rho0) - 0.625 * PI * rho0).abs() < 1e-15);
        let want = PI * rho0 * (0.5 + 1.0 / 3.0);
        assert!((inertia(sh(2, &[(2, 0.0, 1.0)]).axes(), rho0) - want).abs() < 1e-15);
    }

    #[test]
    fn constraint_examples() {
        let c = sh(1, &[(1, 0.5, 0.0)]);
        assert_eq!(constraint_g(c.axes(), &[0.0, 1.0]), 0.0);
        assert_eq!(constraint_g(c.axes(), &[2.0, 0.0]), 1.0);
        let c = sh(1, &[(1, 1.0, 0.0)]);
        assert_eq!(constraint_f(c.axes(), &[0.0, 1.0]), 0.5);
        let c = [0.3, -0.2, 0.1, 0.4];
        let par: Vec<f64> = c.iter().map(|x| 1.7 * x).collect();
        assert!(constraint_f(&c, &par).abs() < 1e-16);
    }

    #[test]
    fn maps_at_sample_points() {
        let c = sh(1, &[(1, 0.5, 0.0)]);
        let z = |re, im| Complex64::new(re, im);
        assert!((chi_eval(&c, z(1.0, 0.0)).unwrap() - z(1.5, 0.0)).norm() < 1e-15);
        assert!((chi_eval(&c, z(0.0, 1.0)).unwrap() - z(0.0, 0.5)).norm() < 1e-15);
        assert!((phi_eval(&c, z(2.0, 0.0)).unwrap() - z(2.25, 0.0)).norm() < 1e-15);
        assert!(chi_eval(&c, z(1.1, 0.0)).is_err());
        assert!(phi_eval(&c, z(0.5, 0.0)).is_err());
    }

    #[test]
    fn density_matches_two_mode_closed_form() {
        let (a1, b1, a2, b2) = (0.21, -0.13, 0.08, 0.11);
        let c = sh(2, &[(1, a1, b1), (2, a2, b2)]);
        let k = PhysicalConstants::new(1.0, 0.9, 0.3).unwrap();
        for &(r, t) in &[(0.0, 0.0), (0.3, 1.1), (0.9, -2.0), (1.0, 3.0)] {
            let zz = Complex64::from_polar(r, t);
            let den = 1.0 - a1 * a1 - b1 * b1 - 4.0 * (a1 * a2 + b1 * b2) * r * f64::cos(t)
                + 4.0 * (b1 * a2 - a1 * b2) * r * f64::sin(t)
                - 4.0 * (a2 * a2 + b2 * b2) * r * r;
            let got = density_eval(&c, &k, zz).unwrap();
            assert!((got - 0.9 / den).abs() < 1e-13, "r={r} t={t}");
        }
    }

    #[test]
    fn total_mass_by_quadrature() {
        // ∫_A ρ* dx = ∫_D ρ*(χ(z)) det Dχ(z) dz on a polar midpoint grid
        let c = sh(3, &[(1, 0.2, 0.1), (2, -0.05, 0.07), (3, 0.03, 0.0)]);
        assert!(in_domain_d(&c));
        let k = PhysicalConstants::new(1.0, 0.7, 0.3).unwrap();
        let (nr, nt) = (200, 256);
        let mut m = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for j in 0..nt {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / nt as f64);
                m += density_eval(&c, &k, z).unwrap() * jacobian_det(&c, z) * r;
            }
        }
        m *= 2.0 * PI / (nr * nt) as f64;
        assert!((m - PI * 0.7).abs() < 1e-6);
    }

    #[test]
    fn projection() {
        let p = project_sphere(&sh(1, &[(1, 2.0, 0.0)]), 0.5).unwrap();
        assert_eq!(p, sh(1, &[(1, 0.5, 0.0)]));
        let c = sh(2, &[(1, 1.0, 0.0), (2, 1.0, 0.0)]);
        let p = project_sphere(&c, 3f64.sqrt()).unwrap();
        for (x, y) in p.axes().iter().zip(c.axes()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(project_sphere(&sh(2, &[]), 1.0), Err(Error::ZeroShape));
    }

    #[test]
    fn neutral_buoyancy() {
        let k = PhysicalConstants::neutral(1.0, 0.5).unwrap();
        assert!((k.rho_0 - 0.75).abs() < 1e-16);
        assert!(PhysicalConstants::neutral(1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(0.0, 1.0, 0.5).is_err());
    }
}
