//! Internal forces needed to realize a shape-change, and the inverse map.
//!
//! After eliminating the rigid velocity the shape obeys a geodesic-type
//! equation for the metric `K(c)`:
//!
//! ```text
//! K(c) c̈ + Γ(c)[ċ, ċ, ·] = F
//! ```
//!
//! with `Γ[u, v, w] = ½ (∂_u K(v, w) + ∂_v K(u, w) − ∂_w K(u, v))`.

use crate::dynamics::{curve_acceleration, curve_velocity, ShapeCurve};
use crate::error::{Error, Result};
use crate::mass_matrices::{assemble, coercivity_constant, d_k_dc, k_matrix, Mat};
use crate::ode::{rk4_step, step_count};
use crate::shape_space::{PhysicalConstants, ShapeCoefficients};

/// `Γ[u][v][w]` stored flat with stride `(n², n, 1)`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn at(&self, u: usize, v: usize, w: usize) -> f64 {
        self.data[(u * self.n + v) * self.n + w]
    }

    /// `Γ[u, v, ·]` as a covector.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (a, ua) in u.iter().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                let s = ua * vb;
                if s == 0.0 {
                    continue;
                }
                for (w, o) in out.iter_mut().enumerate() {
                    *o += s * self.at(a, b, w);
                }
            }
        }
        out
    }
}

pub fn christoffel(c: &ShapeCoefficients, k: &PhysicalConstants) -> Result<Christoffel> {
    let dk = d_k_dc(c, k)?;
    Ok(christoffel_from(&dk))
}

fn christoffel_from(dk: &[Mat<f64>]) -> Christoffel {
    let n = dk.len();
    let mut data = vec![0.0; n * n * n];
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                data[(u * n + v) * n + w] = 0.5 * (dk[u].at(v, w) + dk[v].at(u, w) - dk[w].at(u, v));
            }
        }
    }
    Christoffel { n, data }
}

/// `F = K(c) c̈ + Γ(c)[ċ, ċ, ·]`.
pub fn force_from_shape(c: &[f64], cdot: &[f64], cddot: &[f64], k: &PhysicalConstants) -> Result<Vec<f64>> {
    let cs = ShapeCoefficients::from_axes(c.to_vec())?;
    let kmat = k_matrix(c, k)?;
    let gamma = christoffel(&cs, k)?;
    let g = gamma.contract(cdot, cdot);
    Ok(kmat.mul_vec(cddot).iter().zip(g).map(|(a, b)| a + b).collect())
}

/// `ℒ = ½ ċᵀ K(c) ċ`.
pub fn lagrangian_reduced(c: &[f64], cdot: &[f64], k: &PhysicalConstants) -> Result<f64> {
    Ok(0.5 * k_matrix(c, k)?.quad(cdot, cdot))
}

/// Full kinetic energy `½ (q̇*, ċ)ᵀ M (q̇*, ċ)`.
pub fn lagrangian_full(c: &[f64], qdot_star: [f64; 3], cdot: &[f64], k: &PhysicalConstants) -> f64 {
    let mm = assemble(c, k);
    0.5 * (mm.m_r.quad(&qdot_star, &qdot_star) + 2.0 * mm.n_mat.quad(&qdot_star, cdot) + mm.m_d.quad(cdot, cdot))
}

/// Dual norm of a force with respect to `‖·‖_T`: `sqrt(Σ (F_{a_k}² + F_{b_k}²)/k)`.
pub fn dual_t_norm(f: &[f64]) -> f64 {
    f.chunks(2)
        .enumerate()
        .map(|(i, p)| (p[0] * p[0] + p.get(1).map_or(0.0, |b| b * b)) / (i + 1) as f64)
        .sum::<f64>()
        .sqrt()
}

/// Force series along a shape curve.
pub fn forces_along(
    curve: &dyn ShapeCurve,
    t_span: [f64; 2],
    dt: f64,
    k: &PhysicalConstants,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let [t0, t1] = t_span;
    let n = step_count(t0, t1, dt);
    let h = (t1 - t0) / n as f64;
    let mut aux = curve.aux_init();
    let mut rate = |t: f64, a: &[f64]| Ok(curve.aux_rate(t, a));
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = t0 + i as f64 * h;
        let c = curve.shape(t, &aux);
        let cd = curve_velocity(curve, t, &aux);
        let cdd = curve_acceleration(curve, t, &aux);
        out.push((t, force_from_shape(&c, &cd, &cdd, k)?));
        if i < n && !aux.is_empty() {
            aux = rk4_step(&mut rate, t, &aux, h)?;
        }
    }
    Ok(out)
}

/// Diagnostic cost `∫ ‖F‖²` (dual T-norm) by the trapezoid rule.
pub fn cost_functional(series: &[(f64, Vec<f64>)]) -> f64 {
    series
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (dual_t_norm(&w[0].1).powi(2) + dual_t_norm(&w[1].1).powi(2)))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeSample {
    pub t: f64,
    pub c: Vec<f64>,
    pub cdot: Vec<f64>,
}

/// Solve `K(c) c̈ = F(t) − Γ(c)[ċ, ċ, ·]` by RK4 from `(c0, ċ0)`.
///
/// The a-priori bound `‖ċ‖_T² ≤ (√ℒ(0) + ∫‖F‖_*/(2√ν))² / ν`, with `ν` the
/// coercivity constant of `K`, is checked at every step.
pub fn shape_from_force(
    force: &mut dyn FnMut(f64) -> Vec<f64>,
    c0: &[f64],
    cdot0: &[f64],
    t_span: [f64; 2],
    dt: f64,
    k: &PhysicalConstants,
) -> Result<Vec<ShapeSample>> {
    let [t0, t1] = t_span;
    if !(dt > 0.0) || !(t1 > t0) {
        return Err(Error::InvalidParameter { field: "dt", reason: format!("need dt > 0 and t1 > t0, got dt = {dt}") });
    }
    let dim = c0.len();
    let nu = coercivity_constant(dim / 2, k);
    let n = step_count(t0, t1, dt);
    let h = (t1 - t0) / n as f64;

    let force = std::cell::RefCell::new(force);
    let mut rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (c, cd) = y.split_at(dim);
        let cs = ShapeCoefficients::from_axes(c.to_vec()).map_err(|_| Error::NonFiniteState { t })?;
        let kmat = k_matrix(c, k)?;
        let g = christoffel(&cs, k)?.contract(cd, cd);
        let f = (force.borrow_mut())(t);
        let b: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a - b).collect();
        let chol = kmat.to_na().cholesky().ok_or(Error::SingularK)?;
        let acc = chol.solve(&nalgebra::DVector::from_vec(b));
        let mut out = cd.to_vec();
        out.extend(acc.iter());
        Ok(out)
    };

    let mut y: Vec<f64> = c0.iter().chain(cdot0).copied().collect();
    let sqrt_l0 = lagrangian_reduced(c0, cdot0, k)?.sqrt();
    let mut f_int = 0.0;
    let mut f_prev = dual_t_norm(&(force.borrow_mut())(t0));
    let mut out = vec![ShapeSample { t: t0, c: c0.to_vec(), cdot: cdot0.to_vec() }];
    for i in 0..n {
        let t = t0 + i as f64 * h;
        y = rk4_step(&mut rhs, t, &y, h)?;
        let tn = t + h;
        let f_now = dual_t_norm(&(force.borrow_mut())(tn));
        // upper trapezoid with slack for the quadrature error
        f_int += 0.5 * h * (f_prev + f_now) * 1.01 + 1e-12;
        f_prev = f_now;
        let (c, cd) = y.split_at(dim);
        let speed_sq: f64 = cd.chunks(2).enumerate().map(|(j, p)| (j + 1) as f64 * (p[0] * p[0] + p[1] * p[1])).sum();
        let bound = (sqrt_l0 + f_int / (2.0 * nu.sqrt())).powi(2) / nu;
        if speed_sq > bound * (1.0 + 1e-6) + 1e-14 {
            return Err(Error::BoundViolation { t: tn, speed_sq, bound });
        }
        out.push(ShapeSample { t: tn, c: c.to_vec(), cdot: cd.to_vec() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::body_velocity;

    fn k() -> PhysicalConstants {
        PhysicalConstants::neutral(1.0, 0.5).unwrap()
    }

    const C: [f64; 4] = [0.3, -0.1, 0.12, 0.05];
    const CD: [f64; 4] = [0.2, 0.4, -0.3, 0.1];

    #[test]
    fn rest_needs_no_force() {
        let f = force_from_shape(&C, &[0.0; 4], &[0.0; 4], &k()).unwrap();
        assert!(f.iter().all(|&x| x == 0.0));
        assert_eq!(lagrangian_reduced(&C, &[0.0; 4], &k()).unwrap(), 0.0);
    }

    #[test]
    fn christoffel_symmetric_in_first_pair() {
        let g = christoffel(&ShapeCoefficients::from_axes(C.to_vec()).unwrap(), &k()).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                for w in 0..4 {
                    assert_eq!(g.at(u, v, w), g.at(v, u, w));
                }
            }
        }
    }

    #[test]
    fn reduced_equals_full_energy_on_the_motion() {
        let q = body_velocity(&C, &CD, &k()).unwrap();
        let full = lagrangian_full(&C, q, &CD, &k());
        let red = lagrangian_reduced(&C, &CD, &k()).unwrap();
        assert!((full - red).abs() < 1e-12 * (1.0 + red));
    }

    #[test]
    fn rest_shape_diagonal_energy() {
        let kk = k();
        let l = lagrangian_reduced(&[0.0; 4], &[1.0, 0.0, 0.0, 0.0], &kk).unwrap();
        let k11 = k_matrix(&[0.0; 4], &kk).unwrap().at(0, 0);
        assert!((l - 0.5 * k11).abs() < 1e-15);
    }

    #[test]
    fn force_is_affine_in_acceleration() {
        let a = [0.1, -0.2, 0.3, 0.05];
        let f0 = force_from_shape(&C, &CD, &[0.0; 4], &k()).unwrap();
        let f1 = force_from_shape(&C, &CD, &a, &k()).unwrap();
        let a2: Vec<f64> = a.iter().map(|x| 2.0 * x).collect();
        let f2 = force_from_shape(&C, &CD, &a2, &k()).unwrap();
        for i in 0..4 {
            assert!(((f2[i] - f0[i]) - 2.0 * (f1[i] - f0[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn force_free_motion_conserves_energy() {
        let kk = k();
        let l0 = lagrangian_reduced(&C, &CD, &kk).unwrap();
        let path = shape_from_force(&mut |_| vec![0.0; 4], &C, &CD, [0.0, 1.0], 1e-3, &kk).unwrap();
        let last = path.last().unwrap();
        let l1 = lagrangian_reduced(&last.c, &last.cdot, &kk).unwrap();
        assert!((l1 - l0).abs() < 1e-8);
    }

    #[test]
    fn equilibrium_stays_put() {
        let path = shape_from_force(&mut |_| vec![0.0; 4], &C, &[0.0; 4], [0.0, 1.0], 0.1, &k()).unwrap();
        assert_eq!(path.last().unwrap().c, C.to_vec());
    }
}
