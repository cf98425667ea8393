//! Rigid motion driven by a prescribed shape curve.
//!
//! With zero initial impulse the Euler–Lagrange equations reduce to
//! `d/dt (r, θ) = −ℛ(θ) (M^r)⁻¹ N ċ`, where `ℛ(θ)` rotates the translational
//! part and leaves the angular rate unchanged.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mass_matrices::{assemble, inverse3, reduced_k};
use crate::ode::{rk4_step, step_count};
use crate::scalar::Scalar;
use crate::shape_space::{constraint_f, in_domain_d, norm_t_sq, PhysicalConstants, ShapeCoefficients};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RigidState {
    pub r: [f64; 2],
    /// Unwrapped orientation angle.
    pub theta: f64,
}

impl RigidState {
    pub fn new(r1: f64, r2: f64, theta: f64) -> Self {
        RigidState { r: [r1, r2], theta }
    }
    pub fn as_array(&self) -> [f64; 3] {
        [self.r[0], self.r[1], self.theta]
    }
    pub fn dist(&self, o: &RigidState) -> f64 {
        let d = [self.r[0] - o.r[0], self.r[1] - o.r[1], self.theta - o.theta];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// Body-frame velocity `q̇* = −(M^r)⁻¹ N ċ` without the singularity check.
pub(crate) fn body_velocity_raw<S: Scalar>(c: &[S], cdot: &[S], k: &PhysicalConstants) -> [S; 3] {
    let mm = assemble(c, k);
    let nc = mm.n_mat.mul_vec(cdot);
    let m = &mm.m_r;
    let a = |i: usize, j: usize| m.at(i % 3, j % 3);
    let det = crate::mass_matrices::det3(m);
    let mut out = [S::zero(); 3];
    for i in 0..3 {
        let mut s = S::zero();
        for j in 0..3 {
            let cof = a(j + 1, i + 1) * a(j + 2, i + 2) - a(j + 1, i + 2) * a(j + 2, i + 1);
            s += cof * nc[j];
        }
        out[i] = -(s / det);
    }
    out
}

/// Body-frame velocity `q̇* = (ṙ*, ω) = −(M^r)⁻¹ N ċ`.
pub fn body_velocity(c: &[f64], cdot: &[f64], k: &PhysicalConstants) -> Result<[f64; 3]> {
    let mm = assemble(c, k);
    let inv = inverse3(&mm.m_r)?;
    let v = inv.mul_vec(&mm.n_mat.mul_vec(cdot));
    Ok([-v[0], -v[1], -v[2]])
}

/// Rotate a body-frame velocity into the lab frame.
pub fn to_lab<S: Scalar>(v: [S; 3], theta: S) -> [S; 3] {
    let (s, c) = (theta.sin(), theta.cos());
    [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]
}

/// Lab-frame rate `(ṙ_1, ṙ_2, θ̇)`.
pub fn rigid_velocity(c: &[f64], cdot: &[f64], theta: f64, k: &PhysicalConstants) -> Result<[f64; 3]> {
    Ok(to_lab(body_velocity(c, cdot, k)?, theta))
}

/// A time-parameterized shape, possibly carrying auxiliary quadrature state.
///
/// The auxiliary state is integrated alongside the rigid state so that shape
/// samples stay consistent at every Runge–Kutta stage.
pub trait ShapeCurve {
    fn n_modes(&self) -> usize;
    fn aux_init(&self) -> Vec<f64> {
        Vec::new()
    }
    fn aux_rate(&self, _t: f64, _aux: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    fn shape(&self, t: f64, aux: &[f64]) -> Vec<f64>;
    /// Analytic `ċ`; `None` selects a central-difference fallback.
    fn velocity(&self, _t: f64, _aux: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Analytic `c̈`; `None` selects a central-difference fallback.
    fn acceleration(&self, _t: f64, _aux: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

const FD_STEP: f64 = 1e-5;

fn advance_aux(curve: &dyn ShapeCurve, t: f64, aux: &[f64], h: f64) -> Vec<f64> {
    let r = curve.aux_rate(t, aux);
    aux.iter().zip(&r).map(|(a, d)| a + h * d).collect()
}

/// `ċ(t)`, analytic when available.
pub fn curve_velocity(curve: &dyn ShapeCurve, t: f64, aux: &[f64]) -> Vec<f64> {
    if let Some(v) = curve.velocity(t, aux) {
        return v;
    }
    let h = FD_STEP * (1.0 + t.abs());
    let p = curve.shape(t + h, &advance_aux(curve, t, aux, h));
    let m = curve.shape(t - h, &advance_aux(curve, t, aux, -h));
    p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// `c̈(t)`, analytic when available.
pub fn curve_acceleration(curve: &dyn ShapeCurve, t: f64, aux: &[f64]) -> Vec<f64> {
    if let Some(a) = curve.acceleration(t, aux) {
        return a;
    }
    let h = FD_STEP * (1.0 + t.abs());
    let p = curve_velocity(curve, t + h, &advance_aux(curve, t, aux, h));
    let m = curve_velocity(curve, t - h, &advance_aux(curve, t, aux, -h));
    p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: RigidState,
    pub shape: Vec<f64>,
    pub shape_velocity: Vec<f64>,
    pub body_velocity: [f64; 3],
    pub lagrangian: f64,
    /// `|Vol(t) − Vol(t_0)|`.
    pub vol_drift: f64,
    /// `|F(c, ċ)|`.
    pub constraint_f_resid: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub final_state: RigidState,
    pub final_aux: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has at least one sample")
    }
    pub fn displacement(&self) -> [f64; 3] {
        let (a, b) = (self.samples[0].state, self.final_state);
        [b.r[0] - a.r[0], b.r[1] - a.r[1], b.theta - a.theta]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrateOptions {
    pub dt: f64,
    /// Rerun at `dt/2` and fail with `StepTooLarge` if the endpoints differ by more than `1e-3`.
    pub self_check: bool,
    /// Keep every `record_every`-th step (the final step is always kept).
    pub record_every: usize,
}

impl IntegrateOptions {
    pub fn new(dt: f64) -> Self {
        IntegrateOptions { dt, self_check: false, record_every: 1 }
    }
    pub fn checked(dt: f64) -> Self {
        IntegrateOptions { dt, self_check: true, record_every: 1 }
    }
}

pub const SELF_CHECK_TOL: f64 = 1e-3;

fn sample(
    curve: &dyn ShapeCurve,
    t: f64,
    y: &[f64],
    k: &PhysicalConstants,
    t2_0: f64,
) -> Result<TrajectorySample> {
    let aux = &y[3..];
    let c = curve.shape(t, aux);
    let cd = curve_velocity(curve, t, aux);
    let mm = assemble(&c, k);
    let inv = inverse3(&mm.m_r)?;
    let v = inv.mul_vec(&mm.n_mat.mul_vec(&cd));
    let kmat = reduced_k(&mm)?;
    Ok(TrajectorySample {
        t,
        state: RigidState::new(y[0], y[1], y[2]),
        body_velocity: [-v[0], -v[1], -v[2]],
        lagrangian: 0.5 * kmat.quad(&cd, &cd),
        vol_drift: std::f64::consts::PI * (norm_t_sq(&c) - t2_0).abs(),
        constraint_f_resid: constraint_f(&c, &cd).abs(),
        shape: c,
        shape_velocity: cd,
    })
}

/// Integrate the rigid motion over `[t0, t1]` starting at `q0` with the
/// curve's own initial auxiliary state.
pub fn integrate(
    curve: &dyn ShapeCurve,
    q0: RigidState,
    t_span: [f64; 2],
    k: &PhysicalConstants,
    opts: IntegrateOptions,
) -> Result<Trajectory> {
    integrate_from(curve, q0, curve.aux_init(), t_span, k, opts)
}

/// As [`integrate`], with an explicit initial auxiliary state.
pub fn integrate_from(
    curve: &dyn ShapeCurve,
    q0: RigidState,
    aux0: Vec<f64>,
    t_span: [f64; 2],
    k: &PhysicalConstants,
    opts: IntegrateOptions,
) -> Result<Trajectory> {
    let [t0, t1] = t_span;
    if !(opts.dt > 0.0) || !(t1 > t0) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("need dt > 0 and t1 > t0 (dt = {}, span = [{t0}, {t1}])", opts.dt),
        });
    }
    let traj = run(curve, q0, &aux0, t_span, k, opts.dt, opts.record_every.max(1))?;
    if opts.self_check {
        let fine = run(curve, q0, &aux0, t_span, k, opts.dt / 2.0, usize::MAX)?;
        let gap = traj.final_state.dist(&fine.final_state);
        if gap > SELF_CHECK_TOL {
            return Err(Error::StepTooLarge { gap });
        }
    }
    Ok(traj)
}

fn run(
    curve: &dyn ShapeCurve,
    q0: RigidState,
    aux0: &[f64],
    [t0, t1]: [f64; 2],
    k: &PhysicalConstants,
    dt: f64,
    every: usize,
) -> Result<Trajectory> {
    let n = step_count(t0, t1, dt);
    let h = (t1 - t0) / n as f64;
    let mut y: Vec<f64> = q0.as_array().iter().chain(aux0).copied().collect();
    let t2_0 = norm_t_sq(&curve.shape(t0, aux0));
    let mut rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let aux = &y[3..];
        let c = curve.shape(t, aux);
        let cd = curve_velocity(curve, t, aux);
        let v = rigid_velocity(&c, &cd, y[2], k)?;
        let mut out = v.to_vec();
        out.extend(curve.aux_rate(t, aux));
        Ok(out)
    };
    let mut samples = vec![sample(curve, t0, &y, k, t2_0)?];
    for i in 0..n {
        let t = t0 + i as f64 * h;
        y = rk4_step(&mut rhs, t, &y, h)?;
        let tn = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
        if (i + 1) % every == 0 || i + 1 == n {
            samples.push(sample(curve, tn, &y, k, t2_0)?);
        }
    }
    Ok(Trajectory { samples, final_state: RigidState::new(y[0], y[1], y[2]), final_aux: y[3..].to_vec() })
}

/// Translational and angular impulses of the body (`P`, `Π`) and of the
/// shape-change (`L`, `Λ`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Impulses {
    pub p: [f64; 2],
    pub pi: f64,
    pub l: [f64; 2],
    pub lambda: f64,
}

impl Impulses {
    /// `max(|P + L|, |Π + Λ|)`.
    pub fn residual(&self) -> f64 {
        let t = ((self.p[0] + self.l[0]).powi(2) + (self.p[1] + self.l[1]).powi(2)).sqrt();
        t.max((self.pi + self.lambda).abs())
    }
}

pub fn impulses(c: &[f64], cdot: &[f64], qdot_star: [f64; 3], k: &PhysicalConstants) -> Impulses {
    let mm = assemble(c, k);
    let pp = mm.m_r.mul_vec(&qdot_star);
    let ll = mm.n_mat.mul_vec(cdot);
    Impulses { p: [pp[0], pp[1]], pi: pp[2], l: [ll[0], ll[1]], lambda: ll[2] }
}

/// Radius `T · max_t |(M^r)⁻¹ N ċ|` of the ball containing every
/// reparameterized replay of the curve on `[t0, t1]` (1024-point grid).
pub fn flapping_bound(curve: &dyn ShapeCurve, t_span: [f64; 2], k: &PhysicalConstants) -> Result<f64> {
    const GRID: usize = 1024;
    let [t0, t1] = t_span;
    let h = (t1 - t0) / GRID as f64;
    let mut aux = curve.aux_init();
    let mut sup = 0.0f64;
    let mut rate = |t: f64, a: &[f64]| Ok(curve.aux_rate(t, a));
    for i in 0..=GRID {
        let t = t0 + i as f64 * h;
        let v = body_velocity(&curve.shape(t, &aux), &curve_velocity(curve, t, &aux), k)?;
        sup = sup.max((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        if i < GRID && !aux.is_empty() {
            aux = rk4_step(&mut rate, t, &aux, h)?;
        }
    }
    Ok((t1 - t0) * sup)
}

/// Replay of `base` along a time change `t ↦ β(t)`.
pub struct Reparameterized<'a> {
    pub base: &'a dyn ShapeCurve,
    /// Returns `(β(t), β'(t))`.
    pub beta: Box<dyn Fn(f64) -> (f64, f64) + 'a>,
}

impl ShapeCurve for Reparameterized<'_> {
    fn n_modes(&self) -> usize {
        self.base.n_modes()
    }
    fn aux_init(&self) -> Vec<f64> {
        self.base.aux_init()
    }
    fn aux_rate(&self, t: f64, aux: &[f64]) -> Vec<f64> {
        let (b, db) = (self.beta)(t);
        self.base.aux_rate(b, aux).into_iter().map(|x| db * x).collect()
    }
    fn shape(&self, t: f64, aux: &[f64]) -> Vec<f64> {
        self.base.shape((self.beta)(t).0, aux)
    }
    fn velocity(&self, t: f64, aux: &[f64]) -> Option<Vec<f64>> {
        let (b, db) = (self.beta)(t);
        Some(curve_velocity(self.base, b, aux).into_iter().map(|x| db * x).collect())
    }
}

/// `base` run backward from `t_end`: shape at time `τ` is `base(t_end − τ)`.
pub struct Reversed<'a> {
    pub base: &'a dyn ShapeCurve,
    pub t_end: f64,
    /// Auxiliary state of `base` at `t_end`.
    pub aux_end: Vec<f64>,
}

impl ShapeCurve for Reversed<'_> {
    fn n_modes(&self) -> usize {
        self.base.n_modes()
    }
    fn aux_init(&self) -> Vec<f64> {
        self.aux_end.clone()
    }
    fn aux_rate(&self, t: f64, aux: &[f64]) -> Vec<f64> {
        self.base.aux_rate(self.t_end - t, aux).into_iter().map(|x| -x).collect()
    }
    fn shape(&self, t: f64, aux: &[f64]) -> Vec<f64> {
        self.base.shape(self.t_end - t, aux)
    }
    fn velocity(&self, t: f64, aux: &[f64]) -> Option<Vec<f64>> {
        Some(curve_velocity(self.base, self.t_end - t, aux).into_iter().map(|x| -x).collect())
    }
    fn acceleration(&self, t: f64, aux: &[f64]) -> Option<Vec<f64>> {
        Some(curve_acceleration(self.base, self.t_end - t, aux))
    }
}

/// A shape held fixed in time.
pub struct ConstantShape(pub Vec<f64>);

impl ShapeCurve for ConstantShape {
    fn n_modes(&self) -> usize {
        self.0.len() / 2
    }
    fn shape(&self, _t: f64, _aux: &[f64]) -> Vec<f64> {
        self.0.clone()
    }
    fn velocity(&self, _t: f64, _aux: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; self.0.len()])
    }
    fn acceleration(&self, _t: f64, _aux: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; self.0.len()])
    }
}

/// Shape given by a closure, derivatives by finite differences.
pub struct FnShape<F: Fn(f64) -> Vec<f64>> {
    pub n_modes: usize,
    pub f: F,
}

impl<F: Fn(f64) -> Vec<f64>> ShapeCurve for FnShape<F> {
    fn n_modes(&self) -> usize {
        self.n_modes
    }
    fn shape(&self, t: f64, _aux: &[f64]) -> Vec<f64> {
        (self.f)(t)
    }
}

/// Time of the first recorded shape outside the embedding domain `𝒟`.
pub fn first_domain_exit(samples: &[TrajectorySample]) -> Option<f64> {
    samples
        .iter()
        .find(|s| ShapeCoefficients::from_axes(s.shape.clone()).map_or(true, |c| !in_domain_d(&c)))
        .map(|s| s.t)
}

/// Planar path diagnostics of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSummary {
    /// Largest distance between two recorded positions.
    pub diameter: f64,
    /// `|r(t_end) − r(t_0)|`.
    pub closure_gap: f64,
    /// Net turning of `r − r̄` about the path centroid `r̄`, in radians.
    pub centroid_winding: f64,
    /// `θ(t_end) − θ(t_0)` (θ is never wrapped).
    pub body_rotation: f64,
}

pub fn path_summary(samples: &[TrajectorySample]) -> PathSummary {
    let n = samples.len() as f64;
    let cx = samples.iter().map(|s| s.state.r[0]).sum::<f64>() / n;
    let cy = samples.iter().map(|s| s.state.r[1]).sum::<f64>() / n;
    let mut winding = 0.0;
    let mut prev: Option<f64> = None;
    let mut diameter = 0.0f64;
    // diameter on at most ~4000 points
    let stride = samples.len().div_ceil(4000).max(1);
    for (i, s) in samples.iter().enumerate() {
        let a = (s.state.r[1] - cy).atan2(s.state.r[0] - cx);
        if let Some(p) = prev {
            winding += (a - p + PI).rem_euclid(2.0 * PI) - PI;
        }
        prev = Some(a);
        if i % stride == 0 {
            for o in samples[i + 1..].iter().step_by(stride) {
                diameter = diameter.max((s.state.r[0] - o.state.r[0]).hypot(s.state.r[1] - o.state.r[1]));
            }
        }
    }
    let (a, b) = (samples[0].state, samples[samples.len() - 1].state);
    PathSummary {
        diameter,
        closure_gap: (b.r[0] - a.r[0]).hypot(b.r[1] - a.r[1]),
        centroid_winding: winding,
        body_rotation: b.theta - a.theta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> PhysicalConstants {
        PhysicalConstants::neutral(1.0, 0.5).unwrap()
    }

    #[test]
    fn no_shape_change_no_motion() {
        let c = [0.3, 0.1, -0.1, 0.05];
        assert_eq!(rigid_velocity(&c, &[0.0; 4], 0.4, &k()).unwrap(), [0.0, 0.0, 0.0]);
        let tr = integrate(&ConstantShape(c.to_vec()), RigidState::new(1.0, 2.0, 0.3), [0.0, 1.0], &k(), IntegrateOptions::new(0.1)).unwrap();
        assert_eq!(tr.final_state, RigidState::new(1.0, 2.0, 0.3));
    }

    #[test]
    fn real_coefficients_move_along_axis() {
        let v = rigid_velocity(&[0.3, 0.0, 0.1, 0.0], &[0.2, 0.0, -0.4, 0.0], 0.0, &k()).unwrap();
        assert!(v[0].abs() > 1e-6);
        assert_eq!(v[1], 0.0);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn linear_in_shape_velocity() {
        let c = [0.3, 0.1, -0.1, 0.05];
        let cd = [0.2, -0.1, 0.3, 0.7];
        let v1 = rigid_velocity(&c, &cd, 0.4, &k()).unwrap();
        let cd3: Vec<f64> = cd.iter().map(|x| 3.0 * x).collect();
        let v3 = rigid_velocity(&c, &cd3, 0.4, &k()).unwrap();
        for i in 0..3 {
            assert!((3.0 * v1[i] - v3[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn raw_and_checked_body_velocity_agree() {
        let c = [0.3, 0.1, -0.1, 0.05];
        let cd = [0.2, -0.1, 0.3, 0.7];
        let a = body_velocity(&c, &cd, &k()).unwrap();
        let b = body_velocity_raw(&c, &cd, &k());
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn rest_impulse() {
        let imp = impulses(&[0.0; 4], &[0.0; 4], [1.0, 0.0, 0.0], &k());
        let want = std::f64::consts::PI * (k().rho_0 + k().rho_f);
        assert!((imp.p[0] - want).abs() < 1e-14);
        assert_eq!(imp.pi, 0.0);
        assert_eq!(impulses(&[0.0; 4], &[0.0; 4], [0.0; 3], &k()).residual(), 0.0);
    }

    #[test]
    fn invalid_step_is_rejected() {
        let r = integrate(&ConstantShape(vec![0.0; 2]), RigidState::default(), [0.0, 1.0], &k(), IntegrateOptions::new(0.0));
        assert!(matches!(r, Err(Error::InvalidParameter { field: "dt", .. })));
    }

    #[test]
    fn fd_velocity_fallback() {
        let curve = FnShape { n_modes: 1, f: |t: f64| vec![0.3 * t.cos(), 0.3 * t.sin()] };
        let v = curve_velocity(&curve, 0.7, &[]);
        assert!((v[0] + 0.3 * 0.7f64.sin()).abs() < 1e-9);
        assert!((v[1] - 0.3 * 0.7f64.cos()).abs() < 1e-9);
    }
}
