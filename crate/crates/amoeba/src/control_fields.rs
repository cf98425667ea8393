//! Allowable vector fields, Lie brackets and rank certificates.
//!
//! A shape field `X^{(k0,k1,j)}` moves only the modes `k0` and `k1` and is
//! tangent to both constraint sets (`G·X = 0`, `F·X = 0`), so its flow keeps
//! the body volume and the angular self-propulsion constraint. Lifting it
//! with the motion equation gives a field on `Q × S_N`:
//! `Y = (−ℛ(θ) (M^r)⁻¹ N X, X)`.
//!
//! Brackets use `[f, g] = Df·g − Dg·f`. With this sign the four-phase loop
//! `f, g, −f, −g` of duration `ε` each moves the state by `ε² [g, f]`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dynamics::{body_velocity_raw, integrate_from, to_lab, IntegrateOptions, RigidState, ShapeCurve, TrajectorySample};
use crate::error::Result;
use crate::mass_matrices::{assemble, det3, Mat};
use crate::scalar::{Lift, Scalar};
use crate::shape_space::{g_covector, PhysicalConstants};

/// `X^{(k0,k1,j)}` on `S_N`, multiplied by `weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeField {
    pub n_modes: usize,
    pub k0: usize,
    pub k1: usize,
    pub j: u8,
    pub weight: f64,
}

impl ShapeField {
    pub fn new(n_modes: usize, k0: usize, k1: usize, j: u8) -> Self {
        assert!(k0 != k1 && (1..=n_modes).contains(&k0) && (1..=n_modes).contains(&k1) && (j == 1 || j == 2));
        ShapeField { n_modes, k0, k1, j, weight: 1.0 }
    }

    /// The four fields of the two-mode family, `X^1 … X^4`.
    pub fn two_mode(index: usize) -> Self {
        let (k0, k1, j, w) = match index {
            1 => (1, 2, 1, 1.0 / 3.0),
            2 => (1, 2, 2, 1.0 / 3.0),
            3 => (2, 1, 1, 0.25),
            4 => (2, 1, 2, 0.25),
            _ => panic!("two-mode fields are indexed 1..=4"),
        };
        ShapeField { weight: w, ..Self::new(2, k0, k1, j) }
    }

    pub fn eval<S: Scalar>(&self, c: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); 2 * self.n_modes];
        let (i0, i1) = (2 * (self.k0 - 1), 2 * (self.k1 - 1));
        let (a0, b0, a1, b1) = (c[i0], c[i0 + 1], c[i1], c[i1 + 1]);
        let (k0, k1) = (self.k0 as f64, self.k1 as f64);
        let p1 = k1 * k1 + k1;
        let p0 = k0 * k0 + k0;
        let m = (a0 * a0 + b0 * b0).scale(k0 * (k1 + 1.0));
        let w = self.weight;
        if self.j == 1 {
            out[i0] = (-(a0 * a1).scale(p1) - (b0 * b1).scale(p0)).scale(w);
            out[i0 + 1] = ((a0 * b1).scale(p0) - (a1 * b0).scale(p1)).scale(w);
            out[i1] = m.scale(w);
        } else {
            out[i0] = ((a1 * b0).scale(p0) - (a0 * b1).scale(p1)).scale(w);
            out[i0 + 1] = (-(b0 * b1).scale(p1) - (a0 * a1).scale(p0)).scale(w);
            out[i1 + 1] = m.scale(w);
        }
        out
    }
}

/// A vector field built from shape fields, their rigid lifts and brackets.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    /// Field on `S_N` (state = shape axes).
    Shape(ShapeField),
    /// Lift to `Q × S_N` (state = `(r1, r2, θ, shape axes)`); `det_scaled`
    /// multiplies by `ρ_f⁻³ det M^r(c)`.
    Config { base: ShapeField, consts: PhysicalConstants, det_scaled: bool },
    Bracket(Box<Field>, Box<Field>),
}

impl Field {
    pub fn shape(f: ShapeField) -> Self {
        Field::Shape(f)
    }
    pub fn config(base: ShapeField, consts: PhysicalConstants) -> Self {
        Field::Config { base, consts, det_scaled: false }
    }
    pub fn bracket(f: &Field, g: &Field) -> Self {
        Field::Bracket(Box::new(f.clone()), Box::new(g.clone()))
    }

    /// Number of nested brackets.
    pub fn depth(&self) -> usize {
        match self {
            Field::Bracket(f, g) => 1 + f.depth().max(g.depth()),
            _ => 0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Field::Shape(s) | Field::Config { base: s, .. } => format!("({},{},{})", s.k0, s.k1, s.j),
            Field::Bracket(f, g) => format!("[{},{}]", f.label(), g.label()),
        }
    }

    pub fn eval<S: Lift>(&self, x: &[S]) -> Vec<S> {
        match self {
            Field::Shape(f) => f.eval(x),
            Field::Config { base, consts, det_scaled } => {
                let c = &x[3..];
                let xs = base.eval(c);
                let v = to_lab(body_velocity_raw(c, &xs, consts), x[2]);
                let mut out: Vec<S> = v.iter().copied().chain(xs).collect();
                if *det_scaled {
                    let s = det3(&assemble(c, consts).m_r).scale(consts.rho_f.powi(-3));
                    out.iter_mut().for_each(|z| *z *= s);
                }
                out
            }
            Field::Bracket(f, g) => {
                let fx = f.eval(x);
                let gx = g.eval(x);
                let df_g = directional(f, x, &gx);
                let dg_f = directional(g, x, &fx);
                df_g.into_iter().zip(dg_f).map(|(a, b)| a - b).collect()
            }
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }

    /// Exact Jacobian `Df(x)` (rows = output components).
    pub fn jacobian(&self, x: &[f64]) -> Mat<f64> {
        let n = x.len();
        let mut jac = Mat::zeros(n, n);
        for col in 0..n {
            let e: Vec<f64> = (0..n).map(|i| if i == col { 1.0 } else { 0.0 }).collect();
            for (row, v) in directional(self, x, &e).into_iter().enumerate() {
                jac.set(row, col, v);
            }
        }
        jac
    }
}

// Df(x)·d via one forward-mode pass one level up.
fn directional<S: Lift>(f: &Field, x: &[S], d: &[S]) -> Vec<S> {
    let xu: Vec<S::Up> = x.iter().zip(d).map(|(&v, &t)| v.up(t)).collect();
    f.eval(&xu).into_iter().map(S::up_tangent).collect()
}

/// `[f, g](x) = Df(x)·g(x) − Dg(x)·f(x)`.
pub fn lie_bracket(f: &Field, g: &Field, x: &[f64]) -> Vec<f64> {
    Field::bracket(f, g).eval(x)
}

/// All left-nested brackets `[g_{i1}, [g_{i2}, … g_{im}]]` of length ≤ `max_len`.
///
/// Length 1 is the generators themselves; length-2 brackets use `i < j`.
pub fn bracket_family(gens: &[Field], max_len: usize) -> Vec<Field> {
    let mut all: Vec<Field> = gens.to_vec();
    if max_len < 2 {
        return all;
    }
    let mut prev = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            prev.push(Field::bracket(&gens[i], &gens[j]));
        }
    }
    all.extend(prev.iter().cloned());
    for _ in 3..=max_len {
        let mut next = Vec::new();
        for g in gens {
            for p in &prev {
                next.push(Field::bracket(g, p));
            }
        }
        all.extend(next.iter().cloned());
        prev = next;
    }
    all
}

#[derive(Clone, Debug, Serialize)]
pub struct RankCertificate {
    pub point: Vec<f64>,
    pub rank: usize,
    /// Dimension of the tangent space the vectors were projected onto.
    pub tangent_dim: usize,
    pub singular_values: Vec<f64>,
    pub tol: f64,
    pub bracket_len: usize,
    pub labels: Vec<String>,
}

impl RankCertificate {
    pub fn full(&self) -> bool {
        self.rank == self.tangent_dim
    }
    /// `σ_r / σ_1` for `r = tangent_dim`.
    pub fn conditioning(&self) -> f64 {
        let s = &self.singular_values;
        match (s.first(), s.get(self.tangent_dim.saturating_sub(1))) {
            (Some(&a), Some(&b)) if a > 0.0 => b / a,
            _ => 0.0,
        }
    }
}

/// Numerical rank of the given fields at `x`, restricted to the tangent
/// space of the shape sphere `‖c‖_T = const`.
///
/// `shape_offset` is the index where shape axes start in the state (0 for
/// shape fields, 3 for configuration fields). Each vector is normalized
/// before the SVD; the rank counts singular values above `tol · σ_max`.
pub fn rank_of(fields: &[Field], x: &[f64], shape_offset: usize, tol: f64, bracket_len: usize) -> RankCertificate {
    let dim = x.len();
    let mut normal = vec![0.0; dim];
    normal[shape_offset..].copy_from_slice(&g_covector(&x[shape_offset..]));
    let nn = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
    let proj = if nn > 0.0 { Some(householder_to_last(&normal)) } else { None };
    let tdim = if proj.is_some() { dim - 1 } else { dim };

    let mut rows = Vec::new();
    for f in fields {
        let v = DVector::from_vec(f.eval_f64(x));
        let w = match &proj {
            Some(h) => (h * v).rows(0, tdim).into_owned(),
            None => v,
        };
        let n = w.norm();
        if n > 1e-300 {
            rows.push(w / n);
        }
    }
    let (rank, sv) = if rows.is_empty() {
        (0, Vec::new())
    } else {
        let m = DMatrix::from_fn(rows.len(), tdim, |i, j| rows[i][j]);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let smax = sv[0];
        (sv.iter().filter(|&&s| s > tol * smax).count(), sv)
    };
    RankCertificate {
        point: x.to_vec(),
        rank,
        tangent_dim: tdim,
        singular_values: sv,
        tol,
        bracket_len,
        labels: fields.iter().map(Field::label).collect(),
    }
}

/// Rank of the bracket family generated by `gens` up to length `max_len`.
pub fn rank_certificate(gens: &[Field], x: &[f64], shape_offset: usize, max_len: usize, tol: f64) -> RankCertificate {
    rank_of(&bracket_family(gens, max_len), x, shape_offset, tol, max_len)
}

// Orthogonal reflection H with H n ∝ e_last.
fn householder_to_last(n: &[f64]) -> DMatrix<f64> {
    let d = n.len();
    let nv = DVector::from_row_slice(n).normalize();
    let mut e = DVector::zeros(d);
    e[d - 1] = 1.0;
    let w = if (&nv - &e).norm() < 1e-12 { return DMatrix::identity(d, d) } else { (&nv - &e).normalize() };
    DMatrix::identity(d, d) - 2.0 * &w * w.transpose()
}

/// `⟨F, [X^{(k0,k1,1)}, X^{(k0,k1,2)}](c)⟩` with the covector
/// `F(v) = Σ (v_{a_k} b_k − v_{b_k} a_k)/(k+1)`.
pub fn f_pairing_of_bracket(c: &[f64], k0: usize, k1: usize) -> f64 {
    let n = c.len() / 2;
    let b = lie_bracket(&Field::Shape(ShapeField::new(n, k0, k1, 1)), &Field::Shape(ShapeField::new(n, k0, k1, 2)), c);
    -crate::shape_space::constraint_f(c, &b)
}

/// Shape flow `ċ = Σ λ_j X^j(c)` with constant weights, as a [`ShapeCurve`]
/// whose auxiliary state is the shape itself.
pub struct FieldFlow<'a> {
    pub fields: &'a [ShapeField],
    pub weights: Vec<f64>,
    pub c0: Vec<f64>,
}

impl FieldFlow<'_> {
    fn rate(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; c.len()];
        for (f, &w) in self.fields.iter().zip(&self.weights) {
            if w != 0.0 {
                for (o, v) in out.iter_mut().zip(f.eval(c)) {
                    *o += w * v;
                }
            }
        }
        out
    }
}

impl ShapeCurve for FieldFlow<'_> {
    fn n_modes(&self) -> usize {
        self.c0.len() / 2
    }
    fn aux_init(&self) -> Vec<f64> {
        self.c0.clone()
    }
    fn aux_rate(&self, _t: f64, aux: &[f64]) -> Vec<f64> {
        self.rate(aux)
    }
    fn shape(&self, _t: f64, aux: &[f64]) -> Vec<f64> {
        aux.to_vec()
    }
    fn velocity(&self, _t: f64, aux: &[f64]) -> Option<Vec<f64>> {
        Some(self.rate(aux))
    }
}

#[derive(Clone, Debug)]
pub struct Maneuver {
    pub samples: Vec<TrajectorySample>,
    /// Shape at the start of each cycle, plus the final shape.
    pub cycle_shapes: Vec<Vec<f64>>,
    /// Rigid state at the start of each cycle, plus the final state.
    pub cycle_states: Vec<RigidState>,
    /// Rigid state at every phase boundary.
    pub phase_states: Vec<RigidState>,
}

/// Four-phase commutator loop `λ_i = +1, λ_j = +1, λ_i = −1, λ_j = −1`,
/// each phase lasting `epsilon`, repeated `cycles` times.
#[allow(clippy::too_many_arguments)]
pub fn commutator_maneuver(
    fields: &[ShapeField],
    pair: (usize, usize),
    epsilon: f64,
    cycles: usize,
    q0: RigidState,
    c0: &[f64],
    k: &PhysicalConstants,
    substeps: usize,
) -> Result<Maneuver> {
    let (i, j) = pair;
    let mut q = q0;
    let mut c = c0.to_vec();
    let mut t = 0.0;
    let mut out = Maneuver { samples: Vec::new(), cycle_shapes: vec![c.clone()], cycle_states: vec![q], phase_states: vec![q] };
    let schedule = [(i, 1.0), (j, 1.0), (i, -1.0), (j, -1.0)];
    for _ in 0..cycles {
        for &(idx, sign) in &schedule {
            let mut weights = vec![0.0; fields.len()];
            weights[idx] = sign;
            let flow = FieldFlow { fields, weights, c0: c.clone() };
            let tr = integrate_from(&flow, q, c.clone(), [t, t + epsilon], k, IntegrateOptions::new(epsilon / substeps as f64))?;
            let skip = if out.samples.is_empty() { 0 } else { 1 };
            out.samples.extend(tr.samples.into_iter().skip(skip));
            q = tr.final_state;
            c = tr.final_aux;
            t += epsilon;
            out.phase_states.push(q);
        }
        out.cycle_shapes.push(c.clone());
        out.cycle_states.push(q);
    }
    if out.samples.is_empty() {
        let flow = FieldFlow { fields, weights: vec![0.0; fields.len()], c0: c.clone() };
        let tr = integrate_from(&flow, q, c, [0.0, 1.0], k, IntegrateOptions::new(1.0))?;
        out.samples.push(tr.samples[0].clone());
    }
    Ok(out)
}

/// Euclidean shape displacement after one commutator cycle, for each phase
/// length in `epsilons`.
pub fn commutator_scaling(
    fields: &[ShapeField],
    pair: (usize, usize),
    epsilons: &[f64],
    c0: &[f64],
    k: &PhysicalConstants,
    substeps: usize,
) -> Result<Vec<(f64, f64)>> {
    epsilons
        .iter()
        .map(|&eps| {
            let m = commutator_maneuver(fields, pair, eps, 1, RigidState::default(), c0, k, substeps)?;
            let drift = m.cycle_shapes[1].iter().zip(c0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            Ok((eps, drift))
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape_space::{constraint_f, constraint_g};

    fn x(i: usize) -> Field {
        Field::Shape(ShapeField::two_mode(i))
    }

    #[test]
    fn first_field_hand_value() {
        assert_eq!(x(1).eval_f64(&[1.0, 0.0, 1.0, 0.0]), vec![-2.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn closed_form_bracket_at_sample_point() {
        let b = lie_bracket(&x(1), &x(2), &[1.0, 0.0, 1.0, 0.0]);
        let want = [0.0, 4.0 / 3.0, 0.0, 4.0];
        for i in 0..4 {
            assert!((b[i] - want[i]).abs() < 1e-14, "{b:?}");
        }
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let c = [0.3, -0.2, 0.1, 0.4];
        assert!(lie_bracket(&x(3), &x(3), &c).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fields_are_allowable() {
        let c = [0.3, -0.2, 0.1, 0.4, -0.25, 0.15];
        for (k0, k1) in [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)] {
            for j in [1, 2] {
                let v = ShapeField::new(3, k0, k1, j).eval(&c);
                assert!(constraint_g(&c, &v).abs() < 1e-15);
                assert!(constraint_f(&c, &v).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn jacobian_matches_central_difference() {
        let c = [0.3, -0.2, 0.1, 0.4];
        for f in [x(1), x(4), Field::bracket(&x(1), &x(3))] {
            let jac = f.jacobian(&c);
            for col in 0..4 {
                let h = 1e-6;
                let (mut p, mut m) = (c.to_vec(), c.to_vec());
                p[col] += h;
                m[col] -= h;
                let (fp, fm) = (f.eval_f64(&p), f.eval_f64(&m));
                for row in 0..4 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!((fd - jac.at(row, col)).abs() <= 1e-6 * (1.0 + fd.abs()));
                }
            }
        }
    }

    #[test]
    fn family_sizes() {
        let g = [x(1), x(2), x(3), x(4)];
        assert_eq!(bracket_family(&g, 1).len(), 4);
        assert_eq!(bracket_family(&g, 2).len(), 10);
        assert_eq!(bracket_family(&g, 3).len(), 34);
        assert_eq!(bracket_family(&g, 3).iter().map(Field::depth).max(), Some(2));
    }

    #[test]
    fn shape_rank_three() {
        let cert = rank_of(&[x(1), x(2), Field::bracket(&x(1), &x(2))], &[0.3, 0.1, -0.2, 0.25], 0, 1e-10, 2);
        assert_eq!(cert.tangent_dim, 3);
        assert_eq!(cert.rank, 3);
    }

    #[test]
    fn zero_cycles_gives_start_only() {
        let k = PhysicalConstants::neutral(1.0, 0.5).unwrap();
        let f = [ShapeField::two_mode(1), ShapeField::two_mode(2)];
        let m = commutator_maneuver(&f, (0, 1), 0.1, 0, RigidState::default(), &[0.5, 0.0, 0.0, 0.0], &k, 4).unwrap();
        assert_eq!(m.samples.len(), 1);
        assert_eq!(m.samples[0].state, RigidState::default());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&e| (e, 3.0 * e * e)).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn commutator_drift_is_second_order() {
        let k = PhysicalConstants::neutral(1.0, 0.5).unwrap();
        let f = [ShapeField::two_mode(1), ShapeField::two_mode(2)];
        let c0 = [0.3, 0.1, 0.2, -0.1];
        let tab = commutator_scaling(&f, (0, 1), &[0.04, 0.02, 0.01], &c0, &k, 20).unwrap();
        assert!((loglog_slope(&tab) - 2.0).abs() < 0.05, "{tab:?}");
        // leading term is ε² [X², X¹](c0)
        let b = lie_bracket(&Field::Shape(f[1]), &Field::Shape(f[0]), &c0);
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((tab[2].1 / 1e-4 - bn).abs() < 0.05 * bn);
    }
}
