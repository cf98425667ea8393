//! Mass matrices of the body–fluid system.
//!
//! The kinetic energy is `½ (q̇*, ċ)ᵀ [[M^r, N], [Nᵀ, M^d]] (q̇*, ċ)` with the
//! rigid block `M^r` (3×3), the coupling `N` (3×2N) and the shape block
//! `M^d` (2N×2N). Fluid contributions are `πρ_f` times pairings of potential
//! coefficients; body contributions are diagonal.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::potentials::{weighted_dot, PotentialSet};
use crate::scalar::{Dual, Scalar};
use crate::shape_space::{inertia, PhysicalConstants, ShapeCoefficients};

use std::f64::consts::PI;

/// Small dense row-major matrix over any [`Scalar`].
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| {
                let mut s = S::zero();
                for j in 0..self.cols {
                    s += self.at(i, j) * x[j];
                }
                s
            })
            .collect()
    }
    pub fn tr_mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.cols)
            .map(|j| {
                let mut s = S::zero();
                for i in 0..self.rows {
                    s += self.at(i, j) * x[i];
                }
                s
            })
            .collect()
    }
    pub fn quad(&self, x: &[S], y: &[S]) -> S {
        let mut s = S::zero();
        for (xi, r) in x.iter().zip(self.mul_vec(y)) {
            s += *xi * r;
        }
        s
    }
    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl Mat<f64> {
    pub fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
    pub fn max_abs_diff(&self, o: &Mat<f64>) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct MassMatrices<S> {
    pub m_r: Mat<S>,
    pub n_mat: Mat<S>,
    pub m_d: Mat<S>,
}

/// Assemble `M^r`, `N`, `M^d` at the shape `c` (axis layout).
pub fn assemble<S: Scalar>(c: &[S], k: &PhysicalConstants) -> MassMatrices<S> {
    let dim = c.len();
    let pot = PotentialSet::new(c);
    let f = PI * k.rho_f;
    let rigid = pot.rigid();

    let mut m_r = Mat::zeros(3, 3);
    for i in 0..3 {
        for j in i..3 {
            let v = weighted_dot(rigid[i], rigid[j]).scale(f);
            m_r.set(i, j, v);
            m_r.set(j, i, v);
        }
    }
    let m = S::cst(k.mass());
    m_r.set(0, 0, m_r.at(0, 0) + m);
    m_r.set(1, 1, m_r.at(1, 1) + m);
    m_r.set(2, 2, m_r.at(2, 2) + inertia(c, k.rho_0));

    let mut n_mat = Mat::zeros(3, dim);
    for i in 0..3 {
        for col in 0..dim {
            n_mat.set(i, col, weighted_dot(rigid[i], pot.shape_axis(col)).scale(f));
        }
    }

    let mut m_d = Mat::zeros(dim, dim);
    for r in 0..dim {
        for s in r..dim {
            let v = weighted_dot(pot.shape_axis(r), pot.shape_axis(s)).scale(f);
            m_d.set(r, s, v);
            m_d.set(s, r, v);
        }
        let kk = r / 2 + 1;
        m_d.set(r, r, m_d.at(r, r) + S::cst(PI * k.rho_0 / (kk + 1) as f64));
    }
    MassMatrices { m_r, n_mat, m_d }
}

pub fn det3<S: Scalar>(m: &Mat<S>) -> S {
    let a = |i, j| m.at(i, j);
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Inverse of a 3×3 matrix by the transposed cofactor matrix over the determinant.
pub fn inverse3<S: Scalar>(m: &Mat<S>) -> Result<Mat<S>> {
    let det = det3(m);
    if !(det.re().abs() >= 1e-14) {
        return Err(Error::SingularMr { det: det.re() });
    }
    let a = |i: usize, j: usize| m.at(i % 3, j % 3);
    let mut inv = Mat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            // cofactor of entry (j, i) via cyclic indices
            let cof = a(j + 1, i + 1) * a(j + 2, i + 2) - a(j + 1, i + 2) * a(j + 2, i + 1);
            inv.set(i, j, cof / det);
        }
    }
    Ok(inv)
}

/// `K = M^d − Nᵀ (M^r)⁻¹ N`.
pub fn reduced_k<S: Scalar>(mm: &MassMatrices<S>) -> Result<Mat<S>> {
    let inv = inverse3(&mm.m_r)?;
    let dim = mm.m_d.rows;
    // X = M^r⁻¹ N, 3 × dim
    let mut x = Mat::zeros(3, dim);
    for i in 0..3 {
        for j in 0..dim {
            let mut s = S::zero();
            for l in 0..3 {
                s += inv.at(i, l) * mm.n_mat.at(l, j);
            }
            x.set(i, j, s);
        }
    }
    let mut k = mm.m_d.clone();
    for r in 0..dim {
        for s in r..dim {
            let mut v = S::zero();
            for l in 0..3 {
                v += mm.n_mat.at(l, r) * x.at(l, s);
            }
            let e = k.at(r, s) - v;
            k.set(r, s, e);
            k.set(s, r, e);
        }
    }
    Ok(k)
}

/// Convenience: `K(c)` straight from a shape.
pub fn k_matrix<S: Scalar>(c: &[S], k: &PhysicalConstants) -> Result<Mat<S>> {
    reduced_k(&assemble(c, k))
}

/// `∂K/∂c_l` for every shape axis `l`, by forward-mode differentiation.
pub fn d_k_dc(c: &ShapeCoefficients, k: &PhysicalConstants) -> Result<Vec<Mat<f64>>> {
    let x = c.axes();
    (0..x.len())
        .map(|l| {
            let cd: Vec<Dual<f64>> =
                x.iter().enumerate().map(|(i, &v)| Dual::new(v, if i == l { 1.0 } else { 0.0 })).collect();
            Ok(k_matrix(&cd, k)?.map(|z| z.d))
        })
        .collect()
}

/// Lower bound `ν'_N = πρ_0 / (2N(N+1))` with `½ c̃ᵀ K c̃ ≥ ν'_N ‖c̃‖_T²`.
pub fn coercivity_constant(n_modes: usize, k: &PhysicalConstants) -> f64 {
    PI * k.rho_0 / (2.0 * (n_modes * (n_modes + 1)) as f64)
}
