//! Laurent–Fourier coefficients of the elementary potentials.
//!
//! On the unit circle the normal derivative of each elementary potential is
//! `Σ_j j (u¹_j cos jθ + u²_j sin jθ)`. The coefficient pairs `u = (u¹, u²)`
//! are `μ_0, ν_0, α` for the three rigid modes and `μ_k, ν_k` for the shape
//! modes `a_k, b_k`. All are polynomial in `c` with support `j ≤ N + 2`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::scalar::Scalar;
use crate::shape_space::ShapeCoefficients;

/// Cosine and sine coefficient lists; entry `i` holds mode `j = i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientPair<S> {
    pub cos_part: Vec<S>,
    pub sin_part: Vec<S>,
}

impl<S: Scalar> CoefficientPair<S> {
    pub fn zeros(len: usize) -> Self {
        CoefficientPair { cos_part: vec![S::zero(); len], sin_part: vec![S::zero(); len] }
    }
    pub fn len(&self) -> usize {
        self.cos_part.len()
    }
    pub fn is_empty(&self) -> bool {
        self.cos_part.is_empty()
    }
}

/// Dense storage length `J = N + 2`.
pub fn support_len(n_modes: usize) -> usize {
    n_modes + 2
}

// a_m, b_m with the convention a_m = b_m = 0 outside 1..=N.
fn ab<S: Scalar>(c: &[S], m: isize) -> (S, S) {
    let n = (c.len() / 2) as isize;
    if m >= 1 && m <= n {
        let i = 2 * (m as usize - 1);
        (c[i], c[i + 1])
    } else {
        (S::zero(), S::zero())
    }
}

/// `(μ_k, ν_k)` for mode `k` (`k = 0` gives the translational pair).
pub fn mu_nu_coeffs<S: Scalar>(c: &[S], k: usize) -> (CoefficientPair<S>, CoefficientPair<S>) {
    let len = support_len(c.len() / 2);
    let mut mu = CoefficientPair::zeros(len);
    let mut nu = CoefficientPair::zeros(len);
    for j in 1..=len {
        let (aj, bj) = ab(c, j as isize);
        let i = j - 1;
        if k == 0 {
            let d = if j == 1 { S::one() } else { S::zero() };
            mu.cos_part[i] = aj - d;
            mu.sin_part[i] = bj;
            nu.cos_part[i] = bj;
            nu.sin_part[i] = -aj - d;
            continue;
        }
        let (ap, bp) = ab(c, (k + j) as isize);
        let (am, bm) = ab(c, k as isize - j as isize);
        let p = k as f64 / j as f64 + 1.0;
        let m = k as f64 / j as f64 - 1.0;
        let d = if j == k + 1 { S::cst(1.0 / (k + 1) as f64) } else { S::zero() };
        mu.cos_part[i] = ap.scale(p) + am.scale(m) - d;
        mu.sin_part[i] = bp.scale(p) - bm.scale(m);
        nu.cos_part[i] = bp.scale(p) + bm.scale(m);
        nu.sin_part[i] = am.scale(m) - ap.scale(p) - d;
    }
    (mu, nu)
}

/// Coefficients of the rotational potential.
pub fn alpha_coeffs<S: Scalar>(c: &[S]) -> CoefficientPair<S> {
    let n = c.len() / 2;
    let len = support_len(n);
    let mut al = CoefficientPair::zeros(len);
    for k in 1..=len {
        let (ak1, bk1) = ab(c, k as isize - 1);
        let mut s1 = bk1;
        let mut s2 = -ak1;
        for j in 1..=n {
            let (aj, bj) = ab(c, j as isize);
            let (ajk, bjk) = ab(c, (j + k) as isize);
            s1 += bjk * aj - ajk * bj;
            s2 -= ajk * aj + bjk * bj;
        }
        al.cos_part[k - 1] = s1;
        al.sin_part[k - 1] = s2;
    }
    al
}

/// `u·v = Σ j (u¹_j v¹_j + u²_j v²_j)`; the shorter list is zero-padded.
pub fn weighted_dot<S: Scalar>(u: &CoefficientPair<S>, v: &CoefficientPair<S>) -> S {
    let mut s = S::zero();
    for i in 0..u.len().min(v.len()) {
        s += (u.cos_part[i] * v.cos_part[i] + u.sin_part[i] * v.sin_part[i]).scale((i + 1) as f64);
    }
    s
}

/// All potentials needed by the mass matrices, computed once per shape.
#[derive(Clone, Debug)]
pub struct PotentialSet<S> {
    pub mu0: CoefficientPair<S>,
    pub nu0: CoefficientPair<S>,
    pub alpha: CoefficientPair<S>,
    /// `mu[k-1]`, `nu[k-1]` for shape modes `k = 1..N`.
    pub mu: Vec<CoefficientPair<S>>,
    pub nu: Vec<CoefficientPair<S>>,
}

impl<S: Scalar> PotentialSet<S> {
    pub fn new(c: &[S]) -> Self {
        let (mu0, nu0) = mu_nu_coeffs(c, 0);
        let (mu, nu) = (1..=c.len() / 2).map(|k| mu_nu_coeffs(c, k)).unzip();
        PotentialSet { mu0, nu0, alpha: alpha_coeffs(c), mu, nu }
    }

    /// The three rigid-mode pairs `(μ_0, ν_0, α)`.
    pub fn rigid(&self) -> [&CoefficientPair<S>; 3] {
        [&self.mu0, &self.nu0, &self.alpha]
    }

    /// Shape-mode pairs in axis order `(μ_1, ν_1, μ_2, ν_2, …)`.
    pub fn shape_axis(&self, axis: usize) -> &CoefficientPair<S> {
        if axis.is_multiple_of(2) {
            &self.mu[axis / 2]
        } else {
            &self.nu[axis / 2]
        }
    }
}

/// Which elementary potential to probe in the boundary-data oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialId {
    /// Rigid translation / rotation mode 1, 2 or 3.
    Rigid(u8),
    /// Shape mode `a_k`.
    A(usize),
    /// Shape mode `b_k`.
    B(usize),
}

/// Neumann datum `∂_n ξ` of the chosen potential at `e^{iθ}`.
pub fn neumann_data(c: &ShapeCoefficients, which: PotentialId, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let zi = z.inv();
    // φ'(z) = 1 − Σ k c_k z^{−k−1}
    let mut dphi = Complex64::new(1.0, 0.0);
    let mut phi = z;
    let mut p = zi;
    for k in 1..=c.n_modes() {
        phi += c.coeff(k) * p;
        p *= zi;
        dphi -= c.coeff(k) * p * k as f64;
    }
    match which {
        PotentialId::Rigid(1) => -(z * dphi).re,
        PotentialId::Rigid(2) => -(z * dphi).im,
        PotentialId::Rigid(3) => -(phi.conj() * z * dphi).im,
        PotentialId::Rigid(m) => panic!("rigid mode {m} out of range 1..=3"),
        PotentialId::A(k) => -(z.powu(k as u32 + 1) * dphi).re - k as f64 * c.a(k),
        PotentialId::B(k) => -(z.powu(k as u32 + 1) * dphi).im - k as f64 * c.b(k),
    }
}

/// Recover a coefficient pair from sampled Neumann data by FFT.
///
/// Returns the pair (length `N + 2`) and the zero-mode mean of the datum.
pub fn boundary_data_fft_oracle(
    c: &ShapeCoefficients,
    which: PotentialId,
    samples: usize,
) -> (CoefficientPair<f64>, f64) {
    let len = support_len(c.n_modes());
    assert!(samples >= 4 * len, "need at least 4(N+2) samples");
    let mut buf: Vec<Complex64> = (0..samples)
        .map(|s| {
            let th = 2.0 * std::f64::consts::PI * s as f64 / samples as f64;
            Complex64::new(neumann_data(c, which, th), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
    let m = samples as f64;
    let mut out = CoefficientPair::zeros(len);
    for j in 1..=len {
        out.cos_part[j - 1] = 2.0 * buf[j].re / (m * j as f64);
        out.sin_part[j - 1] = -2.0 * buf[j].im / (m * j as f64);
    }
    (out, buf[0].re / m)
}

/// Closed-form pair corresponding to `which`.
pub fn closed_form(c: &ShapeCoefficients, which: PotentialId) -> CoefficientPair<f64> {
    match which {
        PotentialId::Rigid(1) => mu_nu_coeffs(c.axes(), 0).0,
        PotentialId::Rigid(2) => mu_nu_coeffs(c.axes(), 0).1,
        PotentialId::Rigid(_) => alpha_coeffs(c.axes()),
        PotentialId::A(k) => mu_nu_coeffs(c.axes(), k).0,
        PotentialId::B(k) => mu_nu_coeffs(c.axes(), k).1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonzero(p: &CoefficientPair<f64>) -> Vec<(usize, f64, f64)> {
        (0..p.len())
            .filter(|&i| p.cos_part[i] != 0.0 || p.sin_part[i] != 0.0)
            .map(|i| (i + 1, p.cos_part[i], p.sin_part[i]))
            .collect()
    }

    #[test]
    fn zero_shape_coefficients() {
        let c = vec![0.0; 4];
        let (mu1, nu1) = mu_nu_coeffs(&c, 1);
        assert_eq!(nonzero(&mu1), vec![(2, -0.5, 0.0)]);
        assert_eq!(nonzero(&nu1), vec![(2, 0.0, -0.5)]);
        let (mu0, nu0) = mu_nu_coeffs(&c, 0);
        assert_eq!(nonzero(&mu0), vec![(1, -1.0, 0.0)]);
        assert_eq!(nonzero(&nu0), vec![(1, 0.0, -1.0)]);
        assert_eq!(weighted_dot(&mu0, &mu0), 1.0);
        assert_eq!(weighted_dot(&nu0, &nu0), 1.0);
        assert!(nonzero(&alpha_coeffs(&c)).is_empty());
    }

    #[test]
    fn alpha_hand_evaluation() {
        // a1 = a2 = 1, N = 2
        let al = alpha_coeffs(&[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(&al.cos_part[..3], &[0.0, 0.0, 0.0]);
        assert_eq!(&al.sin_part[..3], &[-1.0, -1.0, -1.0]);
    }

    #[test]
    fn pairing_examples() {
        let mut u = CoefficientPair::<f64>::zeros(3);
        u.cos_part[1] = 1.0;
        assert_eq!(weighted_dot(&u, &u), 2.0);
        let mut v = CoefficientPair::<f64>::zeros(3);
        v.sin_part[1] = 1.0;
        assert_eq!(weighted_dot(&u, &v), 0.0);
    }

    #[test]
    fn fft_oracle_reproduces_closed_forms() {
        let c = ShapeCoefficients::with_modes(2, &[(1, 0.3, 0.0), (2, 0.0, 0.1)]);
        for which in [PotentialId::Rigid(1), PotentialId::Rigid(2), PotentialId::Rigid(3), PotentialId::A(1), PotentialId::B(2)] {
            let (o, mean) = boundary_data_fft_oracle(&c, which, 64);
            let cf = closed_form(&c, which);
            assert!(mean.abs() < 1e-12);
            for i in 0..cf.len() {
                assert!((o.cos_part[i] - cf.cos_part[i]).abs() < 1e-12, "{which:?} cos {i}");
                assert!((o.sin_part[i] - cf.sin_part[i]).abs() < 1e-12, "{which:?} sin {i}");
            }
        }
        let c = ShapeCoefficients::with_modes(2, &[(1, 1.0, 0.0), (2, 1.0, 0.0)]);
        let (o, _) = boundary_data_fft_oracle(&c, PotentialId::Rigid(3), 64);
        let cf = alpha_coeffs(c.axes());
        for i in 0..4 {
            assert!((o.cos_part[i] - cf.cos_part[i]).abs() < 1e-12);
            assert!((o.sin_part[i] - cf.sin_part[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn support_bound() {
        let c: Vec<f64> = (0..10).map(|i| 0.1 + 0.01 * i as f64).collect();
        let n = 5;
        for k in 1..=n {
            let (mu, nu) = mu_nu_coeffs(&c, k);
            for j in (n.saturating_sub(k).max(k + 1) + 1)..=support_len(n) {
                for p in [&mu, &nu] {
                    assert_eq!(p.cos_part[j - 1], 0.0);
                    assert_eq!(p.sin_part[j - 1], 0.0);
                }
            }
        }
    }
}
