//! Constraint-satisfying stroke programs on six modes.
//!
//! Five angles `α_1..α_5` place the amplitudes `R_k` on the sphere
//! `Σ k R_k² = μ²`, and three steering rates `h_1..h_3` drive the phases
//! `θ_k` in pairs so that the angular constraint cancels:
//!
//! ```text
//! a_k = R_k cos θ_k,  b_k = R_k sin θ_k
//! θ̇_1 = −h_1 R_2²/3,  θ̇_2 = h_1 R_1²/2   (and likewise for (3,4), (5,6))
//! ```

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;

use crate::dynamics::ShapeCurve;
use crate::error::{Error, Result};

pub const STROKE_MODES: usize = 6;

/// A scalar control signal of time.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeFn {
    Const(f64),
    /// `rate · t + offset`.
    Linear { rate: f64, offset: f64 },
    /// Piecewise constant: `value_i` on `(end_{i−1}, end_i]`, last value after.
    Steps(Vec<(f64, f64)>),
}

impl TimeFn {
    fn jet(&self, t: f64) -> Jet {
        match self {
            TimeFn::Const(v) => Jet::cst(*v),
            TimeFn::Linear { rate, offset } => Jet { v: rate * t + offset, d: *rate, dd: 0.0 },
            TimeFn::Steps(s) => {
                let v = s.iter().find(|(end, _)| t <= *end).or(s.last()).map_or(0.0, |p| p.1);
                Jet::cst(v)
            }
        }
    }
}

// Value with first and second time derivatives.
#[derive(Clone, Copy, Debug)]
struct Jet {
    v: f64,
    d: f64,
    dd: f64,
}

impl Jet {
    fn cst(v: f64) -> Self {
        Jet { v, d: 0.0, dd: 0.0 }
    }
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self.v * o.v, d: self.d * o.v + self.v * o.d, dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd }
    }
    fn scale(self, k: f64) -> Jet {
        Jet { v: k * self.v, d: k * self.d, dd: k * self.dd }
    }
    fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        Jet { v: s, d: c * self.d, dd: c * self.dd - s * self.d * self.d }
    }
    fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        Jet { v: c, d: -s * self.d, dd: -s * self.dd - c * self.d * self.d }
    }
}

#[derive(Debug)]
pub struct StrokeProgram {
    pub name: String,
    pub mu: f64,
    pub alpha: [TimeFn; 5],
    pub h: [TimeFn; 3],
    /// Number of modes reported (the leading ones); must cover every active mode.
    pub n_modes: usize,
    cursor: RefCell<(f64, [f64; 6])>,
}

impl Clone for StrokeProgram {
    fn clone(&self) -> Self {
        StrokeProgram {
            name: self.name.clone(),
            mu: self.mu,
            alpha: self.alpha.clone(),
            h: self.h.clone(),
            n_modes: self.n_modes,
            cursor: RefCell::new((0.0, [0.0; 6])),
        }
    }
}

pub const PRESETS: [&str; 6] = ["straight", "circular", "pair34", "pair56", "moonwalk_base", "moonwalk_reverse"];

/// Default angular rate of the high-frequency perturbation in `moonwalk_reverse`.
pub const MOONWALK_OMEGA: f64 = 1e4;

impl StrokeProgram {
    pub fn new(name: &str, mu: f64, alpha: [TimeFn; 5], h: [TimeFn; 3]) -> Self {
        StrokeProgram {
            name: name.to_string(),
            mu,
            alpha,
            h,
            n_modes: STROKE_MODES,
            cursor: RefCell::new((0.0, [0.0; 6])),
        }
    }

    /// Named program with its default parameters.
    pub fn preset(name: &str) -> Result<Self> {
        use TimeFn::{Const, Linear};
        let t = || Linear { rate: 1.0, offset: 0.0 };
        let z = || Const(0.0);
        let q = || Const(FRAC_PI_2);
        let p = match name {
            "straight" => Self::new(name, 0.5, [t(), z(), z(), z(), z()], [z(), z(), z()]),
            "circular" => Self::new(name, 0.5, [t(), z(), z(), z(), z()], [Const(1.0), z(), z()]),
            "pair34" => Self::new(name, 0.5, [q(), q(), t(), z(), z()], [z(), Const(1.2), z()]),
            "pair56" => Self::new(name, 0.5, [q(), q(), q(), q(), t()], [z(), z(), Const(1.0)]),
            "moonwalk_base" | "moonwalk_reverse" => {
                let a5 = if name == "moonwalk_base" { z() } else { Linear { rate: -MOONWALK_OMEGA, offset: 0.0 } };
                let pi = std::f64::consts::PI;
                Self::new(name, 0.5, [t(), Const(pi / 6.0), Const(pi / 12.0), Const(pi / 12.0), a5], [z(), z(), z()])
            }
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        Ok(p)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Set the steering rate of the preset's active pair (`h_1`, `h_2` or `h_3`).
    pub fn with_steering(mut self, h: f64) -> Self {
        let idx = match self.name.as_str() {
            "pair34" => 1,
            "pair56" => 2,
            _ => 0,
        };
        self.h[idx] = TimeFn::Const(h);
        self
    }

    /// Angular rate of `α_5` (the high-frequency perturbation), `α_5 = −Ω t`.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.alpha[4] = TimeFn::Linear { rate: -omega, offset: 0.0 };
        self
    }

    pub fn truncated(mut self, n_modes: usize) -> Self {
        assert!((1..=STROKE_MODES).contains(&n_modes));
        self.n_modes = n_modes;
        self
    }

    fn radii(&self, t: f64) -> [Jet; 6] {
        let a: Vec<Jet> = self.alpha.iter().map(|f| f.jet(t)).collect();
        let mut r = [Jet::cst(0.0); 6];
        let mut prod = Jet::cst(self.mu);
        for k in 0..5 {
            r[k] = prod.mul(a[k].cos()).scale(1.0 / ((k + 1) as f64).sqrt());
            prod = prod.mul(a[k].sin());
        }
        r[5] = prod.scale(1.0 / 6f64.sqrt());
        r
    }

    // θ̇_k with its time derivative.
    fn phase_rates(&self, t: f64, r: &[Jet; 6]) -> [Jet; 6] {
        let h: Vec<Jet> = self.h.iter().map(|f| f.jet(t)).collect();
        let mut out = [Jet::cst(0.0); 6];
        for p in 0..3 {
            let (i, j) = (2 * p, 2 * p + 1);
            let (ki, kj) = ((i + 1) as f64, (j + 1) as f64);
            out[i] = h[p].mul(r[j]).mul(r[j]).scale(-1.0 / (ki + 2.0));
            out[j] = h[p].mul(r[i]).mul(r[i]).scale(1.0 / (kj + 0.0));
        }
        out
    }

    fn theta_rate(&self, t: f64) -> [f64; 6] {
        let r = self.radii(t);
        let w = self.phase_rates(t, &r);
        std::array::from_fn(|i| w[i].v)
    }

    /// Phases `θ_k(t)` by Simpson quadrature from the last evaluated time.
    pub fn phases_at(&self, t: f64) -> [f64; 6] {
        if self.h.iter().all(|f| *f == TimeFn::Const(0.0)) {
            return [0.0; 6];
        }
        let mut cur = self.cursor.borrow_mut();
        if t < cur.0 {
            *cur = (0.0, [0.0; 6]);
        }
        let (t0, mut th) = *cur;
        let span = t - t0;
        if span > 0.0 {
            let n = (span / 1e-3).ceil() as usize;
            let h = span / n as f64;
            for i in 0..n {
                let a = t0 + i as f64 * h;
                let (f0, f1, f2) = (self.theta_rate(a), self.theta_rate(a + 0.5 * h), self.theta_rate(a + h));
                for k in 0..6 {
                    th[k] += h / 6.0 * (f0[k] + 4.0 * f1[k] + f2[k]);
                }
            }
        }
        *cur = (t, th);
        th
    }

    fn jets(&self, t: f64, theta: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let r = self.radii(t);
        let w = self.phase_rates(t, &r);
        let n = self.n_modes;
        let (mut c, mut cd, mut cdd) = (vec![0.0; 2 * n], vec![0.0; 2 * n], vec![0.0; 2 * n]);
        for k in 0..n {
            let (s, co) = theta[k].sin_cos();
            let (rk, th) = (r[k], w[k]);
            c[2 * k] = rk.v * co;
            c[2 * k + 1] = rk.v * s;
            cd[2 * k] = rk.d * co - rk.v * s * th.v;
            cd[2 * k + 1] = rk.d * s + rk.v * co * th.v;
            cdd[2 * k] = rk.dd * co - 2.0 * rk.d * s * th.v - rk.v * co * th.v * th.v - rk.v * s * th.d;
            cdd[2 * k + 1] = rk.dd * s + 2.0 * rk.d * co * th.v - rk.v * s * th.v * th.v + rk.v * co * th.d;
        }
        (c, cd, cdd)
    }

    /// `(c(t), ċ(t), c̈(t))` with phases from the internal quadrature.
    pub fn sample(&self, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let th = self.phases_at(t);
        self.jets(t, &th)
    }
}

impl ShapeCurve for StrokeProgram {
    fn n_modes(&self) -> usize {
        self.n_modes
    }
    fn aux_init(&self) -> Vec<f64> {
        vec![0.0; 6]
    }
    fn aux_rate(&self, t: f64, _aux: &[f64]) -> Vec<f64> {
        self.theta_rate(t).to_vec()
    }
    fn shape(&self, t: f64, aux: &[f64]) -> Vec<f64> {
        self.jets(t, aux).0
    }
    fn velocity(&self, t: f64, aux: &[f64]) -> Option<Vec<f64>> {
        Some(self.jets(t, aux).1)
    }
    fn acceleration(&self, t: f64, aux: &[f64]) -> Option<Vec<f64>> {
        Some(self.jets(t, aux).2)
    }
}
