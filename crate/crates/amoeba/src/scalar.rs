//! Scalar abstraction shared by `f64` and forward-mode dual numbers.
//!
//! Every assembly routine in the crate is generic over [`Scalar`], so a
//! single code path yields values, first derivatives (`Dual<f64>`) and the
//! higher derivatives needed by iterated Lie brackets (`Dual<Dual<f64>>`, ...).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn cst(x: f64) -> Self;
    /// Underlying `f64` value with all infinitesimal parts dropped.
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }
    fn sq(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// First-order dual number `v + d·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(v: T, d: T) -> Self {
        Dual { v, d }
    }
    pub fn var(v: T) -> Self {
        Dual { v, d: T::one() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}
impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}
impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}
impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let v = self.v / o.v;
        Dual { v, d: (self.d - v * o.d) / o.v }
    }
}
impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual { v: -self.v, d: -self.d }
    }
}
impl<T: Scalar> AddAssign for Dual<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<T: Scalar> SubAssign for Dual<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<T: Scalar> MulAssign for Dual<T> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn cst(x: f64) -> Self {
        Dual { v: T::cst(x), d: T::zero() }
    }
    #[inline]
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(self) -> Self {
        Dual { v: self.v.sin(), d: self.d * self.v.cos() }
    }
    fn cos(self) -> Self {
        Dual { v: self.v.cos(), d: -(self.d * self.v.sin()) }
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Dual { v: s, d: self.d / (s + s) }
    }
}

/// Scalars that can be lifted one derivative order up.
///
/// The tower stops at four nested duals; lifting beyond that panics. This
/// bounds the recursion of iterated Lie brackets at compile time.
pub trait Lift: Scalar {
    type Up: Lift;
    fn up(self, d: Self) -> Self::Up;
    fn up_value(u: Self::Up) -> Self;
    fn up_tangent(u: Self::Up) -> Self;
}

pub type D1 = Dual<f64>;
pub type D2 = Dual<D1>;
pub type D3 = Dual<D2>;
pub type D4 = Dual<D3>;

macro_rules! lift_to_dual {
    ($($t:ty),*) => {$(
        impl Lift for $t {
            type Up = Dual<$t>;
            #[inline]
            fn up(self, d: Self) -> Dual<$t> {
                Dual::new(self, d)
            }
            #[inline]
            fn up_value(u: Dual<$t>) -> Self {
                u.v
            }
            #[inline]
            fn up_tangent(u: Dual<$t>) -> Self {
                u.d
            }
        }
    )*};
}
lift_to_dual!(f64, D1, D2, D3);

impl Lift for D4 {
    type Up = D4;
    fn up(self, _d: Self) -> D4 {
        panic!("derivative order exceeds the supported nesting depth")
    }
    fn up_value(u: D4) -> Self {
        u
    }
    fn up_tangent(_u: D4) -> Self {
        panic!("derivative order exceeds the supported nesting depth")
    }
}

/// Lift a slice of scalars into duals with the given tangent direction.
pub fn seed<T: Scalar>(x: &[T], dir: &[T]) -> Vec<Dual<T>> {
    x.iter().zip(dir).map(|(&v, &d)| Dual::new(v, d)).collect()
}

pub fn lift<T: Scalar>(x: &[f64]) -> Vec<T> {
    x.iter().map(|&v| T::cst(v)).collect()
}

pub fn values<T: Scalar>(x: &[Dual<T>]) -> Vec<T> {
    x.iter().map(|z| z.v).collect()
}

pub fn tangents<T: Scalar>(x: &[Dual<T>]) -> Vec<T> {
    x.iter().map(|z| z.d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::var(2.0);
        let y = x * x / (x + Dual::cst(1.0));
        assert!((y.v - 4.0 / 3.0).abs() < 1e-15);
        // d/dx x²/(x+1) = (x² + 2x)/(x+1)²
        assert!((y.d - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn nested_duals_give_second_derivative() {
        let x: Dual<Dual<f64>> = Dual::new(Dual::var(0.7), Dual::cst(1.0));
        let y = x.sin() * x;
        let (s, c) = (0.7f64.sin(), 0.7f64.cos());
        assert!((y.v.v - 0.7 * s).abs() < 1e-15);
        assert!((y.d.v - (s + 0.7 * c)).abs() < 1e-15);
        assert!((y.d.d - (2.0 * c - 0.7 * s)).abs() < 1e-14);
    }

    #[test]
    fn sqrt_derivative() {
        let y = Dual::var(4.0).sqrt();
        assert_eq!(y.v, 2.0);
        assert!((y.d - 0.25).abs() < 1e-15);
    }
}
