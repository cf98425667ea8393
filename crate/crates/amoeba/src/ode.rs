//! Classical fixed-step Runge–Kutta.

use crate::error::{Error, Result};

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: f64, x: &[f64]| -> Vec<f64> { y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect() };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(h, &k3))?;
    let out: Vec<f64> = (0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: t + h });
    }
    Ok(out)
}

/// Number of equal steps covering `[t0, t1]` with step at most `dt`.
pub fn step_count(t0: f64, t1: f64, dt: f64) -> usize {
    (((t1 - t0) / dt) - 1e-9).ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_linear_ode() {
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = vec![1.0];
            let mut f = |_t: f64, y: &[f64]| Ok(vec![-2.0 * y[0]]);
            for i in 0..n {
                y = rk4_step(&mut f, i as f64 * h, &y, h).unwrap();
            }
            (y[0] - (-2.0f64).exp()).abs()
        };
        let order = (run(20) / run(40)).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn step_count_covers_interval() {
        assert_eq!(step_count(0.0, 1.0, 0.1), 10);
        assert_eq!(step_count(0.0, 1.0, 0.3), 4);
    }
}
