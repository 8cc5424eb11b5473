//! Natural cubic spline interpolation.

use crate::error::{Error, Result};
use crate::grid;

#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
    /// Some(step) when the knots are uniformly spaced
    uniform: Option<f64>,
}

impl CubicSpline {
    /// Natural spline (zero curvature at both ends) through the knots.
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch { left: xs.len(), right: ys.len() });
        }
        if xs.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "cubic spline needs at least 4 knots, got {}",
                xs.len()
            )));
        }
        grid::check_increasing(xs, "spline knots")?;
        let n = xs.len();
        // tridiagonal system for interior second derivatives (Thomas algorithm)
        let mut m = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let c = h1 / 6.0;
            let d = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        }
        let uniform = grid::uniform_step(xs, 1e-9).ok();
        Ok(Self { xs: xs.to_vec(), ys: ys.to_vec(), m, uniform })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    fn interval(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        let i = match self.uniform {
            Some(h) => ((x - self.xs[0]) / h).floor().max(0.0) as usize,
            None => self.xs.partition_point(|k| *k <= x).saturating_sub(1),
        };
        let i = i.min(last);
        // guard against rounding in the uniform index
        if i < last && x >= self.xs[i + 1] {
            i + 1
        } else if i > 0 && x < self.xs[i] {
            i - 1
        } else {
            i
        }
    }

    /// Value at `x`; outside the knot range the end cubic is extended.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = 1.0 - a;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}
