//! Uniform axes and trapezoidal quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform axis given by its end points and step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let spec = Self { min, max, step };
        spec.points()?;
        Ok(spec)
    }

    /// Symmetric axis [−half_width, half_width].
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        Self::new(-half_width, half_width, step)
    }

    pub fn count(&self) -> Result<usize> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::InvalidArgument(format!("axis step {} must be > 0", self.step)));
        }
        if self.max.is_nan() || self.min.is_nan() || self.max <= self.min {
            return Err(Error::InvalidArgument(format!(
                "axis [{}, {}] must have max > min",
                self.min, self.max
            )));
        }
        let intervals = (self.max - self.min) / self.step;
        let rounded = intervals.round();
        if (intervals - rounded).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "step {} does not divide [{}, {}]",
                self.step, self.min, self.max
            )));
        }
        Ok(rounded as usize + 1)
    }

    /// Points computed as linspace so that symmetric axes are exactly
    /// mirror-symmetric.
    pub fn points(&self) -> Result<Vec<f64>> {
        Ok(linspace(self.min, self.max, self.count()?))
    }
}

pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let n = (count - 1) as f64;
    (0..count)
        .map(|i| {
            let t = i as f64;
            // symmetric combination keeps x_i = −x_{n−i} for min = −max
            (min * (n - t) + max * t) / n
        })
        .collect()
}

pub fn check_increasing(xs: &[f64], what: &str) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(format!("{what} needs at least 2 points")));
    }
    if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("{what} must be finite and strictly increasing")));
    }
    Ok(())
}

/// Step of a uniform grid, or an error if the spacing varies by more than
/// `rel_tol`.
pub fn uniform_step(xs: &[f64], rel_tol: f64) -> Result<f64> {
    check_increasing(xs, "grid")?;
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > rel_tol * h) {
        return Err(Error::InvalidArgument("grid must be uniformly spaced".into()));
    }
    Ok(h)
}

/// Trapezoid weights for an arbitrary increasing abscissa.
pub fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (xs[i + 1] - xs[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    trapezoid_weights(xs).iter().zip(ys).map(|(w, y)| w * y).sum()
}
