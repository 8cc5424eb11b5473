//! Wigner reconstruction by filtered back-projection.
//!
//! The quadrature densities are the Radon projections of W, so
//!
//!   W(u, v) = C Σ_φ Δφ ∫ dx p(x, φ) K(x − u cos φ − v sin φ),
//!
//! with the ramp filter band-limited to |k| ≤ k_c:
//!
//!   K(ξ) = ∫_{−k_c}^{k_c} |k| e^{ikξ} dk = 2(cos k_cξ − 1)/ξ² + 2k_c sin(k_cξ)/ξ.
//!
//! The constant C is fixed by reconstructing the vacuum on the same x grid
//! and matching W(0) = 2/π; it is stored in a [`Reconstructor`] and reused.
//!
//! Each slice is first fitted (natural cubic spline by default) and sampled
//! on a refined grid; the x integral is a trapezoid on that grid. Phases must
//! cover [0, π) uniformly; a [0, π/2] table is completed with the symmetries
//! p(x, −φ) = p(x, φ) and p(x, φ + π) = p(−x, φ).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::grid;
use crate::quadrature::{self, QuadratureTable};
use crate::spline::CubicSpline;
use crate::wigner::{Convention, WignerFunction, WignerGrid};

const PHASE_TOL: f64 = 1e-9;
/// Largest mismatch between the φ = π/2 slice and its mirror image accepted
/// by [`extend_phases`].
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseExtension {
    ConjugationSymmetry,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    CubicSpline,
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    #[default]
    Trapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionConfig {
    /// Ramp-filter cutoff k_c (inverse quadrature units).
    pub cutoff_kc: f64,
    pub phase_extension: PhaseExtension,
    pub fit_model: FitModel,
    #[serde(default)]
    pub quad_rule: QuadRule,
    /// Sub-intervals per x step when integrating a fitted slice.
    #[serde(default = "default_refine")]
    pub refine: usize,
}

fn default_refine() -> usize {
    2
}

/// k_c = 2(2√n̄ + 4): above the fringe frequency 4√n̄ of a cat of mean
/// photon number n̄.
pub fn default_cutoff(mean_photons: f64) -> f64 {
    2.0 * (2.0 * mean_photons.sqrt() + 4.0)
}

impl ReconstructionConfig {
    pub fn for_mean_photons(mean_photons: f64) -> Self {
        Self {
            cutoff_kc: default_cutoff(mean_photons),
            phase_extension: PhaseExtension::ConjugationSymmetry,
            fit_model: FitModel::CubicSpline,
            quad_rule: QuadRule::Trapezoid,
            refine: default_refine(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff_kc > 0.0 && self.cutoff_kc.is_finite()) {
            return Err(Error::InvalidArgument(format!("cutoff k_c = {} must be > 0", self.cutoff_kc)));
        }
        if self.refine == 0 {
            return Err(Error::InvalidArgument("refine must be at least 1".into()));
        }
        if self.fit_model == FitModel::None && self.refine != 1 {
            return Err(Error::InvalidArgument("refine > 1 requires a fitted slice model".into()));
        }
        Ok(())
    }

    fn effective_refine(&self) -> usize {
        match self.fit_model {
            FitModel::CubicSpline => self.refine,
            FitModel::None => 1,
        }
    }
}

/// Band-limited ramp kernel ∫_{−k_c}^{k_c} |k| e^{ikξ} dk.
pub fn fbp_kernel(xi: f64, kc: f64) -> f64 {
    let z = kc * xi;
    if z.abs() < 1e-3 {
        // k_c²(1 − z²/4 + z⁴/72)
        let z2 = z * z;
        kc * kc * (1.0 - z2 / 4.0 + z2 * z2 / 72.0)
    } else {
        2.0 * ((z.cos() - 1.0) / (xi * xi) + kc * z.sin() / xi)
    }
}

fn check_symmetric_grid(x: &[f64]) -> Result<()> {
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if x.iter().zip(x.iter().rev()).any(|(a, b)| (a + b).abs() > 1e-9 * scale) {
        return Err(Error::InvalidArgument("x grid must be symmetric about 0".into()));
    }
    Ok(())
}

/// 2∫_0^{k_c} k cos(kξ) dk by composite Simpson with `intervals` (even)
/// sub-intervals. Reference values for [`fbp_kernel`].
pub fn fbp_kernel_by_quadrature(xi: f64, kc: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = kc / n as f64;
    let f = |k: f64| k * (k * xi).cos();
    let mut s = f(0.0) + f(kc);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    2.0 * s * h / 3.0
}

/// Completes a table on [0, π/2] to [0, π) using conjugation symmetry.
///
/// The input must be uniformly spaced from 0 to π/2 inclusive; an m-point
/// table yields 2(m − 1) phases. The φ = π/2 slice, which the symmetry forces
/// to be even in x, is checked against its mirror image.
pub fn extend_phases(table: &QuadratureTable) -> Result<QuadratureTable> {
    let m = table.phases.len();
    if m < 2 {
        return Err(Error::InvalidArgument("need at least the φ = 0 and φ = π/2 slices".into()));
    }
    if table.phases.iter().any(|p| *p < -PHASE_TOL || *p > PI / 2.0 + PHASE_TOL) {
        return Err(Error::InvalidArgument("input phases must lie within [0, π/2]".into()));
    }
    let expected = quadrature::default_phases(m);
    if table.phases.iter().zip(&expected).any(|(a, b)| (a - b).abs() > PHASE_TOL) {
        return Err(Error::InvalidArgument(
            "input phases must be uniformly spaced from 0 to π/2 inclusive".into(),
        ));
    }
    check_symmetric_grid(&table.x_grid)?;

    let edge = &table.density[m - 1];
    let mismatch = edge.iter().zip(edge.iter().rev()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if mismatch > SYMMETRY_TOL {
        return Err(Error::SymmetryViolation(format!(
            "p(x, π/2) differs from p(−x, π/2) by {mismatch:.3e}; the state is not conjugation-symmetric"
        )));
    }

    let mut phases = table.phases.clone();
    let mut density = table.density.clone();
    for j in (1..m - 1).rev() {
        phases.push(PI - table.phases[j]);
        density.push(table.density[j].iter().rev().copied().collect());
    }
    QuadratureTable::new(phases, table.x_grid.clone(), density)
}

/// One fitted slice.
#[derive(Clone, Debug, PartialEq)]
pub enum SliceFit {
    Spline(CubicSpline),
    Raw { x: Vec<f64>, p: Vec<f64> },
}

impl SliceFit {
    /// Value at `x`. Raw slices interpolate linearly.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SliceFit::Spline(s) => s.eval(x),
            SliceFit::Raw { x: xs, p } => {
                let i = xs.partition_point(|k| *k <= x).clamp(1, xs.len() - 1) - 1;
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                p[i] * (1.0 - t) + p[i + 1] * t
            }
        }
    }
}

/// Per-phase continuous representation of a quadrature table.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedTable {
    pub phases: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub slices: Vec<SliceFit>,
}

impl FittedTable {
    pub fn eval(&self, phase_index: usize, x: f64) -> f64 {
        self.slices[phase_index].eval(x)
    }

    /// Slice sampled on the grid refined `refine` times.
    fn sample(&self, phase_index: usize, fine_x: &[f64], refine: usize) -> Vec<f64> {
        match &self.slices[phase_index] {
            SliceFit::Raw { p, .. } => p.clone(),
            SliceFit::Spline(s) => fine_x
                .iter()
                .enumerate()
                .map(|(j, x)| if j % refine == 0 { s.values()[j / refine] } else { s.eval(*x) })
                .collect(),
        }
    }
}

pub fn fit_slices(table: &QuadratureTable, fit_model: FitModel) -> Result<FittedTable> {
    let slices = table
        .density
        .iter()
        .map(|row| match fit_model {
            FitModel::CubicSpline => CubicSpline::new(&table.x_grid, row).map(SliceFit::Spline),
            FitModel::None => Ok(SliceFit::Raw { x: table.x_grid.clone(), p: row.clone() }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FittedTable { phases: table.phases.clone(), x_grid: table.x_grid.clone(), slices })
}

/// Table ready for back-projection: uniform phases on [0, π), each slice
/// sampled on the refined grid and multiplied by its trapezoid weight.
#[derive(Clone, Debug)]
struct WeightedSlices {
    phases: Vec<f64>,
    fine_x: Vec<f64>,
    fine_step: f64,
    /// w_j p(x_j, φ) per phase
    weighted: Vec<Vec<f64>>,
}

/// Filtered back-projection on a fixed uniform, symmetric x grid, with the
/// overall constant calibrated on the vacuum.
#[derive(Clone, Debug)]
pub struct Reconstructor {
    config: ReconstructionConfig,
    x_grid: Vec<f64>,
    step: f64,
    scale: f64,
}

impl Reconstructor {
    pub fn new(config: ReconstructionConfig, x_grid: &[f64]) -> Result<Self> {
        config.validate()?;
        let step = grid::uniform_step(x_grid, 1e-6)?;
        check_symmetric_grid(x_grid)?;
        let mut rec = Self { config, x_grid: x_grid.to_vec(), step, scale: 1.0 };

        let vacuum = FockVector::vacuum(1)?;
        let table = quadrature::build_table(&vacuum, &[0.0], x_grid)?;
        let slices = rec.weighted(&table, false)?;
        // the vacuum is rotation invariant: every phase contributes the same
        let q0 = slices.filtered_at(0, 0.0, config.cutoff_kc);
        rec.scale = (2.0 / PI) / (PI * q0);
        Ok(rec)
    }

    pub fn config(&self) -> &ReconstructionConfig {
        &self.config
    }

    /// The calibrated constant C.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn weighted(&self, table: &QuadratureTable, require_cover: bool) -> Result<WeightedSlices> {
        if table.x_grid.len() != self.x_grid.len()
            || table.x_grid.iter().zip(&self.x_grid).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs()))
        {
            return Err(Error::InvalidArgument("table x grid differs from the reconstructor's".into()));
        }
        let table = if require_cover { self.cover_half_turn(table)? } else { table.clone() };
        let refine = self.config.effective_refine();
        let fitted = fit_slices(&table, self.config.fit_model)?;
        let k = self.x_grid.len();
        let fine_count = (k - 1) * refine + 1;
        let fine_x = grid::linspace(self.x_grid[0], self.x_grid[k - 1], fine_count);
        let fine_step = self.step / refine as f64;
        let weights: Vec<f64> = (0..fine_count)
            .map(|j| if j == 0 || j == fine_count - 1 { 0.5 * fine_step } else { fine_step })
            .collect();
        let weighted = (0..table.phases.len())
            .map(|i| {
                fitted.sample(i, &fine_x, refine).iter().zip(&weights).map(|(p, w)| p * w).collect()
            })
            .collect();
        Ok(WeightedSlices { phases: table.phases, fine_x, fine_step, weighted })
    }

    /// Applies the configured extension and checks for uniform phases
    /// j·π/m, j = 0..m.
    fn cover_half_turn(&self, table: &QuadratureTable) -> Result<QuadratureTable> {
        let max_phase = table.phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let table = match self.config.phase_extension {
            PhaseExtension::ConjugationSymmetry if max_phase <= PI / 2.0 + PHASE_TOL => extend_phases(table)?,
            _ => table.clone(),
        };
        let m = table.phases.len();
        let uniform = table
            .phases
            .iter()
            .enumerate()
            .all(|(j, p)| (p - j as f64 * PI / m as f64).abs() <= PHASE_TOL);
        if m < 2 || !uniform {
            return Err(Error::InvalidArgument(format!(
                "phases must be uniformly spaced on [0, π) (got {m} phases up to {max_phase:.4}); \
                 extend a [0, π/2] table first"
            )));
        }
        Ok(table)
    }

    /// Filtered projections, spline-interpolated in s, for fast evaluation
    /// anywhere within |α| ≤ max|x|.
    pub fn filter(&self, table: &QuadratureTable) -> Result<FilteredProjections> {
        let slices = self.weighted(table, true)?;
        let refine = self.config.effective_refine();
        let fine_count = slices.fine_x.len();
        let kc = self.config.cutoff_kc;
        let kernel: Vec<f64> = (0..fine_count).map(|d| fbp_kernel(d as f64 * slices.fine_step, kc)).collect();
        let k = self.x_grid.len();
        let q = slices
            .weighted
            .par_iter()
            .map(|wp| {
                let values: Vec<f64> = (0..k)
                    .map(|i| {
                        let centre = i * refine;
                        wp.iter()
                            .enumerate()
                            .map(|(j, v)| v * kernel[j.abs_diff(centre)])
                            .sum()
                    })
                    .collect();
                CubicSpline::new(&self.x_grid, &values)
            })
            .collect::<Result<Vec<_>>>()?;
        let m = slices.phases.len();
        Ok(FilteredProjections {
            directions: slices.phases.iter().map(|p| (p.cos(), p.sin())).collect(),
            q,
            s_max: self.x_grid[k - 1],
            weight: self.scale * PI / m as f64,
        })
    }

    /// W(α) by direct quadrature against the kernel, without interpolation.
    pub fn evaluate_at(&self, table: &QuadratureTable, alpha: C64) -> Result<f64> {
        let slices = self.weighted(table, true)?;
        let m = slices.phases.len();
        let sum: f64 = (0..m)
            .map(|i| {
                let (c, s) = (slices.phases[i].cos(), slices.phases[i].sin());
                slices.filtered_at(i, alpha.re * c + alpha.im * s, self.config.cutoff_kc)
            })
            .sum();
        Ok(self.scale * PI / m as f64 * sum)
    }

    pub fn reconstruct(&self, table: &QuadratureTable, re_axis: &[f64], im_axis: &[f64]) -> Result<WignerGrid> {
        let f = self.filter(table)?;
        crate::wigner::evaluate_grid(&f, re_axis, im_axis, Convention::Phys)
    }
}

impl WeightedSlices {
    fn filtered_at(&self, phase_index: usize, s: f64, kc: f64) -> f64 {
        self.weighted[phase_index]
            .iter()
            .zip(&self.fine_x)
            .map(|(wp, x)| wp * fbp_kernel(x - s, kc))
            .sum()
    }
}

/// Back-projector over precomputed filtered slices; implements
/// [`WignerFunction`] in the phys convention.
#[derive(Clone, Debug)]
pub struct FilteredProjections {
    directions: Vec<(f64, f64)>,
    q: Vec<CubicSpline>,
    s_max: f64,
    weight: f64,
}

impl WignerFunction for FilteredProjections {
    fn wigner(&self, alpha: C64) -> Result<f64> {
        if alpha.norm() > self.s_max * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "|α| = {:.4} lies outside the reconstructable disc of radius {:.4}",
                alpha.norm(),
                self.s_max
            )));
        }
        let sum: f64 = self
            .directions
            .iter()
            .zip(&self.q)
            .map(|((c, s), q)| q.eval(alpha.re * c + alpha.im * s))
            .sum();
        Ok(self.weight * sum)
    }
}

/// Reconstructs W (phys convention) on the given axes.
pub fn reconstruct(
    table: &QuadratureTable,
    re_axis: &[f64],
    im_axis: &[f64],
    config: &ReconstructionConfig,
) -> Result<WignerGrid> {
    Reconstructor::new(*config, &table.x_grid)?.reconstruct(table, re_axis, im_axis)
}
