//! Noise deterioration of quadrature tables, minimum search on Wigner
//! functions and Monte Carlo statistics of the reconstructed minimum.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{make_cat, CatSpec};
use crate::error::{Error, Result};
use crate::fock;
use crate::grid::{self, AxisSpec};
use crate::quadrature::{self, QuadratureTable};
use crate::tomography::{ReconstructionConfig, Reconstructor};
use crate::wigner::{Convention, WignerFunction, WignerGrid};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// One factor (1 + ε), ε ~ U[−m, m], per phase slice.
    #[default]
    PerSliceUniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub magnitude: f64,
    #[serde(default)]
    pub model: NoiseModel,
    pub runs: usize,
    pub seed: u64,
    /// Rescale each perturbed slice back to unit integral.
    #[serde(default)]
    pub renormalize: bool,
}

impl NoiseSpec {
    pub fn new(magnitude: f64, runs: usize, seed: u64) -> Result<Self> {
        let spec = Self { magnitude, model: NoiseModel::PerSliceUniform, runs, seed, renormalize: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.magnitude) {
            return Err(Error::InvalidArgument(format!(
                "noise magnitude {} must lie in [0, 1)",
                self.magnitude
            )));
        }
        if self.runs == 0 {
            return Err(Error::InvalidArgument("noise study needs at least one run".into()));
        }
        Ok(())
    }

    /// Multiplicative factor for one slice of one run. The stream is keyed on
    /// (seed, run, slice) alone.
    pub fn slice_factor(&self, run_index: usize, slice_index: usize) -> f64 {
        if self.magnitude == 0.0 {
            return 1.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(run_index as u64);
        rng.set_word_pos(16 * slice_index as u128);
        1.0 + rng.random_range(-self.magnitude..=self.magnitude)
    }
}

/// Scales every phase slice by its own random factor.
pub fn perturb(table: &QuadratureTable, spec: &NoiseSpec, run_index: usize) -> Result<QuadratureTable> {
    spec.validate()?;
    if spec.magnitude == 0.0 {
        return Ok(table.clone());
    }
    let density = table
        .density
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let f = spec.slice_factor(run_index, i);
            let mut out: Vec<f64> = row.iter().map(|p| p * f).collect();
            if spec.renormalize {
                let norm = grid::trapezoid(&table.x_grid, &out);
                out.iter_mut().for_each(|p| *p /= norm);
            }
            out
        })
        .collect();
    Ok(QuadratureTable { phases: table.phases.clone(), x_grid: table.x_grid.clone(), density })
}

/// Rectangular search window. A degenerate Im range restricts the search to
/// the line Im α = im.0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Global,
    /// Search a square of half-width `radius` around `point`.
    LocalNear { point: (f64, f64), radius: f64 },
}

/// A located minimum in the W[Re α, Im α] = value format. For Monte Carlo
/// studies `mean` and `stddev` summarise the runs and `value` equals `mean`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimumReport {
    pub location: (f64, f64),
    pub value: f64,
    pub mean: f64,
    pub stddev: f64,
    pub convention: Convention,
}

impl MinimumReport {
    fn single(location: (f64, f64), value: f64, convention: Convention) -> Self {
        Self { location, value, mean: value, stddev: 0.0, convention }
    }
}

fn axis_points(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if hi == lo {
        return Ok(vec![lo]);
    }
    let n = ((hi - lo) / step).round().max(2.0) as usize;
    Ok(grid::linspace(lo, hi, n + 1))
}

/// Coarse scan of the region followed by successive three-point parabolic
/// refinements, each with a ten times smaller step.
pub fn find_minimum<F: WignerFunction + ?Sized>(
    f: &F,
    region: &SearchRegion,
    mode: SearchMode,
    convention: Convention,
) -> Result<MinimumReport> {
    let region = match mode {
        SearchMode::Global => *region,
        SearchMode::LocalNear { point, radius } => SearchRegion {
            re: (point.0 - radius, point.0 + radius),
            im: if region.im.0 == region.im.1 { (point.1, point.1) } else { (point.1 - radius, point.1 + radius) },
            step: region.step,
        },
    };
    if region.step.is_nan() || region.step <= 0.0 || region.re.1 <= region.re.0 || region.im.1 < region.im.0 {
        return Err(Error::InvalidArgument(format!("invalid search region {region:?}")));
    }
    let us = axis_points(region.re.0, region.re.1, region.step)?;
    let vs = axis_points(region.im.0, region.im.1, region.step)?;
    let line = vs.len() == 1;

    let rows = us
        .par_iter()
        .map(|u| vs.iter().map(|v| f.wigner(C64::new(*u, *v))).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut best = (0, 0, f64::INFINITY);
    for (i, row) in rows.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if *w < best.2 {
                best = (i, j, *w);
            }
        }
    }
    let (i, j, _) = best;
    if i == 0 || i == us.len() - 1 || (!line && (j == 0 || j == vs.len() - 1)) {
        return Err(Error::Region { re: us[i], im: vs[j] });
    }

    let eval = |u: f64, v: f64| f.wigner(C64::new(u, v));
    let (mut u, mut v) = (us[i], vs[j]);
    let mut h = region.step;
    for _ in 0..6 {
        u += parabolic_offset(eval(u - h, v)?, eval(u, v)?, eval(u + h, v)?, h);
        if !line {
            v += parabolic_offset(eval(u, v - h)?, eval(u, v)?, eval(u, v + h)?, h);
        }
        h *= 0.1;
    }
    let value = eval(u, v)? * convention.scale();
    Ok(MinimumReport::single((u, v), value, convention))
}

/// Vertex of the parabola through (−h, a), (0, b), (h, c), clamped to ±h.
fn parabolic_offset(a: f64, b: f64, c: f64, h: f64) -> f64 {
    let curv = a - 2.0 * b + c;
    if curv <= 0.0 {
        return 0.0;
    }
    (0.5 * h * (a - c) / curv).clamp(-h, h)
}

/// Minimum of tabulated values: grid argmin plus one quadratic fit per axis
/// on the 3-point neighbourhood.
pub fn find_grid_minimum(grid: &WignerGrid, mode: SearchMode) -> Result<MinimumReport> {
    let in_window = |i: usize, j: usize| match mode {
        SearchMode::Global => true,
        SearchMode::LocalNear { point, radius } => {
            (grid.re_axis[i] - point.0).abs() <= radius && (grid.im_axis[j] - point.1).abs() <= radius
        }
    };
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, row) in grid.values.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if in_window(i, j) && best.is_none_or(|b| *w < b.2) {
                best = Some((i, j, *w));
            }
        }
    }
    let (i, j, w0) = best.ok_or_else(|| Error::InvalidArgument("search window contains no grid points".into()))?;
    let (p, q) = (grid.re_axis.len(), grid.im_axis.len());
    let edge = |i: usize, j: usize| !in_window(i, j);
    if i == 0 || i + 1 == p || (q > 1 && (j == 0 || j + 1 == q))
        || edge(i - 1, j) || edge(i + 1, j)
        || (q > 1 && (edge(i, j - 1) || edge(i, j + 1)))
    {
        return Err(Error::Region { re: grid.re_axis[i], im: grid.im_axis[j] });
    }
    let fit = |a: f64, b: f64, c: f64, h: f64| -> (f64, f64) {
        let curv = a - 2.0 * b + c;
        if curv <= 0.0 {
            return (0.0, 0.0);
        }
        let t = 0.5 * (a - c) / curv;
        (t * h, -(a - c) * (a - c) / (8.0 * curv))
    };
    let hu = 0.5 * (grid.re_axis[i + 1] - grid.re_axis[i - 1]);
    let (du, dwu) = fit(grid.values[i - 1][j], w0, grid.values[i + 1][j], hu);
    let (dv, dwv) = if q > 1 {
        let hv = 0.5 * (grid.im_axis[j + 1] - grid.im_axis[j - 1]);
        fit(grid.values[i][j - 1], w0, grid.values[i][j + 1], hv)
    } else {
        (0.0, 0.0)
    };
    Ok(MinimumReport::single(
        (grid.re_axis[i] + du, grid.im_axis[j] + dv),
        w0 + dwu + dwv,
        grid.convention,
    ))
}

/// Grids and reconstruction settings for simulated tomography of a cat.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographySetup {
    pub n_max: usize,
    pub phase_count: usize,
    pub x_axis: AxisSpec,
    pub recon: ReconstructionConfig,
}

impl TomographySetup {
    /// Defaults for the cat's mean photon number.
    pub fn for_cat(cat: &CatSpec) -> Self {
        let nbar = cat.mean_photons();
        Self {
            n_max: fock::default_n_max(nbar),
            phase_count: quadrature::DEFAULT_PHASE_COUNT,
            x_axis: quadrature::default_x_axis(nbar),
            recon: ReconstructionConfig::for_mean_photons(nbar),
        }
    }

    pub fn clean_table(&self, cat: &CatSpec) -> Result<QuadratureTable> {
        let state = make_cat(cat, self.n_max)?;
        let x = self.x_axis.points()?;
        quadrature::build_table(&state, &quadrature::default_phases(self.phase_count), &x)
    }

    pub fn reconstructor(&self) -> Result<Reconstructor> {
        Reconstructor::new(self.recon, &self.x_axis.points()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    /// W at the probe point: value = mean over runs, stddev with n − 1.
    pub minimum: MinimumReport,
    /// Reconstruction of the unperturbed table at the probe point.
    pub clean_value: f64,
    /// Per-run values in run order.
    pub samples: Vec<f64>,
    pub noise: NoiseSpec,
}

/// Mean and sample standard deviation (n − 1; zero for a single sample).
pub fn mean_and_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Perturb → reconstruct → evaluate at `probe`, once per run. Runs execute in
/// parallel; results are gathered in run order.
pub fn monte_carlo_study(
    cat: &CatSpec,
    noise: &NoiseSpec,
    setup: &TomographySetup,
    probe: (f64, f64),
    convention: Convention,
) -> Result<MonteCarloReport> {
    noise.validate()?;
    let table = setup.clean_table(cat)?;
    let rec = setup.reconstructor()?;
    let alpha = C64::new(probe.0, probe.1);
    let scale = convention.scale();
    let clean_value = rec.evaluate_at(&table, alpha)? * scale;
    let samples = (0..noise.runs)
        .into_par_iter()
        .map(|run| {
            let noisy = perturb(&table, noise, run)?;
            Ok(rec.evaluate_at(&noisy, alpha)? * scale)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stddev) = mean_and_stddev(&samples);
    Ok(MonteCarloReport {
        minimum: MinimumReport { location: probe, value: mean, mean, stddev, convention },
        clean_value,
        samples,
        noise: *noise,
    })
}
