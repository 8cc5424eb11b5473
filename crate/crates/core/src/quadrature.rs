//! Homodyne quadrature distributions p(x, φ).
//!
//! The quadrature is x_φ = ½(a e^{−iφ} + a† e^{iφ}), so the vacuum variance is
//! 1/4 and a coherent state |β⟩ is centred at Re(β e^{−iφ}). The position
//! wavefunctions are h_n(x) = 2^{1/4} ψ_n(√2 x), with ψ_n the standard
//! Hermite functions, generated by the three-term recurrence.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::grid;

/// Tabulated p(x, φ): `density[i][k]` is the density at `phases[i]`,
/// `x_grid[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureTable {
    pub phases: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub density: Vec<Vec<f64>>,
}

/// The n-th of `count` phases n·(π/2)/(count−1) spanning [0, π/2].
pub fn default_phases(count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![0.0];
    }
    (0..count).map(|n| n as f64 * (PI / 2.0) / (count - 1) as f64).collect()
}

pub const DEFAULT_PHASE_COUNT: usize = 11;

/// Default x grid: ±6 for n̄ ≤ 5, ±8 above, step 0.01.
pub fn default_x_axis(mean_photons: f64) -> grid::AxisSpec {
    let half = if mean_photons <= 5.0 + 1e-9 { 6.0 } else { 8.0 };
    grid::AxisSpec { min: -half, max: half, step: 0.01 }
}

/// Rows h_0 … h_{n_max} evaluated on `x_grid`.
pub fn quadrature_wavefunctions(n_max: usize, x_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    grid::check_increasing(x_grid, "x grid")?;
    let k = x_grid.len();
    let mut rows = vec![vec![0.0; k]; n_max + 1];
    let pref = (2.0 / PI).powf(0.25);
    for (col, &x) in x_grid.iter().enumerate() {
        let y = std::f64::consts::SQRT_2 * x;
        let mut prev = 0.0;
        let mut cur = pref * (-x * x).exp();
        rows[0][col] = cur;
        for n in 0..n_max {
            let next = (2.0 / (n + 1) as f64).sqrt() * y * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
            prev = cur;
            cur = next;
            rows[n + 1][col] = cur;
        }
    }
    Ok(rows)
}

fn distribution_from_rows(state: &FockVector, phi: f64, rows: &[Vec<f64>]) -> Vec<f64> {
    let k = rows[0].len();
    let mut amp = vec![C64::new(0.0, 0.0); k];
    for (n, (c, row)) in state.amplitudes().iter().zip(rows).enumerate() {
        let w = c * C64::from_polar(1.0, -(n as f64) * phi);
        if w == C64::new(0.0, 0.0) {
            continue;
        }
        for (a, h) in amp.iter_mut().zip(row) {
            *a += w * h;
        }
    }
    amp.iter().map(|a| a.norm_sqr()).collect()
}

/// p(x, φ) = |Σ_n c_n e^{−inφ} h_n(x)|².
pub fn quadrature_distribution(state: &FockVector, phi: f64, x_grid: &[f64]) -> Result<Vec<f64>> {
    let rows = quadrature_wavefunctions(state.n_max(), x_grid)?;
    Ok(distribution_from_rows(state, phi, &rows))
}

pub fn build_table(state: &FockVector, phases: &[f64], x_grid: &[f64]) -> Result<QuadratureTable> {
    if phases.is_empty() || phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("phase list must be non-empty and finite".into()));
    }
    let rows = quadrature_wavefunctions(state.n_max(), x_grid)?;
    let density = phases.par_iter().map(|phi| distribution_from_rows(state, *phi, &rows)).collect();
    Ok(QuadratureTable { phases: phases.to_vec(), x_grid: x_grid.to_vec(), density })
}

impl QuadratureTable {
    pub fn new(phases: Vec<f64>, x_grid: Vec<f64>, density: Vec<Vec<f64>>) -> Result<Self> {
        grid::check_increasing(&x_grid, "x grid")?;
        if density.len() != phases.len() || density.iter().any(|r| r.len() != x_grid.len()) {
            return Err(Error::InvalidArgument("density shape does not match phases × x grid".into()));
        }
        Ok(Self { phases, x_grid, density })
    }

    /// Trapezoidal ∫p(x, φ)dx for each phase.
    pub fn row_integrals(&self) -> Vec<f64> {
        self.density.iter().map(|row| grid::trapezoid(&self.x_grid, row)).collect()
    }

    /// a·self + b·other on identical grids.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.phases != other.phases || self.x_grid != other.x_grid {
            return Err(Error::InvalidArgument("tables must share phases and x grid".into()));
        }
        let density = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(p, q)| a * p + b * q).collect())
            .collect();
        Ok(Self { phases: self.phases.clone(), x_grid: self.x_grid.clone(), density })
    }

    /// Records `phi,x,p`, phase-major.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["phi", "x", "p"])?;
        for (phi, row) in self.phases.iter().zip(&self.density) {
            for (x, p) in self.x_grid.iter().zip(row) {
                wtr.write_record([phi.to_string(), x.to_string(), p.to_string()])?;
            }
        }
        wtr.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["phi", "x", "p"] {
            return Err(Error::Csv("expected header phi,x,p".into()));
        }
        let mut phases: Vec<f64> = Vec::new();
        let mut x_grid: Vec<f64> = Vec::new();
        let mut density: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Csv("short record".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Csv(e.to_string()))
            };
            let (phi, x, p) = (field(0)?, field(1)?, field(2)?);
            if phases.last() != Some(&phi) {
                phases.push(phi);
                density.push(Vec::new());
            }
            if phases.len() == 1 {
                x_grid.push(x);
            }
            let row = density.last_mut().expect("row pushed above");
            if x_grid.get(row.len()) != Some(&x) {
                return Err(Error::Csv("records do not form a phase × x table".into()));
            }
            row.push(p);
        }
        if density.is_empty() {
            return Err(Error::Csv("empty table".into()));
        }
        Self::new(phases, x_grid, density).map_err(|e| Error::Csv(e.to_string()))
    }
}
