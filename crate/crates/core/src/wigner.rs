//! Reference Wigner functions.
//!
//! Two independent evaluators: a closed form for finite superpositions of
//! coherent states, and the displaced-parity identity
//! W(α) = (2/π)⟨D(α) Π D†(α)⟩ for arbitrary Fock vectors. Both return the
//! "phys" normalisation ∫∫W d(Re α) d(Im α) = 1, whose vacuum peak is 2/π.
//! The "paper" convention rescales by 2π (vacuum peak 4).

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, ZERO_NORM_TOL};
use crate::grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Phys,
    Paper,
}

impl Convention {
    /// Multiplier applied to phys-convention values.
    pub fn scale(self) -> f64 {
        match self {
            Convention::Phys => 1.0,
            Convention::Paper => 2.0 * PI,
        }
    }

    pub fn convert(self, value: f64, to: Convention) -> f64 {
        value / self.scale() * to.scale()
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phys" => Ok(Convention::Phys),
            "paper" => Ok(Convention::Paper),
            other => Err(Error::InvalidArgument(format!("unknown convention {other:?}"))),
        }
    }
}

/// A phase-space quasiprobability in the phys convention.
pub trait WignerFunction: Sync {
    fn wigner(&self, alpha: C64) -> Result<f64>;
}

impl<F> WignerFunction for F
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    fn wigner(&self, alpha: C64) -> Result<f64> {
        self(alpha)
    }
}

/// Σ_i c_i |β_i⟩ as a list of (coefficient, coherent amplitude) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition {
    terms: Vec<(C64, C64)>,
    normalized: bool,
}

impl Superposition {
    pub fn new(terms: Vec<(C64, C64)>) -> Self {
        Self { terms, normalized: true }
    }

    /// Evaluate without dividing by ⟨ψ|ψ⟩ (the Wigner symbol of |ψ⟩⟨ψ| as
    /// written).
    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn terms(&self) -> &[(C64, C64)] {
        &self.terms
    }

    /// ⟨ψ|ψ⟩ = Σ_ij c_i c̄_j ⟨β_j|β_i⟩.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for (ci, bi) in &self.terms {
            for (cj, bj) in &self.terms {
                let overlap = (-0.5 * bi.norm_sqr() - 0.5 * bj.norm_sqr() + bj.conj() * bi).exp();
                acc += ci * cj.conj() * overlap;
            }
        }
        acc.re
    }

    pub fn to_fock(&self, n_max: usize) -> Result<FockVector> {
        let states = self
            .terms
            .iter()
            .map(|(_, b)| fock::coherent_state(*b, n_max))
            .collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(C64, &FockVector)> = self.terms.iter().map(|(c, _)| *c).zip(&states).collect();
        let raw = fock::superpose(&pairs)?;
        if self.normalized {
            fock::normalize(&raw)
        } else {
            Ok(raw)
        }
    }
}

impl WignerFunction for Superposition {
    fn wigner(&self, alpha: C64) -> Result<f64> {
        if self.terms.is_empty() {
            return Err(Error::InvalidArgument("superposition has no terms".into()));
        }
        let norm = if self.normalized { self.norm_sqr() } else { 1.0 };
        if norm <= ZERO_NORM_TOL {
            return Err(Error::ZeroNorm(norm.max(0.0).sqrt()));
        }
        let a2 = alpha.norm_sqr();
        let mut acc = C64::new(0.0, 0.0);
        for (ci, bi) in &self.terms {
            for (cj, bj) in &self.terms {
                let exponent = -2.0 * a2 + 2.0 * bi * alpha.conj() + 2.0 * bj.conj() * alpha
                    - bi * bj.conj()
                    - 0.5 * bi.norm_sqr()
                    - 0.5 * bj.norm_sqr();
                acc += ci * cj.conj() * exponent.exp();
            }
        }
        debug_assert!(acc.im.abs() <= 1e-12 * acc.norm().max(1.0));
        Ok(2.0 / (PI * norm) * acc.re)
    }
}

/// Closed-form W(α) of a normalised coherent superposition.
pub fn wigner_superposition(terms: &[(C64, C64)], alpha: C64) -> Result<f64> {
    Superposition::new(terms.to_vec()).wigner(alpha)
}

/// W(α) = (2/π) ⟨(−1)^n̂⟩ evaluated on D(−α)|ψ⟩.
pub fn wigner_displaced_parity(state: &FockVector, alpha: C64) -> Result<f64> {
    let norm = state.norm_sqr();
    if norm <= ZERO_NORM_TOL {
        return Err(Error::ZeroNorm(norm.sqrt()));
    }
    let shifted = fock::displace(state, -alpha)?;
    Ok(2.0 / PI * fock::parity_expectation(&shifted) / norm)
}

impl WignerFunction for FockVector {
    fn wigner(&self, alpha: C64) -> Result<f64> {
        wigner_displaced_parity(self, alpha)
    }
}

/// Wigner values on a rectangular (Re α, Im α) grid; `values[i][j]` is at
/// (re_axis[i], im_axis[j]).
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub convention: Convention,
}

impl WignerGrid {
    pub fn to_convention(&self, convention: Convention) -> Self {
        let factor = convention.scale() / self.convention.scale();
        Self {
            re_axis: self.re_axis.clone(),
            im_axis: self.im_axis.clone(),
            values: self.values.iter().map(|row| row.iter().map(|v| v * factor).collect()).collect(),
            convention,
        }
    }

    /// Trapezoidal ∫∫W, in the grid's own convention.
    pub fn integral(&self) -> f64 {
        let wr = grid::trapezoid_weights(&self.re_axis);
        let wi = grid::trapezoid_weights(&self.im_axis);
        self.values
            .iter()
            .zip(&wr)
            .map(|(row, a)| a * row.iter().zip(&wi).map(|(v, b)| v * b).sum::<f64>())
            .sum()
    }

    /// Smallest sample and its indices.
    pub fn argmin(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::INFINITY);
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v < best.2 {
                    best = (i, j, *v);
                }
            }
        }
        best
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Records `re,im,w`, Re-major.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["re", "im", "w"])?;
        for (re, row) in self.re_axis.iter().zip(&self.values) {
            for (im, w) in self.im_axis.iter().zip(row) {
                wtr.write_record([re.to_string(), im.to_string(), w.to_string()])?;
            }
        }
        wtr.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R, convention: Convention) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["re", "im", "w"] {
            return Err(Error::Csv("expected header re,im,w".into()));
        }
        let mut re_axis: Vec<f64> = Vec::new();
        let mut im_axis: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Csv("short record".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Csv(e.to_string()))
            };
            let (re, im, w) = (parse(0)?, parse(1)?, parse(2)?);
            if re_axis.last() != Some(&re) {
                re_axis.push(re);
                values.push(Vec::new());
            }
            if re_axis.len() == 1 {
                im_axis.push(im);
            }
            let row = values.last_mut().expect("row pushed above");
            if im_axis.get(row.len()) != Some(&im) {
                return Err(Error::Csv("records do not form a rectangular grid".into()));
            }
            row.push(w);
        }
        if values.iter().any(|r| r.len() != im_axis.len()) || values.is_empty() {
            return Err(Error::Csv("records do not form a rectangular grid".into()));
        }
        Ok(Self { re_axis, im_axis, values, convention })
    }
}

/// Dense evaluation of `f` (phys convention) on the grid, scaled to the
/// requested convention. Rows are computed in parallel; the output does not
/// depend on scheduling.
pub fn evaluate_grid<F: WignerFunction + ?Sized>(
    f: &F,
    re_axis: &[f64],
    im_axis: &[f64],
    convention: Convention,
) -> Result<WignerGrid> {
    grid::check_increasing(re_axis, "Re axis")?;
    grid::check_increasing(im_axis, "Im axis")?;
    let scale = convention.scale();
    let values = re_axis
        .par_iter()
        .map(|re| {
            im_axis
                .iter()
                .map(|im| f.wigner(C64::new(*re, *im)).map(|w| w * scale))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WignerGrid {
        re_axis: re_axis.to_vec(),
        im_axis: im_axis.to_vec(),
        values,
        convention,
    })
}
