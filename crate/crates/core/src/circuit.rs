//! Conditional-measurement cat generation and the polarisation Kerr gate.
//!
//! The interferometer is modelled abstractly: a Kerr cross-phase on one arm
//! entangles the signal photon's polarisation with a coherent probe, and a
//! projective measurement in the 45°/135° basis collapses the probe into a
//! superposition of two coherent states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, ZERO_NORM_TOL};
use crate::wigner::Superposition;

/// Signal-photon polarisation ⊗ probe mode, stored as the two mode branches
/// multiplying |H⟩ and |V⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    h: FockVector,
    v: FockVector,
}

impl HybridState {
    pub fn new(h: FockVector, v: FockVector) -> Result<Self> {
        if h.n_max() != v.n_max() {
            return Err(Error::DimensionMismatch { left: h.n_max(), right: v.n_max() });
        }
        Ok(Self { h, v })
    }

    pub fn h_branch(&self) -> &FockVector {
        &self.h
    }

    pub fn v_branch(&self) -> &FockVector {
        &self.v
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// Eigenvalues of the reduced polarisation density matrix, largest
    /// first; a product state has the second one equal to zero.
    pub fn schmidt_weights(&self) -> [f64; 2] {
        let n = self.norm_sqr();
        let a = self.h.norm_sqr() / n;
        let d = self.v.norm_sqr() / n;
        let b = fock::inner_product(&self.v, &self.h).expect("branches share n_max").norm() / n;
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean + disc, (mean - disc).max(0.0)]
    }
}

/// (|H⟩|βe^{iΔ}⟩ + |V⟩|β⟩)/√2: the horizontal branch crosses the Kerr cell
/// and picks up the phase Δ.
pub fn entangle_kerr(probe_beta: C64, kerr_phase: f64, n_max: usize) -> Result<HybridState> {
    let shifted = probe_beta * C64::from_polar(1.0, kerr_phase);
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let h = fock::coherent_state(shifted, n_max)?.scaled(s);
    let v = fock::coherent_state(probe_beta, n_max)?.scaled(s);
    HybridState::new(h, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationOutcome {
    Plus45,
    Minus45,
}

/// Projects the signal photon on (|H⟩ ± |V⟩)/√2. Returns the normalised
/// probe state and the outcome probability.
pub fn conditional_project(
    state: &HybridState,
    outcome: PolarizationOutcome,
) -> Result<(FockVector, f64)> {
    let sign = match outcome {
        PolarizationOutcome::Plus45 => 1.0,
        PolarizationOutcome::Minus45 => -1.0,
    };
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let branch = fock::superpose(&[(s, &state.h), (s * sign, &state.v)])?;
    let probability = branch.norm_sqr() / state.norm_sqr();
    if probability < ZERO_NORM_TOL {
        return Err(Error::ZeroNorm(probability.sqrt()));
    }
    Ok((fock::normalize(&branch)?, probability))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatSign {
    Plus,
    Minus,
}

/// How the two-branch superposition is scaled.
///
/// `Exact` divides by the true norm √(2 ± 2 Re⟨β₁|β₂⟩). `Nominal` uses the
/// bare 1/√2 of the conditional-projection formula, which ignores the branch
/// overlap; the two differ only when the coherent branches overlap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatNormalization {
    #[default]
    Exact,
    Nominal,
}

/// |r e^{iθ}⟩ ± |r e^{−iθ}⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub r: f64,
    pub theta: f64,
    pub sign: CatSign,
    #[serde(default)]
    pub normalization: CatNormalization,
}

impl CatSpec {
    pub fn new(r: f64, theta: f64, sign: CatSign) -> Result<Self> {
        let spec = Self { r, theta, sign, normalization: CatNormalization::Exact };
        spec.validate()?;
        Ok(spec)
    }

    pub fn even(r: f64, theta: f64) -> Result<Self> {
        Self::new(r, theta, CatSign::Plus)
    }

    pub fn with_normalization(mut self, normalization: CatNormalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidArgument(format!("cat amplitude r = {} must be > 0", self.r)));
        }
        if !(self.theta > 0.0 && self.theta <= PI / 2.0 + 1e-15) {
            return Err(Error::InvalidArgument(format!(
                "cat phase θ = {} must lie in (0, π/2]",
                self.theta
            )));
        }
        Ok(())
    }

    pub fn mean_photons(&self) -> f64 {
        self.r * self.r
    }

    /// The two coherent amplitudes r e^{iθ} and r e^{−iθ}.
    pub fn branches(&self) -> (C64, C64) {
        (C64::from_polar(self.r, self.theta), C64::from_polar(self.r, -self.theta))
    }

    fn relative_sign(&self) -> f64 {
        match self.sign {
            CatSign::Plus => 1.0,
            CatSign::Minus => -1.0,
        }
    }

    /// Coherent-superposition form, carrying the chosen normalisation.
    pub fn superposition(&self) -> Superposition {
        let (a, b) = self.branches();
        let sign = self.relative_sign();
        let base = Superposition::new(vec![(C64::new(1.0, 0.0), a), (C64::new(sign, 0.0), b)]);
        match self.normalization {
            CatNormalization::Exact => base,
            CatNormalization::Nominal => Superposition::new(vec![
                (C64::new(FRAC_1_SQRT_2, 0.0), a),
                (C64::new(sign * FRAC_1_SQRT_2, 0.0), b),
            ])
            .unnormalized(),
        }
    }

    /// Probe amplitude and Kerr phase that make [`entangle_kerr`] followed by
    /// a `Plus45`/`Minus45` projection produce this cat.
    pub fn kerr_inputs(&self) -> (C64, f64) {
        (C64::from_polar(self.r, -self.theta), 2.0 * self.theta)
    }
}

pub fn make_cat(spec: &CatSpec, n_max: usize) -> Result<FockVector> {
    spec.validate()?;
    let (a, b) = spec.branches();
    let ka = fock::coherent_state(a, n_max)?;
    let kb = fock::coherent_state(b, n_max)?;
    let raw = fock::superpose(&[(C64::new(1.0, 0.0), &ka), (C64::new(spec.relative_sign(), 0.0), &kb)])?;
    match spec.normalization {
        CatNormalization::Exact => fock::normalize(&raw),
        CatNormalization::Nominal => {
            if raw.norm_sqr().sqrt() <= ZERO_NORM_TOL {
                return Err(Error::ZeroNorm(raw.norm_sqr().sqrt()));
            }
            Ok(raw.scaled(C64::new(FRAC_1_SQRT_2, 0.0)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// Measurement basis for a single photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolBasis {
    /// |H⟩, |V⟩
    Rectilinear,
    /// |45⟩ = (|H⟩+|V⟩)/√2, |135⟩ = (|H⟩−|V⟩)/√2
    Diagonal,
}

impl PolBasis {
    fn labels(self) -> [&'static str; 2] {
        match self {
            PolBasis::Rectilinear => ["H", "V"],
            PolBasis::Diagonal => ["45", "135"],
        }
    }

    /// Rows are the basis bras in H/V components.
    fn bras(self) -> [[f64; 2]; 2] {
        match self {
            PolBasis::Rectilinear => [[1.0, 0.0], [0.0, 1.0]],
            PolBasis::Diagonal => [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]],
        }
    }
}

pub const POL_45: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
pub const POL_135: [f64; 2] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];

/// Amplitudes of k photons over {H,V}^k. Photon 0 is the most significant
/// bit of the index and a set bit means V.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationState {
    k: usize,
    amps: Vec<C64>,
}

impl PolarizationState {
    pub fn new(k: usize, amps: Vec<C64>) -> Result<Self> {
        if k == 0 || k > 16 {
            return Err(Error::InvalidArgument(format!("photon count {k} out of range 1..=16")));
        }
        if amps.len() != 1 << k {
            return Err(Error::DimensionMismatch { left: 1 << k, right: amps.len() });
        }
        Ok(Self { k, amps })
    }

    /// Product state ⊗_i (h_i|H⟩ + v_i|V⟩).
    pub fn product(photons: &[[C64; 2]]) -> Result<Self> {
        let k = photons.len();
        let mut amps = vec![C64::new(1.0, 0.0); 1 << k];
        for (idx, amp) in amps.iter_mut().enumerate() {
            for (i, p) in photons.iter().enumerate() {
                *amp *= p[(idx >> (k - 1 - i)) & 1];
            }
        }
        Self::new(k, amps)
    }

    pub fn photon_count(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Amplitude of a basis string such as `[H, V, V]`.
    pub fn amplitude(&self, pols: &[Polarization]) -> C64 {
        self.amps[self.index_of(pols)]
    }

    fn index_of(&self, pols: &[Polarization]) -> usize {
        assert_eq!(pols.len(), self.k);
        pols.iter().fold(0, |acc, p| (acc << 1) | usize::from(*p == Polarization::V))
    }

    /// Appends one more photon in the state h|H⟩ + v|V⟩.
    pub fn tensor(&self, photon: [C64; 2]) -> Result<Self> {
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        for a in &self.amps {
            amps.push(a * photon[0]);
            amps.push(a * photon[1]);
        }
        Self::new(self.k + 1, amps)
    }

    /// Applies a 2×2 unitary to one photon.
    pub fn apply_single(&self, photon: usize, u: [[C64; 2]; 2]) -> Result<Self> {
        if photon >= self.k {
            return Err(Error::Index { index: photon, count: self.k });
        }
        let bit = 1 << (self.k - 1 - photon);
        let mut amps = self.amps.clone();
        for idx in 0..amps.len() {
            if idx & bit == 0 {
                let (a0, a1) = (self.amps[idx], self.amps[idx | bit]);
                amps[idx] = u[0][0] * a0 + u[0][1] * a1;
                amps[idx | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Self::new(self.k, amps)
    }

    /// Amplitudes re-expressed with each photon in its chosen basis; index
    /// bit = 1 selects the second basis element (V or 135).
    pub fn amplitudes_in(&self, bases: &[PolBasis]) -> Vec<C64> {
        assert_eq!(bases.len(), self.k);
        let mut state = self.clone();
        for (i, b) in bases.iter().enumerate() {
            let m = b.bras();
            let u = [
                [C64::new(m[0][0], 0.0), C64::new(m[0][1], 0.0)],
                [C64::new(m[1][0], 0.0), C64::new(m[1][1], 0.0)],
            ];
            state = state.apply_single(i, u).expect("photon index in range");
        }
        state.amps
    }

    /// Probabilities of the two outcomes when photon `photon` alone is
    /// measured in `basis`.
    pub fn single_photon_probabilities(&self, photon: usize, basis: PolBasis) -> Result<[f64; 2]> {
        if photon >= self.k {
            return Err(Error::Index { index: photon, count: self.k });
        }
        let mut bases = vec![PolBasis::Rectilinear; self.k];
        bases[photon] = basis;
        let amps = self.amplitudes_in(&bases);
        let bit = 1 << (self.k - 1 - photon);
        let norm = self.norm_sqr();
        let mut probs = [0.0; 2];
        for (idx, a) in amps.iter().enumerate() {
            probs[usize::from(idx & bit != 0)] += a.norm_sqr() / norm;
        }
        Ok(probs)
    }

    /// Ket notation with the given per-photon bases, dropping amplitudes
    /// below 1e-12.
    pub fn ket_string(&self, bases: &[PolBasis]) -> String {
        let amps = self.amplitudes_in(bases);
        let mut terms = Vec::new();
        for (idx, a) in amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            let label: Vec<&str> = bases
                .iter()
                .enumerate()
                .map(|(i, b)| b.labels()[(idx >> (self.k - 1 - i)) & 1])
                .collect();
            let tidy = |v: f64| if v.abs() < 5e-7 { 0.0 } else { v };
            terms.push(format!("({:+.6}{:+.6}i)|{}>", tidy(a.re), tidy(a.im), label.join(",")));
        }
        terms.join(" + ")
    }
}

impl fmt::Display for PolarizationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ket_string(&vec![PolBasis::Rectilinear; self.k]))
    }
}

/// |⟨a|b⟩|² / (‖a‖²‖b‖²).
pub fn polarization_fidelity(a: &PolarizationState, b: &PolarizationState) -> Result<f64> {
    if a.k != b.k {
        return Err(Error::DimensionMismatch { left: a.k, right: b.k });
    }
    let ip: C64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr() / (a.norm_sqr() * b.norm_sqr()))
}

/// Cross-Kerr interaction between two photons: |V⟩|V⟩ → e^{iφ}|V⟩|V⟩, all
/// other basis pairs untouched. Photon indices are 0-based.
pub fn kerr_two_photon_gate(
    state: &PolarizationState,
    target_pair: (usize, usize),
    phase: f64,
) -> Result<PolarizationState> {
    let (i, j) = target_pair;
    for idx in [i, j] {
        if idx >= state.k {
            return Err(Error::Index { index: idx, count: state.k });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument(format!("Kerr gate needs two distinct photons, got ({i}, {j})")));
    }
    let mask = (1 << (state.k - 1 - i)) | (1 << (state.k - 1 - j));
    let rot = C64::from_polar(1.0, phase);
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(idx, a)| if idx & mask == mask { a * rot } else { *a })
        .collect();
    PolarizationState::new(state.k, amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] =
        [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn state(self) -> PolarizationState {
        let s = FRAC_1_SQRT_2;
        let amps = match self {
            BellState::PhiPlus => [s, 0.0, 0.0, s],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PsiMinus => [0.0, s, -s, 0.0],
        };
        PolarizationState::new(2, amps.iter().map(|a| C64::new(*a, 0.0)).collect())
            .expect("two-photon Bell state")
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi-plus",
            BellState::PhiMinus => "phi-minus",
            BellState::PsiPlus => "psi-plus",
            BellState::PsiMinus => "psi-minus",
        }
    }

    /// The expected three-photon output: the pair correlations of the Bell
    /// state, with photon 3 in |45⟩ when photon 2 is H and |135⟩ when V.
    pub fn ghz_target(self) -> PolarizationState {
        let s = FRAC_1_SQRT_2;
        let pol = |p: [f64; 2]| [C64::new(p[0], 0.0), C64::new(p[1], 0.0)];
        let h = pol([1.0, 0.0]);
        let v = pol([0.0, 1.0]);
        let (first, second, sign) = match self {
            BellState::PhiPlus => ([h, h, pol(POL_45)], [v, v, pol(POL_135)], 1.0),
            BellState::PhiMinus => ([h, h, pol(POL_45)], [v, v, pol(POL_135)], -1.0),
            BellState::PsiPlus => ([h, v, pol(POL_135)], [v, h, pol(POL_45)], 1.0),
            BellState::PsiMinus => ([h, v, pol(POL_135)], [v, h, pol(POL_45)], -1.0),
        };
        let a = PolarizationState::product(&first).expect("3 photons");
        let b = PolarizationState::product(&second).expect("3 photons");
        let amps = a.amps.iter().zip(&b.amps).map(|(x, y)| (x + y * sign) * s).collect();
        PolarizationState::new(3, amps).expect("3 photons")
    }
}

/// Conditional phase imprinted on |V⟩|V⟩ by the Kerr interaction in
/// [`make_ghz`]: π/2 acquired by each of the two interacting photons.
pub const GHZ_KERR_PHASE: f64 = PI;

/// Bell pair ⊗ |45⟩ followed by the Kerr gate between photons 2 and 3.
pub fn make_ghz(bell_input: BellState) -> PolarizationState {
    let third = [C64::new(POL_45[0], 0.0), C64::new(POL_45[1], 0.0)];
    let input = bell_input.state().tensor(third).expect("three photons");
    kerr_two_photon_gate(&input, (1, 2), GHZ_KERR_PHASE).expect("valid photon pair")
}

/// One row of the GHZ correlation check: photons 1 and 2 measured in H/V,
/// photon 3 in 45/135.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub outcome: [Polarization; 2],
    pub probability: f64,
    /// Conditional probability of 45 on photon 3.
    pub p45: f64,
    /// Conditional probability of 135 on photon 3.
    pub p135: f64,
}

impl CorrelationRow {
    /// max(p45, p135): 1 for a perfect prediction.
    pub fn predictability(&self) -> f64 {
        self.p45.max(self.p135)
    }
}

/// Outcome table for photons 1, 2 (H/V) against photon 3 (45/135); rows with
/// zero probability are dropped.
pub fn ghz_correlations(state: &PolarizationState) -> Result<Vec<CorrelationRow>> {
    if state.k != 3 {
        return Err(Error::DimensionMismatch { left: 3, right: state.k });
    }
    let amps = state.amplitudes_in(&[PolBasis::Rectilinear, PolBasis::Rectilinear, PolBasis::Diagonal]);
    let norm = state.norm_sqr();
    let pols = [Polarization::H, Polarization::V];
    let mut rows = Vec::new();
    for (i, p1) in pols.iter().enumerate() {
        for (j, p2) in pols.iter().enumerate() {
            let base = (i << 2) | (j << 1);
            let q45 = amps[base].norm_sqr() / norm;
            let q135 = amps[base | 1].norm_sqr() / norm;
            let probability = q45 + q135;
            if probability > 1e-14 {
                rows.push(CorrelationRow {
                    outcome: [*p1, *p2],
                    probability,
                    p45: q45 / probability,
                    p135: q135 / probability,
                });
            }
        }
    }
    Ok(rows)
}
