//! Pure states of a single optical mode in a truncated photon-number basis.
//!
//! Amplitudes are stored for |0⟩ … |n_max⟩. Coherent states are built from
//! the recurrence c_{n+1} = c_n β / √(n+1) and are *not* renormalised after
//! truncation, so their norm is 1 − leakage. Displacement uses the closed-form
//! matrix elements ⟨m|D(α)|n⟩ in terms of associated Laguerre polynomials.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum tail probability a coherent state may lose to truncation.
pub const LEAKAGE_TOL: f64 = 1e-10;
/// Norms below this are treated as the zero vector.
pub const ZERO_NORM_TOL: f64 = 1e-14;
/// Maximum relative norm loss tolerated by [`displace`].
pub const DISPLACEMENT_LEAK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a Fock vector needs n_max >= 1, got {} amplitudes",
                amps.len()
            )));
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn zeros(n_max: usize) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); n_max + 1])
    }

    /// The number state |n⟩.
    pub fn number_state(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidArgument(format!(
                "number state |{n}> does not fit in n_max = {n_max}"
            )));
        }
        let mut state = Self::zeros(n_max)?;
        state.amps[n] = C64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn vacuum(n_max: usize) -> Result<Self> {
        Self::number_state(0, n_max)
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    /// Zero-pads or truncates to a new cutoff.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(n_max.max(1) + 1, C64::new(0.0, 0.0));
        Self { amps }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { amps: self.amps.iter().map(|c| c * factor).collect() }
    }
}

/// ln(k!) for k = 0..=n.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson tail Σ_{n > n_max} e^{-|β|²} |β|^{2n} / n!.
pub fn coherent_leakage(beta: C64, n_max: usize) -> f64 {
    let x = beta.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let lnf = ln_factorials(n_max + 1);
    let mut n = n_max + 1;
    let mut term = (-x + n as f64 * x.ln() - lnf[n]).exp();
    let mut tail = 0.0;
    loop {
        tail += term;
        n += 1;
        term *= x / n as f64;
        if (n as f64 > x && term <= tail * 1e-17) || term < 1e-300 {
            break;
        }
    }
    tail
}

/// Truncation used by default for a coherent amplitude of the given mean
/// photon number.
pub fn default_n_max(mean_photons: f64) -> usize {
    if mean_photons <= 5.0 + 1e-9 {
        50
    } else if mean_photons <= 10.0 + 1e-9 {
        60
    } else {
        let beta = C64::new(mean_photons.sqrt(), 0.0);
        let mut n = mean_photons.ceil() as usize;
        while coherent_leakage(beta, n) > LEAKAGE_TOL {
            n += 1;
        }
        n + 20
    }
}

pub fn coherent_state(beta: C64, n_max: usize) -> Result<FockVector> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(Error::InvalidArgument("non-finite coherent amplitude".into()));
    }
    let leak = coherent_leakage(beta, n_max);
    if leak > LEAKAGE_TOL {
        return Err(Error::Truncation(format!(
            "coherent state |β|² = {:.4} leaks {leak:.3e} beyond n_max = {n_max}",
            beta.norm_sqr()
        )));
    }
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut c = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 0..n_max {
        c = c * beta / ((n + 1) as f64).sqrt();
        amps.push(c);
    }
    FockVector::new(amps)
}

/// Unnormalised linear combination Σ_i coeff_i |state_i⟩.
pub fn superpose(terms: &[(C64, &FockVector)]) -> Result<FockVector> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidArgument("superpose needs at least one term".into()))?;
    let dim = first.amps.len();
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (coeff, state) in terms {
        if state.amps.len() != dim {
            return Err(Error::DimensionMismatch { left: dim - 1, right: state.n_max() });
        }
        for (acc, c) in amps.iter_mut().zip(&state.amps) {
            *acc += coeff * c;
        }
    }
    FockVector::new(amps)
}

pub fn normalize(state: &FockVector) -> Result<FockVector> {
    let norm = state.norm_sqr().sqrt();
    if norm <= ZERO_NORM_TOL {
        return Err(Error::ZeroNorm(norm));
    }
    Ok(state.scaled(C64::new(1.0 / norm, 0.0)))
}

/// ⟨a|b⟩, conjugate-linear in `a`.
pub fn inner_product(a: &FockVector, b: &FockVector) -> Result<C64> {
    if a.amps.len() != b.amps.len() {
        return Err(Error::DimensionMismatch { left: a.n_max(), right: b.n_max() });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// |⟨a|b⟩|² / (‖a‖²‖b‖²); insensitive to global phase. Vectors of different
/// cutoff are compared in the larger space.
pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    let n = a.n_max().max(b.n_max());
    let (a, b) = (a.resized(n), b.resized(n));
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na <= ZERO_NORM_TOL * ZERO_NORM_TOL || nb <= ZERO_NORM_TOL * ZERO_NORM_TOL {
        return Err(Error::ZeroNorm(na.min(nb).sqrt()));
    }
    Ok(inner_product(&a, &b)?.norm_sqr() / (na * nb))
}

/// Working cutoff used when displacing a state of cutoff `n_max` by `alpha`.
pub fn displacement_work_dim(n_max: usize, alpha: C64) -> usize {
    n_max + (8.0 * alpha.norm()).ceil() as usize + 20
}

/// Applies D(α) = exp(α a† − ᾱ a). The result lives in the enlarged cutoff
/// [`displacement_work_dim`]; `alpha == 0` returns the input unchanged.
pub fn displace(state: &FockVector, alpha: C64) -> Result<FockVector> {
    if alpha == C64::new(0.0, 0.0) {
        return Ok(state.clone());
    }
    let n_in = state.n_max();
    let n_work = displacement_work_dim(n_in, alpha);
    let x = alpha.norm_sqr();
    let r = alpha.norm();
    let ln_r = r.ln();
    let unit = alpha / r;
    let lnf = ln_factorials(n_work);
    let c = &state.amps;
    let mut out = vec![C64::new(0.0, 0.0); n_work + 1];

    // lower triangle and diagonal: m = n + k,
    //   ⟨m|D|n⟩ = √(n!/m!) α^k e^{-x/2} L_n^{(k)}(x)
    for k in 0..=n_work {
        let phase = unit.powu(k as u32);
        let kf = k as f64;
        let (mut l_prev, mut l_cur) = (0.0, 1.0);
        for n in 0..=n_in.min(n_work - k) {
            if n == 1 {
                l_prev = 1.0;
                l_cur = 1.0 + kf - x;
            } else if n > 1 {
                let nf = (n - 1) as f64;
                let next = ((2.0 * nf + 1.0 + kf - x) * l_cur - (nf + kf) * l_prev) / (nf + 1.0);
                l_prev = l_cur;
                l_cur = next;
            }
            let mag = (-0.5 * x + 0.5 * (lnf[n] - lnf[n + k]) + kf * ln_r).exp();
            out[n + k] += phase * (mag * l_cur) * c[n];
        }
    }
    // upper triangle: n = m + k, k ≥ 1,
    //   ⟨m|D|n⟩ = √(m!/n!) (−ᾱ)^k e^{-x/2} L_m^{(k)}(x)
    let neg_unit_conj = -unit.conj();
    for k in 1..=n_in {
        let phase = neg_unit_conj.powu(k as u32);
        let kf = k as f64;
        let (mut l_prev, mut l_cur) = (0.0, 1.0);
        for m in 0..=(n_in - k) {
            if m == 1 {
                l_prev = 1.0;
                l_cur = 1.0 + kf - x;
            } else if m > 1 {
                let mf = (m - 1) as f64;
                let next = ((2.0 * mf + 1.0 + kf - x) * l_cur - (mf + kf) * l_prev) / (mf + 1.0);
                l_prev = l_cur;
                l_cur = next;
            }
            let mag = (-0.5 * x + 0.5 * (lnf[m] - lnf[m + k]) + kf * ln_r).exp();
            out[m] += phase * (mag * l_cur) * c[m + k];
        }
    }

    let result = FockVector::new(out)?;
    let norm_in = state.norm_sqr();
    let loss = norm_in - result.norm_sqr();
    if loss > DISPLACEMENT_LEAK_TOL * norm_in.max(ZERO_NORM_TOL) {
        return Err(Error::Truncation(format!(
            "displacement by |α| = {r:.3} lost {loss:.3e} of the norm at n_work = {n_work}"
        )));
    }
    Ok(result)
}

/// ⟨(−1)^n̂⟩ for a normalised state.
pub fn parity_expectation(state: &FockVector) -> f64 {
    state
        .amps
        .iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() })
        .sum()
}

pub fn mean_photon_number(state: &FockVector) -> f64 {
    state.amps.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
}
