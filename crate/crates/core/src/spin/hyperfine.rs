//! Effective four-level nuclear qudit on a frozen `J_z = ±6` branch.
//!
//! Only the Ising part of the hyperfine coupling survives on a pure
//! `|J_z⟩` branch, so `E(m_I) = A·J_z·m_I + P·(m_I² − I(I+1)/3)`.

use super::params::HyperfineParams;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nuclear projection `m_I`, stored as `2·m_I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NuclearLabel(i8);

impl NuclearLabel {
    pub const PLUS_3_2: Self = Self(3);
    pub const PLUS_1_2: Self = Self(1);
    pub const MINUS_1_2: Self = Self(-1);
    pub const MINUS_3_2: Self = Self(-3);

    /// Qudit basis order `|+3/2⟩, |+1/2⟩, |−1/2⟩, |−3/2⟩`.
    pub const ALL: [Self; 4] = [Self::PLUS_3_2, Self::PLUS_1_2, Self::MINUS_1_2, Self::MINUS_3_2];

    pub fn new(m_i: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| (l.value() - m_i).abs() < 1e-9)
            .ok_or_else(|| Error::InvalidInput(format!("m_I = {m_i} is not one of ±1/2, ±3/2")))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn index(self) -> usize {
        ((3 - self.0) / 2) as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

impl TryFrom<f64> for NuclearLabel {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<NuclearLabel> for f64 {
    fn from(l: NuclearLabel) -> f64 {
        l.value()
    }
}

impl std::fmt::Display for NuclearLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.0 > 0 { '+' } else { '-' };
        write!(f, "{sign}{}/2", self.0.abs())
    }
}

/// Electronic branch the nuclear qudit lives on.
pub const BRANCH_MINUS: f64 = -6.0;
pub const BRANCH_PLUS: f64 = 6.0;

/// Four level energies (GHz) in qudit basis order.
pub fn effective_qudit_levels(hf: &HyperfineParams, branch_jz: f64) -> [f64; 4] {
    let x = hf.nuclear_spin.casimir() / 3.0;
    NuclearLabel::ALL.map(|l| {
        let m = l.value();
        hf.a_hf * branch_jz * m + hf.p_quad * (m * m - x)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperfineFit {
    pub a_hf: f64,
    pub p_quad: f64,
    /// Euclidean norm of the linear-model residuals, GHz.
    pub residual: f64,
}

/// Least-squares `A_hf`, `P` from the three adjacent transition frequencies
/// (GHz), assigned in ascending `|m_I|` order on the `J_z = −6` branch:
/// `ν₁₂ = 6A`, `ν₁₂ − ν₀₁ = 2P`, `ν₂₃ − ν₁₂ = 2P`.
pub fn fit_hyperfine_from_frequencies(nu01: f64, nu12: f64, nu23: f64) -> Result<HyperfineFit> {
    for (name, v) in [("nu01", nu01), ("nu12", nu12), ("nu23", nu23)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
    }
    let jz = BRANCH_MINUS.abs();
    let a_hf = nu12 / jz;
    let lower = nu12 - nu01;
    let upper = nu23 - nu12;
    let p_quad = (lower + upper) / 4.0;
    let residual = ((lower - 2.0 * p_quad).powi(2) + (upper - 2.0 * p_quad).powi(2)).sqrt();
    Ok(HyperfineFit { a_hf, p_quad, residual })
}

/// Adjacent gaps `E(i+1) − E(i)` of a level set.
pub fn adjacent_gaps(levels: &[f64; 4]) -> [f64; 3] {
    [levels[1] - levels[0], levels[2] - levels[1], levels[3] - levels[2]]
}
