use crate::error::{Error, Result};
use crate::spin::{adjacent_gaps, effective_qudit_levels, fit_hyperfine_from_frequencies, HyperfineParams, BRANCH_MINUS};
use crate::units::GHZ;
use serde::{Deserialize, Serialize};

/// Adjacent-level transition of the qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transition {
    #[serde(rename = "01")]
    T01,
    #[serde(rename = "12")]
    T12,
    #[serde(rename = "23")]
    T23,
}

impl Transition {
    pub const ALL: [Self; 3] = [Self::T01, Self::T12, Self::T23];

    pub fn index(self) -> usize {
        match self {
            Self::T01 => 0,
            Self::T12 => 1,
            Self::T23 => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn lower(self) -> usize {
        self.index()
    }

    pub fn upper(self) -> usize {
        self.index() + 1
    }
}

/// Four qudit level energies (GHz) in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuditLevels {
    pub energies_ghz: [f64; 4],
}

impl QuditLevels {
    pub fn from_hyperfine(hf: &HyperfineParams, branch_jz: f64) -> Self {
        Self { energies_ghz: effective_qudit_levels(hf, branch_jz) }
    }

    /// Levels on the `J_z = −6` branch reproducing the given adjacent frequencies.
    pub fn from_frequencies(nu01: f64, nu12: f64, nu23: f64) -> Result<Self> {
        let fit = fit_hyperfine_from_frequencies(nu01, nu12, nu23)?;
        let hf = HyperfineParams { a_hf: fit.a_hf, p_quad: fit.p_quad, ..Default::default() };
        Ok(Self::from_hyperfine(&hf, BRANCH_MINUS))
    }

    /// Signed transition frequency `E(upper) − E(lower)`, Hz.
    pub fn transition_hz(&self, t: Transition) -> f64 {
        adjacent_gaps(&self.energies_ghz)[t.index()] * GHZ
    }

    /// Tone frequency resonant with `t`, GHz.
    pub fn resonance_ghz(&self, t: Transition) -> f64 {
        adjacent_gaps(&self.energies_ghz)[t.index()].abs()
    }

    /// Lab-frame energies relative to level 0, Hz.
    pub fn relative_hz(&self) -> [f64; 4] {
        self.energies_ghz.map(|e| (e - self.energies_ghz[0]) * GHZ)
    }
}

impl Default for QuditLevels {
    fn default() -> Self {
        Self::from_hyperfine(&HyperfineParams::default(), BRANCH_MINUS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseTone {
    pub freq_ghz: f64,
    /// On-resonance Rabi frequency Ω/2π of the targeted transition, MHz.
    pub rabi_mhz: f64,
    #[serde(default)]
    pub phase_rad: f64,
    pub target: Transition,
}

impl PulseTone {
    pub fn resonant(levels: &QuditLevels, target: Transition, rabi_mhz: f64, phase_rad: f64) -> Self {
        Self { freq_ghz: levels.resonance_ghz(target), rabi_mhz, phase_rad, target }
    }
}

/// Rectangular multi-tone segment; no tones means free evolution.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSegment {
    #[serde(default)]
    pub tones: Vec<PulseTone>,
    pub duration_s: f64,
}

impl PulseSegment {
    pub fn new(tones: Vec<PulseTone>, duration_s: f64) -> Self {
        Self { tones, duration_s }
    }

    pub fn delay(duration_s: f64) -> Self {
        Self { tones: Vec::new(), duration_s }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return Err(Error::InvalidInput(format!("segment duration {} must be ≥ 0", self.duration_s)));
        }
        let mut seen = [false; 3];
        for tone in &self.tones {
            if !(tone.freq_ghz.is_finite() && tone.freq_ghz > 0.0) {
                return Err(Error::InvalidInput(format!("tone frequency {} GHz must be > 0", tone.freq_ghz)));
            }
            if !(tone.rabi_mhz.is_finite() && tone.rabi_mhz >= 0.0) {
                return Err(Error::InvalidInput(format!("tone Rabi frequency {} MHz must be ≥ 0", tone.rabi_mhz)));
            }
            if !tone.phase_rad.is_finite() {
                return Err(Error::InvalidInput("tone phase must be finite".into()));
            }
            let i = tone.target.index();
            if seen[i] {
                return Err(Error::InvalidInput(format!(
                    "two tones target transition {:?}; superpose their amplitudes instead",
                    tone.target
                )));
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// Same segment with every tone phase advanced by π.
    pub fn phase_inverted(&self) -> Self {
        let tones = self
            .tones
            .iter()
            .map(|t| PulseTone { phase_rad: t.phase_rad + std::f64::consts::PI, ..*t })
            .collect();
        Self { tones, duration_s: self.duration_s }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseSequence {
    pub segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Self {
        Self { segments }
    }

    pub fn single(segment: PulseSegment) -> Self {
        Self { segments: vec![segment] }
    }

    pub fn duration_s(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn then(mut self, other: &PulseSequence) -> Self {
        self.segments.extend(other.segments.iter().cloned());
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.segments.iter().try_for_each(PulseSegment::validate)
    }
}
