//! Lindblad evolution with pure dephasing and adjacent-level relaxation.

use super::frame::SegmentFrame;
use super::pulse::{PulseSequence, QuditLevels};
use super::state::{Density, QuditState};
use crate::error::{Error, Result};
use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::TAU;

type Super = SMatrix<C64, 16, 16>;

mod lifetime {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(v: &[f64; N], s: S) -> std::result::Result<S::Ok, S::Error> {
        let out: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> std::result::Result<[f64; N], D::Error> {
        let raw: Vec<Option<f64>> = Vec::deserialize(d)?;
        let vals: Vec<f64> = raw.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect();
        vals.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::custom(format!("expected {N} lifetimes, got {}", v.len())))
    }
}

/// Coherence and population lifetimes, seconds; `∞` (JSON `null`) disables a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceParams {
    /// T₂* of transitions 01, 12, 23.
    #[serde(with = "lifetime")]
    pub t2star_s: [f64; 3],
    /// T₁ of `|+3/2⟩, |+1/2⟩, |−1/2⟩, |−3/2⟩`.
    #[serde(with = "lifetime")]
    pub t1_s: [f64; 4],
}

impl Default for DecoherenceParams {
    fn default() -> Self {
        Self::disabled()
    }
}

impl DecoherenceParams {
    pub fn disabled() -> Self {
        Self { t2star_s: [f64::INFINITY; 3], t1_s: [f64::INFINITY; 4] }
    }

    /// T₂* = 0.28/0.30/0.32 ms; T₁ = 34 s for ±3/2 and 17 s for ±1/2.
    pub fn measured() -> Self {
        Self { t2star_s: [0.28e-3, 0.30e-3, 0.32e-3], t1_s: [34.0, 17.0, 17.0, 34.0] }
    }

    pub fn is_disabled(&self) -> bool {
        self.t2star_s.iter().chain(&self.t1_s).all(|t| t.is_infinite())
    }

    pub fn diagnostics(&self, prefix: &str) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, t) in self.t2star_s.iter().enumerate() {
            if !(*t > 0.0) {
                out.push((format!("{prefix}.t2star_s[{i}]"), format!("must be > 0 or null, got {t}")));
            }
        }
        for (i, t) in self.t1_s.iter().enumerate() {
            if !(*t > 0.0) {
                out.push((format!("{prefix}.t1_s[{i}]"), format!("must be > 0 or null, got {t}")));
            }
        }
        out
    }

    /// Jump operators with their rates folded in.
    fn jump_operators(&self) -> Vec<Matrix4<C64>> {
        let mut ops = Vec::new();
        // level n carries the phase noise of every transition below it, so
        // coherence (i, j) dephases at Σ_{k∈[i,j)} 1/T₂*ₖ
        for (k, t2) in self.t2star_s.iter().enumerate() {
            if t2.is_finite() {
                let amp = (2.0 / t2).sqrt();
                ops.push(Matrix4::from_fn(|r, c| {
                    if r == c && r > k {
                        C64::new(amp, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }));
            }
        }
        for (i, t1) in self.t1_s.iter().enumerate() {
            if t1.is_finite() {
                let neighbours: Vec<usize> = [i.checked_sub(1), (i < 3).then_some(i + 1)].into_iter().flatten().collect();
                let rate = 1.0 / t1 / neighbours.len() as f64;
                for j in neighbours {
                    let mut l = Matrix4::<C64>::zeros();
                    l[(j, i)] = C64::new(rate.sqrt(), 0.0);
                    ops.push(l);
                }
            }
        }
        ops
    }
}

fn kron4(a: &Matrix4<C64>, b: &Matrix4<C64>) -> Super {
    Super::from_fn(|r, c| a[(r / 4, c / 4)] * b[(r % 4, c % 4)])
}

/// Column-stacked Liouvillian: `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
fn liouvillian(h_hz: &Matrix4<C64>, jumps: &[Matrix4<C64>]) -> Super {
    let id = Matrix4::<C64>::identity();
    let mi = C64::new(0.0, -TAU);
    let mut l = (kron4(&id, h_hz) - kron4(&h_hz.transpose(), &id)) * mi;
    for j in jumps {
        let jdj = j.adjoint() * j;
        l += kron4(&j.conjugate(), j);
        l -= kron4(&id, &jdj) * C64::new(0.5, 0.0);
        l -= kron4(&jdj.transpose(), &id) * C64::new(0.5, 0.0);
    }
    l
}

fn vec_of(r: &Density) -> SVector<C64, 16> {
    SVector::from_fn(|k, _| r[(k % 4, k / 4)])
}

fn unvec(v: &SVector<C64, 16>) -> Density {
    Density::from_fn(|r, c| v[c * 4 + r])
}

/// Master-equation evolution from absolute time 0.
pub fn evolve_open(
    state: &QuditState,
    seq: &PulseSequence,
    levels: &QuditLevels,
    dec: &DecoherenceParams,
) -> Result<QuditState> {
    evolve_open_at(state, seq, levels, dec, 0.0)
}

pub fn evolve_open_at(
    state: &QuditState,
    seq: &PulseSequence,
    levels: &QuditLevels,
    dec: &DecoherenceParams,
    t0: f64,
) -> Result<QuditState> {
    state.validate()?;
    seq.validate()?;
    let diag = dec.diagnostics("decoherence");
    if !diag.is_empty() {
        return Err(Error::InvalidInput(diag.into_iter().map(|(p, m)| format!("{p}: {m}")).collect::<Vec<_>>().join("; ")));
    }
    let jumps = dec.jump_operators();
    let mut rho = state.density();
    let mut t = t0;
    for seg in &seq.segments {
        let frame = SegmentFrame::new(levels, &seg.tones)?;
        let r0 = Matrix4::from_diagonal(&frame.rotation(t));
        let r1 = Matrix4::from_diagonal(&frame.rotation(t + seg.duration_s));
        let rot = r0.adjoint() * rho * r0;
        let prop = (liouvillian(&frame.hamiltonian, &jumps) * C64::new(seg.duration_s, 0.0)).exp();
        let evolved = unvec(&(prop * vec_of(&rot)));
        let lab = r1 * evolved * r1.adjoint();
        rho = (lab + lab.adjoint()) * C64::new(0.5, 0.0);
        t += seg.duration_s;
    }
    Ok(QuditState::Mixed(rho))
}
