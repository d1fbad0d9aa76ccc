//! Multi-rotating frame for rectangular multi-tone segments.
//!
//! Tone `k` on transition `k → k+1` sets that transition's frame frequency;
//! an undriven transition rotates at its bare frequency. Level `n` rotates at
//! `θ_n = Σ_{k<n} step_k` and carries the detuning `Σ_{k<n} δ_k` on the
//! diagonal, where `δ_k = ν_k − s_k f_k` and `s_k = sign(ν_k)`. Tone phases are
//! referenced to absolute time, so frames of different segments compose
//! through the lab frame.

use super::pulse::{PulseTone, QuditLevels};
use crate::error::{Error, Result};
use crate::spin::OperatorMatrix;
use crate::units::MHZ;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub(crate) struct SegmentFrame {
    /// Frame frequency of each level relative to level 0, Hz.
    pub frame_hz: [f64; 4],
    /// Constant rotating-wave Hamiltonian, Hz.
    pub hamiltonian: Matrix4<C64>,
}

impl SegmentFrame {
    pub fn new(levels: &QuditLevels, tones: &[PulseTone]) -> Result<Self> {
        let mut by_target: [Option<&PulseTone>; 3] = [None; 3];
        for tone in tones {
            let slot = &mut by_target[tone.target.index()];
            if slot.is_some() {
                return Err(Error::InvalidInput(format!(
                    "two tones target transition {:?}; superpose their amplitudes instead",
                    tone.target
                )));
            }
            *slot = Some(tone);
        }

        let mut h = Matrix4::<C64>::zeros();
        let mut frame_hz = [0.0; 4];
        let mut detuning = 0.0;
        for k in 0..3 {
            let nu = levels.transition_hz(super::Transition::from_index(k));
            let (step, coupling) = match by_target[k] {
                Some(tone) => {
                    let s = if nu >= 0.0 { 1.0 } else { -1.0 };
                    let f = tone.freq_ghz * crate::units::GHZ;
                    let half = 0.5 * tone.rabi_mhz * MHZ;
                    (s * f, C64::from_polar(half, s * tone.phase_rad))
                }
                None => (nu, C64::new(0.0, 0.0)),
            };
            frame_hz[k + 1] = frame_hz[k] + step;
            detuning += nu - step;
            h[(k + 1, k + 1)] = C64::new(detuning, 0.0);
            h[(k, k + 1)] = coupling;
            h[(k + 1, k)] = coupling.conj();
        }
        Ok(Self { frame_hz, hamiltonian: h })
    }

    /// Diagonal of `R(t) = diag(exp(−i2πθ_n t))`.
    pub fn rotation(&self, t: f64) -> Vector4<C64> {
        Vector4::from_fn(|n, _| C64::from_polar(1.0, -TAU * (self.frame_hz[n] * t).rem_euclid(1.0)))
    }
}

/// Time-independent rotating-wave drive Hamiltonian (entries in Hz).
pub fn drive_hamiltonian_rwa(levels: &QuditLevels, tones: &[PulseTone]) -> Result<OperatorMatrix> {
    let h = SegmentFrame::new(levels, tones)?.hamiltonian;
    Ok(OperatorMatrix::from_matrix(nalgebra::DMatrix::from_fn(4, 4, |r, c| h[(r, c)])))
}

/// `exp(−i2πHt)` for Hermitian `H` (Hz) and `t` in seconds.
pub(crate) fn expm_hermitian(h: &Matrix4<C64>, t: f64) -> Matrix4<C64> {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let v = eig.eigenvectors;
    let d = Matrix4::from_diagonal(&Vector4::from_fn(|k, _| {
        C64::from_polar(1.0, -TAU * eig.eigenvalues[k] * t)
    }));
    v * d * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Transition;

    #[test]
    fn no_tones_is_zero_in_bare_frame() {
        let l = QuditLevels::default();
        let h = drive_hamiltonian_rwa(&l, &[]).unwrap();
        assert!(h.max_abs() == 0.0);
    }

    #[test]
    fn single_resonant_tone() {
        let l = QuditLevels::default();
        let tone = PulseTone::resonant(&l, Transition::T01, 2.0, 0.0);
        let h = drive_hamiltonian_rwa(&l, &[tone]).unwrap();
        assert!((h.get(0, 1).re - 1e6).abs() < 1e-6);
        assert!((h.get(1, 0).re - 1e6).abs() < 1e-6);
        for n in 0..4 {
            assert!(h.get(n, n).norm() < 1e-3);
        }
        assert!(h.get(1, 2).norm() == 0.0 && h.get(2, 3).norm() == 0.0);
    }

    #[test]
    fn equal_resonant_tones_give_constant_tridiagonal() {
        let l = QuditLevels::default();
        let tones: Vec<_> = Transition::ALL.iter().map(|&t| PulseTone::resonant(&l, t, 4.0, 0.0)).collect();
        let h = drive_hamiltonian_rwa(&l, &tones).unwrap();
        for r in 0usize..4 {
            for c in 0..4 {
                let expect = if r.abs_diff(c) == 1 { 2e6 } else { 0.0 };
                assert!((h.get(r, c).re - expect).abs() < 1e-3, "({r},{c})");
                assert!(h.get(r, c).im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn detunings_accumulate_upward() {
        let l = QuditLevels::default();
        let d1 = 1e6;
        let d2 = -3e5;
        let t1 = PulseTone { freq_ghz: l.resonance_ghz(Transition::T01) - d1 / 1e9, ..PulseTone::resonant(&l, Transition::T01, 1.0, 0.0) };
        let t3 = PulseTone { freq_ghz: l.resonance_ghz(Transition::T23) - d2 / 1e9, ..PulseTone::resonant(&l, Transition::T23, 1.0, 0.0) };
        let h = drive_hamiltonian_rwa(&l, &[t1, t3]).unwrap();
        assert!(h.get(0, 0).re.abs() < 1e-6);
        assert!((h.get(1, 1).re - d1).abs() < 1e-2);
        assert!((h.get(2, 2).re - d1).abs() < 1e-2);
        assert!((h.get(3, 3).re - d1 - d2).abs() < 1e-2);
    }

    #[test]
    fn phase_enters_off_diagonal() {
        let l = QuditLevels::default();
        let tone = PulseTone::resonant(&l, Transition::T12, 2.0, 0.7);
        let h = drive_hamiltonian_rwa(&l, &[tone]).unwrap();
        assert!((h.get(1, 2) - C64::from_polar(1e6, 0.7)).norm() < 1e-6);
        assert!(h.hermitian_error() == 0.0);
    }

    #[test]
    fn duplicate_targets_rejected() {
        let l = QuditLevels::default();
        let tone = PulseTone::resonant(&l, Transition::T01, 1.0, 0.0);
        assert!(drive_hamiltonian_rwa(&l, &[tone, tone]).is_err());
    }
}
