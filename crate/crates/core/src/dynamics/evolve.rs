use super::frame::{expm_hermitian, SegmentFrame};
use super::pulse::{PulseSegment, PulseSequence, QuditLevels};
use super::state::QuditState;
use crate::error::{Error, Result};
use crate::units::GHZ;
use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMethod {
    /// Exact propagator of the constant rotating-wave Hamiltonian.
    #[default]
    Rwa,
    /// Stepwise integration of the explicit cosine drives.
    LabFrame,
}

/// Lab-frame integrator settings: fourth-order Magnus steps no longer than
/// `1/(steps_per_period · ν_max)`, halved until populations move less than
/// `population_tol`.
#[derive(Debug, Clone, Copy)]
pub struct LabFrameOptions {
    pub steps_per_period: f64,
    pub population_tol: f64,
    pub max_refinements: u32,
    pub min_step_s: f64,
}

impl Default for LabFrameOptions {
    fn default() -> Self {
        Self { steps_per_period: 200.0, population_tol: 1e-6, max_refinements: 8, min_step_s: 1e-16 }
    }
}

fn apply(state: &QuditState, u: &Matrix4<C64>) -> QuditState {
    match state {
        QuditState::Pure(v) => QuditState::Pure(u * v),
        QuditState::Mixed(r) => {
            let out = u * r * u.adjoint();
            QuditState::Mixed((out + out.adjoint()) * C64::new(0.5, 0.0))
        }
    }
}

/// Lab-frame propagator of one segment from `t0` via the rotating-wave route.
pub(crate) fn rwa_segment_propagator(levels: &QuditLevels, seg: &PulseSegment, t0: f64) -> Result<Matrix4<C64>> {
    let frame = SegmentFrame::new(levels, &seg.tones)?;
    let u = expm_hermitian(&frame.hamiltonian, seg.duration_s);
    let r0 = Matrix4::from_diagonal(&frame.rotation(t0));
    let r1 = Matrix4::from_diagonal(&frame.rotation(t0 + seg.duration_s));
    Ok(r1 * u * r0.adjoint())
}

fn lab_hamiltonian(levels: &QuditLevels, seg: &PulseSegment, t: f64) -> Matrix4<C64> {
    let e = levels.relative_hz();
    let mut h = Matrix4::<C64>::zeros();
    for n in 0..4 {
        h[(n, n)] = C64::new(e[n], 0.0);
    }
    for tone in &seg.tones {
        let k = tone.target.index();
        let drive = tone.rabi_mhz * 1e6 * (TAU * (tone.freq_ghz * GHZ * t).rem_euclid(1.0) + tone.phase_rad).cos();
        h[(k, k + 1)] += C64::new(drive, 0.0);
        h[(k + 1, k)] += C64::new(drive, 0.0);
    }
    h
}

/// Fourth-order Magnus integration over `n` equal steps.
fn magnus_propagator(levels: &QuditLevels, seg: &PulseSegment, t0: f64, n: usize) -> Matrix4<C64> {
    let h = seg.duration_s / n as f64;
    let c = 3f64.sqrt() / 6.0;
    let mut u = Matrix4::<C64>::identity();
    for j in 0..n {
        let t = t0 + j as f64 * h;
        let h1 = lab_hamiltonian(levels, seg, t + (0.5 - c) * h);
        let h2 = lab_hamiltonian(levels, seg, t + (0.5 + c) * h);
        // Ω = −i2π(h/2)(H1+H2) + (√3 h²/12)(−i2π)²[H2, H1]; write Ω = −i2π·K·h
        let comm = h2 * h1 - h1 * h2;
        let k = (h1 + h2) * C64::new(0.5, 0.0) + comm * C64::new(0.0, -TAU * 3f64.sqrt() * h / 12.0);
        u = expm_hermitian(&k, h) * u;
    }
    u
}

fn labframe_segment(
    levels: &QuditLevels,
    seg: &PulseSegment,
    t0: f64,
    state: &QuditState,
    opts: &LabFrameOptions,
) -> Result<QuditState> {
    if seg.duration_s == 0.0 {
        return Ok(state.clone());
    }
    let mut nu_max: f64 = levels.relative_hz().iter().fold(0.0, |m, e| m.max(e.abs()));
    for tone in &seg.tones {
        nu_max = nu_max.max(tone.freq_ghz * GHZ);
    }
    let max_step = 1.0 / (opts.steps_per_period * nu_max.max(1.0));
    let mut n = (seg.duration_s / max_step).ceil().max(1.0) as usize;
    let mut prev = apply(state, &magnus_propagator(levels, seg, t0, n));
    for _ in 0..opts.max_refinements {
        n *= 2;
        let step = seg.duration_s / n as f64;
        if step < opts.min_step_s {
            return Err(Error::StepUnderflow { time_s: t0, step_s: step });
        }
        let next = apply(state, &magnus_propagator(levels, seg, t0, n));
        let change = prev
            .populations()
            .iter()
            .zip(next.populations())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        prev = next;
        if change < opts.population_tol {
            return Ok(prev);
        }
    }
    Err(Error::StepUnderflow { time_s: t0, step_s: seg.duration_s / n as f64 })
}

/// Evolve `state` through `seq` starting at absolute time 0.
pub fn evolve_unitary(
    state: &QuditState,
    seq: &PulseSequence,
    levels: &QuditLevels,
    method: EvolutionMethod,
) -> Result<QuditState> {
    evolve_unitary_at(state, seq, levels, method, 0.0)
}

/// Evolve `state` through `seq` starting at absolute time `t0` (tone phases
/// are referenced to absolute time).
pub fn evolve_unitary_at(
    state: &QuditState,
    seq: &PulseSequence,
    levels: &QuditLevels,
    method: EvolutionMethod,
    t0: f64,
) -> Result<QuditState> {
    state.validate()?;
    seq.validate()?;
    let mut t = t0;
    let mut out = state.clone();
    for seg in &seq.segments {
        out = match method {
            EvolutionMethod::Rwa => apply(&out, &rwa_segment_propagator(levels, seg, t)?),
            EvolutionMethod::LabFrame => labframe_segment(levels, seg, t, &out, &LabFrameOptions::default())?,
        };
        t += seg.duration_s;
    }
    Ok(out)
}

/// Lab-frame evolution with explicit integrator settings.
pub fn evolve_labframe_with(
    state: &QuditState,
    seq: &PulseSequence,
    levels: &QuditLevels,
    t0: f64,
    opts: &LabFrameOptions,
) -> Result<QuditState> {
    state.validate()?;
    seq.validate()?;
    let mut t = t0;
    let mut out = state.clone();
    for seg in &seq.segments {
        out = labframe_segment(levels, seg, t, &out, opts)?;
        t += seg.duration_s;
    }
    Ok(out)
}

/// Full lab-frame propagator of a sequence via the rotating-wave route.
pub fn rwa_propagator(seq: &PulseSequence, levels: &QuditLevels, t0: f64) -> Result<Matrix4<C64>> {
    seq.validate()?;
    let mut t = t0;
    let mut u = Matrix4::identity();
    for seg in &seq.segments {
        u = rwa_segment_propagator(levels, seg, t)? * u;
        t += seg.duration_s;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PulseTone, Transition};

    fn pi_pulse(levels: &QuditLevels, rabi_mhz: f64) -> PulseSegment {
        PulseSegment::new(vec![PulseTone::resonant(levels, Transition::T01, rabi_mhz, 0.0)], 0.5 / (rabi_mhz * 1e6))
    }

    #[test]
    fn zero_duration_is_identity() {
        let l = QuditLevels::default();
        let s = QuditState::basis(1);
        let seq = PulseSequence::single(PulseSegment::new(vec![PulseTone::resonant(&l, Transition::T12, 3.0, 0.0)], 0.0));
        for m in [EvolutionMethod::Rwa, EvolutionMethod::LabFrame] {
            assert!(evolve_unitary(&s, &seq, &l, m).unwrap().distance(&s) < 1e-15);
        }
        assert!(evolve_unitary(&s, &PulseSequence::default(), &l, EvolutionMethod::Rwa).unwrap() == s);
    }

    #[test]
    fn pi_pulse_transfers_population() {
        let l = QuditLevels::default();
        let out = evolve_unitary(&QuditState::basis(0), &PulseSequence::single(pi_pulse(&l, 5.0)), &l, EvolutionMethod::Rwa).unwrap();
        assert!((out.populations()[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn propagator_is_unitary() {
        let l = QuditLevels::default();
        let tones: Vec<_> = Transition::ALL.iter().map(|&t| PulseTone::resonant(&l, t, 3.0, 0.4)).collect();
        let seq = PulseSequence::new(vec![PulseSegment::new(tones, 123e-9), PulseSegment::delay(1e-6)]);
        let u = rwa_propagator(&seq, &l, 0.3e-6).unwrap();
        let err = (u.adjoint() * u - Matrix4::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn mixed_and_pure_agree() {
        let l = QuditLevels::default();
        let seq = PulseSequence::single(pi_pulse(&l, 2.0).clone());
        let p = evolve_unitary(&QuditState::basis(0), &seq, &l, EvolutionMethod::Rwa).unwrap();
        let m = evolve_unitary(&QuditState::Mixed(QuditState::basis(0).density()), &seq, &l, EvolutionMethod::Rwa).unwrap();
        assert!(p.distance(&m) < 1e-12);
    }

    #[test]
    fn labframe_pi_pulse_matches_rwa() {
        let l = QuditLevels::default();
        let seq = PulseSequence::single(pi_pulse(&l, 20.0));
        let rwa = evolve_unitary(&QuditState::basis(0), &seq, &l, EvolutionMethod::Rwa).unwrap();
        let lab = evolve_unitary(&QuditState::basis(0), &seq, &l, EvolutionMethod::LabFrame).unwrap();
        for (a, b) in rwa.populations().iter().zip(lab.populations()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn underflow_is_reported_with_time() {
        let l = QuditLevels::default();
        let seq = PulseSequence::single(pi_pulse(&l, 20.0));
        let opts = LabFrameOptions { min_step_s: 1.0, ..Default::default() };
        match evolve_labframe_with(&QuditState::basis(0), &seq, &l, 2e-6, &opts) {
            Err(Error::StepUnderflow { time_s, .. }) => assert_eq!(time_s, 2e-6),
            other => panic!("expected underflow, got {other:?}"),
        }
    }
}
