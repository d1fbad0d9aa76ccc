//! Qudit Hadamard (equal-superposition) and Grover (marked-state
//! amplification) gates, found by derivative-free calibration over
//! rectangular three-tone segments.

use super::evolve::rwa_propagator;
use super::frame::{expm_hermitian, SegmentFrame};
use super::pulse::{PulseSegment, PulseSequence, PulseTone, QuditLevels, Transition};
use super::state::QuditState;
use crate::error::{Error, Result};
use crate::optimize::NelderMead;
use crate::rng::seeded;
use crate::table::Table;
use crate::units::MHZ;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Cost below which a Hadamard calibration is accepted.
pub const HADAMARD_COST_TOL: f64 = 4e-4;
/// Allowed deviation of each population from 1/4.
pub const HADAMARD_POP_TOL: f64 = 0.02;
pub const MAX_CALIBRATION_EVALS: usize = 100_000;

pub const GROVER_COLUMNS: [&str; 5] =
    ["time_s", "population_p3_2", "population_p1_2", "population_m1_2", "population_m3_2"];

#[derive(Debug, Clone, Serialize)]
pub struct HadamardCalibration {
    pub segment: PulseSegment,
    /// `1 − |⟨ψ_unif|ψ(T)⟩|²` maximized over per-level phases.
    pub cost: f64,
    pub populations: [f64; 4],
    pub evaluations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverCalibration {
    pub marked: usize,
    pub tones: Vec<PulseTone>,
    /// Drive duration at which the marked population peaks.
    pub duration_s: f64,
    pub marked_population: f64,
    pub evaluations: usize,
}

fn amplitude(budget_mhz: f64, p: f64) -> f64 {
    budget_mhz * 0.5 * (1.0 - p.cos())
}

fn tones_from(levels: &QuditLevels, budget_mhz: f64, amps: &[f64], phases: &[f64]) -> Vec<PulseTone> {
    Transition::ALL
        .iter()
        .map(|&t| PulseTone::resonant(levels, t, amplitude(budget_mhz, amps[t.index()]), phases[t.index()]))
        .collect()
}

/// Phase-insensitive distance from the uniform superposition.
pub fn uniform_superposition_cost(populations: &[f64; 4]) -> f64 {
    let s: f64 = populations.iter().map(|p| p.max(0.0).sqrt()).sum();
    1.0 - (s / 2.0).powi(2)
}

fn check_budget(budget_mhz: f64) -> Result<()> {
    if budget_mhz > 0.0 && budget_mhz.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("amplitude budget must be > 0, got {budget_mhz}")))
    }
}

/// Search tone amplitudes (each within `[0, budget]`) and the duration of a
/// resonant three-tone segment taking `basis(initial)` to equal populations.
///
/// The drive couples a chain, so per-tone phases can be absorbed into level
/// phases and do not affect populations; they are fixed to zero. Among the
/// converged starts the shortest segment is returned.
pub fn calibrate_hadamard(levels: &QuditLevels, budget_mhz: f64, initial: usize) -> Result<HadamardCalibration> {
    check_budget(budget_mhz)?;
    if initial > 3 {
        return Err(Error::InvalidInput(format!("initial level must be 0..=3, got {initial}")));
    }
    let start = Vector4::from_fn(|i, _| if i == initial { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let populations_at = |x: &[f64]| -> Option<[f64; 4]> {
        let tones = tones_from(levels, budget_mhz, &x[..3], &[0.0; 3]);
        let frame = SegmentFrame::new(levels, &tones).ok()?;
        let u = expm_hermitian(&frame.hamiltonian, x[3].abs() / (budget_mhz * MHZ));
        let psi = u * start;
        Some([0, 1, 2, 3].map(|i| psi[i].norm_sqr()))
    };
    let cost = |x: &[f64]| populations_at(x).map_or(f64::INFINITY, |p| uniform_superposition_cost(&p));

    let mut rng = seeded(0x4841_4441);
    let nm = NelderMead { max_evals: 2_000, target: 1e-12, f_tol: 0.0 };
    let mut evals = 0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut shortest: Option<(Vec<f64>, f64)> = None;
    while evals < MAX_CALIBRATION_EVALS {
        let x0 = [rng.random_range(0.3..PI), rng.random_range(0.3..PI), rng.random_range(0.3..PI), rng.random_range(0.2..2.0)];
        let m = nm.minimize(cost, &x0, &[0.4, 0.4, 0.4, 0.2]);
        evals += m.evals;
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x.clone(), m.value));
        }
        let ok = m.value < HADAMARD_COST_TOL
            && populations_at(&m.x).is_some_and(|p| p.iter().all(|v| (v - 0.25).abs() <= HADAMARD_POP_TOL));
        if ok && shortest.as_ref().is_none_or(|s| m.x[3].abs() < s.0[3].abs()) {
            shortest = Some((m.x.clone(), m.value));
        }
        // enough converged starts to pick a short one
        if shortest.is_some() && evals > MAX_CALIBRATION_EVALS / 4 {
            break;
        }
    }
    let Some((x, c)) = shortest else {
        let best_cost = best.map_or(f64::INFINITY, |b| b.1);
        return Err(Error::Calibration { best_cost, evaluations: evals });
    };
    let tones = tones_from(levels, budget_mhz, &x[..3], &[0.0; 3]);
    Ok(HadamardCalibration {
        segment: PulseSegment::new(tones, x[3].abs() / (budget_mhz * MHZ)),
        cost: c,
        populations: populations_at(&x).expect("converged point evaluates"),
        evaluations: evals,
    })
}

fn propagate(state: &Vector4<C64>, u: &Matrix4<C64>) -> [f64; 4] {
    let psi = u * state;
    [0, 1, 2, 3].map(|i| psi[i].norm_sqr())
}

/// Search three-tone amplitudes, phases and duration that, applied right
/// after `hadamard` on `basis(initial)`, maximize the population of `marked`.
pub fn calibrate_grover(
    levels: &QuditLevels,
    hadamard: &PulseSegment,
    initial: usize,
    marked: usize,
    budget_mhz: f64,
) -> Result<GroverCalibration> {
    check_budget(budget_mhz)?;
    if initial > 3 || marked > 3 {
        return Err(Error::InvalidInput(format!("levels must be 0..=3, got initial {initial}, marked {marked}")));
    }
    hadamard.validate()?;
    let h = rwa_propagator(&PulseSequence::single(hadamard.clone()), levels, 0.0)?;
    let psi_h = h.column(initial).into_owned();
    let t0 = hadamard.duration_s;
    let marked_at = |x: &[f64]| -> Option<f64> {
        let seg = PulseSegment::new(tones_from(levels, budget_mhz, &x[..3], &x[3..6]), x[6].abs() / (budget_mhz * MHZ));
        let u = rwa_propagator(&PulseSequence::single(seg), levels, t0).ok()?;
        Some(propagate(&psi_h, &u)[marked])
    };
    let cost = |x: &[f64]| marked_at(x).map_or(f64::INFINITY, |p| 1.0 - p);

    let mut rng = seeded(0x4752_4f56);
    let nm = NelderMead { max_evals: 4_000, target: 1e-10, f_tol: 0.0 };
    let mut evals = 0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    while evals < MAX_CALIBRATION_EVALS / 4 {
        let mut x0: Vec<f64> = (0..3).map(|_| rng.random_range(0.3..PI)).collect();
        x0.extend((0..3).map(|_| rng.random_range(-PI..PI)));
        x0.push(rng.random_range(0.2..2.0));
        let m = nm.minimize(cost, &x0, &[0.4, 0.4, 0.4, 0.8, 0.8, 0.8, 0.2]);
        evals += m.evals;
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value));
        }
        if best.as_ref().is_some_and(|b| b.1 < 1e-6) {
            break;
        }
    }
    let (x, c) = best.expect("at least one start ran");
    Ok(GroverCalibration {
        marked,
        tones: tones_from(levels, budget_mhz, &x[..3], &x[3..6]),
        duration_s: x[6].abs() / (budget_mhz * MHZ),
        marked_population: 1.0 - c,
        evaluations: evals,
    })
}

/// Populations after `hadamard` followed by `grover_tones` applied for each
/// duration; columns are [`GROVER_COLUMNS`].
pub fn grover_run(
    levels: &QuditLevels,
    initial: usize,
    hadamard: &PulseSegment,
    grover_tones: &[PulseTone],
    durations: &[f64],
) -> Result<Table> {
    if initial > 3 {
        return Err(Error::InvalidInput(format!("initial level must be 0..=3, got {initial}")));
    }
    if let Some(t) = durations.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidInput(format!("durations must be finite and >= 0, got {t}")));
    }
    let h = rwa_propagator(&PulseSequence::single(hadamard.clone()), levels, 0.0)?;
    let psi_h = h.column(initial).into_owned();
    let mut table = Table::new(GROVER_COLUMNS);
    for &d in durations {
        let u = rwa_propagator(&PulseSequence::single(PulseSegment::new(grover_tones.to_vec(), d)), levels, hadamard.duration_s)?;
        let p = propagate(&psi_h, &u);
        table.push(vec![d, p[0], p[1], p[2], p[3]]);
    }
    Ok(table)
}

/// Marked-state probabilities of textbook Grover search on four states:
/// entry `k` is the probability after `k` oracle+diffusion iterations.
pub fn ideal_grover(marked: usize, iterations: usize) -> Vec<f64> {
    assert!(marked < 4, "marked must be 0..=3");
    let s = Vector4::from_element(0.5_f64);
    let oracle = Matrix4::<f64>::identity() - Matrix4::from_fn(|r, c| if r == marked && c == marked { 2.0 } else { 0.0 });
    let diffusion = s * s.transpose() * 2.0 - Matrix4::identity();
    let mut psi = s;
    let mut out = vec![psi[marked].powi(2)];
    for _ in 0..iterations {
        psi = diffusion * (oracle * psi);
        out.push(psi[marked].powi(2));
    }
    out
}

impl HadamardCalibration {
    pub fn state(&self, levels: &QuditLevels, initial: usize) -> Result<QuditState> {
        let u = rwa_propagator(&PulseSequence::single(self.segment.clone()), levels, 0.0)?;
        Ok(QuditState::Pure(u.column(initial).into_owned()))
    }
}
