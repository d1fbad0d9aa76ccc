//! Rabi and Ramsey scans on a single adjacent transition, plus finite-shot
//! sampling of the resulting population curves.

use super::evolve::{evolve_unitary, EvolutionMethod};
use super::open::{evolve_open, DecoherenceParams};
use super::pulse::{PulseSegment, PulseSequence, PulseTone, QuditLevels, Transition};
use super::state::QuditState;
use crate::error::{Error, Result};
use crate::fit::{fit_damped_cosine, DampedCosineFit, FitOptions};
use crate::table::Table;
use crate::units::{GHZ, MHZ};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

pub const TAU_COLUMN: &str = "tau_s";
pub const POPULATION_COLUMN: &str = "population";

fn evolve(state: &QuditState, seq: &PulseSequence, levels: &QuditLevels, dec: &DecoherenceParams) -> Result<QuditState> {
    if dec.is_disabled() {
        evolve_unitary(state, seq, levels, EvolutionMethod::Rwa)
    } else {
        evolve_open(state, seq, levels, dec)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        Some(t) => Err(Error::InvalidInput(format!("durations must be finite and >= 0, got {t}"))),
        None => Ok(()),
    }
}

fn scan(
    times: &[f64],
    f: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<Table> {
    check_times(times)?;
    let values: Vec<f64> = times.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut table = Table::new([TAU_COLUMN, POPULATION_COLUMN]);
    for (t, p) in times.iter().zip(values) {
        table.push(vec![*t, p]);
    }
    Ok(table)
}

/// Start in the lower level of `pair`, drive it resonantly for each duration
/// and record the upper-level population.
pub fn rabi_experiment(
    levels: &QuditLevels,
    pair: Transition,
    rabi_mhz: f64,
    durations: &[f64],
    dec: &DecoherenceParams,
) -> Result<Table> {
    if !(rabi_mhz > 0.0) {
        return Err(Error::InvalidInput(format!("rabi_mhz must be > 0, got {rabi_mhz}")));
    }
    let start = QuditState::basis(pair.lower());
    let tone = PulseTone::resonant(levels, pair, rabi_mhz, 0.0);
    scan(durations, |tau| {
        let seq = PulseSequence::single(PulseSegment::new(vec![tone], tau));
        Ok(evolve(&start, &seq, levels, dec)?.populations()[pair.upper()])
    })
}

/// π/2 – τ – π/2 with a tone detuned by `detuning_hz` below resonance; records
/// the upper-level population, `½(1 + cos 2πδτ · e^{−τ/T₂*})` in the ideal case.
pub fn ramsey_experiment(
    levels: &QuditLevels,
    pair: Transition,
    rabi_mhz: f64,
    detuning_hz: f64,
    taus: &[f64],
    dec: &DecoherenceParams,
) -> Result<Table> {
    if !(rabi_mhz > 0.0) || !detuning_hz.is_finite() {
        return Err(Error::InvalidInput(format!("need rabi_mhz > 0 and finite detuning, got {rabi_mhz}, {detuning_hz}")));
    }
    let start = QuditState::basis(pair.lower());
    let tone = PulseTone {
        freq_ghz: levels.resonance_ghz(pair) - detuning_hz / GHZ,
        rabi_mhz,
        phase_rad: 0.0,
        target: pair,
    };
    let half_pi = 0.25 / (rabi_mhz * MHZ);
    scan(taus, |tau| {
        let seq = PulseSequence::new(vec![
            PulseSegment::new(vec![tone], half_pi),
            PulseSegment::delay(tau),
            PulseSegment::new(vec![tone], half_pi),
        ]);
        Ok(evolve(&start, &seq, levels, dec)?.populations()[pair.upper()])
    })
}

/// Replace each population by the fraction of `shots` Bernoulli outcomes.
pub fn sample_shots<R: Rng + ?Sized>(table: &Table, shots: u64, rng: &mut R) -> Result<Table> {
    let col = table
        .column_index(POPULATION_COLUMN)
        .ok_or_else(|| Error::InvalidInput(format!("table has no '{POPULATION_COLUMN}' column")))?;
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be > 0".into()));
    }
    let mut out = table.clone();
    for row in &mut out.rows {
        let p = row[col].clamp(0.0, 1.0);
        let k = Binomial::new(shots, p).map_err(|e| Error::InvalidInput(e.to_string()))?.sample(rng);
        row[col] = k as f64 / shots as f64;
    }
    Ok(out)
}

/// Fit a (damped) cosine to a population-vs-τ table.
pub fn fit_scan(table: &Table, decay: bool) -> Result<DampedCosineFit> {
    let t = table.column(TAU_COLUMN).ok_or_else(|| Error::Fit(format!("missing '{TAU_COLUMN}'")))?;
    let y = table.column(POPULATION_COLUMN).ok_or_else(|| Error::Fit(format!("missing '{POPULATION_COLUMN}'")))?;
    fit_damped_cosine(&t, &y, &FitOptions { decay, freq_band_hz: None })
}
