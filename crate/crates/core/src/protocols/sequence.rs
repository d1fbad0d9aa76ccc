//! Initialize → manipulate → probe, repeated with independent random streams.

use super::config::{ExperimentConfig, ScanVariable};
use super::report::ExperimentReport;
use crate::dynamics::{evolve_open, evolve_unitary, EvolutionMethod, PulseSequence, QuditState};
use crate::error::{Error, Result};
use crate::readout::{classify_jump, initialize_state, sweep_leg, sweep_once, ElectronicState, SweepDirection};
use crate::rng::substream;
use crate::spin::{analytic_crossings, find_avoided_crossings, CrossingInfo, NuclearLabel};
use crate::table::Table;
use rand::Rng;
use rayon::prelude::*;
use std::time::Instant;

pub const POPULATION_COLUMNS: [&str; 4] = ["population_p3_2", "population_p1_2", "population_m1_2", "population_m3_2"];

/// Electronic branch the qudit is manipulated on.
const QUDIT_BRANCH: ElectronicState = ElectronicState::Minus;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Repetition {
    pub initialized: bool,
    pub init_sweeps: u64,
    pub outcome: Option<NuclearLabel>,
    pub probe_field_t: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStats {
    pub repetitions: Vec<Repetition>,
    pub counts: [u64; 4],
}

impl SequenceStats {
    pub fn detected(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn init_failures(&self) -> u64 {
        self.repetitions.iter().filter(|r| !r.initialized).count() as u64
    }

    pub fn frequencies(&self) -> [f64; 4] {
        let n = self.detected();
        self.counts.map(|c| if n > 0 { c as f64 / n as f64 } else { f64::NAN })
    }
}

struct Setup {
    /// Crossings with numerically located gaps, used for tunnelling.
    physical: Vec<CrossingInfo>,
    /// Analytic crossing fields, used to classify detected jumps.
    reference: Vec<CrossingInfo>,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    let physical = find_avoided_crossings(&cfg.system, (cfg.sweep.b_min_t, cfg.sweep.b_max_t))?;
    if physical.len() != 4 {
        return Err(Error::InvalidInput(format!(
            "expected four avoided crossings inside the sweep window, found {}",
            physical.len()
        )));
    }
    Ok(Setup { physical, reference: analytic_crossings(&cfg.system) })
}

fn sample_label<R: Rng + ?Sized>(populations: &[f64; 4], rng: &mut R) -> NuclearLabel {
    let total: f64 = populations.iter().map(|p| p.max(0.0)).sum();
    let mut u = rng.random::<f64>() * total;
    for (i, p) in populations.iter().enumerate() {
        u -= p.max(0.0);
        if u < 0.0 {
            return NuclearLabel::from_index(i);
        }
    }
    NuclearLabel::from_index(3)
}

fn repetition(cfg: &ExperimentConfig, setup: &Setup, pulse: Option<&PulseSequence>, stream: u64) -> Result<Repetition> {
    let seq = &cfg.experiment.sequence;
    let sweep = &cfg.sweep;
    let t1 = &cfg.decoherence.t1_s;
    let mut rng = substream(cfg.seed, stream);
    let m0 = seq.initial_m_i.unwrap_or_else(|| NuclearLabel::from_index(rng.random_range(0..4)));

    let init = initialize_state(
        seq.target_m_i,
        ElectronicState::Plus,
        m0,
        Some(QUDIT_BRANCH),
        &setup.physical,
        sweep,
        t1,
        seq.max_init_sweeps,
        &mut rng,
    );
    if !init.success {
        return Ok(Repetition {
            initialized: false,
            init_sweeps: init.sweeps,
            outcome: None,
            probe_field_t: f64::NAN,
            elapsed_s: init.elapsed_s,
        });
    }
    let mut elapsed = init.elapsed_s;

    let mut m = init.m_i;
    if let Some(p) = pulse {
        let levels = cfg.levels();
        let start = QuditState::basis(m.index());
        let out = if cfg.decoherence.is_disabled() {
            evolve_unitary(&start, p, &levels, EvolutionMethod::Rwa)?
        } else {
            evolve_open(&start, p, &levels, &cfg.decoherence)?
        };
        m = sample_label(&out.populations(), &mut rng);
        elapsed += p.duration_s();
    }

    // return to the window edge the spin cannot tunnel towards, then sweep
    let mut e = init.electronic;
    let edge = match e.tunnelling_direction() {
        SweepDirection::Up => sweep.b_min_t,
        SweepDirection::Down => sweep.b_max_t,
    };
    let leg = sweep_leg(e, m, init.field_t, edge, 0, &setup.physical, sweep, t1, &mut rng);
    elapsed += (edge - init.field_t).abs() / sweep.rate_t_per_s;
    e = leg.electronic;
    m = leg.m_i;
    let mut dir = e.tunnelling_direction();
    for k in 0..seq.max_probe_sweeps {
        let out = sweep_once(e, m, dir, k + 1, &setup.physical, sweep, t1, &mut rng);
        if let Some(ev) = out.event {
            let start = match dir {
                SweepDirection::Up => sweep.b_min_t,
                SweepDirection::Down => sweep.b_max_t,
            };
            elapsed += (ev.field_t - start).abs() / sweep.rate_t_per_s;
            return Ok(Repetition {
                initialized: true,
                init_sweeps: init.sweeps,
                outcome: classify_jump(ev.field_t, &setup.reference),
                probe_field_t: ev.field_t,
                elapsed_s: elapsed,
            });
        }
        elapsed += sweep.sweep_duration_s();
        e = out.electronic;
        m = out.m_i;
        dir = dir.reversed();
    }
    Ok(Repetition { initialized: true, init_sweeps: init.sweeps, outcome: None, probe_field_t: f64::NAN, elapsed_s: elapsed })
}

fn run_repetitions(cfg: &ExperimentConfig, setup: &Setup, pulse: Option<&PulseSequence>, first_stream: u64) -> Result<SequenceStats> {
    let n = cfg.experiment.sequence.repetitions;
    let repetitions: Vec<Repetition> =
        (0..n).into_par_iter().map(|r| repetition(cfg, setup, pulse, first_stream + r)).collect::<Result<_>>()?;
    let mut counts = [0; 4];
    for r in &repetitions {
        if let Some(l) = r.outcome {
            counts[l.index()] += 1;
        }
    }
    Ok(SequenceStats { repetitions, counts })
}

fn sequence_pulse(cfg: &ExperimentConfig) -> Result<Option<PulseSequence>> {
    cfg.experiment.sequence.pulse.as_deref().map(|name| cfg.pulse(name).cloned()).transpose()
}

fn degraded(cfg: &ExperimentConfig, stats: &SequenceStats) -> bool {
    let n = stats.repetitions.len() as f64;
    stats.init_failures() as f64 / n > cfg.experiment.sequence.max_init_failure_fraction
}

/// Run the configured initialize → pulse → probe sequence
/// `experiment.sequence.repetitions` times.
pub fn run_full_sequence(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let clock = Instant::now();
    cfg.ensure_valid()?;
    let setup = setup(cfg)?;
    let pulse = sequence_pulse(cfg)?;
    let stats = run_repetitions(cfg, &setup, pulse.as_ref(), 0)?;

    let mut runs = Table::new(["repetition", "initialized", "init_sweeps", "outcome_m_i", "probe_field_mt", "elapsed_s"]);
    for (k, r) in stats.repetitions.iter().enumerate() {
        runs.push(vec![
            k as f64,
            if r.initialized { 1.0 } else { 0.0 },
            r.init_sweeps as f64,
            r.outcome.map_or(f64::NAN, |l| l.value()),
            r.probe_field_t * 1e3,
            r.elapsed_s,
        ]);
    }
    let mut outcomes = Table::new(["m_i", "count", "frequency"]);
    let freq = stats.frequencies();
    for (i, l) in NuclearLabel::ALL.iter().enumerate() {
        outcomes.push(vec![l.value(), stats.counts[i] as f64, freq[i]]);
    }

    let mut report = ExperimentReport::new("sequence", cfg.seed).with_table("runs", runs).with_table("outcomes", outcomes);
    let n = stats.repetitions.len();
    let ok: Vec<&Repetition> = stats.repetitions.iter().filter(|r| r.initialized).collect();
    report.set("repetitions", n as f64);
    report.set("detected", stats.detected() as f64);
    report.set("init_failures", stats.init_failures() as f64);
    report.set("undetected_probes", (ok.len() as u64 - stats.detected()) as f64);
    if !ok.is_empty() {
        report.set("mean_init_sweeps", ok.iter().map(|r| r.init_sweeps as f64).sum::<f64>() / ok.len() as f64);
        report.set("mean_sequence_duration_s", ok.iter().map(|r| r.elapsed_s).sum::<f64>() / ok.len() as f64);
    }
    report.degraded = degraded(cfg, &stats);
    if report.degraded {
        report.notes.push(format!("{} of {n} initializations failed", stats.init_failures()));
    }
    report.simulated_time_s = stats.repetitions.iter().map(|r| r.elapsed_s).sum();
    report.wall_clock_s = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Repeat the sequence for each grid value of `variable` and tabulate the
/// probe outcome frequencies.
pub fn run_scan(cfg: &ExperimentConfig, variable: ScanVariable, grid: &[f64]) -> Result<ExperimentReport> {
    let clock = Instant::now();
    if grid.is_empty() {
        return Err(Error::InvalidInput("scan grid is empty".into()));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("scan grid value {v} is not finite")));
    }
    cfg.ensure_valid()?;
    let setup = setup(cfg)?;
    let base = sequence_pulse(cfg)?;
    let reps = cfg.experiment.sequence.repetitions;
    let mut report = ExperimentReport::new("scan", cfg.seed);

    if variable == ScanVariable::Field {
        let stats = run_repetitions(cfg, &setup, base.as_ref(), 0)?;
        let fields: Vec<f64> = stats.repetitions.iter().map(|r| r.probe_field_t).filter(|f| f.is_finite()).collect();
        let mut table = Table::new(["field_mt", "switched_fraction"]);
        for &b in grid {
            let below = fields.iter().filter(|f| **f <= b).count();
            table.push(vec![b * 1e3, if fields.is_empty() { f64::NAN } else { below as f64 / fields.len() as f64 }]);
        }
        report.degraded = degraded(cfg, &stats);
        report.simulated_time_s = stats.repetitions.iter().map(|r| r.elapsed_s).sum();
        report = report.with_table("scan", table);
        report.wall_clock_s = clock.elapsed().as_secs_f64();
        return Ok(report);
    }

    let base = base.ok_or_else(|| Error::Config(vec!["experiment.sequence.pulse: a scan needs a pulse".into()]))?;
    let column = match variable {
        ScanVariable::Tau => "tau_s",
        _ => "detuning_hz",
    };
    let mut columns = vec![column];
    columns.extend(POPULATION_COLUMNS);
    columns.extend(["detected", "init_failures"]);
    let mut table = Table::new(columns);
    let mut any_degraded = false;
    for (i, &v) in grid.iter().enumerate() {
        let mut pulse = base.clone();
        match variable {
            ScanVariable::Tau => {
                let k = cfg.experiment.scan.segment.unwrap_or(pulse.segments.len().saturating_sub(1));
                let seg = pulse
                    .segments
                    .get_mut(k)
                    .ok_or_else(|| Error::Config(vec![format!("experiment.scan.segment: no segment {k}")]))?;
                seg.duration_s = v;
            }
            _ => {
                for seg in &mut pulse.segments {
                    for tone in &mut seg.tones {
                        tone.freq_ghz -= v * 1e-9;
                    }
                }
            }
        }
        let stats = run_repetitions(cfg, &setup, Some(&pulse), i as u64 * reps)?;
        any_degraded |= degraded(cfg, &stats);
        let f = stats.frequencies();
        table.push(vec![v, f[0], f[1], f[2], f[3], stats.detected() as f64, stats.init_failures() as f64]);
        report.simulated_time_s += stats.repetitions.iter().map(|r| r.elapsed_s).sum::<f64>();
    }
    report.degraded = any_degraded;
    report = report.with_table("scan", table);
    report.wall_clock_s = clock.elapsed().as_secs_f64();
    Ok(report)
}
