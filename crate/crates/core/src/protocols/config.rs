//! Declarative experiment configuration (JSON) and its validation.

use crate::dynamics::{DecoherenceParams, PulseSegment, PulseSequence, PulseTone, QuditLevels, Transition};
use crate::error::{Error, Result};
use crate::spin::{NuclearLabel, SpinSystemParams};
use crate::readout::SweepConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Either an explicit list of values or `points` evenly spaced values
/// from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range { start: f64, stop: f64, points: usize },
    Values(Vec<f64>),
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, points: usize) -> Self {
        Self::Range { start, stop, points }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::Values(v) => v.clone(),
            Self::Range { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }

    fn diagnostics(&self, path: &str, min_value: Option<f64>) -> Vec<(String, String)> {
        let v = self.values();
        let mut out = Vec::new();
        if v.is_empty() {
            out.push((path.to_string(), "grid is empty".to_string()));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            out.push((path.to_string(), format!("grid value {x} is not finite")));
        }
        if let Some(min) = min_value {
            if let Some(x) = v.iter().find(|x| **x < min) {
                out.push((path.to_string(), format!("grid value {x} is below {min}")));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeemanExperiment {
    pub field_grid_t: Grid,
    pub include_nuclear: bool,
}

impl Default for ZeemanExperiment {
    fn default() -> Self {
        Self { field_grid_t: Grid::linspace(-0.06, 0.06, 241), include_nuclear: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossingsExperiment {
    pub window_t: [f64; 2],
}

impl Default for CrossingsExperiment {
    fn default() -> Self {
        Self { window_t: [-0.06, 0.06] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RabiExperiment {
    pub transition: Transition,
    pub rabi_mhz: f64,
    pub durations_s: Grid,
    /// Finite-shot sampling per point; exact populations when absent.
    pub shots: Option<u64>,
}

impl Default for RabiExperiment {
    fn default() -> Self {
        Self { transition: Transition::T01, rabi_mhz: 1.0, durations_s: Grid::linspace(0.0, 3e-6, 121), shots: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RamseyExperiment {
    pub transition: Transition,
    pub rabi_mhz: f64,
    pub detuning_hz: f64,
    pub taus_s: Grid,
    pub shots: Option<u64>,
}

impl Default for RamseyExperiment {
    fn default() -> Self {
        Self {
            transition: Transition::T01,
            rabi_mhz: 5.0,
            detuning_hz: 1e4,
            taus_s: Grid::linspace(0.0, 1e-3, 201),
            shots: Some(1000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HadamardExperiment {
    /// Upper bound on each tone's Rabi frequency, MHz.
    pub budget_mhz: f64,
    pub initial_m_i: NuclearLabel,
    /// Time points of the emitted population evolution.
    pub points: usize,
}

impl Default for HadamardExperiment {
    fn default() -> Self {
        Self { budget_mhz: 5.0, initial_m_i: NuclearLabel::PLUS_3_2, points: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroverExperiment {
    pub budget_mhz: f64,
    pub initial_m_i: NuclearLabel,
    pub marked_m_i: NuclearLabel,
    pub points: usize,
    /// Scan the Grover drive up to this multiple of the calibrated duration.
    pub span: f64,
}

impl Default for GroverExperiment {
    fn default() -> Self {
        Self {
            budget_mhz: 5.0,
            initial_m_i: NuclearLabel::PLUS_3_2,
            marked_m_i: NuclearLabel::MINUS_1_2,
            points: 201,
            span: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HysteresisExperiment {
    pub sweeps: u64,
    pub bin_mt: f64,
    pub initial_m_i: NuclearLabel,
}

impl Default for HysteresisExperiment {
    fn default() -> Self {
        Self { sweeps: 20_000, bin_mt: 0.5, initial_m_i: NuclearLabel::PLUS_3_2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct T1Experiment {
    pub duration_s: f64,
    pub initial_m_i: NuclearLabel,
}

impl Default for T1Experiment {
    fn default() -> Self {
        Self { duration_s: 1e5, initial_m_i: NuclearLabel::PLUS_3_2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelityExperiment {
    pub sequence_s: f64,
}

impl Default for FidelityExperiment {
    fn default() -> Self {
        Self { sequence_s: 2.4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceExperiment {
    pub target_m_i: NuclearLabel,
    /// Nuclear state before the first sweep; uniformly random when absent.
    pub initial_m_i: Option<NuclearLabel>,
    /// Name in `pulses`; no manipulation when absent.
    pub pulse: Option<String>,
    pub repetitions: u64,
    pub max_init_sweeps: u64,
    pub max_probe_sweeps: u64,
    /// Report is flagged degraded above this initialization failure rate.
    pub max_init_failure_fraction: f64,
}

impl Default for SequenceExperiment {
    fn default() -> Self {
        Self {
            target_m_i: NuclearLabel::PLUS_3_2,
            initial_m_i: None,
            pulse: Some("pi_01".into()),
            repetitions: 100,
            max_init_sweeps: 5_000,
            max_probe_sweeps: 200,
            max_init_failure_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariable {
    /// Duration of one segment of the sequence pulse, seconds.
    Tau,
    /// Every tone moved this far below its configured frequency, Hz.
    Detuning,
    /// Cumulative distribution of probe jump fields, tesla.
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanExperiment {
    pub variable: ScanVariable,
    pub grid: Grid,
    /// Segment whose duration a `tau` scan sets; the last one when absent.
    pub segment: Option<usize>,
}

impl Default for ScanExperiment {
    fn default() -> Self {
        Self { variable: ScanVariable::Tau, grid: Grid::linspace(0.0, 2e-6, 41), segment: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Experiments {
    pub zeeman: ZeemanExperiment,
    pub crossings: CrossingsExperiment,
    pub rabi: RabiExperiment,
    pub ramsey: RamseyExperiment,
    pub hadamard: HadamardExperiment,
    pub grover: GroverExperiment,
    pub hysteresis: HysteresisExperiment,
    pub t1: T1Experiment,
    pub fidelity: FidelityExperiment,
    pub sequence: SequenceExperiment,
    pub scan: ScanExperiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SpinSystemParams,
    pub sweep: SweepConfig,
    pub decoherence: DecoherenceParams,
    pub pulses: BTreeMap<String, PulseSequence>,
    pub experiment: Experiments,
    pub seed: u64,
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let levels = QuditLevels::default();
        let pi = PulseSegment::new(vec![PulseTone::resonant(&levels, Transition::T01, 1.0, 0.0)], 0.5e-6);
        Self {
            system: SpinSystemParams::default(),
            sweep: SweepConfig::default(),
            decoherence: DecoherenceParams::measured(),
            pulses: BTreeMap::from([("pi_01".to_string(), PulseSequence::single(pi))]),
            experiment: Experiments::default(),
            seed: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("parse error: {e}")]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Levels of the qudit on the `J_z = −6` branch.
    pub fn levels(&self) -> QuditLevels {
        QuditLevels::from_hyperfine(&self.system.hyperfine, crate::spin::BRANCH_MINUS)
    }

    pub fn pulse(&self, name: &str) -> Result<&PulseSequence> {
        self.pulses.get(name).ok_or_else(|| Error::Config(vec![format!("experiment.sequence.pulse: unknown pulse '{name}'")]))
    }

    /// Fail with every diagnostic if the config is not runnable.
    pub fn ensure_valid(&self) -> Result<()> {
        let d = validate_config(self);
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(d.into_iter().map(|d| d.to_string()).collect()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn positive(path: &str, v: f64, out: &mut Vec<(String, String)>) {
    if !(v > 0.0 && v.is_finite()) {
        out.push((path.to_string(), format!("must be > 0, got {v}")));
    }
}

/// One diagnostic per violated invariant; empty iff the config is runnable.
pub fn validate_config(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    d.extend(cfg.system.diagnostics("system"));
    d.extend(cfg.sweep.diagnostics("sweep"));
    d.extend(cfg.decoherence.diagnostics("decoherence"));

    let min_t1 = cfg.decoherence.t1_s.iter().cloned().fold(f64::INFINITY, f64::min);
    let sweep_s = cfg.sweep.sweep_duration_s();
    if min_t1 > 0.0 && sweep_s.is_finite() && sweep_s >= min_t1 / 10.0 {
        d.push((
            "sweep.rate_t_per_s".to_string(),
            format!("a sweep takes {sweep_s} s; it must be shorter than min(T1)/10 = {} s", min_t1 / 10.0),
        ));
    }

    for (name, seq) in &cfg.pulses {
        for (k, seg) in seq.segments.iter().enumerate() {
            if let Err(e) = seg.validate() {
                d.push((format!("pulses.{name}[{k}]"), e.to_string()));
            }
        }
    }

    let e = &cfg.experiment;
    d.extend(e.zeeman.field_grid_t.diagnostics("experiment.zeeman.field_grid_t", None));
    let [lo, hi] = e.crossings.window_t;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        d.push(("experiment.crossings.window_t".into(), format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    positive("experiment.rabi.rabi_mhz", e.rabi.rabi_mhz, &mut d);
    d.extend(e.rabi.durations_s.diagnostics("experiment.rabi.durations_s", Some(0.0)));
    positive("experiment.ramsey.rabi_mhz", e.ramsey.rabi_mhz, &mut d);
    if !e.ramsey.detuning_hz.is_finite() {
        d.push(("experiment.ramsey.detuning_hz".into(), "must be finite".into()));
    }
    d.extend(e.ramsey.taus_s.diagnostics("experiment.ramsey.taus_s", Some(0.0)));
    for (path, shots) in [("experiment.rabi.shots", e.rabi.shots), ("experiment.ramsey.shots", e.ramsey.shots)] {
        if shots == Some(0) {
            d.push((path.into(), "must be > 0 when given".into()));
        }
    }
    positive("experiment.hadamard.budget_mhz", e.hadamard.budget_mhz, &mut d);
    if e.hadamard.points < 2 {
        d.push(("experiment.hadamard.points".into(), "need at least 2 points".into()));
    }
    positive("experiment.grover.budget_mhz", e.grover.budget_mhz, &mut d);
    positive("experiment.grover.span", e.grover.span, &mut d);
    if e.grover.points < 2 {
        d.push(("experiment.grover.points".into(), "need at least 2 points".into()));
    }
    positive("experiment.hysteresis.bin_mt", e.hysteresis.bin_mt, &mut d);
    positive("experiment.t1.duration_s", e.t1.duration_s, &mut d);
    if !(e.fidelity.sequence_s >= 0.0 && e.fidelity.sequence_s.is_finite()) {
        d.push(("experiment.fidelity.sequence_s".into(), format!("must be >= 0, got {}", e.fidelity.sequence_s)));
    }

    let s = &e.sequence;
    if let Some(name) = &s.pulse {
        if !cfg.pulses.contains_key(name) {
            d.push(("experiment.sequence.pulse".into(), format!("unknown pulse '{name}'")));
        } else if let (ScanVariable::Tau, Some(k)) = (e.scan.variable, e.scan.segment) {
            if k >= cfg.pulses[name].segments.len() {
                d.push(("experiment.scan.segment".into(), format!("pulse '{name}' has no segment {k}")));
            }
        }
    }
    if s.repetitions == 0 {
        d.push(("experiment.sequence.repetitions".into(), "must be > 0".into()));
    }
    if s.max_init_sweeps == 0 || s.max_probe_sweeps == 0 {
        d.push(("experiment.sequence.max_init_sweeps".into(), "sweep limits must be > 0".into()));
    }
    if !(0.0..=1.0).contains(&s.max_init_failure_fraction) {
        d.push(("experiment.sequence.max_init_failure_fraction".into(), "must lie in [0, 1]".into()));
    }
    let min = match e.scan.variable {
        ScanVariable::Tau => Some(0.0),
        _ => None,
    };
    d.extend(e.scan.grid.diagnostics("experiment.scan.grid", min));

    d.into_iter().map(|(path, message)| Diagnostic { path, message }).collect()
}
