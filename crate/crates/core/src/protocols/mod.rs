//! End-to-end experiments driven by an [`ExperimentConfig`].

mod config;
mod experiments;
mod report;
mod sequence;

pub use config::{
    validate_config, CrossingsExperiment, Diagnostic, ExperimentConfig, Experiments, FidelityExperiment, GroverExperiment,
    Grid, HadamardExperiment, HysteresisExperiment, RabiExperiment, RamseyExperiment, ScanExperiment, ScanVariable,
    SequenceExperiment, T1Experiment, ZeemanExperiment,
};
pub use report::ExperimentReport;
pub use sequence::{run_full_sequence, run_scan, Repetition, SequenceStats, POPULATION_COLUMNS};
pub use experiments::{fit_hyperfine_report, run_experiment, ExperimentKind};
