//! Four-level nuclear qudit: states, pulses, closed and open evolution,
//! and the Rabi/Ramsey/Hadamard/Grover constructions built on them.

mod evolve;
mod experiments;
mod frame;
mod gates;
mod open;
mod pulse;
mod state;

pub use evolve::{evolve_labframe_with, evolve_unitary, evolve_unitary_at, rwa_propagator, EvolutionMethod, LabFrameOptions};
pub use experiments::{fit_scan, rabi_experiment, ramsey_experiment, sample_shots, POPULATION_COLUMN, TAU_COLUMN};
pub use frame::drive_hamiltonian_rwa;
pub use gates::{
    calibrate_grover, calibrate_hadamard, grover_run, ideal_grover, uniform_superposition_cost, GroverCalibration,
    HadamardCalibration, GROVER_COLUMNS, HADAMARD_COST_TOL, HADAMARD_POP_TOL, MAX_CALIBRATION_EVALS,
};
pub use open::{evolve_open, evolve_open_at, DecoherenceParams};
pub use pulse::{PulseSegment, PulseSequence, PulseTone, QuditLevels, Transition};
pub use state::{Density, Ket, QuditState};
