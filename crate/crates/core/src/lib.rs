//! Simulation toolkit for the TbPc₂ single-molecule-magnet nuclear-spin qudit.
//!
//! The crate is split along the physical stack:
//!
//! * [`spin`]: angular-momentum and Stevens operator algebra, the full
//!   13- and 52-dimensional spin Hamiltonian, Zeeman diagrams, avoided
//!   crossings and the effective four-level nuclear qudit.
//! * [`dynamics`]: driven evolution of the qudit (rotating-wave propagators,
//!   a lab-frame integrator, Lindblad dephasing and relaxation) and the
//!   Rabi, Ramsey, Hadamard and Grover constructions built on top.
//! * [`readout`]: Landau–Zener tunnelling during field sweeps, jump events,
//!   nuclear telegraph dynamics and the matching estimators.
//! * [`protocols`]: config-driven initialize → manipulate → probe runs.
//!
//! Energies are frequencies (E/h). Spin Hamiltonians are in GHz, qudit drive
//! Hamiltonians in Hz; fields are in tesla and times in seconds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod fit;
pub mod optimize;
pub mod protocols;
pub mod readout;
pub mod rng;
pub mod spin;
pub mod table;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use dynamics::{
    DecoherenceParams, EvolutionMethod, PulseSegment, PulseSequence, PulseTone, QuditLevels,
    QuditState, Transition,
};
pub use readout::{JumpEvent, SweepConfig, SweepDirection, TelegraphTrace};
pub use spin::{
    CrossingInfo, HyperfineParams, LigandFieldParams, NuclearLabel, OperatorMatrix, SpinQuantum,
    SpinSystemParams,
};
pub use table::Table;
pub use protocols::{ExperimentConfig, ExperimentReport};
