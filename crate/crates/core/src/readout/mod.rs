//! Stochastic readout: field sweeps with Landau–Zener tunnelling, jump
//! events, nuclear telegraph dynamics and the estimators applied to them.

mod estimators;
mod landau_zener;
mod sweep;
mod telegraph;

pub use estimators::{fit_exponential_lifetime, jump_histogram, readout_fidelity, GaussianCluster, JumpHistogram, LifetimeFit};
pub use landau_zener::{landau_zener_flip_probability, landau_zener_numeric, SweepIntegration};
pub use sweep::{
    classify_jump, initialize_state, sweep_leg, sweep_once, sweep_series, ElectronicState, InitOutcome, JumpEvent,
    SweepConfig, SweepDirection, SweepOutcome,
};
pub use telegraph::{advance_nuclear, telegraph_trajectory, TelegraphTrace};
