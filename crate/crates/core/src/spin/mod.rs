//! Spin algebra and the molecular spin Hamiltonian.

mod angular;
mod crossings;
mod hamiltonian;
mod hyperfine;
mod operator;
mod params;
pub mod stevens;
mod zeeman;

pub use angular::{angular_momentum_ops, AngularMomentumOps, SpinQuantum};
pub use crossings::{
    analytic_crossing_field, analytic_crossings, find_avoided_crossings, CrossingInfo, DEFAULT_WINDOW_T,
};
pub use hamiltonian::{build_hamiltonian, electronic_hamiltonian, ligand_field_hamiltonian, product_basis};
pub use hyperfine::{
    adjacent_gaps, effective_qudit_levels, fit_hyperfine_from_frequencies, HyperfineFit, NuclearLabel,
    BRANCH_MINUS, BRANCH_PLUS,
};
pub use operator::{BasisLabel, OperatorMatrix};
pub use params::{HyperfineParams, LigandFieldParams, SpinSystemParams};
pub use stevens::stevens_operator;
pub use zeeman::{track_labels, zeeman_diagram, ZeemanDiagram};
