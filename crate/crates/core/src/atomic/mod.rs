//! Cesium D2 angular-momentum structure and its map from ground-state
//! Zeeman populations to direction-dependent cavity couplings.
//!
//! Dipole weights are squared Clebsch–Gordan factors scaled by the hyperfine
//! line strengths in `data/cs_d2.dat`, normalized so the stretched σ₊
//! transition `|4, 4⟩ → |5′, 5⟩` has weight 1. A single-atom coupling `g0`
//! therefore always means the coupling on that strongest transition.

mod angular;
mod coupling;
mod population;
mod structure;

pub use angular::{wigner_3j, HalfInt, MAX_FACTORIAL_ARG};
pub use coupling::{dispersive_shift, effective_atom_number, effective_cooperativity, CooperativityPair};
pub use population::PopulationDistribution;
pub use structure::{clebsch_gordan_weight, AtomicData, ExcitedLevel, TransitionEntry, TransitionTable, GROUND_F};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomicError {
    #[error("invalid angular momentum: {0}")]
    InvalidAngularMomentum(String),
    #[error("factorial argument {argument} exceeds table size {max}")]
    FactorialRange { argument: usize, max: usize },
    #[error("invalid population: {0}")]
    InvalidPopulation(String),
    #[error("atomic data line {line}: {message}")]
    DataFile { line: usize, message: String },
    #[error("excited level F'={0} not in atomic data")]
    MissingLevel(i32),
    #[error("off-resonant level F'={0} has zero detuning")]
    ZeroDetuning(i32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
