//! Driven-dissipative Tavis–Cummings dynamics of one polarization branch.
//!
//! Parameters are given in MHz like everywhere else; internally every rate is
//! multiplied by 2π so that time is in µs and fluxes are photons per µs.
//! The drive amplitude is `ε = √(2κ₁·flux)` and the transmission is the output
//! flux `2κ₂⟨a†a⟩` over the input flux, which reduces to the closed-form
//! linear response at weak drive.
//!
//! Basis order is cavity Fock state first (slowest), then atoms 1…N with
//! `|g⟩ = 0`, `|e⟩ = 1`.

mod correlation;
mod model;
mod scenario;
mod sparse;
mod steady;

pub use correlation::{
    g2_tau, g2_zero, steady_state_checked, truncation_check, CorrelationResult, TruncationReport, TRUNCATION_TOLERANCE,
};
pub use model::{ModelParams, QuantumModel, DEFAULT_DIMENSION_CAP};
pub use scenario::{nonreciprocal_statistics, BranchSpec, StatisticsResult, StatisticsScenario};
pub use steady::{
    saturation_curve, steady_state, steady_state_with, SaturationPoint, SolverMethod, SteadyState, LU_DIMENSION_LIMIT,
};

use thiserror::Error;

use crate::atomic::AtomicError;
use crate::linear_response::LinearResponseError;
use crate::numerics::NumericsError;

pub(crate) const TWO_PI: f64 = std::f64::consts::TAU;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("Hilbert dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid model parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("time evolution did not reach steady state by t = {time} µs (|dρ/dt| = {residual:e})")]
    NotConverged { time: f64, residual: f64 },
    #[error("photon number {photon_number:e} is too small to normalize correlations")]
    Vacuum { photon_number: f64 },
    #[error("under-truncated at n_max = {n_max}: photon number changes by {photon_change:e}, g2(0) by {g2_change:e}")]
    UnderTruncated { n_max: usize, photon_change: f64, g2_change: f64 },
    #[error("`{0}` must be strictly ascending")]
    NotAscending(&'static str),
    #[error("tau grid must start at 0")]
    TauOrigin,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Atomic(#[from] AtomicError),
    #[error(transparent)]
    LinearResponse(#[from] LinearResponseError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

pub(crate) fn check_ascending(grid: &[f64], name: &'static str) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DynamicsError::NotAscending(name));
    }
    Ok(())
}
