//! Dense complex linear algebra, adaptive ODE integration and derivative-free
//! least squares. Everything the physics modules need, with no external
//! linear-algebra backend.

mod eigen;
mod fit;
mod lu;
mod matrix;
mod ode;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use fit::{fit_least_squares, fit_least_squares_with, FitOptions, FitResult};
pub use lu::{solve_linear, LuFactors};
pub use matrix::{kron, kron_with_limit, CMatrix, DEFAULT_MAX_DIM};
pub use ode::{integrate_ode, OdeOptions, OdeSolution};

pub use num_complex::Complex64 as C64;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("empty matrix")]
    Empty,
    #[error("kronecker product would be {rows}x{cols}, above the limit of {limit}")]
    DimensionOverflow { rows: usize, cols: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix: pivot {pivot:e} at step {step} below threshold {threshold:e}")]
    Singular { step: usize, pivot: f64, threshold: f64 },
    #[error("tolerance {0:e} outside [1e-12, 1e-3]")]
    InvalidTolerance(f64),
    #[error("step size {step:e} fell below minimum {min_step:e} at t = {t}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },
    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),
    #[error("non-finite state during integration at t = {0}")]
    NonFiniteState(f64),
    #[error("invalid fit problem: {0}")]
    InvalidFit(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
