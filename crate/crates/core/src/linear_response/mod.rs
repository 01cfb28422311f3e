//! Weak-probe optics of the non-reciprocal polariton.
//!
//! Rates follow the amplitude (HWHM) convention: an empty cavity transmits
//! the Lorentzian `1 / (1 + (Δ/κ)²)`, so its −3 dB full width is `2κ`.
//! All frequencies are in MHz of ordinary frequency; the transmission,
//! isolation and cooperativity are independent of any common 2π factor.

mod bandwidth;
mod fitting;
mod peaks;
mod sweep;
mod transmission;

pub use bandwidth::isolation_bandwidth;
pub use fitting::{fit_spectrum, FitParameter, SpectrumFit};
pub use peaks::{find_polariton_peaks, Peak};
pub use sweep::{sweep_1d, sweep_2d, SpectrumResult, Sweep2d};
pub use transmission::{ideal_isolation, isolation, ratio_to_db, transmission, Isolation, UNDERFLOW_TRANSMISSION};

use serde::Serialize;
use thiserror::Error;

use crate::numerics::NumericsError;
use crate::Branch;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearResponseError {
    #[error("invalid system parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("forward transmission {t_plus:e} underflows at Δ = {delta} MHz")]
    TransmissionUnderflow { delta: f64, t_plus: f64 },
    #[error("grid `{0}` is not strictly monotonic")]
    NonMonotonicGrid(&'static str),
    #[error("grid `{0}` is empty")]
    EmptyGrid(&'static str),
    #[error("no peak found in the {0} branch")]
    NoPeak(Branch),
    #[error("isolation {peak_db:.3} dB at Δ = 0 does not reach threshold {threshold_db} dB")]
    ThresholdNotMet { peak_db: f64, threshold_db: f64 },
    #[error("isolation stays above {threshold_db} dB out to |Δ| = {limit} MHz")]
    BandwidthUnbounded { threshold_db: f64, limit: f64 },
    #[error("spectrum fit did not converge: {0}")]
    FitNotConverged(String),
    #[error("{points} data points is fewer than 5x the {free} free parameters")]
    InsufficientData { points: usize, free: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Parameters of the closed-form transmission, all rates in MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemParams {
    /// Total cavity field decay rate.
    pub kappa: f64,
    /// External coupling through the input mirror.
    pub kappa1: f64,
    /// External coupling through the output mirror.
    pub kappa2: f64,
    /// Atomic polarization decay rate.
    pub gamma: f64,
    /// Cavity–atom detuning.
    pub delta_ac: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl SystemParams {
    /// Symmetric lossless mirrors (`κ₁ = κ₂ = κ/2`) and a resonant atom.
    pub fn symmetric(kappa: f64, gamma: f64, c_plus: f64, c_minus: f64) -> Self {
        Self { kappa, kappa1: kappa / 2.0, kappa2: kappa / 2.0, gamma, delta_ac: 0.0, c_plus, c_minus }
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<(), LinearResponseError> {
        let mut problems = Vec::new();
        let all = [
            ("kappa", self.kappa),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma", self.gamma),
            ("delta_ac", self.delta_ac),
            ("c_plus", self.c_plus),
            ("c_minus", self.c_minus),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                problems.push(format!("{name} = {v} is not finite"));
            }
        }
        for (name, v) in [("kappa1", self.kappa1), ("kappa2", self.kappa2), ("gamma", self.gamma)] {
            if !(v > 0.0) {
                problems.push(format!("{name} = {v} must be > 0"));
            }
        }
        if self.kappa1 + self.kappa2 > self.kappa * (1.0 + 1e-12) {
            problems.push(format!(
                "kappa = {} is smaller than kappa1 + kappa2 = {}",
                self.kappa,
                self.kappa1 + self.kappa2
            ));
        }
        for (name, v) in [("c_plus", self.c_plus), ("c_minus", self.c_minus)] {
            if !(v >= 0.0) {
                problems.push(format!("{name} = {v} must be >= 0"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(LinearResponseError::InvalidParams(problems))
        }
    }

    pub fn cooperativity(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.c_plus,
            Branch::Minus => self.c_minus,
        }
    }

    /// Collective coupling `√(2κγC)` of one branch, MHz.
    pub fn g_eff(&self, branch: Branch) -> f64 {
        (2.0 * self.kappa * self.gamma * self.cooperativity(branch)).sqrt()
    }

    pub fn with_delta_ac(mut self, delta_ac: f64) -> Self {
        self.delta_ac = delta_ac;
        self
    }

    pub fn with_cooperativities(mut self, c_plus: f64, c_minus: f64) -> Self {
        self.c_plus = c_plus;
        self.c_minus = c_minus;
        self
    }

    /// Exchanges the roles of the two propagation directions.
    pub fn swapped(mut self) -> Self {
        std::mem::swap(&mut self.c_plus, &mut self.c_minus);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_lists_every_problem() {
        let p = SystemParams { kappa: 1.0, kappa1: 0.8, kappa2: 0.8, gamma: -1.0, delta_ac: 0.0, c_plus: -2.0, c_minus: 0.0 };
        match p.validate() {
            Err(LinearResponseError::InvalidParams(list)) => assert_eq!(list.len(), 3, "{list:?}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SystemParams::symmetric(3.7, 2.6, 33.8, 0.0).validate().is_ok());
    }

    #[test]
    fn g_eff_inverts_cooperativity() {
        let p = SystemParams::symmetric(1.0, 1.0, 50.0, 0.0);
        assert!((p.g_eff(Branch::Plus) - 10.0).abs() < 1e-12);
        assert_eq!(p.g_eff(Branch::Minus), 0.0);
    }
}
