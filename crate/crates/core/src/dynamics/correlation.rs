use serde::Serialize;

use super::steady::steady_state;
use super::{check_ascending, DynamicsError, ModelParams, QuantumModel, Result, SteadyState};
use crate::numerics::{integrate_ode, CMatrix, OdeOptions, C64};

/// Relative change tolerated when `n_max` is raised by one.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;
const MIN_PHOTON_NUMBER: f64 = 1e-12;

fn require_light(state: &SteadyState) -> Result<f64> {
    let n = state.photon_number;
    if !(n >= MIN_PHOTON_NUMBER) {
        return Err(DynamicsError::Vacuum { photon_number: n });
    }
    Ok(n)
}

/// `⟨a†a†aa⟩ / ⟨a†a⟩²` of the steady state.
pub fn g2_zero(state: &SteadyState, model: &QuantumModel) -> Result<f64> {
    let n = require_light(state)?;
    let pairs: f64 = model
        .photon_counts()
        .iter()
        .enumerate()
        .map(|(i, &k)| k * (k - 1.0) * state.rho[(i, i)].re)
        .sum();
    Ok(pairs / (n * n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationResult {
    /// Delays, µs.
    pub taus: Vec<f64>,
    pub g2: Vec<f64>,
    pub g2_zero: f64,
    /// Largest `|tr ρ′(τ) − 1|` along the evolution.
    pub max_trace_drift: f64,
    /// Largest `max|ρ′ − ρ′†|` along the evolution.
    pub max_hermiticity_defect: f64,
}

/// `g²(τ)` from the quantum regression theorem: the conditional state
/// `a ρ a† / ⟨a†a⟩` evolves under the same Liouvillian and its photon number,
/// relative to the steady-state one, is the normalized correlation.
pub fn g2_tau(state: &SteadyState, model: &QuantumModel, taus: &[f64]) -> Result<CorrelationResult> {
    let n = require_light(state)?;
    check_ascending(taus, "tau")?;
    if taus.first() != Some(&0.0) {
        return Err(DynamicsError::TauOrigin);
    }
    let a = model.annihilation();
    let conditioned = (&(a * &state.rho) * &a.adjoint()).scale(C64::new(1.0 / n, 0.0));
    let t_end = *taus.last().unwrap_or(&0.0);
    let sol = integrate_ode(
        |_, y, dy| model.apply_liouvillian(y, dy),
        conditioned.as_slice(),
        (0.0, t_end),
        taus,
        &OdeOptions::default(),
    )?;
    let d = model.dim();
    let photons = model.photon_counts();
    let mut g2 = Vec::with_capacity(taus.len());
    let (mut max_trace_drift, mut max_hermiticity_defect) = (0.0f64, 0.0f64);
    for y in &sol.states {
        let rho = CMatrix::from_fn(d, d, |i, j| y[i * d + j]);
        max_trace_drift = max_trace_drift.max((rho.trace() - C64::new(1.0, 0.0)).norm());
        max_hermiticity_defect = max_hermiticity_defect.max(rho.hermiticity_defect());
        g2.push((0..d).map(|i| photons[i] * rho[(i, i)].re).sum::<f64>() / n);
    }
    Ok(CorrelationResult { taus: taus.to_vec(), g2_zero: g2_zero(state, model)?, g2, max_trace_drift, max_hermiticity_defect })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationReport {
    pub n_max: usize,
    pub photon_number: f64,
    pub photon_change: f64,
    /// Zero when the state is too dark for g²(0) to be defined.
    pub g2_change: f64,
}

/// Solves at `n_max` and `n_max + 1` and rejects the operating point if the
/// photon number or g²(0) moves by more than [`TRUNCATION_TOLERANCE`].
pub fn truncation_check(params: &ModelParams) -> Result<TruncationReport> {
    steady_state_checked(params).map(|(_, _, report)| report)
}

/// Steady state at `params.n_max` after passing [`truncation_check`].
pub fn steady_state_checked(params: &ModelParams) -> Result<(QuantumModel, SteadyState, TruncationReport)> {
    let coarse_model = QuantumModel::build(*params)?;
    let fine_model = QuantumModel::build(ModelParams { n_max: params.n_max + 1, ..*params })?;
    let coarse = steady_state(&coarse_model)?;
    let fine = steady_state(&fine_model)?;
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { ((a - b) / b).abs() };
    let photon_change = rel(coarse.photon_number, fine.photon_number);
    let g2_change = if fine.photon_number >= MIN_PHOTON_NUMBER && coarse.photon_number >= MIN_PHOTON_NUMBER {
        rel(g2_zero(&coarse, &coarse_model)?, g2_zero(&fine, &fine_model)?)
    } else {
        0.0
    };
    if photon_change > TRUNCATION_TOLERANCE || g2_change > TRUNCATION_TOLERANCE {
        return Err(DynamicsError::UnderTruncated { n_max: params.n_max, photon_change, g2_change });
    }
    let report = TruncationReport { n_max: params.n_max, photon_number: coarse.photon_number, photon_change, g2_change };
    Ok((coarse_model, coarse, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams {
            n_atoms: 0,
            n_max: 10,
            g_mhz: 0.0,
            kappa: 3.7,
            kappa1: 1.85,
            kappa2: 1.85,
            gamma: 2.6,
            delta: 0.0,
            delta_ac: 0.0,
            input_flux: 3.0,
        }
    }

    #[test]
    fn coherent_light_has_flat_correlations() {
        let m = QuantumModel::build(params()).unwrap();
        let s = steady_state(&m).unwrap();
        assert!((g2_zero(&s, &m).unwrap() - 1.0).abs() < 1e-6);
        let taus: Vec<f64> = (0..=20).map(|k| k as f64 * 0.02).collect();
        let c = g2_tau(&s, &m, &taus).unwrap();
        assert!(c.g2.iter().all(|g| (g - 1.0).abs() < 1e-6), "{:?}", c.g2);
    }

    #[test]
    fn vacuum_is_rejected() {
        let m = QuantumModel::build(ModelParams { input_flux: 0.0, ..params() }).unwrap();
        let s = steady_state(&m).unwrap();
        assert!(matches!(g2_zero(&s, &m), Err(DynamicsError::Vacuum { .. })));
    }

    #[test]
    fn tau_grid_is_validated() {
        let m = QuantumModel::build(params()).unwrap();
        let s = steady_state(&m).unwrap();
        assert_eq!(g2_tau(&s, &m, &[0.1, 0.2]).unwrap_err(), DynamicsError::TauOrigin);
        assert_eq!(g2_tau(&s, &m, &[0.0, 0.2, 0.1]).unwrap_err(), DynamicsError::NotAscending("tau"));
    }

    #[test]
    fn truncation_is_judged() {
        assert!(truncation_check(&params()).is_ok());
        let strong = ModelParams { n_max: 2, input_flux: 500.0, ..params() };
        assert!(matches!(truncation_check(&strong), Err(DynamicsError::UnderTruncated { n_max: 2, .. })));
    }
}
