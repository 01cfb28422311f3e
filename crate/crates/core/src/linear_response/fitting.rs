use serde::Serialize;

use super::sweep::check_grid;
use super::transmission::transmission_raw;
use super::{LinearResponseError, SpectrumResult, SystemParams};
use crate::numerics::{fit_least_squares_with, FitOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FitParameter {
    Kappa,
    Kappa1,
    Kappa2,
    Gamma,
    DeltaAc,
    CPlus,
    CMinus,
}

impl FitParameter {
    pub const ALL: [FitParameter; 7] = [
        FitParameter::Kappa,
        FitParameter::Kappa1,
        FitParameter::Kappa2,
        FitParameter::Gamma,
        FitParameter::DeltaAc,
        FitParameter::CPlus,
        FitParameter::CMinus,
    ];

    /// Config-file spelling.
    pub fn name(self) -> &'static str {
        match self {
            FitParameter::Kappa => "kappa",
            FitParameter::Kappa1 => "kappa1",
            FitParameter::Kappa2 => "kappa2",
            FitParameter::Gamma => "gamma",
            FitParameter::DeltaAc => "delta_ac",
            FitParameter::CPlus => "c_plus",
            FitParameter::CMinus => "c_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn get(self, p: &SystemParams) -> f64 {
        match self {
            FitParameter::Kappa => p.kappa,
            FitParameter::Kappa1 => p.kappa1,
            FitParameter::Kappa2 => p.kappa2,
            FitParameter::Gamma => p.gamma,
            FitParameter::DeltaAc => p.delta_ac,
            FitParameter::CPlus => p.c_plus,
            FitParameter::CMinus => p.c_minus,
        }
    }

    fn set(self, p: &mut SystemParams, v: f64) {
        match self {
            FitParameter::Kappa => p.kappa = v,
            FitParameter::Kappa1 => p.kappa1 = v,
            FitParameter::Kappa2 => p.kappa2 = v,
            FitParameter::Gamma => p.gamma = v,
            FitParameter::DeltaAc => p.delta_ac = v,
            FitParameter::CPlus => p.c_plus = v,
            FitParameter::CMinus => p.c_minus = v,
        }
    }

    fn bounds(self, initial: f64) -> (f64, f64) {
        match self {
            FitParameter::Kappa | FitParameter::Kappa1 | FitParameter::Kappa2 | FitParameter::Gamma => {
                (1e-9, (100.0 * initial).max(1e3))
            }
            FitParameter::DeltaAc => {
                let r = (100.0 * initial.abs()).max(1e3);
                (-r, r)
            }
            FitParameter::CPlus | FitParameter::CMinus => (0.0, (100.0 * initial).max(1e4)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumFit {
    pub params: SystemParams,
    /// One-sigma estimates for each free parameter, in declaration order.
    pub uncertainties: Vec<(FitParameter, f64)>,
    /// `2κγC/g0²` for each branch, when a single-atom coupling was supplied.
    pub n_eff_plus: Option<f64>,
    pub n_eff_minus: Option<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Least-squares fit of both measured branches to the closed-form transmission.
///
/// Parameters not listed in `free` stay at their value in `initial`.
pub fn fit_spectrum(
    data: &SpectrumResult,
    initial: &SystemParams,
    free: &[FitParameter],
    g0: Option<f64>,
) -> Result<SpectrumFit, LinearResponseError> {
    initial.validate()?;
    check_grid(&data.deltas, "delta")?;
    let n = data.deltas.len();
    if data.t_plus.len() != n || data.t_minus.len() != n {
        return Err(LinearResponseError::FitNotConverged("branch lengths differ from the detuning grid".into()));
    }
    let mut free = free.to_vec();
    free.sort();
    free.dedup();
    if free.is_empty() {
        return Err(LinearResponseError::FitNotConverged("no free parameters".into()));
    }
    if 2 * n < 5 * free.len() {
        return Err(LinearResponseError::InsufficientData { points: 2 * n, free: free.len() });
    }
    let observed: Vec<f64> = data.t_plus.iter().chain(&data.t_minus).copied().collect();
    if observed.iter().any(|t| !t.is_finite()) {
        return Err(LinearResponseError::FitNotConverged("data contains non-finite values".into()));
    }
    if observed.iter().all(|&t| t == 0.0) {
        return Err(LinearResponseError::FitNotConverged("spectrum is identically zero".into()));
    }

    let start: Vec<f64> = free.iter().map(|f| f.get(initial)).collect();
    let mut bounds: Vec<(f64, f64)> = free.iter().zip(&start).map(|(f, &x)| f.bounds(x)).collect();
    let mirrors_fixed = !free.contains(&FitParameter::Kappa1) && !free.contains(&FitParameter::Kappa2);
    if let Some(k) = free.iter().position(|&f| f == FitParameter::Kappa) {
        if mirrors_fixed {
            bounds[k].0 = initial.kappa1 + initial.kappa2;
        }
    }
    let assemble = |x: &[f64]| {
        let mut p = *initial;
        for (f, &v) in free.iter().zip(x) {
            f.set(&mut p, v);
        }
        p
    };
    let model = |x: &[f64]| {
        let p = assemble(x);
        let mut out = Vec::with_capacity(2 * n);
        out.extend(data.deltas.iter().map(|&d| transmission_raw(&p, p.c_plus, d)));
        out.extend(data.deltas.iter().map(|&d| transmission_raw(&p, p.c_minus, d)));
        out
    };
    let result = fit_least_squares_with(model, &observed, &start, &bounds, &FitOptions::default())?;
    if !result.converged {
        return Err(LinearResponseError::FitNotConverged(format!(
            "iteration budget exhausted after {} evaluations",
            result.iterations
        )));
    }
    let params = assemble(&result.parameters);
    params.validate()?;
    let uncertainties = free.iter().copied().zip(result.standard_errors()).collect();
    let n_eff = |c: f64| g0.map(|g| 2.0 * params.kappa * params.gamma * c / (g * g));
    Ok(SpectrumFit {
        params,
        uncertainties,
        n_eff_plus: n_eff(params.c_plus),
        n_eff_minus: n_eff(params.c_minus),
        residual_norm: result.residual_norm,
        iterations: result.iterations,
    })
}
