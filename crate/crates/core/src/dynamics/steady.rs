use rayon::prelude::*;
use serde::Serialize;

use super::{check_ascending, DynamicsError, ModelParams, QuantumModel, Result, TWO_PI};
use crate::numerics::{integrate_ode, solve_linear, CMatrix, OdeOptions, C64};

/// Largest Hilbert dimension solved by LU on the dense Liouvillian.
pub const LU_DIMENSION_LIMIT: usize = 64;
/// `‖dρ/dt‖` (rad/µs, Frobenius) at which time evolution counts as converged.
const EVOLUTION_RESIDUAL: f64 = 1e-9;
const MAX_EVOLUTION_CHUNKS: usize = 1000;
/// The integration error sets a floor of roughly `tol · ‖L‖` on the residual,
/// so steady-state evolution runs at the tightest tolerance.
const EVOLUTION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolverMethod {
    /// LU up to [`LU_DIMENSION_LIMIT`], time evolution above.
    Auto,
    Lu,
    Evolution,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteadyState {
    #[serde(skip)]
    pub rho: CMatrix,
    pub photon_number: f64,
    /// Output over input flux; 0 when undriven.
    pub transmission: f64,
    pub atomic_excitation: f64,
    pub method: SolverMethod,
    /// `‖L ρ‖` in rad/µs.
    pub residual: f64,
}

impl SteadyState {
    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.rho.as_slice().iter().map(|x| x.norm_sqr()).sum()
    }
}

pub fn steady_state(model: &QuantumModel) -> Result<SteadyState> {
    steady_state_with(model, SolverMethod::Auto)
}

pub fn steady_state_with(model: &QuantumModel, method: SolverMethod) -> Result<SteadyState> {
    let method = match method {
        SolverMethod::Auto if model.dim() <= LU_DIMENSION_LIMIT => SolverMethod::Lu,
        SolverMethod::Auto => SolverMethod::Evolution,
        m => m,
    };
    let vec_rho = match method {
        SolverMethod::Lu => solve_lu(model)?,
        _ => solve_evolution(model)?,
    };
    Ok(finish(model, vec_rho, method))
}

fn solve_lu(model: &QuantumModel) -> Result<Vec<C64>> {
    let d = model.dim();
    let mut l = model.liouvillian();
    for k in 0..d * d {
        l[(0, k)] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        l[(0, i * d + i)] = C64::new(1.0, 0.0);
    }
    let mut rhs = vec![C64::new(0.0, 0.0); d * d];
    rhs[0] = C64::new(1.0, 0.0);
    Ok(solve_linear(&l, &rhs)?)
}

fn solve_evolution(model: &QuantumModel) -> Result<Vec<C64>> {
    let p = model.params();
    let slowest = TWO_PI * p.kappa.min(p.gamma);
    let chunk = 5.0 / slowest;
    let opts = OdeOptions::with_tol(EVOLUTION_TOL)?;
    let mut rho = model.ground_state();
    let mut deriv = vec![C64::new(0.0, 0.0); rho.len()];
    let mut residual = f64::INFINITY;
    for step in 0..MAX_EVOLUTION_CHUNKS {
        let t0 = step as f64 * chunk;
        let sol = integrate_ode(|_, y, dy| model.apply_liouvillian(y, dy), &rho, (t0, t0 + chunk), &[], &opts)?;
        rho = sol.final_state;
        model.apply_liouvillian(&rho, &mut deriv);
        residual = frobenius(&deriv);
        if residual < EVOLUTION_RESIDUAL {
            return Ok(rho);
        }
    }
    Err(DynamicsError::NotConverged { time: MAX_EVOLUTION_CHUNKS as f64 * chunk, residual })
}

fn frobenius(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn finish(model: &QuantumModel, vec_rho: Vec<C64>, method: SolverMethod) -> SteadyState {
    let d = model.dim();
    let raw = CMatrix::from_fn(d, d, |i, j| vec_rho[i * d + j]);
    let rho = CMatrix::from_fn(d, d, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)].conj()));
    let mut deriv = vec![C64::new(0.0, 0.0); d * d];
    model.apply_liouvillian(rho.as_slice(), &mut deriv);
    let diag = |weights: &[f64]| (0..d).map(|i| weights[i] * rho[(i, i)].re).sum::<f64>();
    let photon_number = diag(model.photon_counts()).max(0.0);
    let atomic_excitation = diag(model.excitation_counts()).max(0.0);
    let p = model.params();
    let transmission = if p.input_flux > 0.0 { 2.0 * TWO_PI * p.kappa2 * photon_number / p.input_flux } else { 0.0 };
    SteadyState { rho, photon_number, transmission, atomic_excitation, method, residual: frobenius(&deriv) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaturationPoint {
    /// Photons per µs.
    pub input_flux: f64,
    pub output_flux: f64,
    pub photon_number: f64,
    /// Photons plus atomic excitations.
    pub polariton_number: f64,
    pub transmission: f64,
}

/// Steady states of `template` at each input flux, in input order.
pub fn saturation_curve(template: &ModelParams, fluxes: &[f64]) -> Result<Vec<SaturationPoint>> {
    check_ascending(fluxes, "input_flux")?;
    fluxes
        .par_iter()
        .map(|&input_flux| {
            let model = QuantumModel::build(ModelParams { input_flux, ..*template })?;
            let s = steady_state(&model)?;
            Ok(SaturationPoint {
                input_flux,
                output_flux: 2.0 * TWO_PI * template.kappa2 * s.photon_number,
                photon_number: s.photon_number,
                polariton_number: s.photon_number + s.atomic_excitation,
                transmission: s.transmission,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty(flux: f64, delta: f64) -> ModelParams {
        ModelParams {
            n_atoms: 0,
            n_max: 12,
            g_mhz: 0.0,
            kappa: 3.7,
            kappa1: 1.85,
            kappa2: 1.85,
            gamma: 2.6,
            delta,
            delta_ac: 0.0,
            input_flux: flux,
        }
    }

    #[test]
    fn driven_empty_cavity_is_coherent() {
        let p = empty(2.0, 0.0);
        let s = steady_state(&QuantumModel::build(p).unwrap()).unwrap();
        let eps = (2.0 * TWO_PI * p.kappa1 * p.input_flux).sqrt();
        let alpha2 = (eps / (TWO_PI * p.kappa)).powi(2);
        assert!((s.photon_number / alpha2 - 1.0).abs() < 1e-9, "{} vs {alpha2}", s.photon_number);
        assert!((s.purity() - 1.0).abs() < 1e-6);
        assert!((s.transmission - 1.0).abs() < 1e-9);
    }

    #[test]
    fn undriven_system_relaxes_to_ground() {
        let p = ModelParams { n_atoms: 2, n_max: 2, g_mhz: 4.0, ..empty(0.0, 0.3) };
        let s = steady_state(&QuantumModel::build(p).unwrap()).unwrap();
        assert_eq!(s.photon_number, 0.0);
        assert_eq!(s.transmission, 0.0);
        assert!((s.rho[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn both_solvers_agree_and_are_fixed_points() {
        let p = ModelParams { n_atoms: 2, n_max: 2, g_mhz: 6.0, delta_ac: 1.0, ..empty(5.0, -3.0) };
        let m = QuantumModel::build(p).unwrap();
        let lu = steady_state_with(&m, SolverMethod::Lu).unwrap();
        let ode = steady_state_with(&m, SolverMethod::Evolution).unwrap();
        assert_eq!(lu.method, SolverMethod::Lu);
        assert_eq!(ode.method, SolverMethod::Evolution);
        assert!(lu.residual < 1e-8 && ode.residual < 1e-8, "{} {}", lu.residual, ode.residual);
        assert!((&lu.rho - &ode.rho).max_abs() < 1e-9);
        for s in [&lu, &ode] {
            assert!((s.trace() - C64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn empty_branch_output_is_linear_in_input() {
        let curve = saturation_curve(&empty(0.0, 0.0), &[0.01, 0.1, 1.0, 5.0]).unwrap();
        let slope = curve[0].output_flux / curve[0].input_flux;
        for point in &curve {
            assert!((point.output_flux / point.input_flux / slope - 1.0).abs() < 1e-6);
        }
        assert!(saturation_curve(&empty(0.0, 0.0), &[1.0, 0.5]).is_err());
    }
}
