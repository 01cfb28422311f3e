use serde::Serialize;

use super::correlation::{g2_tau, g2_zero};
use super::steady::steady_state;
use super::{CorrelationResult, DynamicsError, ModelParams, QuantumModel, Result};
use crate::atomic::{dispersive_shift, effective_cooperativity, PopulationDistribution, TransitionTable};
use crate::Branch;

/// Per-branch inputs of the reduced model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchSpec {
    pub cooperativity: f64,
    /// Cavity–atom detuning seen by this branch, MHz.
    pub delta_ac: f64,
    /// Frequency shift of this branch's cavity mode away from the bare
    /// cavity, MHz. The probe detuning stays referenced to the bare cavity.
    pub cavity_pull: f64,
}

/// Two independent single-branch models sharing cavity and atomic rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatisticsScenario {
    pub kappa: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma: f64,
    pub plus: BranchSpec,
    pub minus: BranchSpec,
    /// Simulated atoms per branch; the single-atom coupling is scaled so that
    /// each branch keeps its cooperativity.
    pub n_atoms: usize,
    pub n_max: usize,
    pub input_flux: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatisticsResult {
    pub delta: f64,
    pub g2_plus: f64,
    pub g2_minus: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub photon_plus: f64,
    pub photon_minus: f64,
}

impl StatisticsScenario {
    /// Derives both branches from Zeeman populations. Off-resonant hyperfine
    /// levels pull each cavity mode by the negative of its dispersive shift,
    /// which also moves the branch's cavity–atom detuning.
    #[allow(clippy::too_many_arguments)]
    pub fn from_atoms(
        pop: &PopulationDistribution,
        table: &TransitionTable,
        g0: f64,
        physical_atoms: f64,
        rates: (f64, f64, f64, f64),
        delta_ac: f64,
        n_atoms: usize,
        n_max: usize,
        input_flux: f64,
    ) -> Result<Self> {
        let (kappa, kappa1, kappa2, gamma) = rates;
        let coop = effective_cooperativity(pop, table, g0, physical_atoms, kappa, gamma)?;
        let (shift_plus, shift_minus) = dispersive_shift(pop, table, g0, physical_atoms)?;
        let spec = |c: f64, shift: f64| BranchSpec { cooperativity: c, delta_ac: delta_ac - shift, cavity_pull: -shift };
        Ok(Self {
            kappa,
            kappa1,
            kappa2,
            gamma,
            plus: spec(coop.c_plus, shift_plus),
            minus: spec(coop.c_minus, shift_minus),
            n_atoms,
            n_max,
            input_flux,
        })
    }

    pub fn branch(&self, branch: Branch) -> &BranchSpec {
        match branch {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }

    /// Model of one branch probed at `delta` from the bare cavity. A branch
    /// with `C = 0` is the bare cavity: no atoms, and a Fock cutoff sized to
    /// its coherent state.
    pub fn model_params(&self, branch: Branch, delta: f64) -> Result<ModelParams> {
        let spec = self.branch(branch);
        if !(spec.cooperativity >= 0.0) || (spec.cooperativity > 0.0 && self.n_atoms == 0) {
            return Err(DynamicsError::InvalidParams(vec![format!(
                "{branch} branch needs C >= 0 and atoms to carry it (C = {}, atoms = {})",
                spec.cooperativity, self.n_atoms
            )]));
        }
        let n_atoms = if spec.cooperativity == 0.0 { 0 } else { self.n_atoms };
        let g_mhz = if n_atoms == 0 { 0.0 } else { (2.0 * self.kappa * self.gamma * spec.cooperativity / n_atoms as f64).sqrt() };
        let p = ModelParams {
            n_atoms,
            n_max: self.n_max,
            g_mhz,
            kappa: self.kappa,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            gamma: self.gamma,
            delta: delta - spec.cavity_pull,
            delta_ac: spec.delta_ac,
            input_flux: self.input_flux,
        }
        .with_bare_cavity_cutoff();
        p.validate()?;
        Ok(p)
    }

    pub fn evaluate(&self, delta: f64) -> Result<StatisticsResult> {
        let mut out = [(0.0, 0.0, 0.0); 2];
        for (slot, branch) in out.iter_mut().zip(Branch::BOTH) {
            let model = QuantumModel::build(self.model_params(branch, delta)?)?;
            let s = steady_state(&model)?;
            *slot = (g2_zero(&s, &model)?, s.transmission, s.photon_number);
        }
        Ok(StatisticsResult {
            delta,
            g2_plus: out[0].0,
            g2_minus: out[1].0,
            t_plus: out[0].1,
            t_minus: out[1].1,
            photon_plus: out[0].2,
            photon_minus: out[1].2,
        })
    }

    /// `g²(τ)` of both branches at probe detuning `delta`.
    pub fn correlations(&self, delta: f64, taus: &[f64]) -> Result<(CorrelationResult, CorrelationResult)> {
        let run = |branch| -> Result<CorrelationResult> {
            let model = QuantumModel::build(self.model_params(branch, delta)?)?;
            g2_tau(&steady_state(&model)?, &model, taus)
        };
        Ok((run(Branch::Plus)?, run(Branch::Minus)?))
    }
}

/// Steady-state transmission and g²(0) of both branches at `delta`.
pub fn nonreciprocal_statistics(scenario: &StatisticsScenario, delta: f64) -> Result<StatisticsResult> {
    scenario.evaluate(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(plus: BranchSpec, minus: BranchSpec) -> StatisticsScenario {
        StatisticsScenario {
            kappa: 3.7,
            kappa1: 1.85,
            kappa2: 1.85,
            gamma: 2.6,
            plus,
            minus,
            n_atoms: 2,
            n_max: 3,
            input_flux: 0.05,
        }
    }

    #[test]
    fn equal_branches_are_reciprocal() {
        let b = BranchSpec { cooperativity: 8.0, delta_ac: 2.0, cavity_pull: 0.0 };
        let r = scenario(b, b).evaluate(-3.0).unwrap();
        assert!((r.g2_plus - r.g2_minus).abs() < 1e-6);
        assert!((r.t_plus - r.t_minus).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_branch_is_a_bare_cavity() {
        let on = BranchSpec { cooperativity: 8.0, delta_ac: 0.0, cavity_pull: 0.0 };
        let off = BranchSpec { cooperativity: 0.0, ..on };
        let s = scenario(on, off);
        assert_eq!(s.model_params(Branch::Minus, 0.0).unwrap().n_atoms, 0);
        let r = s.evaluate(0.0).unwrap();
        assert!((r.g2_minus - 1.0).abs() < 1e-6);
        assert!((r.t_minus - 1.0).abs() < 1e-9);
        let negative = BranchSpec { cooperativity: -1.0, ..on };
        assert!(scenario(on, negative).evaluate(0.0).is_err());
    }

    #[test]
    fn atomic_constructor_uses_populations() {
        let table = TransitionTable::cesium_d2(5).unwrap();
        let pop = PopulationDistribution::uniform();
        let s = StatisticsScenario::from_atoms(&pop, &table, 1.7, 230.0, (3.7, 1.85, 1.85, 2.6), 0.0, 2, 3, 0.05).unwrap();
        assert!((s.plus.cooperativity - s.minus.cooperativity).abs() < 1e-12);
        assert!((s.plus.cavity_pull - s.minus.cavity_pull).abs() < 1e-12);
        // F′=4 and F′=3 lie below F′=5, so the cavity is pushed upward.
        assert!(s.plus.cavity_pull > 0.0);
        assert!((s.plus.delta_ac - s.plus.cavity_pull).abs() < 1e-12);
    }
}
