//! Population-weighted couplings: effective atom number, cooperativities and
//! dispersive cavity shifts from off-resonant hyperfine levels.

use serde::Serialize;

use super::population::PopulationDistribution;
use super::structure::TransitionTable;
use super::AtomicError;
use crate::Branch;

/// Direction-resolved cooperativities, with `c = g_eff² / (2κγ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CooperativityPair {
    pub c_plus: f64,
    pub c_minus: f64,
    /// Collective coupling of the σ₊ mode, MHz.
    pub g_eff_plus: f64,
    /// Collective coupling of the σ₋ mode, MHz.
    pub g_eff_minus: f64,
}

impl CooperativityPair {
    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.c_plus,
            Branch::Minus => self.c_minus,
        }
    }
}

/// `n_atoms · Σ_m p(m) · w(m → F′, m ± 1)` for the table's resonant level.
pub fn effective_atom_number(pop: &PopulationDistribution, table: &TransitionTable, n_atoms: f64, branch: Branch) -> f64 {
    let f_res = table.resonant_f_prime();
    n_atoms * pop.iter().map(|(m, p)| p * table.weight(m, branch, f_res)).sum::<f64>()
}

/// Cooperativities on the resonant transition for `n_atoms` atoms with
/// single-atom coupling `g0` on the stretched transition.
pub fn effective_cooperativity(
    pop: &PopulationDistribution,
    table: &TransitionTable,
    g0_mhz: f64,
    n_atoms: f64,
    kappa_mhz: f64,
    gamma_mhz: f64,
) -> Result<CooperativityPair, AtomicError> {
    for (name, v) in [("g0", g0_mhz), ("kappa", kappa_mhz), ("gamma", gamma_mhz)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(AtomicError::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if !(n_atoms >= 0.0 && n_atoms.is_finite()) {
        return Err(AtomicError::InvalidParameter(format!("atom number must be non-negative, got {n_atoms}")));
    }
    let g2 = |branch| g0_mhz * g0_mhz * effective_atom_number(pop, table, n_atoms, branch);
    let (g2_plus, g2_minus) = (g2(Branch::Plus), g2(Branch::Minus));
    let denom = 2.0 * kappa_mhz * gamma_mhz;
    Ok(CooperativityPair {
        c_plus: g2_plus / denom,
        c_minus: g2_minus / denom,
        g_eff_plus: g2_plus.sqrt(),
        g_eff_minus: g2_minus.sqrt(),
    })
}

/// Adiabatically eliminated contribution of every non-resonant level:
/// `n_atoms · g0² · Σ_F′ Σ_m p(m) w(m → F′) / Δ_F′`, returned as
/// `(shift_plus, shift_minus)` in MHz. `Δ_F′` is the level energy minus the
/// resonant level energy; the cavity is pulled by the negative of this.
pub fn dispersive_shift(
    pop: &PopulationDistribution,
    table: &TransitionTable,
    g0_mhz: f64,
    n_atoms: f64,
) -> Result<(f64, f64), AtomicError> {
    let f_res = table.resonant_f_prime();
    let mut shift = [0.0, 0.0];
    for (f_prime, detuning) in table.levels() {
        if f_prime == f_res {
            continue;
        }
        if detuning == 0.0 {
            return Err(AtomicError::ZeroDetuning(f_prime));
        }
        for (slot, branch) in shift.iter_mut().zip(Branch::BOTH) {
            let s: f64 = pop.iter().map(|(m, p)| p * table.weight(m, branch, f_prime)).sum();
            *slot += n_atoms * g0_mhz * g0_mhz * s / detuning;
        }
    }
    Ok((shift[0], shift[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::AtomicData;

    #[test]
    fn stretched_state_on_f3_has_no_sigma_minus_coupling() {
        let table = TransitionTable::cesium_d2(3).unwrap();
        let pop = PopulationDistribution::stretched(-4).unwrap();
        let c = effective_cooperativity(&pop, &table, 1.7, 1000.0, 3.7, 2.6).unwrap();
        assert_eq!(c.c_minus, 0.0);
        assert!(c.c_plus > 0.0);
    }

    #[test]
    fn uniform_population_is_reciprocal() {
        for f in [3, 4, 5] {
            let table = TransitionTable::cesium_d2(f).unwrap();
            let c = effective_cooperativity(&PopulationDistribution::uniform(), &table, 1.7, 230.0, 3.7, 2.6).unwrap();
            assert!((c.c_plus - c.c_minus).abs() <= 1e-12 * c.c_plus, "F'={f}");
        }
    }

    #[test]
    fn cooperativity_identity_holds() {
        let table = TransitionTable::cesium_d2(5).unwrap();
        let c = effective_cooperativity(&PopulationDistribution::linear_ramp(), &table, 1.2, 50.0, 3.7, 2.6).unwrap();
        assert!((c.c_plus - c.g_eff_plus.powi(2) / (2.0 * 3.7 * 2.6)).abs() < 1e-12);
        assert!((c.c_minus - c.g_eff_minus.powi(2) / (2.0 * 3.7 * 2.6)).abs() < 1e-12);
    }

    #[test]
    fn single_level_single_sublevel_shift_is_one_term() {
        let data = AtomicData::parse(
            "species = test\nground_f = 4\n\
             excited.5.energy_mhz = 0\nexcited.5.relative_strength = 0.6\n\
             excited.4.energy_mhz = -200\nexcited.4.relative_strength = 0.4\n",
        )
        .unwrap();
        let table = TransitionTable::new(&data, 5).unwrap();
        let pop = PopulationDistribution::stretched(1).unwrap();
        let (plus, minus) = dispersive_shift(&pop, &table, 2.0, 10.0).unwrap();
        let w_plus = data.weight(1, 1, 4, 2).unwrap();
        let w_minus = data.weight(1, -1, 4, 0).unwrap();
        assert!((plus - 10.0 * 4.0 * w_plus / -200.0).abs() < 1e-12);
        assert!((minus - 10.0 * 4.0 * w_minus / -200.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_level_is_a_singularity() {
        let data = AtomicData::parse(
            "species = test\nground_f = 4\n\
             excited.5.energy_mhz = 0\nexcited.5.relative_strength = 0.6\n\
             excited.4.energy_mhz = 0\nexcited.4.relative_strength = 0.4\n",
        )
        .unwrap();
        let table = TransitionTable::new(&data, 5).unwrap();
        let err = dispersive_shift(&PopulationDistribution::uniform(), &table, 1.0, 1.0).unwrap_err();
        assert_eq!(err, AtomicError::ZeroDetuning(4));
    }

    #[test]
    fn rejects_nonpositive_rates() {
        let table = TransitionTable::cesium_d2(5).unwrap();
        let pop = PopulationDistribution::uniform();
        assert!(effective_cooperativity(&pop, &table, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(effective_cooperativity(&pop, &table, 1.0, -1.0, 1.0, 1.0).is_err());
    }
}
