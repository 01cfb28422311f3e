use serde::Serialize;

use super::sparse::SparseOp;
use super::{DynamicsError, Result, TWO_PI};
use crate::linear_response::SystemParams;
use crate::numerics::{kron, CMatrix, C64};
use crate::Branch;

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// One branch of the driven system. Rates and detunings in MHz, flux in
/// photons per µs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    /// Highest cavity Fock state kept.
    pub n_max: usize,
    /// Single-atom coupling.
    pub g_mhz: f64,
    pub kappa: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma: f64,
    /// Probe–cavity detuning.
    pub delta: f64,
    pub delta_ac: f64,
    pub input_flux: f64,
}

impl ModelParams {
    /// Branch model reproducing `system`'s cooperativity with `n_atoms`
    /// identical atoms: `g = √(2κγC / N)`. A branch with `C = 0` carries no
    /// atoms at all and gets a Fock cutoff sized to its coherent state.
    pub fn from_system(
        system: &SystemParams,
        branch: Branch,
        n_atoms: usize,
        n_max: usize,
        delta: f64,
        input_flux: f64,
    ) -> Result<Self> {
        system.validate()?;
        let c = system.cooperativity(branch);
        let (n_atoms, g_mhz) = if c == 0.0 {
            (0, 0.0)
        } else if n_atoms == 0 {
            return Err(DynamicsError::InvalidParams(vec![format!(
                "{branch} branch has C = {c} but no atoms to carry it"
            )]));
        } else {
            (n_atoms, (2.0 * system.kappa * system.gamma * c / n_atoms as f64).sqrt())
        };
        let p = Self {
            n_atoms,
            n_max,
            g_mhz,
            kappa: system.kappa,
            kappa1: system.kappa1,
            kappa2: system.kappa2,
            gamma: system.gamma,
            delta,
            delta_ac: system.delta_ac,
            input_flux,
        }
        .with_bare_cavity_cutoff();
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, v) in [
            ("g_mhz", self.g_mhz),
            ("kappa", self.kappa),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("delta_ac", self.delta_ac),
            ("input_flux", self.input_flux),
        ] {
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
            problems.push(format!("kappa = {} is smaller than kappa1 + kappa2", self.kappa));
        }
        if self.g_mhz < 0.0 {
            problems.push(format!("g_mhz = {} must be >= 0", self.g_mhz));
        }
        if self.input_flux < 0.0 {
            problems.push(format!("input_flux = {} must be >= 0", self.input_flux));
        }
        if self.n_max == 0 {
            problems.push("n_max must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(DynamicsError::InvalidParams(problems))
        }
    }

    /// Drive amplitude `√(2κ₁·flux)` expressed in MHz.
    pub fn drive_mhz(&self) -> f64 {
        (2.0 * TWO_PI * self.kappa1 * self.input_flux).sqrt() / TWO_PI
    }

    /// Collective coupling `√N·g`, MHz.
    pub fn g_eff(&self) -> f64 {
        (self.n_atoms as f64).sqrt() * self.g_mhz
    }

    pub fn cooperativity(&self) -> f64 {
        self.g_eff().powi(2) / (2.0 * self.kappa * self.gamma)
    }

    /// Photon number of the coherent state an empty cavity settles into.
    pub fn bare_cavity_photons(&self) -> f64 {
        let detuning = 1.0 + (self.delta / self.kappa).powi(2);
        2.0 * self.kappa1 * self.input_flux / (TWO_PI * self.kappa * self.kappa * detuning)
    }

    /// Raises `n_max` of an atom-free model so the Poisson tail of its
    /// coherent state is negligible: `n̄ + 10√n̄ + 10`.
    pub fn with_bare_cavity_cutoff(mut self) -> Self {
        if self.n_atoms == 0 {
            let n = self.bare_cavity_photons();
            self.n_max = self.n_max.max((n + 10.0 * n.sqrt() + 10.0).ceil() as usize);
        }
        self
    }

    pub fn dimension(&self) -> Option<usize> {
        let atoms = 1usize.checked_shl(u32::try_from(self.n_atoms).ok()?)?;
        atoms.checked_mul(self.n_max.checked_add(1)?)
    }
}

/// Operators of one branch, in angular units (rad/µs).
#[derive(Clone, Debug)]
pub struct QuantumModel {
    params: ModelParams,
    dim: usize,
    a: CMatrix,
    sigmas: Vec<CMatrix>,
    b: CMatrix,
    hamiltonian: CMatrix,
    collapse: Vec<CMatrix>,
    effective: SparseOp,
    jumps: Vec<SparseOp>,
    photons: Vec<f64>,
    excitations: Vec<f64>,
}

impl QuantumModel {
    pub fn build(params: ModelParams) -> Result<Self> {
        Self::build_with_cap(params, DEFAULT_DIMENSION_CAP)
    }

    pub fn build_with_cap(params: ModelParams, cap: usize) -> Result<Self> {
        params.validate()?;
        let dim = params.dimension().unwrap_or(usize::MAX);
        if dim > cap {
            return Err(DynamicsError::DimensionCap { dim, cap });
        }
        let n = params.n_atoms;
        let levels = params.n_max + 1;
        let atom_dim = dim / levels;

        let destroy = CMatrix::from_fn(levels, levels, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let lower = CMatrix::from_fn(2, 2, |i, j| C64::new(if i == 0 && j == 1 { 1.0 } else { 0.0 }, 0.0));
        let a = kron(&destroy, &CMatrix::identity(atom_dim))?;
        let mut sigmas = Vec::with_capacity(n);
        for j in 0..n {
            let left = CMatrix::identity(levels << j);
            let right = CMatrix::identity(1 << (n - j - 1));
            sigmas.push(kron(&kron(&left, &lower)?, &right)?);
        }
        let mut b = CMatrix::zeros(dim, dim);
        for s in &sigmas {
            b = &b + s;
        }

        let w = |mhz: f64| TWO_PI * mhz;
        let re = |x: f64| C64::new(x, 0.0);
        let ad = a.adjoint();
        let bd = b.adjoint();
        let eps = (2.0 * w(params.kappa1) * params.input_flux).sqrt();
        let mut h = (&ad * &a).scale(re(-w(params.delta)));
        let sum_ee = sigmas.iter().fold(CMatrix::zeros(dim, dim), |acc, s| &acc + &(&s.adjoint() * s));
        h = &h + &sum_ee.scale(re(-w(params.delta + params.delta_ac)));
        h = &h + &(&(&ad * &b) + &(&bd * &a)).scale(re(w(params.g_mhz)));
        h = &h + &(&a + &ad).scale(re(eps));

        let mut collapse = vec![a.scale(re((2.0 * w(params.kappa)).sqrt()))];
        for s in &sigmas {
            collapse.push(s.scale(re((2.0 * w(params.gamma)).sqrt())));
        }
        let mut k = h.clone();
        for c in &collapse {
            k = &k - &(&c.adjoint() * c).scale(C64::new(0.0, 0.5));
        }

        let photons = (0..dim).map(|i| (i / atom_dim) as f64).collect();
        let excitations = (0..dim).map(|i| ((i % atom_dim).count_ones()) as f64).collect();
        Ok(Self {
            params,
            dim,
            effective: SparseOp::from_dense(&k),
            jumps: collapse.iter().map(SparseOp::from_dense).collect(),
            a,
            sigmas,
            b,
            hamiltonian: h,
            collapse,
            photons,
            excitations,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn annihilation(&self) -> &CMatrix {
        &self.a
    }

    pub fn sigma(&self, atom: usize) -> &CMatrix {
        &self.sigmas[atom]
    }

    /// Collective lowering operator `Σⱼ σⱼ`.
    pub fn collective_lowering(&self) -> &CMatrix {
        &self.b
    }

    /// Rotating-frame Hamiltonian in rad/µs.
    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn collapse_operators(&self) -> &[CMatrix] {
        &self.collapse
    }

    /// Cavity photon number of each basis state.
    pub(crate) fn photon_counts(&self) -> &[f64] {
        &self.photons
    }

    pub(crate) fn excitation_counts(&self) -> &[f64] {
        &self.excitations
    }

    /// `dρ/dt` for row-major `ρ`.
    pub fn apply_liouvillian(&self, rho: &[C64], out: &mut [C64]) {
        let d = self.dim;
        out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        self.effective.add_left(C64::new(0.0, -1.0), rho, out, d);
        self.effective.add_right_adjoint(C64::new(0.0, 1.0), rho, out, d);
        for c in &self.jumps {
            c.add_sandwich(rho, out, d);
        }
    }

    /// Dense Liouvillian acting on row-major `vec(ρ)`:
    /// `−i K⊗I + i I⊗K̄ + Σ c⊗c̄` with `K = H − (i/2)Σ c†c`.
    pub fn liouvillian(&self) -> CMatrix {
        let d = self.dim;
        let n = d * d;
        let mut l = CMatrix::zeros(n, n);
        let minus_i = C64::new(0.0, -1.0);
        for &(i, k, v) in self.effective.entries() {
            for j in 0..d {
                l[(i * d + j, k * d + j)] += minus_i * v;
                l[(j * d + i, j * d + k)] -= minus_i * v.conj();
            }
        }
        for c in &self.jumps {
            for &(i, k, v) in c.entries() {
                for &(j, m, w) in c.entries() {
                    l[(i * d + j, k * d + m)] += v * w.conj();
                }
            }
        }
        l
    }

    /// Ground state of atoms and cavity as a row-major density matrix.
    pub(crate) fn ground_state(&self) -> Vec<C64> {
        let mut rho = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        rho[0] = C64::new(1.0, 0.0);
        rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::symmetric_eigen;

    fn params(n_atoms: usize, n_max: usize) -> ModelParams {
        ModelParams {
            n_atoms,
            n_max,
            g_mhz: 5.0,
            kappa: 3.7,
            kappa1: 1.85,
            kappa2: 1.85,
            gamma: 2.6,
            delta: 0.7,
            delta_ac: 0.0,
            input_flux: 0.0,
        }
    }

    #[test]
    fn empty_cavity_has_one_collapse_operator() {
        let p = ModelParams { input_flux: 2.0, ..params(0, 3) };
        let m = QuantumModel::build(p).unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.collapse_operators().len(), 1);
        let eps = (2.0 * TWO_PI * 1.85 * 2.0f64).sqrt();
        let a = m.annihilation();
        let want = &(&a.adjoint() * a).scale(C64::new(-TWO_PI * 0.7, 0.0)) + &(a + &a.adjoint()).scale(C64::new(eps, 0.0));
        assert!((m.hamiltonian() - &want).max_abs() < 1e-12);
    }

    #[test]
    fn operators_are_consistent() {
        let m = QuantumModel::build(ModelParams { input_flux: 1.0, ..params(2, 2) }).unwrap();
        assert_eq!(m.dim(), 12);
        assert!(m.hamiltonian().hermiticity_defect() < 1e-12);
        // Bosonic commutator holds below the truncation edge.
        let a = m.annihilation();
        let comm = &(a * &a.adjoint()) - &(&a.adjoint() * a);
        for i in 0..8 {
            assert!((comm[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // Each σⱼ squares to zero and commutes with a.
        for j in 0..2 {
            let s = m.sigma(j);
            assert!((s * s).max_abs() < 1e-15);
            assert!((&(s * a) - &(a * s)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let err = QuantumModel::build_with_cap(params(4, 3), 32).unwrap_err();
        assert_eq!(err, DynamicsError::DimensionCap { dim: 64, cap: 32 });
        assert!(matches!(QuantumModel::build(params(200, 3)), Err(DynamicsError::DimensionCap { .. })));
    }

    fn single_excitation_eigenvalues(m: &QuantumModel) -> Vec<f64> {
        let (photons, excitations) = (m.photon_counts(), m.excitation_counts());
        let idx: Vec<usize> = (0..m.dim()).filter(|&i| photons[i] + excitations[i] == 1.0).collect();
        let k = idx.len();
        let h = m.hamiltonian();
        let block: Vec<f64> = (0..k * k).map(|t| h[(idx[t / k], idx[t % k])].re / TWO_PI).collect();
        symmetric_eigen(&block, k).values
    }

    #[test]
    fn vacuum_rabi_doublet() {
        for n in 1..=4 {
            let m = QuantumModel::build(params(n, 2)).unwrap();
            let values = single_excitation_eigenvalues(&m);
            let split = (n as f64).sqrt() * 5.0;
            assert!((values[0] - (-0.7 - split)).abs() < 1e-10, "{values:?}");
            assert!((values[values.len() - 1] - (-0.7 + split)).abs() < 1e-10);
            // N − 1 dark states sit at the bare atomic energy.
            for v in &values[1..values.len() - 1] {
                assert!((v + 0.7).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn from_system_preserves_cooperativity() {
        let sys = SystemParams::symmetric(3.7, 2.6, 15.1, 0.0);
        for n in 1..=4 {
            let p = ModelParams::from_system(&sys, Branch::Plus, n, 2, 0.0, 1.0).unwrap();
            assert!((p.cooperativity() - 15.1).abs() < 1e-12);
        }
        let empty = ModelParams::from_system(&sys, Branch::Minus, 3, 2, 0.0, 1.0).unwrap();
        assert_eq!(empty.n_atoms, 0);
        assert!(empty.n_max >= 10);
        assert!(ModelParams::from_system(&sys, Branch::Plus, 0, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn dense_and_sparse_liouvillians_agree() {
        let m = QuantumModel::build(ModelParams { input_flux: 3.0, ..params(2, 2) }).unwrap();
        let d = m.dim();
        let rho: Vec<C64> = (0..d * d).map(|k| C64::new((k % 7) as f64 * 0.1, (k % 5) as f64 * -0.2)).collect();
        let mut sparse = vec![C64::new(0.0, 0.0); d * d];
        m.apply_liouvillian(&rho, &mut sparse);
        let dense = m.liouvillian().mul_vec(&rho).unwrap();
        let err = sparse.iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }
}
