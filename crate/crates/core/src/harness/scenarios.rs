use std::path::Path;

use rayon::prelude::*;

use super::csv::{isolation_db, read_spectrum_csv, Cell, CsvTable};
use super::{Coupling, HarnessError, RunConfig, Scenario};
use crate::atomic::{dispersive_shift, effective_atom_number, effective_cooperativity, AtomicError, TransitionTable};
use crate::dynamics::{
    g2_tau, g2_zero, steady_state_checked, BranchSpec, DynamicsError, QuantumModel, StatisticsScenario, SteadyState,
};
use crate::linear_response::{
    find_polariton_peaks, fit_spectrum, ideal_isolation, ratio_to_db, transmission, FitParameter, LinearResponseError,
    SpectrumResult, SystemParams,
};
use crate::Branch;

pub(crate) type Outputs = Vec<(&'static str, CsvTable)>;

fn atomic_err(context: impl Into<String>) -> impl FnOnce(AtomicError) -> HarnessError {
    let context = context.into();
    move |source| HarnessError::Atomic { context, source }
}

fn linear_err(context: impl Into<String>) -> impl FnOnce(LinearResponseError) -> HarnessError {
    let context = context.into();
    move |source| HarnessError::Linear { context, source }
}

fn dynamics_err(context: impl Into<String>) -> impl FnOnce(DynamicsError) -> HarnessError {
    let context = context.into();
    move |source| HarnessError::Dynamics { context, source }
}

/// Runs the configured scenario; relative input paths resolve against `input_root`.
pub(crate) fn compute(config: &RunConfig, input_root: &Path) -> Result<Outputs, HarnessError> {
    match config.scenario {
        Scenario::Spectrum => spectrum(config),
        Scenario::Sweep2d => sweep2d(config),
        Scenario::IsolationVsC => isolation_vs_c(config),
        Scenario::Saturation => saturation(config),
        Scenario::G2 => g2(config),
        Scenario::Fit => fit(config, input_root),
        Scenario::Cooperativity => cooperativity(config),
    }
}

fn table(config: &RunConfig) -> Result<TransitionTable, HarnessError> {
    TransitionTable::cesium_d2(config.resonant_f_prime).map_err(atomic_err("transition table"))
}

/// Closed-form parameters with the configured rates; the branch-specific
/// pieces come from [`branches`].
fn base_params(config: &RunConfig) -> SystemParams {
    SystemParams {
        kappa: config.kappa_mhz,
        kappa1: config.kappa1(),
        kappa2: config.kappa2(),
        gamma: config.gamma_mhz,
        delta_ac: config.delta_ac_mhz,
        c_plus: config.c_plus.unwrap_or(0.0),
        c_minus: config.c_minus.unwrap_or(0.0),
    }
}

/// Both branches as cooperativity, cavity–atom detuning and cavity pull.
fn branches(config: &RunConfig) -> Result<StatisticsScenario, HarnessError> {
    let base = base_params(config);
    match config.coupling {
        Coupling::Direct => {
            let plus = BranchSpec { cooperativity: base.c_plus, delta_ac: config.delta_ac_mhz, cavity_pull: 0.0 };
            let minus = BranchSpec {
                cooperativity: base.c_minus,
                delta_ac: config.delta_ac_minus_mhz.unwrap_or(config.delta_ac_mhz),
                cavity_pull: 0.0,
            };
            Ok(StatisticsScenario {
                kappa: base.kappa,
                kappa1: base.kappa1,
                kappa2: base.kappa2,
                gamma: base.gamma,
                plus,
                minus,
                n_atoms: config.sim_atoms,
                n_max: config.n_max,
                input_flux: config.drive_flux_per_us,
            })
        }
        Coupling::Atomic => {
            let pop = config.population().map_err(atomic_err("populations"))?;
            StatisticsScenario::from_atoms(
                &pop,
                &table(config)?,
                config.g0_mhz.unwrap_or(f64::NAN),
                config.n_atoms.unwrap_or(f64::NAN),
                (base.kappa, base.kappa1, base.kappa2, base.gamma),
                config.delta_ac_mhz,
                config.sim_atoms,
                config.n_max,
                config.drive_flux_per_us,
            )
            .map_err(dynamics_err("atomic couplings"))
        }
    }
}

/// Weak-probe transmission of one branch at probe detuning `delta` from the bare cavity.
fn linear_t(base: &SystemParams, spec: &BranchSpec, delta: f64) -> f64 {
    let p = base.with_delta_ac(spec.delta_ac).with_cooperativities(spec.cooperativity, 0.0);
    transmission(&p, delta - spec.cavity_pull, Branch::Plus)
}

fn linear_spectrum(base: &SystemParams, s: &StatisticsScenario, deltas: &[f64], delta_ac: f64) -> SpectrumResult {
    let (t_plus, t_minus): (Vec<f64>, Vec<f64>) =
        deltas.par_iter().map(|&d| (linear_t(base, &s.plus, d), linear_t(base, &s.minus, d))).unzip();
    let isolation_db = t_plus.iter().zip(&t_minus).map(|(&p, &m)| isolation_db(p, m)).collect();
    SpectrumResult { delta_ac, deltas: deltas.to_vec(), t_plus, t_minus, isolation_db }
}

fn peaks(spectrum: &SpectrumResult, branch: Branch) -> Result<Vec<(f64, f64)>, HarnessError> {
    match find_polariton_peaks(spectrum, branch) {
        Ok(list) => Ok(list.iter().map(|p| (p.delta, p.height)).collect()),
        Err(LinearResponseError::NoPeak(_)) => Ok(Vec::new()),
        Err(e) => Err(linear_err(format!("{branch} peaks"))(e)),
    }
}

fn grid_values(grid: Option<super::Grid>, name: &str) -> Result<Vec<f64>, HarnessError> {
    grid.map(|g| g.values()).ok_or_else(|| {
        HarnessError::Config(super::ConfigError::Invalid(vec![format!("scenario needs the {name} grid")]))
    })
}

fn spectrum(config: &RunConfig) -> Result<Outputs, HarnessError> {
    let base = base_params(config);
    base.validate().map_err(linear_err("spectrum"))?;
    let s = branches(config)?;
    let deltas = grid_values(config.delta, "delta")?;
    let spec = linear_spectrum(&base, &s, &deltas, config.delta_ac_mhz);
    let mut out = CsvTable::new(&["delta_mhz", "t_plus", "t_minus", "isolation_db"]);
    for i in 0..spec.len() {
        out.push(vec![spec.deltas[i].into(), spec.t_plus[i].into(), spec.t_minus[i].into(), spec.isolation_db[i].into()]);
    }
    let mut pk = CsvTable::new(&["branch", "delta_mhz", "height"]);
    for branch in Branch::BOTH {
        for (d, h) in peaks(&spec, branch)? {
            pk.push(vec![branch.name().into(), d.into(), h.into()]);
        }
    }
    Ok(vec![("spectrum.csv", out), ("peaks.csv", pk)])
}

fn sweep2d(config: &RunConfig) -> Result<Outputs, HarnessError> {
    let base = base_params(config);
    base.validate().map_err(linear_err("sweep2d"))?;
    let s = branches(config)?;
    let deltas = grid_values(config.delta, "delta")?;
    let delta_acs = grid_values(config.delta_ac, "delta_ac")?;
    // The grid replaces `delta_ac_mhz`; per-branch offsets and pulls are kept.
    let rows: Vec<SpectrumResult> = delta_acs
        .par_iter()
        .map(|&dac| {
            let shift = dac - config.delta_ac_mhz;
            let mut shifted = s;
            shifted.plus.delta_ac += shift;
            shifted.minus.delta_ac += shift;
            linear_spectrum(&base, &shifted, &deltas, dac)
        })
        .collect();
    let mut out = CsvTable::new(&["delta_ac_mhz", "delta_mhz", "t_plus", "t_minus", "isolation_db"]);
    let mut pk = CsvTable::new(&["delta_ac_mhz", "branch", "delta_mhz", "height"]);
    for row in &rows {
        for i in 0..row.len() {
            out.push(vec![
                row.delta_ac.into(),
                row.deltas[i].into(),
                row.t_plus[i].into(),
                row.t_minus[i].into(),
                row.isolation_db[i].into(),
            ]);
        }
        for branch in Branch::BOTH {
            for (d, h) in peaks(row, branch)? {
                pk.push(vec![row.delta_ac.into(), branch.name().into(), d.into(), h.into()]);
            }
        }
    }
    Ok(vec![("sweep2d.csv", out), ("peaks2d.csv", pk)])
}

/// Truncation-checked steady state of one branch.
fn solve_branch(
    s: &StatisticsScenario,
    branch: Branch,
    delta: f64,
    context: &str,
) -> Result<(QuantumModel, SteadyState), HarnessError> {
    let ctx = || format!("{context}, {branch} branch, delta = {delta} MHz, flux = {} per us", s.input_flux);
    let params = s.model_params(branch, delta).map_err(|e| dynamics_err(ctx())(e))?;
    let (model, state, _) = steady_state_checked(&params).map_err(|e| dynamics_err(ctx())(e))?;
    Ok((model, state))
}

fn fluxes(config: &RunConfig) -> Vec<f64> {
    config.flux_list_per_us.clone().unwrap_or_else(|| vec![config.drive_flux_per_us])
}

fn isolation_vs_c(config: &RunConfig) -> Result<Outputs, HarnessError> {
    let base = base_params(config);
    let list = config.c_plus_list.clone().unwrap_or_default();
    let s = branches(config)?;
    let delta = config.probe_delta_mhz;
    let mut curve = CsvTable::new(&["c_plus", "ideal_db", "linear_db"]);
    for &c in &list {
        let plus = BranchSpec { cooperativity: c, ..s.plus };
        let db = isolation_db(linear_t(&base, &plus, delta), linear_t(&base, &s.minus, delta));
        curve.push(vec![c.into(), ratio_to_db(ideal_isolation(c)).into(), db.into()]);
    }
    let points: Vec<(f64, f64)> = list.iter().flat_map(|&c| fluxes(config).into_iter().map(move |f| (c, f))).collect();
    let solved = points
        .par_iter()
        .map(|&(c, input_flux)| {
            let mut sc = StatisticsScenario { input_flux, ..s };
            sc.plus.cooperativity = c;
            let context = format!("isolation_vs_c at c_plus = {c}");
            let (_, sp) = solve_branch(&sc, Branch::Plus, delta, &context)?;
            let (_, sm) = solve_branch(&sc, Branch::Minus, delta, &context)?;
            Ok((sp, sm))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut master = CsvTable::new(&[
        "c_plus",
        "input_flux_per_us",
        "t_plus",
        "t_minus",
        "isolation_db",
        "photons_plus",
        "photons_minus",
        "polaritons_plus",
    ]);
    for (&(c, f), (sp, sm)) in points.iter().zip(&solved) {
        master.push(vec![
            c.into(),
            f.into(),
            sp.transmission.into(),
            sm.transmission.into(),
            isolation_db(sp.transmission, sm.transmission).into(),
            sp.photon_number.into(),
            sm.photon_number.into(),
            (sp.photon_number + sp.atomic_excitation).into(),
        ]);
    }
    Ok(vec![("isolation_vs_c.csv", curve), ("isolation_vs_c_master.csv", master)])
}

fn saturation(config: &RunConfig) -> Result<Outputs, HarnessError> {
    let s = branches(config)?;
    let delta = config.probe_delta_mhz;
    let flux = fluxes(config);
    let solved = flux
        .par_iter()
        .map(|&input_flux| {
            let sc = StatisticsScenario { input_flux, ..s };
            let (_, sp) = solve_branch(&sc, Branch::Plus, delta, "saturation")?;
            let (_, sm) = solve_branch(&sc, Branch::Minus, delta, "saturation")?;
            Ok((sp, sm))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut out = CsvTable::new(&[
        "input_flux_per_us",
        "output_plus_per_us",
        "output_minus_per_us",
        "photons_plus",
        "photons_minus",
        "polaritons_plus",
        "polaritons_minus",
        "t_plus",
        "t_minus",
        "isolation_db",
    ]);
    for (&f, (sp, sm)) in flux.iter().zip(&solved) {
        out.push(vec![
            f.into(),
            (sp.transmission * f).into(),
            (sm.transmission * f).into(),
            sp.photon_number.into(),
            sm.photon_number.into(),
            (sp.photon_number + sp.atomic_excitation).into(),
            (sm.photon_number + sm.atomic_excitation).into(),
            sp.transmission.into(),
            sm.transmission.into(),
            isolation_db(sp.transmission, sm.transmission).into(),
        ]);
    }
    Ok(vec![("saturation.csv", out)])
}

fn g2(config: &RunConfig) -> Result<Outputs, HarnessError> {
    let s = branches(config)?;
    let taus = grid_values(config.tau, "tau")?;
    let delta = config.probe_delta_mhz;
    let curves = Branch::BOTH
        .par_iter()
        .map(|&branch| {
            let (model, state) = solve_branch(&s, branch, delta, "g2")?;
            g2_tau(&state, &model, &taus).map_err(dynamics_err(format!("g2 correlations, {branch} branch")))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut tau_table = CsvTable::new(&["tau_us", "g2_plus", "g2_minus"]);
    for (i, &t) in taus.iter().enumerate() {
        tau_table.push(vec![t.into(), curves[0].g2[i].into(), curves[1].g2[i].into()]);
    }
    let mut outputs = vec![("g2_tau.csv", tau_table)];
    if let Some(grid) = config.delta {
        let rows = grid
            .values()
            .par_iter()
            .map(|&d| {
                let mut row = vec![Cell::from(d)];
                let mut g = Vec::new();
                for branch in Branch::BOTH {
                    let (model, state) = solve_branch(&s, branch, d, "g2 spectrum")?;
                    row.push(state.transmission.into());
                    g.push(g2_zero(&state, &model).map_err(dynamics_err(format!("g2(0), {branch} branch, delta = {d} MHz")))?);
                }
                row.extend(g.into_iter().map(Cell::from));
                Ok(row)
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let mut zero = CsvTable::new(&["delta_mhz", "t_plus", "t_minus", "g2_plus", "g2_minus"]);
        for row in rows {
            zero.push(row);
        }
        outputs.push(("g2_zero.csv", zero));
    }
    Ok(outputs)
}

fn fit(config: &RunConfig, input_root: &Path) -> Result<Outputs, HarnessError> {
    let rel = config.input_csv.as_deref().unwrap_or_default();
    let data = read_spectrum_csv(&input_root.join(rel))?;
    let initial = SystemParams { delta_ac: config.delta_ac_mhz, ..base_params(config) };
    let free = config.fit_free.clone().unwrap_or_default();
    let result = fit_spectrum(&data, &initial, &free, config.g0_mhz).map_err(linear_err(format!("fitting {rel}")))?;
    let mut params = CsvTable::new(&["parameter", "value", "std_error", "free"]);
    for p in FitParameter::ALL {
        let err = result.uncertainties.iter().find(|(q, _)| *q == p).map_or(f64::NAN, |(_, e)| *e);
        let is_free: i64 = free.contains(&p).into();
        params.push(vec![p.name().into(), p.get(&result.params).into(), err.into(), is_free.into()]);
    }
    let mut summary = CsvTable::new(&["quantity", "value"]);
    summary.push(vec!["residual_norm".into(), result.residual_norm.into()]);
    summary.push(vec!["iterations".into(), (result.iterations as i64).into()]);
    summary.push(vec!["n_eff_plus".into(), result.n_eff_plus.unwrap_or(f64::NAN).into()]);
    summary.push(vec!["n_eff_minus".into(), result.n_eff_minus.unwrap_or(f64::NAN).into()]);
    Ok(vec![("fit.csv", params), ("fit_summary.csv", summary)])
}

fn cooperativity(config: &RunConfig) -> Result<Outputs, HarnessError> {
    let pop = config.population().map_err(atomic_err("populations"))?;
    let table = table(config)?;
    let (g0, n) = (config.g0_mhz.unwrap_or(f64::NAN), config.n_atoms.unwrap_or(f64::NAN));
    let coop = effective_cooperativity(&pop, &table, g0, n, config.kappa_mhz, config.gamma_mhz)
        .map_err(atomic_err("cooperativity"))?;
    let (shift_plus, shift_minus) = dispersive_shift(&pop, &table, g0, n).map_err(atomic_err("dispersive shift"))?;
    let mut out = CsvTable::new(&["quantity", "value"]);
    let rows = [
        ("c_plus", coop.c_plus),
        ("c_minus", coop.c_minus),
        ("g_eff_plus_mhz", coop.g_eff_plus),
        ("g_eff_minus_mhz", coop.g_eff_minus),
        ("n_eff_plus", effective_atom_number(&pop, &table, n, Branch::Plus)),
        ("n_eff_minus", effective_atom_number(&pop, &table, n, Branch::Minus)),
        ("dispersive_shift_plus_mhz", shift_plus),
        ("dispersive_shift_minus_mhz", shift_minus),
        ("ideal_isolation_db", ratio_to_db(ideal_isolation(coop.c_plus))),
    ];
    for (name, v) in rows {
        out.push(vec![name.into(), v.into()]);
    }
    let f_res = table.resonant_f_prime();
    let mut levels = CsvTable::new(&["m_f", "population", "weight_plus", "weight_minus"]);
    for (m, p) in pop.iter() {
        levels.push(vec![
            i64::from(m).into(),
            p.into(),
            table.weight(m, Branch::Plus, f_res).into(),
            table.weight(m, Branch::Minus, f_res).into(),
        ]);
    }
    Ok(vec![("cooperativity.csv", out), ("sublevels.csv", levels)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_config;

    fn run(text: &str) -> Outputs {
        compute(&parse_config(text).unwrap(), Path::new(".")).unwrap()
    }

    fn column(t: &CsvTable, name: &str) -> Vec<f64> {
        let text = t.render();
        let mut lines = text.lines();
        let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
        lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
    }

    #[test]
    fn direct_branches_carry_separate_detunings() {
        let c = parse_config(
            "scenario = g2\nkappa_mhz = 3.7\ngamma_mhz = 2.6\nc_plus = 15.1\nc_minus = 50.8\ndelta_ac_minus_mhz = 6\ntau_max_us = 1\ntau_points = 3\n",
        )
        .unwrap();
        let s = branches(&c).unwrap();
        assert_eq!((s.plus.cooperativity, s.plus.delta_ac), (15.1, 0.0));
        assert_eq!((s.minus.cooperativity, s.minus.delta_ac), (50.8, 6.0));
    }

    #[test]
    fn sweep_rows_follow_the_grid() {
        let out = run(
            "scenario = sweep2d\nkappa_mhz = 3.7\ngamma_mhz = 2.6\nc_plus = 33.8\ndelta_min_mhz = -50\ndelta_max_mhz = 50\ndelta_points = 201\ndelta_ac_min_mhz = -20\ndelta_ac_max_mhz = 20\ndelta_ac_points = 3\n",
        );
        assert_eq!(out[0].1.len(), 603);
        let dac = column(&out[0].1, "delta_ac_mhz");
        assert_eq!((dac[0], dac[201], dac[602]), (-20.0, 0.0, 20.0));
        // Two polaritons per row on the coupled branch, one bare-cavity peak on the other.
        assert_eq!(out[1].1.len(), 3 * 3);
    }

    #[test]
    fn atomic_cooperativity_reports_sublevels() {
        let out = run(
            "scenario = cooperativity\nkappa_mhz = 3.7\ngamma_mhz = 2.6\ncoupling = atomic\ng0_mhz = 1.7\nn_atoms = 230\npump_target_m = 4\n",
        );
        let values = column(&out[0].1, "value");
        let expected = 1.7f64.powi(2) * 230.0 / (2.0 * 3.7 * 2.6);
        assert!((values[0] / expected - 1.0).abs() < 1e-12, "{} vs {expected}", values[0]);
        assert_eq!(out[1].1.len(), 9);
    }

    #[test]
    fn saturation_reports_both_directions() {
        let out = run(
            "scenario = saturation\nkappa_mhz = 3.7\ngamma_mhz = 2.6\nc_plus = 15.1\nflux_list_per_us = 0.01, 1\nsim_atoms = 1\nn_max = 4\n",
        );
        let t_minus = column(&out[0].1, "t_minus");
        assert!(t_minus.iter().all(|t| (t - 1.0).abs() < 1e-6), "{t_minus:?}");
        let t_plus = column(&out[0].1, "t_plus");
        assert!(t_plus[1] > t_plus[0]);
    }
}
