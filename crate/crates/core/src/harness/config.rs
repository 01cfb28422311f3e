use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::atomic::PopulationDistribution;
use crate::dynamics::DEFAULT_DIMENSION_CAP;
use crate::linear_response::FitParameter;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scenario {
    Spectrum,
    Sweep2d,
    IsolationVsC,
    Saturation,
    G2,
    Fit,
    Cooperativity,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Spectrum,
        Scenario::Sweep2d,
        Scenario::IsolationVsC,
        Scenario::Saturation,
        Scenario::G2,
        Scenario::Fit,
        Scenario::Cooperativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Sweep2d => "sweep2d",
            Scenario::IsolationVsC => "isolation_vs_c",
            Scenario::Saturation => "saturation",
            Scenario::G2 => "g2",
            Scenario::Fit => "fit",
            Scenario::Cooperativity => "cooperativity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the two branch cooperativities are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coupling {
    /// `c_plus` and `c_minus` given directly.
    Direct,
    /// Derived from `g0_mhz`, `n_atoms` and the Zeeman populations.
    Atomic,
}

/// Evenly spaced grid including both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.points - 1) as f64;
        (0..self.points).map(|k| self.min + span * k as f64 / last).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub kappa_mhz: f64,
    /// Defaults to `kappa_mhz / 2`.
    pub kappa1_mhz: Option<f64>,
    pub kappa2_mhz: Option<f64>,
    pub gamma_mhz: f64,
    pub delta_ac_mhz: f64,
    /// Cavity–atom detuning of the σ₋ branch when it differs from σ₊.
    pub delta_ac_minus_mhz: Option<f64>,
    pub coupling: Coupling,
    pub c_plus: Option<f64>,
    pub c_minus: Option<f64>,
    pub g0_mhz: Option<f64>,
    pub n_atoms: Option<f64>,
    pub populations: Option<[f64; 9]>,
    pub resonant_f_prime: i32,
    pub pump_fidelity: Option<f64>,
    pub pump_target_m: Option<i32>,
    pub sim_atoms: usize,
    pub n_max: usize,
    pub drive_flux_per_us: f64,
    pub flux_list_per_us: Option<Vec<f64>>,
    pub c_plus_list: Option<Vec<f64>>,
    pub probe_delta_mhz: f64,
    pub delta: Option<Grid>,
    pub delta_ac: Option<Grid>,
    /// Starts at 0.
    pub tau: Option<Grid>,
    pub input_csv: Option<String>,
    pub fit_free: Option<Vec<FitParameter>>,
    pub output_dir: Option<String>,
}

const KEYS: &[&str] = &[
    "scenario",
    "kappa_mhz",
    "kappa1_mhz",
    "kappa2_mhz",
    "gamma_mhz",
    "delta_ac_mhz",
    "delta_ac_minus_mhz",
    "coupling",
    "c_plus",
    "c_minus",
    "g0_mhz",
    "n_atoms",
    "populations",
    "resonant_f_prime",
    "pump_fidelity",
    "pump_target_m",
    "sim_atoms",
    "n_max",
    "drive_flux_per_us",
    "flux_list_per_us",
    "c_plus_list",
    "probe_delta_mhz",
    "delta_min_mhz",
    "delta_max_mhz",
    "delta_points",
    "delta_ac_min_mhz",
    "delta_ac_max_mhz",
    "delta_ac_points",
    "tau_max_us",
    "tau_points",
    "input_csv",
    "fit_free",
    "output_dir",
];

#[derive(Clone, Debug)]
struct Entry {
    /// 0 for command-line overrides.
    line: usize,
    value: String,
}

impl Entry {
    fn origin(&self) -> String {
        if self.line == 0 {
            "--set".into()
        } else {
            format!("line {}", self.line)
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_overrides(text, &[])
}

/// Parses `key = value` lines, then applies `overrides` on top, replacing
/// any value from the text.
pub fn parse_config_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, message: format!("expected `key = value`, found `{content}`") })?;
        let key = key.trim();
        check_key(key).map_err(|message| ConfigError::Syntax { line, message })?;
        if let Some(prev) = entries.get(key) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("duplicate key `{key}` (first set on {})", prev.origin()),
            });
        }
        entries.insert(key.to_string(), Entry { line, value: value.trim().to_string() });
    }
    for (key, value) in overrides {
        let key = key.trim();
        check_key(key).map_err(|message| ConfigError::Invalid(vec![format!("--set: {message}")]))?;
        entries.insert(key.to_string(), Entry { line: 0, value: value.trim().to_string() });
    }
    RunConfig::from_entries(&entries)
}

fn check_key(key: &str) -> Result<(), String> {
    if KEYS.contains(&key) {
        Ok(())
    } else if key.is_empty() {
        Err("missing key before `=`".into())
    } else {
        Err(format!("unknown key `{key}`"))
    }
}

/// Typed access to the entries that accumulates every problem.
struct Reader<'a> {
    entries: &'a BTreeMap<String, Entry>,
    problems: Vec<String>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn problem(&mut self, key: &str, message: impl fmt::Display) {
        match self.entries.get(key) {
            Some(e) => self.problems.push(format!("{}: {key} {message}", e.origin())),
            None => self.problems.push(format!("{key} {message}")),
        }
    }

    fn parsed<T>(&mut self, key: &str, parse: impl Fn(&str) -> Option<T>, what: &str) -> Option<T> {
        let e = self.raw(key)?.clone();
        let v = parse(&e.value);
        if v.is_none() {
            self.problem(key, format_args!("= `{}` is not {what}", e.value));
        }
        v
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        self.parsed(key, |s| s.parse::<f64>().ok().filter(|x| x.is_finite()), "a finite number")
    }

    fn count(&mut self, key: &str) -> Option<usize> {
        self.parsed(key, |s| s.parse::<usize>().ok(), "a non-negative integer")
    }

    fn int(&mut self, key: &str) -> Option<i32> {
        self.parsed(key, |s| s.parse::<i32>().ok(), "an integer")
    }

    fn list(&mut self, key: &str) -> Option<Vec<f64>> {
        self.parsed(
            key,
            |s| s.split(',').map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite())).collect(),
            "a comma-separated list of finite numbers",
        )
    }

    fn required_float(&mut self, key: &str) -> f64 {
        if self.raw(key).is_none() {
            self.problems.push(format!("{key} is required"));
        }
        self.float(key).unwrap_or(f64::NAN)
    }

    fn grid(&mut self, prefix: &str, unit: &str) -> Option<Grid> {
        let (kmin, kmax, kpts) = (format!("{prefix}_min_{unit}"), format!("{prefix}_max_{unit}"), format!("{prefix}_points"));
        let present = [&kmin, &kmax, &kpts].iter().filter(|k| self.raw(k).is_some()).count();
        if present == 0 {
            return None;
        }
        if present < 3 {
            self.problems.push(format!("{kmin}, {kmax} and {kpts} must be given together"));
            return None;
        }
        let (min, max, points) = (self.float(&kmin)?, self.float(&kmax)?, self.count(&kpts)?);
        if points == 0 {
            self.problem(&kpts, "must be at least 1");
        } else if points > 1 && !(max > min) {
            self.problem(&kmax, format_args!("= {max} must exceed {kmin} = {min}"));
        }
        Some(Grid { min, max, points })
    }
}

impl RunConfig {
    fn from_entries(entries: &BTreeMap<String, Entry>) -> Result<Self, ConfigError> {
        let mut r = Reader { entries, problems: Vec::new() };
        let scenario = match r.raw("scenario").map(|e| e.value.clone()) {
            None => {
                r.problems.push("scenario is required".into());
                Scenario::Spectrum
            }
            Some(v) => Scenario::from_name(&v).unwrap_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                r.problem("scenario", format_args!("= `{v}` is not one of {}", names.join(", ")));
                Scenario::Spectrum
            }),
        };
        let coupling = match r.raw("coupling").map(|e| e.value.clone()).as_deref() {
            None | Some("direct") => Coupling::Direct,
            Some("atomic") => Coupling::Atomic,
            Some(v) => {
                r.problem("coupling", format_args!("= `{v}` is not `direct` or `atomic`"));
                Coupling::Direct
            }
        };
        let populations = r.list("populations").and_then(|p| match <[f64; 9]>::try_from(p.as_slice()) {
            Ok(arr) => Some(arr),
            Err(_) => {
                r.problem("populations", format_args!("has {} values, expected 9 (m = -4 … +4)", p.len()));
                None
            }
        });
        let fit_free = r.raw("fit_free").map(|e| e.value.clone()).and_then(|v| {
            let mut out = Vec::new();
            for name in v.split(',').map(str::trim) {
                match FitParameter::from_name(name) {
                    Some(p) => out.push(p),
                    None => {
                        r.problem("fit_free", format_args!("names unknown parameter `{name}`"));
                        return None;
                    }
                }
            }
            Some(out)
        });
        let tau = match (r.raw("tau_max_us").is_some(), r.raw("tau_points").is_some()) {
            (false, false) => None,
            (true, true) => match (r.float("tau_max_us"), r.count("tau_points")) {
                (Some(max), Some(points)) => Some(Grid { min: 0.0, max, points }),
                _ => None,
            },
            _ => {
                r.problems.push("tau_max_us and tau_points must be given together".into());
                None
            }
        };
        let text = |r: &Reader, key: &str| r.raw(key).map(|e| e.value.clone());
        let config = RunConfig {
            scenario,
            kappa_mhz: r.required_float("kappa_mhz"),
            kappa1_mhz: r.float("kappa1_mhz"),
            kappa2_mhz: r.float("kappa2_mhz"),
            gamma_mhz: r.required_float("gamma_mhz"),
            delta_ac_mhz: r.float("delta_ac_mhz").unwrap_or(0.0),
            delta_ac_minus_mhz: r.float("delta_ac_minus_mhz"),
            coupling,
            c_plus: r.float("c_plus"),
            c_minus: r.float("c_minus"),
            g0_mhz: r.float("g0_mhz"),
            n_atoms: r.float("n_atoms"),
            populations,
            resonant_f_prime: r.int("resonant_f_prime").unwrap_or(5),
            pump_fidelity: r.float("pump_fidelity"),
            pump_target_m: r.int("pump_target_m"),
            sim_atoms: r.count("sim_atoms").unwrap_or(2),
            n_max: r.count("n_max").unwrap_or(3),
            drive_flux_per_us: r.float("drive_flux_per_us").unwrap_or(0.01),
            flux_list_per_us: r.list("flux_list_per_us"),
            c_plus_list: r.list("c_plus_list"),
            probe_delta_mhz: r.float("probe_delta_mhz").unwrap_or(0.0),
            delta: r.grid("delta", "mhz"),
            delta_ac: r.grid("delta_ac", "mhz"),
            tau,
            input_csv: text(&r, "input_csv"),
            fit_free,
            output_dir: text(&r, "output_dir"),
        };
        config.check(&mut r);
        if r.problems.is_empty() {
            Ok(config)
        } else {
            Err(ConfigError::Invalid(r.problems))
        }
    }

    /// Range and consistency checks; every violation is recorded.
    fn check(&self, r: &mut Reader) {
        let positive = |r: &mut Reader, key: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v > 0.0) {
                    r.problem(key, format_args!("= {v} must be > 0"));
                }
            }
        };
        positive(r, "kappa_mhz", Some(self.kappa_mhz).filter(|v| !v.is_nan()));
        positive(r, "gamma_mhz", Some(self.gamma_mhz).filter(|v| !v.is_nan()));
        positive(r, "kappa1_mhz", self.kappa1_mhz);
        positive(r, "kappa2_mhz", self.kappa2_mhz);
        let (k1, k2) = (self.kappa1(), self.kappa2());
        if k1 + k2 > self.kappa_mhz * (1.0 + 1e-12) {
            r.problems.push(format!("kappa1_mhz + kappa2_mhz = {} exceeds kappa_mhz = {}", k1 + k2, self.kappa_mhz));
        }

        match self.coupling {
            Coupling::Direct => {
                for (key, v) in [("c_plus", self.c_plus), ("c_minus", self.c_minus)] {
                    if let Some(v) = v.filter(|v| !(*v >= 0.0)) {
                        r.problem(key, format_args!("= {v} must be >= 0"));
                    }
                }
                for key in ["populations", "pump_target_m", "pump_fidelity", "n_atoms"] {
                    if r.raw(key).is_some() {
                        r.problem(key, "applies only to coupling = atomic");
                    }
                }
            }
            Coupling::Atomic => {
                for key in ["c_plus", "c_minus", "delta_ac_minus_mhz"] {
                    if r.raw(key).is_some() {
                        r.problem(key, "applies only to coupling = direct");
                    }
                }
                if self.g0_mhz.is_none() {
                    r.problems.push("g0_mhz is required with coupling = atomic".into());
                }
                if self.n_atoms.is_none() {
                    r.problems.push("n_atoms is required with coupling = atomic".into());
                }
                positive(r, "g0_mhz", self.g0_mhz);
                positive(r, "n_atoms", self.n_atoms);
                match (self.populations, self.pump_target_m) {
                    (Some(_), Some(_)) => r.problems.push("give either populations or pump_target_m, not both".into()),
                    (None, None) => r.problems.push("coupling = atomic needs populations or pump_target_m".into()),
                    _ => {}
                }
                if let Err(e) = self.population() {
                    let key = if self.populations.is_some() { "populations" } else { "pump_target_m" };
                    r.problem(key, format_args!("is invalid: {e}"));
                }
                if ![3, 4, 5].contains(&self.resonant_f_prime) {
                    r.problem("resonant_f_prime", format_args!("= {} is not 3, 4 or 5", self.resonant_f_prime));
                }
            }
        }

        if self.n_max == 0 {
            r.problem("n_max", "must be at least 1");
        }
        let dim = u32::try_from(self.sim_atoms)
            .ok()
            .and_then(|n| 1usize.checked_shl(n))
            .and_then(|a| a.checked_mul(self.n_max + 2));
        if dim.is_none_or(|d| d > DEFAULT_DIMENSION_CAP) {
            r.problems.push(format!(
                "sim_atoms = {} with n_max = {} exceeds the Hilbert dimension cap {DEFAULT_DIMENSION_CAP} (including the truncation check at n_max + 1)",
                self.sim_atoms, self.n_max
            ));
        }
        if !(self.drive_flux_per_us >= 0.0) {
            r.problem("drive_flux_per_us", format_args!("= {} must be >= 0", self.drive_flux_per_us));
        }
        if let Some(list) = &self.flux_list_per_us {
            if list.iter().any(|&f| !(f > 0.0)) || list.windows(2).any(|w| !(w[1] > w[0])) {
                r.problem("flux_list_per_us", "must be positive and strictly ascending");
            }
        }
        if let Some(list) = &self.c_plus_list {
            if list.iter().any(|&c| !(c >= 0.0)) {
                r.problem("c_plus_list", "entries must be >= 0");
            }
        }
        if let Some(t) = &self.tau {
            if !(t.max > 0.0) {
                r.problem("tau_max_us", format_args!("= {} must be > 0", t.max));
            }
            if t.points < 2 {
                r.problem("tau_points", "must be at least 2");
            }
        }

        let mut need = |present: bool, what: &str| {
            if !present {
                r.problems.push(format!("scenario {} needs {what}", self.scenario));
            }
        };
        match self.scenario {
            Scenario::Spectrum => need(self.delta.is_some(), "delta_min_mhz/delta_max_mhz/delta_points"),
            Scenario::Sweep2d => {
                need(self.delta.is_some(), "delta_min_mhz/delta_max_mhz/delta_points");
                need(self.delta_ac.is_some(), "delta_ac_min_mhz/delta_ac_max_mhz/delta_ac_points");
            }
            Scenario::IsolationVsC => need(self.c_plus_list.is_some(), "c_plus_list"),
            Scenario::Saturation => need(self.flux_list_per_us.is_some(), "flux_list_per_us"),
            Scenario::G2 => {
                need(self.tau.is_some(), "tau_max_us/tau_points");
                need(self.drive_flux_per_us > 0.0, "drive_flux_per_us > 0");
            }
            Scenario::Fit => {
                need(self.input_csv.is_some(), "input_csv");
                need(self.fit_free.as_ref().is_some_and(|f| !f.is_empty()), "fit_free");
                need(self.coupling == Coupling::Direct, "coupling = direct (initial guesses)");
            }
            Scenario::Cooperativity => need(self.coupling == Coupling::Atomic, "coupling = atomic"),
        }
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1_mhz.unwrap_or(self.kappa_mhz / 2.0)
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2_mhz.unwrap_or(self.kappa_mhz / 2.0)
    }

    /// Zeeman populations for `coupling = atomic`.
    pub fn population(&self) -> Result<PopulationDistribution, crate::atomic::AtomicError> {
        match (self.populations, self.pump_target_m) {
            (Some(p), _) => PopulationDistribution::new(p),
            (None, Some(m)) => PopulationDistribution::pumped(m, self.pump_fidelity.unwrap_or(1.0)),
            (None, None) => Ok(PopulationDistribution::uniform()),
        }
    }

    /// Canonical text form; parsing it gives back an identical config.
    pub fn to_text(&self) -> String {
        let f = |x: f64| format!("{x:?}");
        let list = |v: &[f64]| v.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ");
        let mut lines: Vec<(&str, String)> = vec![("scenario", self.scenario.name().into())];
        lines.push(("kappa_mhz", f(self.kappa_mhz)));
        if let Some(v) = self.kappa1_mhz {
            lines.push(("kappa1_mhz", f(v)));
        }
        if let Some(v) = self.kappa2_mhz {
            lines.push(("kappa2_mhz", f(v)));
        }
        lines.push(("gamma_mhz", f(self.gamma_mhz)));
        lines.push(("delta_ac_mhz", f(self.delta_ac_mhz)));
        if let Some(v) = self.delta_ac_minus_mhz {
            lines.push(("delta_ac_minus_mhz", f(v)));
        }
        lines.push(("coupling", match self.coupling {
            Coupling::Direct => "direct".into(),
            Coupling::Atomic => "atomic".into(),
        }));
        for (key, v) in [("c_plus", self.c_plus), ("c_minus", self.c_minus), ("g0_mhz", self.g0_mhz), ("n_atoms", self.n_atoms)] {
            if let Some(v) = v {
                lines.push((key, f(v)));
            }
        }
        if let Some(p) = &self.populations {
            lines.push(("populations", list(p)));
        }
        lines.push(("resonant_f_prime", self.resonant_f_prime.to_string()));
        if let Some(v) = self.pump_fidelity {
            lines.push(("pump_fidelity", f(v)));
        }
        if let Some(v) = self.pump_target_m {
            lines.push(("pump_target_m", v.to_string()));
        }
        lines.push(("sim_atoms", self.sim_atoms.to_string()));
        lines.push(("n_max", self.n_max.to_string()));
        lines.push(("drive_flux_per_us", f(self.drive_flux_per_us)));
        if let Some(v) = &self.flux_list_per_us {
            lines.push(("flux_list_per_us", list(v)));
        }
        if let Some(v) = &self.c_plus_list {
            lines.push(("c_plus_list", list(v)));
        }
        lines.push(("probe_delta_mhz", f(self.probe_delta_mhz)));
        if let Some(g) = &self.delta {
            lines.push(("delta_min_mhz", f(g.min)));
            lines.push(("delta_max_mhz", f(g.max)));
            lines.push(("delta_points", g.points.to_string()));
        }
        if let Some(g) = &self.delta_ac {
            lines.push(("delta_ac_min_mhz", f(g.min)));
            lines.push(("delta_ac_max_mhz", f(g.max)));
            lines.push(("delta_ac_points", g.points.to_string()));
        }
        if let Some(g) = &self.tau {
            lines.push(("tau_max_us", f(g.max)));
            lines.push(("tau_points", g.points.to_string()));
        }
        if let Some(v) = &self.input_csv {
            lines.push(("input_csv", v.clone()));
        }
        if let Some(v) = &self.fit_free {
            lines.push(("fit_free", v.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")));
        }
        if let Some(v) = &self.output_dir {
            lines.push(("output_dir", v.clone()));
        }
        let mut out = String::new();
        for (k, v) in lines {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scenario = spectrum\nkappa_mhz = 3.7\ngamma_mhz = 2.6\ndelta_min_mhz = -1\ndelta_max_mhz = 1\ndelta_points = 3\n";

    fn problems(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(ConfigError::Invalid(list)) => list,
            other => panic!("expected validation errors, got {other:?}"),
        }
    }

    #[test]
    fn parses_values_and_defaults() {
        let c = parse_config(&format!("# comment\n{MINIMAL}c_plus = 33.8   # trailing\n")).unwrap();
        assert_eq!(c.kappa_mhz, 3.7);
        assert_eq!(c.kappa1(), 1.85);
        assert_eq!(c.c_plus, Some(33.8));
        assert_eq!(c.delta.unwrap().values(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(c.n_max, 3);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config("scenario = spectrum\nkappa_mhz 3.7\n").unwrap_err();
        assert_eq!(err, ConfigError::Syntax { line: 2, message: "expected `key = value`, found `kappa_mhz 3.7`".into() });
        let err = parse_config("kappa_mhz = 1\nkappa = 3.7\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, ref message } if message.contains("unknown key `kappa`")));
        let err = parse_config("kappa_mhz = 1\nkappa_mhz = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
    }

    #[test]
    fn every_violation_is_listed() {
        let list = problems("scenario = sweep2d\nkappa_mhz = -1\ngamma_mhz = 0\nc_plus = -3\nn_max = x\n");
        let joined = list.join("\n");
        for needle in ["kappa_mhz = -1", "gamma_mhz = 0", "c_plus = -3", "n_max = `x`", "delta_ac_min_mhz"] {
            assert!(joined.contains(needle), "missing `{needle}` in\n{joined}");
        }
        assert!(list.iter().all(|p| !p.is_empty()));
    }

    #[test]
    fn population_sum_is_named() {
        let text = format!(
            "{MINIMAL}coupling = atomic\ng0_mhz = 1.7\nn_atoms = 230\npopulations = 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.18\n"
        );
        let joined = problems(&text).join("\n");
        assert!(joined.contains("0.98"), "{joined}");
    }

    #[test]
    fn overrides_replace_file_values() {
        let c = parse_config_with_overrides(MINIMAL, &[("kappa_mhz".into(), "5".into())]).unwrap();
        assert_eq!(c.kappa_mhz, 5.0);
        assert!(parse_config_with_overrides(MINIMAL, &[("nope".into(), "1".into())]).is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = format!(
            "{MINIMAL}kappa1_mhz = 1.5\ndelta_ac_minus_mhz = 6\nc_plus = 15.1\nc_minus = 50.8\nflux_list_per_us = 0.01, 0.1, 1e3\ntau_max_us = 0.5\ntau_points = 11\nfit_free = c_plus, kappa\noutput_dir = out/x\n"
        );
        let c = parse_config(&text).unwrap();
        let again = parse_config(&c.to_text()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_text(), again.to_text());
    }

    #[test]
    fn grids_include_endpoints() {
        let g = Grid { min: -30.0, max: 30.0, points: 601 };
        let v = g.values();
        assert_eq!(v[0], -30.0);
        assert_eq!(v[300], 0.0);
        assert_eq!(v[600], 30.0);
    }
}
