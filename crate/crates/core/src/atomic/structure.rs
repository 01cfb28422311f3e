//! Excited hyperfine levels and σ± dipole weights out of the F = 4 ground level.

use std::sync::OnceLock;

use super::angular::{wigner_3j, HalfInt};
use super::AtomicError;
use crate::Branch;

const BUNDLED_CS_D2: &str = include_str!("../../data/cs_d2.dat");

/// Ground hyperfine level every population and transition refers to.
pub const GROUND_F: i32 = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct ExcitedLevel {
    pub f: i32,
    /// Energy in MHz relative to the data file's reference level.
    pub energy_mhz: f64,
    /// Fraction of the J → J′ line strength carried by F → F′.
    pub relative_strength: f64,
}

/// Contents of an atomic-data file.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicData {
    pub species: String,
    pub levels: Vec<ExcitedLevel>,
}

impl AtomicData {
    /// The cesium D2 constants bundled with the crate.
    pub fn cesium_d2() -> &'static AtomicData {
        static DATA: OnceLock<AtomicData> = OnceLock::new();
        DATA.get_or_init(|| AtomicData::parse(BUNDLED_CS_D2).expect("bundled cesium data parses"))
    }

    /// Parses `key = value` lines; see `data/cs_d2.dat` for the keys.
    pub fn parse(text: &str) -> Result<AtomicData, AtomicError> {
        let mut species = None;
        let mut ground_f = None;
        let mut energies: Vec<(i32, f64)> = Vec::new();
        let mut strengths: Vec<(i32, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AtomicError::DataFile { line: line_no, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = || value.parse::<f64>().map_err(|_| err(format!("`{value}` is not a number")));
            match key {
                "species" => species = Some(value.to_string()),
                "ground_f" => ground_f = Some(value.parse::<i32>().map_err(|_| err(format!("bad ground_f `{value}`")))?),
                _ => {
                    let parts: Vec<&str> = key.split('.').collect();
                    let f = match parts.as_slice() {
                        ["excited", f, _] => f.parse::<i32>().map_err(|_| err(format!("bad level in `{key}`")))?,
                        _ => return Err(err(format!("unknown key `{key}`"))),
                    };
                    let target = match parts[2] {
                        "energy_mhz" => &mut energies,
                        "relative_strength" => &mut strengths,
                        other => return Err(err(format!("unknown level field `{other}`"))),
                    };
                    if target.iter().any(|&(g, _)| g == f) {
                        return Err(err(format!("duplicate key `{key}`")));
                    }
                    target.push((f, number()?));
                }
            }
        }
        let missing = |what: &str| AtomicError::DataFile { line: 0, message: format!("missing {what}") };
        let species = species.ok_or_else(|| missing("species"))?;
        let ground_f = ground_f.ok_or_else(|| missing("ground_f"))?;
        if ground_f != GROUND_F {
            return Err(AtomicError::DataFile { line: 0, message: format!("ground_f must be {GROUND_F}, got {ground_f}") });
        }
        let mut levels = Vec::new();
        for &(f, energy_mhz) in &energies {
            let relative_strength = strengths
                .iter()
                .find(|&&(g, _)| g == f)
                .map(|&(_, s)| s)
                .ok_or_else(|| missing(&format!("excited.{f}.relative_strength")))?;
            if !(0.0..=1.0).contains(&relative_strength) {
                return Err(AtomicError::DataFile {
                    line: 0,
                    message: format!("relative strength of F'={f} outside [0, 1]"),
                });
            }
            if f < 0 || (f - GROUND_F).abs() > 1 {
                return Err(AtomicError::DataFile {
                    line: 0,
                    message: format!("F'={f} is not dipole-coupled to F={GROUND_F}"),
                });
            }
            levels.push(ExcitedLevel { f, energy_mhz, relative_strength });
        }
        if let Some(&(f, _)) = strengths.iter().find(|&&(f, _)| !energies.iter().any(|&(g, _)| g == f)) {
            return Err(missing(&format!("excited.{f}.energy_mhz")));
        }
        levels.sort_by_key(|l| l.f);
        Ok(AtomicData { species, levels })
    }

    pub fn level(&self, f_prime: i32) -> Option<&ExcitedLevel> {
        self.levels.iter().find(|l| l.f == f_prime)
    }

    /// Squared dipole weight of `|F=4, m⟩ → |F′, m′⟩` with polarization `q`,
    /// normalized to the stretched σ₊ transition `m = 4 → F′ = 5, m′ = 5`.
    ///
    /// Zero when the target sublevel does not exist or `m′ ≠ m + q`.
    pub fn weight(&self, m: i32, q: i32, f_prime: i32, m_prime: i32) -> Result<f64, AtomicError> {
        if m.abs() > GROUND_F {
            return Err(AtomicError::InvalidAngularMomentum(format!("m_F = {m} outside F = {GROUND_F}")));
        }
        if q.abs() != 1 {
            return Err(AtomicError::InvalidAngularMomentum(format!("polarization q = {q} is not ±1")));
        }
        let level = self.level(f_prime).ok_or(AtomicError::MissingLevel(f_prime))?;
        if m_prime != m + q || m_prime.abs() > f_prime {
            return Ok(0.0);
        }
        let raw = raw_strength(level.relative_strength, m, q, f_prime)?;
        Ok(raw / self.stretched_strength()?)
    }

    fn stretched_strength(&self) -> Result<f64, AtomicError> {
        let top = GROUND_F + 1;
        let level = self.level(top).ok_or(AtomicError::MissingLevel(top))?;
        raw_strength(level.relative_strength, GROUND_F, 1, top)
    }
}

/// `S_FF′ · (2F+1) · (F 1 F′; m q −m′)²`, the Zeeman-resolved line strength
/// in units of the J-level reduced matrix element.
fn raw_strength(relative_strength: f64, m: i32, q: i32, f_prime: i32) -> Result<f64, AtomicError> {
    let w3j = wigner_3j(
        HalfInt::int(GROUND_F),
        HalfInt::int(1),
        HalfInt::int(f_prime),
        HalfInt::int(m),
        HalfInt::int(q),
        HalfInt::int(-(m + q)),
    )?;
    Ok(relative_strength * (2 * GROUND_F + 1) as f64 * w3j * w3j)
}

/// Weight of a single σ± transition from the F = 4 ground level, using the
/// bundled cesium constants.
pub fn clebsch_gordan_weight(f: i32, m_f: i32, q: i32, f_prime: i32, m_f_prime: i32) -> Result<f64, AtomicError> {
    if f != GROUND_F {
        return Err(AtomicError::InvalidAngularMomentum(format!("ground level F = {f}; only F = {GROUND_F} is modeled")));
    }
    AtomicData::cesium_d2().weight(m_f, q, f_prime, m_f_prime)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionEntry {
    pub m_f: i32,
    pub branch: Branch,
    pub f_prime: i32,
    pub m_f_prime: i32,
    pub weight: f64,
    /// Energy of F′ minus energy of the resonant level, MHz.
    pub detuning_mhz: f64,
}

/// Every allowed σ± transition out of F = 4, with detunings referenced to
/// the level the cavity is tuned to.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionTable {
    resonant_f_prime: i32,
    entries: Vec<TransitionEntry>,
}

impl TransitionTable {
    pub fn new(data: &AtomicData, resonant_f_prime: i32) -> Result<Self, AtomicError> {
        let resonant = data.level(resonant_f_prime).ok_or(AtomicError::MissingLevel(resonant_f_prime))?;
        let mut entries = Vec::new();
        for level in &data.levels {
            for branch in Branch::BOTH {
                let q = branch.delta_m();
                for m in -GROUND_F..=GROUND_F {
                    let m_prime = m + q;
                    if m_prime.abs() > level.f {
                        continue;
                    }
                    entries.push(TransitionEntry {
                        m_f: m,
                        branch,
                        f_prime: level.f,
                        m_f_prime: m_prime,
                        weight: data.weight(m, q, level.f, m_prime)?,
                        detuning_mhz: level.energy_mhz - resonant.energy_mhz,
                    });
                }
            }
        }
        Ok(Self { resonant_f_prime, entries })
    }

    /// Table for the bundled cesium data.
    pub fn cesium_d2(resonant_f_prime: i32) -> Result<Self, AtomicError> {
        Self::new(AtomicData::cesium_d2(), resonant_f_prime)
    }

    pub fn resonant_f_prime(&self) -> i32 {
        self.resonant_f_prime
    }

    pub fn entries(&self) -> &[TransitionEntry] {
        &self.entries
    }

    /// Weight for `m → F′, m + q`; zero if the transition is absent.
    pub fn weight(&self, m_f: i32, branch: Branch, f_prime: i32) -> f64 {
        self.entries
            .iter()
            .find(|e| e.m_f == m_f && e.branch == branch && e.f_prime == f_prime)
            .map_or(0.0, |e| e.weight)
    }

    /// Distinct excited levels and their detunings, resonant level included.
    pub fn levels(&self) -> Vec<(i32, f64)> {
        let mut out: Vec<(i32, f64)> = Vec::new();
        for e in &self.entries {
            if !out.iter().any(|&(f, _)| f == e.f_prime) {
                out.push((e.f_prime, e.detuning_mhz));
            }
        }
        out
    }
}
