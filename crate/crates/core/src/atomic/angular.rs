//! Half-integer angular momenta and Wigner 3-j symbols.

use std::fmt;
use std::sync::OnceLock;

use super::AtomicError;

/// Largest factorial argument the log-factorial table covers. Enough for
/// every 3-j symbol with all j ≤ 6 (largest argument is j1 + j2 + j3 + 1).
pub const MAX_FACTORIAL_ARG: usize = 40;

/// A multiple of ½, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn int(value: i32) -> Self {
        Self(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = AtomicError;

    fn try_from(x: f64) -> Result<Self, AtomicError> {
        let twice = 2.0 * x;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(AtomicError::InvalidAngularMomentum(format!("{x} is not a multiple of 1/2")));
        }
        Ok(Self(twice as i32))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn log_factorials() -> &'static [f64; MAX_FACTORIAL_ARG + 1] {
    static TABLE: OnceLock<[f64; MAX_FACTORIAL_ARG + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; MAX_FACTORIAL_ARG + 1];
        for n in 1..=MAX_FACTORIAL_ARG {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

/// ln(n!) for an argument given as twice its value (must be even).
fn ln_fact(twice: i32) -> Result<f64, AtomicError> {
    debug_assert!(twice % 2 == 0 && twice >= 0);
    let n = (twice / 2) as usize;
    log_factorials()
        .get(n)
        .copied()
        .ok_or(AtomicError::FactorialRange { argument: n, max: MAX_FACTORIAL_ARG })
}

fn validate_pair(j: HalfInt, m: HalfInt) -> Result<(), AtomicError> {
    if j.0 < 0 {
        return Err(AtomicError::InvalidAngularMomentum(format!("negative angular momentum j = {j}")));
    }
    if m.0.abs() > j.0 {
        return Err(AtomicError::InvalidAngularMomentum(format!("|m| = |{m}| exceeds j = {j}")));
    }
    if (j.0 - m.0) % 2 != 0 {
        return Err(AtomicError::InvalidAngularMomentum(format!("j − m = {j} − {m} is not an integer")));
    }
    Ok(())
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)` by the Racah formula.
///
/// Returns zero when the magnetic numbers do not sum to zero or the triangle
/// condition fails. Errors on negative j, |m| > j, or j − m non-integer.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Result<f64, AtomicError> {
    validate_pair(j1, m1)?;
    validate_pair(j2, m2)?;
    validate_pair(j3, m3)?;
    let (tj1, tj2, tj3) = (j1.0, j2.0, j3.0);
    let (tm1, tm2, tm3) = (m1.0, m2.0, m3.0);
    if (tj1 + tj2 + tj3) % 2 != 0 {
        return Err(AtomicError::InvalidAngularMomentum(format!(
            "j1 + j2 + j3 = {j1} + {j2} + {j3} is not an integer"
        )));
    }
    if tm1 + tm2 + tm3 != 0 {
        return Ok(0.0);
    }
    if tj3 < (tj1 - tj2).abs() || tj3 > tj1 + tj2 {
        return Ok(0.0);
    }

    let ln_triangle = ln_fact(tj1 + tj2 - tj3)? + ln_fact(tj1 - tj2 + tj3)? + ln_fact(-tj1 + tj2 + tj3)?
        - ln_fact(tj1 + tj2 + tj3 + 2)?;
    let ln_m = ln_fact(tj1 + tm1)?
        + ln_fact(tj1 - tm1)?
        + ln_fact(tj2 + tm2)?
        + ln_fact(tj2 - tm2)?
        + ln_fact(tj3 + tm3)?
        + ln_fact(tj3 - tm3)?;
    let ln_prefactor = 0.5 * (ln_triangle + ln_m);

    // Summation bounds, all in doubled units.
    let k_min = 0.max(tj2 - tj3 - tm1).max(tj1 - tj3 + tm2);
    let k_max = (tj1 + tj2 - tj3).min(tj1 - tm1).min(tj2 + tm2);
    let mut sum = 0.0;
    let mut tk = k_min;
    while tk <= k_max {
        let ln_den = ln_fact(tk)?
            + ln_fact(tj3 - tj2 + tk + tm1)?
            + ln_fact(tj3 - tj1 + tk - tm2)?
            + ln_fact(tj1 + tj2 - tj3 - tk)?
            + ln_fact(tj1 - tk - tm1)?
            + ln_fact(tj2 - tk + tm2)?;
        let term = (ln_prefactor - ln_den).exp();
        sum += if (tk / 2) % 2 == 0 { term } else { -term };
        tk += 2;
    }
    let phase = (tj1 - tj2 - tm3) / 2;
    Ok(if phase.rem_euclid(2) == 0 { sum } else { -sum })
}
