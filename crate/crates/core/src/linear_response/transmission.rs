use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{LinearResponseError, SystemParams};
use crate::Branch;

/// Below this forward transmission the isolation ratio is not formed.
pub const UNDERFLOW_TRANSMISSION: f64 = 1e-30;

/// Power transmission of one branch at probe–cavity detuning `delta` (MHz):
///
/// `T = (4κ₁κ₂/κ²) · |1 / (iΔ/κ + 1 + 2C / (i(Δ + Δ_ac)/γ + 1))|²`
pub fn transmission(params: &SystemParams, delta: f64, branch: Branch) -> f64 {
    transmission_raw(params, params.cooperativity(branch), delta)
}

pub(crate) fn transmission_raw(p: &SystemParams, c: f64, delta: f64) -> f64 {
    let atom = C64::new(1.0, (delta + p.delta_ac) / p.gamma);
    let denom = C64::new(1.0, delta / p.kappa) + 2.0 * c / atom;
    4.0 * p.kappa1 * p.kappa2 / (p.kappa * p.kappa) / denom.norm_sqr()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Isolation {
    /// `T₋ / T₊`.
    pub ratio: f64,
    pub db: f64,
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Backward over forward transmission at the same detuning.
pub fn isolation(params: &SystemParams, delta: f64) -> Result<Isolation, LinearResponseError> {
    let t_plus = transmission(params, delta, Branch::Plus);
    if !(t_plus >= UNDERFLOW_TRANSMISSION) {
        return Err(LinearResponseError::TransmissionUnderflow { delta, t_plus });
    }
    let ratio = transmission(params, delta, Branch::Minus) / t_plus;
    Ok(Isolation { ratio, db: ratio_to_db(ratio) })
}

/// Isolation at `Δ = Δ_ac = 0` against an uncoupled backward branch:
/// `(1 + 2C₊)²`.
pub fn ideal_isolation(c_plus: f64) -> f64 {
    (1.0 + 2.0 * c_plus).powi(2)
}
