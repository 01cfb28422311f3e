use super::transmission::isolation;
use super::{LinearResponseError, SystemParams};

const BISECTION_TOL_MHZ: f64 = 1e-3;
/// Scan limit in units of `κ + γ + g_eff`.
const SCAN_LIMIT: f64 = 1e4;

/// Full width in MHz of the detuning window around `Δ = 0` in which the
/// isolation stays at or above `threshold_db`.
///
/// Each edge is bracketed by an outward scan in steps of `min(κ, γ)/20` and
/// then bisected to 1 kHz.
pub fn isolation_bandwidth(params: &SystemParams, threshold_db: f64) -> Result<f64, LinearResponseError> {
    params.validate()?;
    let peak_db = isolation(params, 0.0)?.db;
    if !(peak_db >= threshold_db) {
        return Err(LinearResponseError::ThresholdNotMet { peak_db, threshold_db });
    }
    let above = |d: f64| -> Result<bool, LinearResponseError> { Ok(isolation(params, d)?.db >= threshold_db) };
    let step = params.kappa.min(params.gamma) / 20.0;
    let limit = SCAN_LIMIT * (params.kappa + params.gamma + params.g_eff(crate::Branch::Plus));
    let mut edges = [0.0; 2];
    for (edge, sign) in edges.iter_mut().zip([1.0, -1.0]) {
        let mut inside = 0.0;
        let mut outside = None;
        let mut d = step;
        while d <= limit {
            if above(sign * d)? {
                inside = d;
                d += step;
            } else {
                outside = Some(d);
                break;
            }
        }
        let mut outside = outside.ok_or(LinearResponseError::BandwidthUnbounded { threshold_db, limit })?;
        while outside - inside > BISECTION_TOL_MHZ {
            let mid = 0.5 * (inside + outside);
            if above(sign * mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        *edge = 0.5 * (inside + outside);
    }
    Ok(edges[0] + edges[1])
}
