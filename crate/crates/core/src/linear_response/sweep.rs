use rayon::prelude::*;
use serde::Serialize;

use super::transmission::{transmission, UNDERFLOW_TRANSMISSION};
use super::{LinearResponseError, SystemParams};
use crate::Branch;

/// Transmission of both branches sampled on a detuning grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Cavity–atom detuning the spectrum was taken at, MHz.
    pub delta_ac: f64,
    /// Probe–cavity detunings, MHz.
    pub deltas: Vec<f64>,
    pub t_plus: Vec<f64>,
    pub t_minus: Vec<f64>,
    /// `10 log₁₀(T₋/T₊)`; `+∞` where `T₊` underflows.
    pub isolation_db: Vec<f64>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn branch(&self, branch: Branch) -> &[f64] {
        match branch {
            Branch::Plus => &self.t_plus,
            Branch::Minus => &self.t_minus,
        }
    }
}

/// Rows of a two-dimensional sweep, one per cavity–atom detuning, in input order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep2d {
    pub delta_acs: Vec<f64>,
    pub rows: Vec<SpectrumResult>,
}

pub(crate) fn check_grid(grid: &[f64], name: &'static str) -> Result<(), LinearResponseError> {
    if grid.is_empty() {
        return Err(LinearResponseError::EmptyGrid(name));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(LinearResponseError::NonMonotonicGrid(name));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if up || down {
        Ok(())
    } else {
        Err(LinearResponseError::NonMonotonicGrid(name))
    }
}

pub fn sweep_1d(params: &SystemParams, deltas: &[f64]) -> Result<SpectrumResult, LinearResponseError> {
    params.validate()?;
    check_grid(deltas, "delta")?;
    Ok(spectrum_unchecked(params, deltas))
}

fn spectrum_unchecked(params: &SystemParams, deltas: &[f64]) -> SpectrumResult {
    let points: Vec<(f64, f64, f64)> = deltas
        .par_iter()
        .map(|&d| {
            let tp = transmission(params, d, Branch::Plus);
            let tm = transmission(params, d, Branch::Minus);
            let iso = if tp < UNDERFLOW_TRANSMISSION { f64::INFINITY } else { 10.0 * (tm / tp).log10() };
            (tp, tm, iso)
        })
        .collect();
    SpectrumResult {
        delta_ac: params.delta_ac,
        deltas: deltas.to_vec(),
        t_plus: points.iter().map(|p| p.0).collect(),
        t_minus: points.iter().map(|p| p.1).collect(),
        isolation_db: points.iter().map(|p| p.2).collect(),
    }
}

/// One spectrum per entry of `delta_acs`, overriding `params.delta_ac`.
pub fn sweep_2d(params: &SystemParams, deltas: &[f64], delta_acs: &[f64]) -> Result<Sweep2d, LinearResponseError> {
    params.validate()?;
    check_grid(deltas, "delta")?;
    check_grid(delta_acs, "delta_ac")?;
    let rows = delta_acs
        .par_iter()
        .map(|&dac| spectrum_unchecked(&params.with_delta_ac(dac), deltas))
        .collect();
    Ok(Sweep2d { delta_acs: delta_acs.to_vec(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_matches_transmission() {
        let p = SystemParams::symmetric(3.7, 2.6, 33.8, 1.0).with_delta_ac(2.0);
        let s = sweep_1d(&p, &[1.25]).unwrap();
        assert_eq!(s.t_plus, vec![transmission(&p, 1.25, Branch::Plus)]);
        assert_eq!(s.t_minus, vec![transmission(&p, 1.25, Branch::Minus)]);
    }

    #[test]
    fn uncoupled_backward_rows_ignore_delta_ac() {
        let p = SystemParams::symmetric(3.7, 2.6, 33.8, 0.0);
        let deltas: Vec<f64> = (-50..=50).map(|k| k as f64).collect();
        let sweep = sweep_2d(&p, &deltas, &[-40.0, -5.0, 0.0, 12.0]).unwrap();
        for row in &sweep.rows {
            for (d, t) in row.deltas.iter().zip(&row.t_minus) {
                let lorentz = 1.0 / (1.0 + (d / p.kappa).powi(2));
                assert!((t - lorentz).abs() < 1e-15);
            }
        }
        assert_eq!(sweep.rows[3].delta_ac, 12.0);
    }

    #[test]
    fn grids_must_be_strictly_monotonic() {
        let p = SystemParams::symmetric(1.0, 1.0, 1.0, 0.0);
        assert_eq!(sweep_1d(&p, &[0.0, 1.0, 1.0]).unwrap_err(), LinearResponseError::NonMonotonicGrid("delta"));
        assert!(sweep_1d(&p, &[2.0, 1.0, 0.0]).is_ok());
        assert_eq!(sweep_1d(&p, &[]).unwrap_err(), LinearResponseError::EmptyGrid("delta"));
        assert!(sweep_2d(&p, &[0.0], &[1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn underflow_marks_isolation_infinite() {
        let p = SystemParams::symmetric(1.0, 1.0, 1e18, 0.0);
        let s = sweep_1d(&p, &[0.0]).unwrap();
        assert_eq!(s.isolation_db[0], f64::INFINITY);
    }
}
