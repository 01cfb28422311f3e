//! Adaptive Dormand–Prince 5(4) integration of complex-valued systems.

use super::{NumericsError, Result, C64};

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
/// Steps are sized against this fraction of the requested tolerance so that
/// accumulated error over long spans stays within a small multiple of it.
const ERROR_BUDGET: f64 = 0.1;

// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Debug)]
pub struct OdeOptions {
    /// Local error bound per step, mixed absolute/relative: component `i`
    /// must satisfy `|err_i| ≤ tol · max(1, |y_i|)`.
    pub tol: f64,
    pub initial_step: Option<f64>,
    /// Minimum step as a fraction of the integration span.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Result<Self> {
        if !(1e-12..=1e-3).contains(&tol) {
            return Err(NumericsError::InvalidTolerance(tol));
        }
        Ok(Self { tol, initial_step: None, min_step_fraction: 1e-13, max_steps: 5_000_000 })
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-10).expect("default tolerance is in range")
    }
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    /// Requested sample times that were reached, in order.
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub final_state: Vec<C64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates `dy/dt = deriv(t, y)` from `t_span.0` to `t_span.1`.
///
/// Steps are clipped so every time in `samples` inside the span is hit
/// exactly; states there are returned alongside the final state. The
/// derivative callback writes into its output buffer.
pub fn integrate_ode<F>(
    mut deriv: F,
    y0: &[C64],
    t_span: (f64, f64),
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if !(1e-12..=1e-3).contains(&opts.tol) {
        return Err(NumericsError::InvalidTolerance(opts.tol));
    }
    let (t0, t1) = t_span;
    if !(t1 >= t0) {
        return Err(NumericsError::InvalidFit(format!("integration span [{t0}, {t1}] is reversed")));
    }
    let mut targets: Vec<f64> = samples.iter().copied().filter(|&s| s >= t0 && s <= t1).collect();
    if targets.windows(2).any(|w| w[1] < w[0]) {
        return Err(NumericsError::DimensionMismatch("sample times must be ascending".into()));
    }
    targets.dedup();

    let n = y0.len();
    let mut sol = OdeSolution {
        times: Vec::with_capacity(targets.len()),
        states: Vec::with_capacity(targets.len()),
        final_state: y0.to_vec(),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut next_target = 0;
    while next_target < targets.len() && targets[next_target] <= t0 {
        sol.times.push(targets[next_target]);
        sol.states.push(y0.to_vec());
        next_target += 1;
    }
    let span = t1 - t0;
    if span == 0.0 || n == 0 {
        return Ok(sol);
    }

    let zero = C64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];

    let mut t = t0;
    deriv(t, &y, &mut k1);
    let min_step = opts.min_step_fraction * span;
    let mut h = opts.initial_step.unwrap_or_else(|| initial_step(&y, &k1, opts.tol, span));
    h = h.clamp(min_step, span);
    let tol = opts.tol * ERROR_BUDGET;

    loop {
        let stop = if next_target < targets.len() { targets[next_target] } else { t1 };
        let remaining = stop - t;
        let hits_stop = h >= remaining;
        let step = if hits_stop { remaining } else { h };

        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (step * A21);
        }
        deriv(t + C2 * step, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * step;
        }
        deriv(t + C3 * step, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * step;
        }
        deriv(t + C4 * step, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * step;
        }
        deriv(t + C5 * step, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * step;
        }
        deriv(t + step, &tmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * step;
        }
        deriv(t + step, &y_new, &mut k7);

        let mut err_ratio = 0.0_f64;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * step;
            let scale = tol * 1f64.max(y[i].norm()).max(y_new[i].norm());
            err_ratio = err_ratio.max(e.norm() / scale);
        }
        if !err_ratio.is_finite() {
            if y_new.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) && step <= min_step {
                return Err(NumericsError::NonFiniteState(t));
            }
            err_ratio = 1e10;
        }

        if err_ratio <= 1.0 {
            t = if hits_stop { stop } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            sol.accepted_steps += 1;
            if hits_stop {
                if next_target < targets.len() {
                    sol.times.push(t);
                    sol.states.push(y.clone());
                    next_target += 1;
                }
                if t >= t1 && next_target >= targets.len() {
                    break;
                }
            }
            // Only grow the step from a full (unclipped) step.
            if !hits_stop || step >= h {
                h = step * growth_factor(err_ratio);
            }
        } else {
            sol.rejected_steps += 1;
            h = step * growth_factor(err_ratio).min(1.0);
            if h < min_step {
                return Err(NumericsError::StepUnderflow { t, step: h, min_step });
            }
        }
        if sol.accepted_steps + sol.rejected_steps > opts.max_steps {
            return Err(NumericsError::TooManySteps(opts.max_steps));
        }
    }
    sol.final_state = y;
    Ok(sol)
}

fn growth_factor(err_ratio: f64) -> f64 {
    if err_ratio == 0.0 {
        5.0
    } else {
        (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
    }
}

fn initial_step(y: &[C64], f: &[C64], tol: f64, span: f64) -> f64 {
    let y_norm = y.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let f_norm = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if f_norm == 0.0 {
        return span * 1e-3;
    }
    (0.01 * y_norm / f_norm * tol.powf(0.2) * 10.0).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn exponential_decay() {
        let tol = 1e-9;
        let opts = OdeOptions::with_tol(tol).unwrap();
        let sol = integrate_ode(|_, y, dy| dy[0] = -y[0], &[c(1.0)], (0.0, 1.0), &[], &opts).unwrap();
        assert!((sol.final_state[0].re - (-1.0f64).exp()).abs() < 10.0 * tol);
    }

    #[test]
    fn unitary_rotation_preserves_norm() {
        let tol = 1e-10;
        let w = 7.3;
        let opts = OdeOptions::with_tol(tol).unwrap();
        let samples: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let sol = integrate_ode(
            |_, y, dy| dy[0] = C64::new(0.0, w) * y[0],
            &[C64::new(0.6, 0.8)],
            (0.0, 10.0),
            &samples,
            &opts,
        )
        .unwrap();
        assert_eq!(sol.times, samples);
        for s in &sol.states {
            assert!((s[0].norm() - 1.0).abs() < 10.0 * tol, "drift {:e}", s[0].norm() - 1.0);
        }
    }

    #[test]
    fn damped_oscillator_matches_closed_form() {
        // x'' + 2ζω x' + ω² x = 0 with x(0)=1, x'(0)=0, underdamped.
        let (w, zeta) = (3.0_f64, 0.1_f64);
        let wd = w * (1.0 - zeta * zeta).sqrt();
        let exact = |t: f64| {
            (-zeta * w * t).exp() * ((wd * t).cos() + zeta * w / wd * (wd * t).sin())
        };
        let tol = 1e-10;
        let opts = OdeOptions::with_tol(tol).unwrap();
        let samples: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let sol = integrate_ode(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0] * (w * w) - y[1] * (2.0 * zeta * w);
            },
            &[c(1.0), c(0.0)],
            (0.0, 10.0),
            &samples,
            &opts,
        )
        .unwrap();
        for (t, s) in sol.times.iter().zip(&sol.states) {
            assert!((s[0].re - exact(*t)).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn tolerance_range_is_enforced() {
        assert_eq!(OdeOptions::with_tol(1e-2).unwrap_err(), NumericsError::InvalidTolerance(1e-2));
        assert!(OdeOptions::with_tol(1e-13).is_err());
    }

    #[test]
    fn stiff_problem_with_large_minimum_step_underflows() {
        let mut opts = OdeOptions::with_tol(1e-10).unwrap();
        opts.min_step_fraction = 1e-2;
        let err = integrate_ode(|_, y, dy| dy[0] = y[0] * -1e7, &[c(1.0)], (0.0, 1.0), &[], &opts).unwrap_err();
        assert!(matches!(err, NumericsError::StepUnderflow { .. }));
    }

    #[test]
    fn zero_span_returns_initial_state() {
        let opts = OdeOptions::default();
        let sol = integrate_ode(|_, y, dy| dy[0] = y[0], &[c(2.0)], (1.0, 1.0), &[1.0], &opts).unwrap();
        assert_eq!(sol.final_state, vec![c(2.0)]);
        assert_eq!(sol.states.len(), 1);
    }
}
