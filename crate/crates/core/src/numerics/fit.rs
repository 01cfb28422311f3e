//! Bounded Nelder–Mead minimization of squared residuals.

use super::{symmetric_eigen, NumericsError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub parameters: Vec<f64>,
    /// Euclidean norm of the residual vector at `parameters`.
    pub residual_norm: f64,
    /// `s² (JᵀJ)⁺` with `s² = RSS / (m − p)`, row-major `p × p`.
    pub covariance_estimate: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// One-sigma uncertainties from the covariance diagonal.
    pub fn standard_errors(&self) -> Vec<f64> {
        let p = self.parameters.len();
        (0..p).map(|i| self.covariance_estimate[i * p + i].max(0.0).sqrt()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Convergence when the simplex spans less than this, relative to
    /// `max(|x_i|, 1)` in every coordinate.
    pub xtol_rel: f64,
    /// Initial simplex edge as a fraction of each starting coordinate.
    pub initial_step: f64,
    /// Fresh simplices built around the optimum after convergence, to escape
    /// collapsed simplices.
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iterations: 20_000, xtol_rel: 1e-8, initial_step: 0.05, restarts: 3 }
    }
}

pub fn fit_least_squares<M>(model: M, data: &[f64], initial: &[f64], bounds: &[(f64, f64)]) -> Result<FitResult>
where
    M: Fn(&[f64]) -> Vec<f64>,
{
    fit_least_squares_with(model, data, initial, bounds, &FitOptions::default())
}

/// Minimizes `Σ (model(p)_k − data_k)²` over the box `bounds`.
///
/// Trial points are projected onto the box, so the returned parameters always
/// lie inside it. Running out of iterations is not an error: the best point
/// found comes back with `converged = false`.
pub fn fit_least_squares_with<M>(
    model: M,
    data: &[f64],
    initial: &[f64],
    bounds: &[(f64, f64)],
    opts: &FitOptions,
) -> Result<FitResult>
where
    M: Fn(&[f64]) -> Vec<f64>,
{
    let p = initial.len();
    if p == 0 {
        return Err(NumericsError::InvalidFit("no parameters".into()));
    }
    if bounds.len() != p {
        return Err(NumericsError::InvalidFit(format!("{} bounds for {p} parameters", bounds.len())));
    }
    if data.len() < p {
        return Err(NumericsError::InvalidFit(format!("{} data points for {p} parameters", data.len())));
    }
    for (i, (&x, &(lo, hi))) in initial.iter().zip(bounds).enumerate() {
        if !(lo <= hi) {
            return Err(NumericsError::InvalidFit(format!("bound {i} is empty: [{lo}, {hi}]")));
        }
        if !(lo <= x && x <= hi) {
            return Err(NumericsError::InvalidFit(format!("initial parameter {i} = {x} outside [{lo}, {hi}]")));
        }
    }

    let project = |x: &mut [f64]| {
        for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *xi = xi.clamp(lo, hi);
        }
    };
    let objective = |x: &[f64]| -> Result<f64> {
        let m = model(x);
        if m.len() != data.len() {
            return Err(NumericsError::InvalidFit(format!(
                "model returned {} values for {} data points",
                m.len(),
                data.len()
            )));
        }
        let s: f64 = m.iter().zip(data).map(|(a, b)| (a - b).powi(2)).sum();
        Ok(if s.is_nan() { f64::INFINITY } else { s })
    };

    let mut best = initial.to_vec();
    let mut best_f = objective(&best)?;
    let mut iterations = 0;
    let mut converged = false;

    for _round in 0..=opts.restarts {
        let (x, f, iters, ok) = nelder_mead(&objective, &project, &best, best_f, opts, opts.max_iterations.saturating_sub(iterations))?;
        iterations += iters;
        let improved = f < best_f * (1.0 - 1e-12) && f < best_f;
        if f <= best_f {
            best = x;
            best_f = f;
        }
        converged = ok;
        if !ok || !improved || iterations >= opts.max_iterations {
            break;
        }
    }

    let residuals: Vec<f64> = model(&best).iter().zip(data).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let covariance_estimate = covariance(&model, &best, bounds, rss, data.len());
    Ok(FitResult { parameters: best, residual_norm: rss.sqrt(), covariance_estimate, iterations, converged })
}

type Vertex = (Vec<f64>, f64);

fn nelder_mead<O, P>(
    objective: &O,
    project: &P,
    start: &[f64],
    start_f: f64,
    opts: &FitOptions,
    budget: usize,
) -> Result<(Vec<f64>, f64, usize, bool)>
where
    O: Fn(&[f64]) -> Result<f64>,
    P: Fn(&mut [f64]),
{
    let p = start.len();
    let mut simplex: Vec<Vertex> = Vec::with_capacity(p + 1);
    simplex.push((start.to_vec(), start_f));
    for i in 0..p {
        let mut x = start.to_vec();
        let step = if x[i] != 0.0 { opts.initial_step * x[i].abs() } else { 2.5e-4 };
        x[i] += step;
        project(&mut x);
        if x[i] == start[i] {
            // Pinned against the upper bound; step the other way.
            x[i] -= 2.0 * step;
            project(&mut x);
        }
        let f = objective(&x)?;
        simplex.push((x, f));
    }

    let centroid_of = |simplex: &[Vertex]| -> Vec<f64> {
        let mut c = vec![0.0; p];
        for (x, _) in &simplex[..p] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / p as f64;
            }
        }
        c
    };
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        let mut x: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect();
        project(&mut x);
        x
    };

    let mut iters = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)))
            .fold(0.0, f64::max);
        if diameter < opts.xtol_rel {
            let (x, f) = simplex.swap_remove(0);
            return Ok((x, f, iters, true));
        }
        if iters >= budget {
            let (x, f) = simplex.swap_remove(0);
            return Ok((x, f, iters, false));
        }
        iters += 1;

        let c = centroid_of(&simplex);
        let worst = simplex[p].0.clone();
        let f_best = simplex[0].1;
        let f_second = simplex[p - 1].1;
        let f_worst = simplex[p].1;

        let xr = along(&c, &worst, -1.0);
        let fr = objective(&xr)?;
        if fr < f_best {
            let xe = along(&c, &worst, -2.0);
            let fe = objective(&xe)?;
            simplex[p] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[p] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = along(&c, &xr, 0.5);
            let fc = objective(&xc)?;
            (xc, fc)
        } else {
            let xc = along(&c, &worst, 0.5);
            let fc = objective(&xc)?;
            (xc, fc)
        };
        if fc < f_worst.min(fr) {
            simplex[p] = (xc, fc);
            continue;
        }
        let x0 = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = x0.iter().zip(&v.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
            project(&mut x);
            let f = objective(&x)?;
            *v = (x, f);
        }
    }
}

/// Finite-difference Gauss–Newton covariance, pseudo-inverted so it stays
/// symmetric positive semidefinite even when some parameter has no influence.
fn covariance<M>(model: &M, x: &[f64], bounds: &[(f64, f64)], rss: f64, m: usize) -> Vec<f64>
where
    M: Fn(&[f64]) -> Vec<f64>,
{
    let p = x.len();
    if rss == 0.0 || m <= p {
        return vec![0.0; p * p];
    }
    let base = model(x);
    let mut jac = vec![vec![0.0; m]; p];
    for i in 0..p {
        let h = 1e-6 * x[i].abs().max(1e-3);
        let (lo, hi) = bounds[i];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] = (x[i] + h).min(hi);
        xm[i] = (x[i] - h).max(lo);
        let width = xp[i] - xm[i];
        if width <= 0.0 {
            continue;
        }
        let fp = if xp[i] == x[i] { base.clone() } else { model(&xp) };
        let fm = if xm[i] == x[i] { base.clone() } else { model(&xm) };
        for k in 0..m {
            jac[i][k] = (fp[k] - fm[k]) / width;
        }
    }
    let mut jtj = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            let s: f64 = jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum();
            jtj[i * p + j] = s;
            jtj[j * p + i] = s;
        }
    }
    let eig = symmetric_eigen(&jtj, p);
    let lambda_max = eig.values.iter().copied().fold(0.0, f64::max);
    let s2 = rss / (m - p) as f64;
    let mut cov = vec![0.0; p * p];
    for k in 0..p {
        let lambda = eig.values[k];
        if lambda <= 1e-12 * lambda_max || lambda <= 0.0 {
            continue;
        }
        for i in 0..p {
            for j in 0..p {
                cov[i * p + j] += s2 * eig.vectors[i * p + k] * eig.vectors[j * p + k] / lambda;
            }
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            let avg = 0.5 * (cov[i * p + j] + cov[j * p + i]);
            cov[i * p + j] = avg;
            cov[j * p + i] = avg;
        }
    }
    cov
}
