use serde::Serialize;

use super::{LinearResponseError, SpectrumResult};
use crate::Branch;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub delta: f64,
    pub height: f64,
}

/// Local maxima of one branch, refined by a parabola through each maximum
/// and its two neighbours. Sorted by detuning.
///
/// The grid should resolve the narrowest feature; steps below κ/10 keep the
/// parabolic refinement accurate.
pub fn find_polariton_peaks(spectrum: &SpectrumResult, branch: Branch) -> Result<Vec<Peak>, LinearResponseError> {
    let x = &spectrum.deltas;
    let y = spectrum.branch(branch);
    let mut peaks = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            peaks.push(refine(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]));
        }
    }
    if peaks.is_empty() {
        return Err(LinearResponseError::NoPeak(branch));
    }
    peaks.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    Ok(peaks)
}

fn refine(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> Peak {
    // Vertex of the interpolating parabola, in coordinates centred on x1.
    let (a, b) = (x0 - x1, x2 - x1);
    let (fa, fb) = (y0 - y1, y2 - y1);
    let denom = a * b * (a - b);
    if denom == 0.0 {
        return Peak { delta: x1, height: y1 };
    }
    let c2 = (b * fa - a * fb) / denom;
    let c1 = (a * a * fb - b * b * fa) / denom;
    if !(c2 < 0.0) {
        return Peak { delta: x1, height: y1 };
    }
    let u = (-c1 / (2.0 * c2)).clamp(a.min(b), a.max(b));
    Peak { delta: x1 + u, height: y1 + c1 * u + c2 * u * u }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(deltas: Vec<f64>, t: Vec<f64>) -> SpectrumResult {
        SpectrumResult { delta_ac: 0.0, isolation_db: vec![0.0; t.len()], t_minus: t.clone(), t_plus: t, deltas }
    }

    #[test]
    fn parabola_vertex_is_exact_for_quadratics() {
        let xs: Vec<f64> = (0..11).map(|k| k as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - (x - 1.37f64).powi(2)).collect();
        let peaks = find_polariton_peaks(&spectrum(xs, ys), Branch::Plus).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].delta - 1.37).abs() < 1e-12);
        assert!((peaks[0].height - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flat_input_has_no_peak() {
        let s = spectrum(vec![0.0, 1.0, 2.0, 3.0], vec![0.5; 4]);
        assert_eq!(find_polariton_peaks(&s, Branch::Minus).unwrap_err(), LinearResponseError::NoPeak(Branch::Minus));
    }

    #[test]
    fn descending_grids_are_sorted() {
        let xs: Vec<f64> = (0..41).map(|k| 10.0 - k as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-(x - 4.0f64).powi(2)).exp() + (-(x + 4.0f64).powi(2)).exp()).collect();
        let peaks = find_polariton_peaks(&spectrum(xs, ys), Branch::Plus).unwrap();
        assert_eq!(peaks.len(), 2);
        assert!(peaks[0].delta < peaks[1].delta);
    }
}
