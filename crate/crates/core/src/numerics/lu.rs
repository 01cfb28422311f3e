use rayon::prelude::*;

use super::{CMatrix, NumericsError, Result, C64};

/// Pivots smaller than this fraction of ‖A‖∞ mark the matrix as singular.
const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-14;
/// Row updates below the pivot run in parallel once the matrix is this large.
const PARALLEL_MIN_DIM: usize = 384;

/// LU factorization with partial pivoting, `P·A = L·U`, stored packed.
#[derive(Clone, Debug)]
pub struct LuFactors {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(NumericsError::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if n == 0 {
            return Err(NumericsError::Empty);
        }
        let threshold = PIVOT_RELATIVE_THRESHOLD * a.norm_inf();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_mag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_mag > threshold) || pivot_mag == 0.0 {
                return Err(NumericsError::Singular { step: k, pivot: pivot_mag, threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }

            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n..(k + 1) * n];
            let inv_pivot = pivot_row[k].inv();
            let eliminate = |row: &mut [C64]| {
                let l = row[k] * inv_pivot;
                row[k] = l;
                if l.re == 0.0 && l.im == 0.0 {
                    return;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *x -= l * u;
                }
            };
            if n >= PARALLEL_MIN_DIM && n - k > 64 {
                lower.par_chunks_mut(n).for_each(eliminate);
            } else {
                lower.chunks_mut(n).for_each(eliminate);
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(NumericsError::DimensionMismatch(format!(
                "rhs length {} for {}x{} system",
                rhs.len(),
                n,
                n
            )));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: C64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }
}

/// Solves `a · x = rhs` by pivoted LU.
pub fn solve_linear(a: &CMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    if rhs.len() != a.rows() {
        return Err(NumericsError::DimensionMismatch(format!(
            "rhs length {} for {} rows",
            rhs.len(),
            a.rows()
        )));
    }
    LuFactors::factor(a)?.solve(rhs)
}
