use crate::numerics::{CMatrix, C64};

/// Nonzero entries of an operator, for applying it to dense density matrices.
#[derive(Clone, Debug)]
pub(crate) struct SparseOp {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != C64::new(0.0, 0.0) {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// `out += coeff · Op · ρ` for row-major `ρ` of side `d`.
    pub fn add_left(&self, coeff: C64, rho: &[C64], out: &mut [C64], d: usize) {
        for &(i, k, v) in &self.entries {
            let f = coeff * v;
            let (src, dst) = (&rho[k * d..(k + 1) * d], &mut out[i * d..(i + 1) * d]);
            for (o, r) in dst.iter_mut().zip(src) {
                *o += f * r;
            }
        }
    }

    /// `out += coeff · ρ · Op†`.
    pub fn add_right_adjoint(&self, coeff: C64, rho: &[C64], out: &mut [C64], d: usize) {
        for &(j, l, v) in &self.entries {
            let f = coeff * v.conj();
            for i in 0..d {
                out[i * d + j] += f * rho[i * d + l];
            }
        }
    }

    /// `out += Op · ρ · Op†`.
    pub fn add_sandwich(&self, rho: &[C64], out: &mut [C64], d: usize) {
        for &(i, k, v) in &self.entries {
            for &(j, l, w) in &self.entries {
                out[i * d + j] += v * w.conj() * rho[k * d + l];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_match_dense() {
        let d = 4;
        let op = CMatrix::from_fn(d, d, |i, j| if (i + 2 * j) % 3 == 0 { C64::new(i as f64 - 1.0, j as f64 * 0.5) } else { C64::new(0.0, 0.0) });
        let rho = CMatrix::from_fn(d, d, |i, j| C64::new((i * d + j) as f64 * 0.1, (i as f64 - j as f64) * 0.3));
        let s = SparseOp::from_dense(&op);
        let coeff = C64::new(0.3, -1.2);

        let mut out = vec![C64::new(0.0, 0.0); d * d];
        s.add_left(coeff, rho.as_slice(), &mut out, d);
        let want = (&op * &rho).scale(coeff);
        assert!(out.iter().zip(want.as_slice()).all(|(a, b)| (a - b).norm() < 1e-12));

        let mut out = vec![C64::new(0.0, 0.0); d * d];
        s.add_right_adjoint(coeff, rho.as_slice(), &mut out, d);
        let want = (&rho * &op.adjoint()).scale(coeff);
        assert!(out.iter().zip(want.as_slice()).all(|(a, b)| (a - b).norm() < 1e-12));

        let mut out = vec![C64::new(0.0, 0.0); d * d];
        s.add_sandwich(rho.as_slice(), &mut out, d);
        let want = &(&op * &rho) * &op.adjoint();
        assert!(out.iter().zip(want.as_slice()).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}
