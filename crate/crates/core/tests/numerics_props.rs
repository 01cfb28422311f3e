use polariton_core::numerics::{fit_least_squares, integrate_ode, kron, solve_linear, CMatrix, OdeOptions, C64};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |v| CMatrix::new(rows, cols, v).unwrap())
}

fn sized_matrix(max: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| matrix(r, c))
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn commutator_part(h: &CMatrix, rho: &CMatrix) -> CMatrix {
    let i = C64::new(0.0, 1.0);
    (&(h * rho) - &(rho * h)).scale(-i)
}

/// `−i[H, ρ] + Σ (LρL† − ½{L†L, ρ})`, written out directly.
fn lindblad(h: &CMatrix, ops: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let mut out = commutator_part(h, rho);
    for l in ops {
        let ld = l.adjoint();
        let ldl = &ld * l;
        let jump = &(l * rho) * &ld;
        let anti = (&(&ldl * rho) + &(rho * &ldl)).scale(C64::new(0.5, 0.0));
        out = &out + &(&jump - &anti);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lu_residual_is_small_for_well_conditioned_systems(
        (a, b) in (1usize..=20).prop_flat_map(|n| (matrix(n, n), prop::collection::vec(complex(), n)))
    ) {
        // Diagonal dominance keeps the condition number far below 10⁶.
        let n = a.rows();
        let mut a = a;
        for i in 0..n {
            a[(i, i)] += C64::new(2.0 * n as f64, 0.0);
        }
        let x = solve_linear(&a, &b).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        let r: Vec<C64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
        prop_assert!(norm(&r) <= 1e-12 * (1.0 + a.norm_fro() * norm(&x)), "residual {}", norm(&r));
    }

    #[test]
    fn kron_mixed_product(
        (a, c) in (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(p, q, t)| (matrix(p, q), matrix(q, t))),
        (b, d) in (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(r, s, u)| (matrix(r, s), matrix(s, u))),
    ) {
        let left = &kron(&a, &b).unwrap() * &kron(&c, &d).unwrap();
        let right = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!((&left - &right).max_abs() < 1e-12);
    }

    #[test]
    fn kron_dimensions_multiply(a in sized_matrix(4), b in sized_matrix(4)) {
        let k = kron(&a, &b).unwrap();
        prop_assert_eq!((k.rows(), k.cols()), (a.rows() * b.rows(), a.cols() * b.cols()));
    }

    #[test]
    fn lindblad_evolution_preserves_trace(
        (h, ops, psi) in (2usize..=4).prop_flat_map(|n| (
            matrix(n, n),
            prop::collection::vec(matrix(n, n), 1..=3),
            prop::collection::vec(complex(), n),
        ))
    ) {
        let n = h.rows();
        let h = (&h + &h.adjoint()).scale(C64::new(0.5, 0.0));
        let scale = C64::new(1.0 / norm(&psi).max(1e-3), 0.0);
        let psi: Vec<C64> = psi.iter().map(|x| x * scale).collect();
        let rho0 = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        prop_assume!((rho0.trace().re - 1.0).abs() < 1e-12);
        let samples: Vec<f64> = (0..=10).map(|k| 0.2 * k as f64).collect();
        let sol = integrate_ode(
            |_, y, dy| {
                let rho = CMatrix::new(n, n, y.to_vec()).unwrap();
                dy.copy_from_slice(lindblad(&h, &ops, &rho).as_slice());
            },
            rho0.as_slice(),
            (0.0, 2.0),
            &samples,
            &OdeOptions::with_tol(1e-10).unwrap(),
        ).unwrap();
        for y in &sol.states {
            let tr: C64 = (0..n).map(|i| y[i * n + i]).sum();
            prop_assert!((tr - C64::new(1.0, 0.0)).norm() < 1e-8, "trace {tr}");
        }
    }

    #[test]
    fn fitted_parameters_stay_in_bounds(
        data in prop::collection::vec(-10.0f64..10.0, 6..20),
        x0 in prop::collection::vec(-1.0f64..1.0, 2),
        widths in prop::collection::vec(0.01f64..2.0, 2),
    ) {
        let xs: Vec<f64> = (0..data.len()).map(|k| k as f64 / data.len() as f64).collect();
        let model = |p: &[f64]| xs.iter().map(|&x| p[0] * (p[1] * x).exp()).collect::<Vec<f64>>();
        let bounds: Vec<(f64, f64)> = x0.iter().zip(&widths).map(|(&c, &w)| (c - w, c + w)).collect();
        let fit = fit_least_squares(model, &data, &x0, &bounds).unwrap();
        prop_assert!(fit.residual_norm >= 0.0);
        for (p, (lo, hi)) in fit.parameters.iter().zip(&bounds) {
            prop_assert!(*lo <= *p && *p <= *hi, "{p} outside [{lo}, {hi}]");
        }
    }
}
