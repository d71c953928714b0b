//! Numerical kernel checks against independently computed reference values.

use bede::numerics::{
    damped_newton, finite_diff_jacobian, integrate, lower_incomplete_gamma, ln_gamma, minimize,
    solve_multistart, sum_discrete, upper_incomplete_gamma, Matrix, SupportSpec,
};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn phi(x: f64) -> f64 {
    (-0.5 * x * x - 0.5 * LN_2PI).exp()
}

fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    (-lambda + k as f64 * lambda.ln() - ln_gamma(k as f64 + 1.0)).exp()
}

fn assert_close(actual: f64, expected: f64, rel: f64) {
    let scale = expected.abs().max(1e-300);
    assert!(
        (actual - expected).abs() <= rel * scale,
        "got {actual:.15e}, want {expected:.15e} (rel err {:.2e})",
        (actual - expected).abs() / scale
    );
}

#[test]
fn gamma_function_matches_known_points() {
    assert_close(ln_gamma(0.5), std::f64::consts::PI.sqrt().ln(), 1e-14);
    assert_close(ln_gamma(5.0), 24f64.ln(), 1e-14);
    assert!(ln_gamma(1.0).abs() < 1e-14);
    // Reflection through the recurrence below 0.5.
    assert_close(ln_gamma(0.1).exp(), 9.513507698668732, 1e-12);
}

#[test]
fn incomplete_gamma_reference_values() {
    let cases = [
        // (a, y, upper, lower)
        (0.5, 2.0, 0.080647117960318, 1.6918067329452),
        (1.0, 0.7, 0.49658530379141, f64::NAN),
        (1.5, 0.3, 0.794442506103121, 0.0917844193496369),
        (2.3, 1.7, 0.680374049067433, 0.486337856130727),
        (1.3, 5.0, 0.0115044377449587, 0.885966258561318),
        (0.2, 0.05, 1.86702048291466, 2.72382322908414),
    ];
    for (a, y, upper, lower) in cases {
        assert_close(upper_incomplete_gamma(a, y).unwrap(), upper, 1e-12);
        if lower.is_finite() {
            assert_close(lower_incomplete_gamma(a, y).unwrap(), lower, 1e-12);
        }
    }
    // Complementarity holds on both branches of the split.
    for (a, y) in [(0.5, 2.0), (3.0, 1.0), (2.0, 10.0)] {
        let total = upper_incomplete_gamma(a, y).unwrap() + lower_incomplete_gamma(a, y).unwrap();
        assert_close(total, ln_gamma(a).exp(), 1e-13);
    }
}

#[test]
fn incomplete_gamma_domain_errors() {
    assert!(upper_incomplete_gamma(0.0, 1.0).is_err());
    assert!(upper_incomplete_gamma(-1.0, 1.0).is_err());
    assert!(upper_incomplete_gamma(1.0, -0.5).is_err());
    assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
    let err = upper_incomplete_gamma(0.0, 1.0).unwrap_err();
    assert!(err.to_string().contains("upper_incomplete_gamma"));
}

#[test]
fn quadrature_normal_power_integrals() {
    // ∫ φ(x)^p dx = (2π)^{(1−p)/2} / √p.
    let line = SupportSpec::real_line();
    let cases = [
        (1.0, 1.0),
        (1.5, 0.515714572479411),
        (2.0, 0.282094791773878),
        (2.5, 0.159365787964972),
        (3.0, 0.0918881492369653),
    ];
    for (p, expected) in cases {
        let q = integrate(|x| phi(x).powf(p), &line, 1e-10).unwrap();
        assert_close(q.value, expected, 1e-9);
        assert!(q.evaluations > 0);
        assert!(q.abs_error_estimate.is_finite());
    }
}

#[test]
fn quadrature_exponentially_weighted_integrals() {
    let line = SupportSpec::real_line();
    let cases: [(f64, f64, i32, f64); 6] = [
        // (density power 1+β, weight α, x power, value)
        (1.5, -1.0, 0, 0.380329052162209),
        (1.5, -1.0, 2, 0.287087991569237),
        (1.3, -2.0, 0, 0.373248250829172),
        (1.3, -2.0, 2, 0.372506569142596),
        (2.0, -3.0, 0, 0.109647313184442),
        (2.0, -3.0, 2, 0.0766217909458481),
    ];
    for (p, alpha, k, expected) in cases {
        let q = integrate(
            |x| x.powi(k) * phi(x).powf(p) * (alpha * phi(x)).exp(),
            &line,
            1e-11,
        )
        .unwrap();
        assert_close(q.value, expected, 1e-9);
    }
}

#[test]
fn quadrature_half_lines_and_finite_intervals() {
    let upper = SupportSpec::continuous(0.0, f64::INFINITY);
    assert_close(integrate(|x| (-x).exp(), &upper, 1e-12).unwrap().value, 1.0, 1e-10);
    let lower = SupportSpec::continuous(f64::NEG_INFINITY, 0.0);
    assert_close(integrate(|x| x.exp(), &lower, 1e-12).unwrap().value, 1.0, 1e-10);
    let finite = SupportSpec::continuous(0.0, 1.0);
    assert_close(integrate(|x| x * x, &finite, 1e-12).unwrap().value, 1.0 / 3.0, 1e-12);
}

#[test]
fn quadrature_treats_non_finite_evaluations_as_zero() {
    // The integrand is NaN at the origin; the quadrature must still resolve
    // the smooth remainder.
    let finite = SupportSpec::continuous(-1.0, 1.0);
    let q = integrate(
        |x| if x == 0.0 { f64::NAN } else { x * x },
        &finite,
        1e-12,
    )
    .unwrap();
    assert_close(q.value, 2.0 / 3.0, 1e-10);
}

#[test]
fn discrete_sums_converge_and_record_truncation() {
    let support = SupportSpec::NonnegativeIntegers;
    let total = sum_discrete(|k| poisson_pmf(k, 2.0), &support, 1e-12).unwrap();
    assert_close(total.value, 1.0, 1e-12);
    assert!(total.truncation_index > 4);

    // Σ_k pmf(k; 2)² = e^{-4} I₀(4).
    let squared = sum_discrete(|k| poisson_pmf(k, 2.0).powi(2), &support, 1e-12).unwrap();
    assert_close(squared.value, 0.2070019212239867, 1e-12);
}

#[test]
fn discrete_sum_reports_divergence() {
    let support = SupportSpec::NonnegativeIntegers;
    let err = sum_discrete(|_| 1.0, &support, 1e-12).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("sum_discrete"), "unexpected message: {msg}");
}

#[test]
fn linear_solve_and_inverse_contract() {
    let a = Matrix::from_rows(&[
        vec![4.0, 1.0, 0.5],
        vec![1.0, 3.0, -0.2],
        vec![0.5, -0.2, 2.0],
    ]);
    let x = a.solve_named(&[1.0, 2.0, 3.0], "J").unwrap();
    let back = a.mul_vec(&x);
    for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
        assert_close(*b, e, 1e-12);
    }
    let inv = a.inverse_named("J").unwrap();
    let prod = a.mul(&inv);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((prod[(i, j)] - want).abs() <= 1e-8);
        }
    }
}

#[test]
fn singular_matrix_error_names_the_matrix() {
    let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
    let err = singular.solve_named(&[1.0, 1.0], "K").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains('K'), "message should name K: {msg}");
    let err = singular.inverse_named("J").unwrap_err();
    assert!(err.to_string().contains('J'));
}

#[test]
fn symmetric_eigendecomposition() {
    let s = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
    let (vals, vecs) = s.sym_eigen();
    assert_close(vals[0], 1.0, 1e-12);
    assert_close(vals[1], 3.0, 1e-12);
    // Reconstruct S = V diag(λ) Vᵀ.
    for i in 0..2 {
        for j in 0..2 {
            let mut r = 0.0;
            for k in 0..2 {
                r += vecs[(i, k)] * vals[k] * vecs[(j, k)];
            }
            assert_close(r, s[(i, j)], 1e-12);
        }
    }
    assert!(s.is_psd(1e-12));
    let neg = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
    assert!(!neg.is_psd(1e-12));
}

#[test]
fn inverse_square_root_roundtrip() {
    let s = Matrix::from_rows(&[vec![3.0, 0.5], vec![0.5, 1.5]]);
    let r = s.sym_inv_sqrt("J").unwrap();
    let should_be_identity = r.mul(&s).mul(&r);
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((should_be_identity[(i, j)] - want).abs() < 1e-10);
        }
    }
}

#[test]
fn newton_and_multistart_find_and_deduplicate_roots() {
    let f = |x: &[f64]| vec![x[0] * x[0] - 4.0];
    let (root, iters) = damped_newton(&f, &[1.0], 1e-12).unwrap();
    assert_close(root[0], 2.0, 1e-10);
    assert!(iters > 0);

    let starts = vec![vec![1.0], vec![3.0], vec![2.0001], vec![-1.0]];
    let (roots, _) = solve_multistart(&f, &starts, 1e-12);
    assert_eq!(roots.len(), 2, "roots: {roots:?}");
    let mut sorted: Vec<f64> = roots.iter().map(|r| r[0]).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_close(sorted[0], -2.0, 1e-10);
    assert_close(sorted[1], 2.0, 1e-10);
}

#[test]
fn multistart_returns_empty_for_rootless_systems() {
    let f = |x: &[f64]| vec![x[0] * x[0] + 1.0];
    let (roots, _) = solve_multistart(&f, &[vec![0.5], vec![-3.0]], 1e-12);
    assert!(roots.is_empty());
}

#[test]
fn newton_rejects_nan_regions() {
    // NaN left of the root forces the damping to shrink back.
    let f = |x: &[f64]| {
        if x[0] < 0.0 {
            vec![f64::NAN]
        } else {
            vec![x[0] * x[0] - 4.0]
        }
    };
    let (root, _) = damped_newton(&f, &[0.5], 1e-12).unwrap();
    assert_close(root[0], 2.0, 1e-10);
}

#[test]
fn finite_difference_jacobian_matches_analytic() {
    let f = |x: &[f64]| vec![x[0] * x[0] + x[1], x[0] * x[1]];
    let j = finite_diff_jacobian(&f, &[1.5, -2.0], 1e-6);
    assert_close(j[(0, 0)], 3.0, 1e-7);
    assert_close(j[(0, 1)], 1.0, 1e-7);
    assert_close(j[(1, 0)], -2.0, 1e-7);
    assert_close(j[(1, 1)], 1.5, 1e-7);
}

#[test]
fn simplex_minimizer_on_smooth_bowl() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 2.0;
    let (x, value) = minimize(f, &[4.0, 4.0], 1e-12).unwrap();
    assert_close(x[0], 1.0, 1e-4);
    assert_close(x[1], -0.5, 1e-4);
    assert_close(value, 2.0, 1e-8);
}
