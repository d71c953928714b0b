//! Model-layer checks: score and information consistency by finite
//! differences, Fisher information reference values, support handling.

use bede::models::{
    fisher_information, NormalLocationModel, NormalModel, ParametricModel, PoissonModel,
};
use bede::numerics::{integrate, sum_discrete, SupportSpec};

fn assert_close(actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol * expected.abs().max(1.0),
        "got {actual:.12e}, want {expected:.12e}"
    );
}

/// Central finite difference of log f in each θ component.
fn fd_score(model: &dyn ParametricModel, x: f64, theta: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    (0..theta.len())
        .map(|i| {
            let step = h * theta[i].abs().max(1.0);
            let mut up = theta.to_vec();
            let mut dn = theta.to_vec();
            up[i] += step;
            dn[i] -= step;
            (model.log_density(x, &up) - model.log_density(x, &dn)) / (2.0 * step)
        })
        .collect()
}

#[test]
fn scores_match_log_density_gradients() {
    let normal = NormalModel;
    let loc = NormalLocationModel::new(1.3);
    let poisson = PoissonModel;
    let cases: Vec<(&dyn ParametricModel, Vec<f64>, Vec<f64>)> = vec![
        (&normal, vec![0.0, 1.0], vec![-2.0, -0.3, 0.0, 0.7, 2.5]),
        (&normal, vec![3.0, 2.0], vec![-1.0, 2.9, 8.0]),
        (&loc, vec![0.5], vec![-1.0, 0.5, 2.0]),
        (&poisson, vec![2.0], vec![0.0, 1.0, 3.0, 7.0]),
    ];
    for (model, theta, xs) in cases {
        for x in xs {
            let analytic = model.score(x, &theta);
            let numeric = fd_score(model, x, &theta);
            for (a, n) in analytic.iter().zip(&numeric) {
                assert!((a - n).abs() <= 1e-5 * (1.0 + a.abs()), "x={x}: {a} vs {n}");
            }
        }
    }
}

#[test]
fn information_matches_score_jacobian() {
    let normal = NormalModel;
    let theta = [0.4, 1.7];
    let h = 1e-6;
    for x in [-1.0, 0.3, 2.2, 5.0] {
        let info = normal.information(x, &theta);
        for i in 0..2 {
            for j in 0..2 {
                let step = h * theta[j].abs().max(1.0);
                let mut up = theta.to_vec();
                let mut dn = theta.to_vec();
                up[j] += step;
                dn[j] -= step;
                let fd = -(normal.score(x, &up)[i] - normal.score(x, &dn)[i]) / (2.0 * step);
                assert!(
                    (info[(i, j)] - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                    "entry ({i},{j}) at x={x}: {} vs {fd}",
                    info[(i, j)]
                );
            }
        }
    }
}

#[test]
fn fisher_information_reference_values() {
    let normal = NormalModel;
    let info = fisher_information(&normal, &[0.0, 1.0]).unwrap();
    assert_close(info[(0, 0)], 1.0, 1e-9);
    assert_close(info[(1, 1)], 2.0, 1e-9);
    assert!(info[(0, 1)].abs() < 1e-9);

    let info = fisher_information(&normal, &[3.0, 2.0]).unwrap();
    assert_close(info[(0, 0)], 0.25, 1e-9);
    assert_close(info[(1, 1)], 0.5, 1e-9);

    let poisson = PoissonModel;
    let info = fisher_information(&poisson, &[2.0]).unwrap();
    assert_close(info[(0, 0)], 0.5, 1e-10);

    let loc = NormalLocationModel::new(2.0);
    let info = fisher_information(&loc, &[1.0]).unwrap();
    assert_close(info[(0, 0)], 0.25, 1e-9);
}

#[test]
fn densities_integrate_to_one_over_the_window() {
    let normal = NormalModel;
    let theta = [1.0, 2.5];
    let support = normal.integration_support(&theta);
    let mass = integrate(|x| normal.density(x, &theta), &support, 1e-12)
        .unwrap()
        .value;
    assert_close(mass, 1.0, 1e-10);

    let poisson = PoissonModel;
    let mass = sum_discrete(
        |k| poisson.density(k as f64, &[3.2]),
        &SupportSpec::NonnegativeIntegers,
        1e-13,
    )
    .unwrap()
    .value;
    assert_close(mass, 1.0, 1e-12);
}

#[test]
fn poisson_density_vanishes_off_the_lattice() {
    let poisson = PoissonModel;
    assert_eq!(poisson.density(2.5, &[1.0]), 0.0);
    assert_eq!(poisson.density(-1.0, &[1.0]), 0.0);
    assert!(poisson.density(3.0, &[1.0]) > 0.0);
}

#[test]
fn infeasible_parameters_yield_nan_not_panic() {
    let normal = NormalModel;
    assert!(normal.density(0.0, &[0.0, -1.0]).is_nan());
    assert!(normal.score(0.0, &[0.0, 0.0])[0].is_nan());
    let poisson = PoissonModel;
    assert!(poisson.log_density(1.0, &[-2.0]).is_nan());
    assert!(fisher_information(&normal, &[0.0, -1.0]).is_err());
}

#[test]
fn default_starts_are_feasible_and_robust_first() {
    let normal = NormalModel;
    // Half the sample at a single point: MAD collapses, the start must not.
    let sample = [5.0, 5.0, 5.0, 5.0, 1.0, 2.0, 3.0, 100.0];
    let starts = normal.default_starts(&sample);
    assert!(starts.iter().all(|s| normal.is_feasible(s)));

    let poisson = PoissonModel;
    let zeros = [0.0, 0.0, 0.0, 1.0];
    let starts = poisson.default_starts(&zeros);
    assert!(starts.iter().all(|s| poisson.is_feasible(s)));
}

#[test]
fn closed_form_mle_matches_moments() {
    let normal = NormalModel;
    let sample = [1.0, 2.0, 3.0, 4.0];
    let mle = normal.closed_form_mle(&sample).unwrap();
    assert_close(mle[0], 2.5, 1e-12);
    assert_close(mle[1], 1.25f64.sqrt(), 1e-12);

    let poisson = PoissonModel;
    let mle = poisson.closed_form_mle(&[0.0, 1.0, 2.0, 5.0]).unwrap();
    assert_close(mle[0], 2.0, 1e-12);
}
