//! Point estimation for i.i.d. samples: maximum likelihood, the minimum
//! B-exponential divergence estimator, and the generalized two-parameter
//! family.
//!
//! The estimating equation (1/n)Σψ(X_i, θ) = 0 can have several roots when
//! the data are contaminated: typically one near the bulk of the data, one
//! chasing the outliers, and a saddle between them. The fitters therefore
//! run damped Newton from a spread of starting points (moment, robust,
//! likelihood, a location grid) and, for one-parameter models, a dense
//! sign-change scan, then rank every distinct root by the empirical
//! divergence and return the minimizer.

use crate::asymptotics;
use crate::divergence::{empirical_divergence, estimating_fn_raw, TuningPair};
use crate::error::{Error, Result};
use crate::models::{ParamVector, ParametricModel};
use crate::numerics::{solve_multistart, Matrix, ROOT_DEDUP_TOL, SOLVER_TOL};

/// Roots whose average sample weight (1/n)Σ f^β e^{αf}(X_i) falls below this
/// floor sit on the objective's far plateau, where every observation is
/// numerically invisible to the fit; they are spurious and discarded.
const WEIGHT_FLOOR: f64 = 1e-10;

/// Two selected empirical-divergence values closer than this are a tie and
/// fall through to the distance-to-pilot rule.
const DIVERGENCE_TIE_TOL: f64 = 1e-10;

/// Grid resolution of the sign-change scan used for one-parameter models.
const SCAN_POINTS: usize = 256;

/// How the reported estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mle,
    Mbede,
    Gbede,
    L2Pilot,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Mle => "MLE",
            Method::Mbede => "MBEDE",
            Method::Gbede => "GBEDE",
            Method::L2Pilot => "L2-pilot",
        };
        f.write_str(s)
    }
}

/// How the reported root was singled out among the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSelection {
    /// Only one root survived the search.
    UniqueRoot,
    /// Smallest empirical divergence among several roots.
    MinEmpiricalDivergence,
    /// Divergence tie broken by proximity to the pilot estimate.
    MinObjective,
}

impl std::fmt::Display for RootSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RootSelection::UniqueRoot => "unique-root",
            RootSelection::MinEmpiricalDivergence => "min-empirical-divergence",
            RootSelection::MinObjective => "min-objective",
        };
        f.write_str(s)
    }
}

/// Knobs for the multistart fit. The defaults are the full-strength search;
/// Monte Carlo loops switch on `reduced_starts` to trade the location grid
/// and pilot for speed.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Infinity-norm tolerance on the estimating function at a root.
    pub tol: f64,
    /// Compute the empirical sandwich covariance at the selected root.
    pub sandwich: bool,
    /// Restrict starts to the robust and likelihood points; skip the
    /// location grid, the dense scan, and the pilot fit.
    pub reduced_starts: bool,
    /// Dense sign-change scan for one-parameter models (recovers interior
    /// roots that Newton jumps over).
    pub dense_scan: bool,
    /// Additional caller-supplied starting points.
    pub extra_starts: Vec<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: SOLVER_TOL,
            sandwich: true,
            reduced_starts: false,
            dense_scan: true,
            extra_starts: Vec::new(),
        }
    }
}

/// Outcome of a fit.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub theta_hat: ParamVector,
    pub pair: TuningPair,
    pub method: Method,
    /// Infinity norm of the estimating function at `theta_hat`.
    pub residual_norm: f64,
    /// Empirical divergence at `theta_hat` (the quantity that ranked the
    /// roots; for maximum likelihood it is the α = β = 0 member).
    pub objective_value: f64,
    /// Every distinct root found, in discovery order.
    pub all_roots: Vec<ParamVector>,
    pub selected_by: RootSelection,
    /// Asymptotic covariance J⁻¹KJ⁻¹ of √n(θ̂ − θ), from the empirical
    /// sandwich at the root; None when J was singular or disabled.
    pub sandwich: Option<Matrix>,
    pub converged: bool,
    /// Newton and bisection iterations summed over all starts.
    pub iterations: usize,
}

fn validate_sample(sample: &[f64], op: &'static str) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::domain(op, "empty sample"));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(op, "sample contains non-finite values"));
    }
    Ok(())
}

/// Mean average weight of the sample under the root's density; the plateau
/// rejection statistic.
fn mean_sample_weight(
    sample: &[f64],
    theta: &[f64],
    pair: &TuningPair,
    model: &dyn ParametricModel,
) -> f64 {
    let mut acc = 0.0;
    for &x in sample {
        acc += pair.weight(model.density(x, theta));
    }
    acc / sample.len() as f64
}

fn wrap_theta(model: &dyn ParametricModel, theta: Vec<f64>) -> ParamVector {
    ParamVector::new(theta, model.param_names())
}

/// Maximum likelihood fit. Uses the model's closed form when one exists,
/// otherwise solves the (0, 0) estimating equation.
pub fn fit_mle(sample: &[f64], model: &dyn ParametricModel) -> Result<EstimationResult> {
    const OP: &str = "fit_mle";
    validate_sample(sample, OP)?;
    let pair = TuningPair::new(0.0, 0.0);
    let theta = match model.closed_form_mle(sample) {
        Some(theta) => theta,
        None => {
            let mut result = fit_pair(sample, model, pair, &FitOptions::default(), Method::Mle)?;
            result.method = Method::Mle;
            return Ok(result);
        }
    };
    if !model.is_feasible(&theta) {
        return Err(Error::domain(
            OP,
            "closed-form estimate is degenerate (zero scale or empty support)",
        ));
    }
    let residual = estimating_fn_raw(sample, &theta, &pair, model);
    let residual_norm = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let objective_value =
        empirical_divergence(sample, &theta, &pair, model).unwrap_or(f64::NAN);
    let sandwich = asymptotics::empirical_sandwich(sample, &theta, &pair, model)
        .ok()
        .map(|parts| parts.sandwich);
    Ok(EstimationResult {
        theta_hat: wrap_theta(model, theta),
        pair,
        method: Method::Mle,
        residual_norm,
        objective_value,
        all_roots: Vec::new(),
        selected_by: RootSelection::UniqueRoot,
        sandwich,
        converged: true,
        iterations: 0,
    })
}

/// Minimum B-exponential divergence estimator: the (α, 1) member.
pub fn fit_mbede(
    sample: &[f64],
    model: &dyn ParametricModel,
    alpha: f64,
    options: &FitOptions,
) -> Result<EstimationResult> {
    let pair = TuningPair::try_new(alpha, 1.0)?;
    fit_pair(sample, model, pair, options, Method::Mbede)
}

/// Generalized fit at an arbitrary tuning pair.
pub fn fit_gbede(
    sample: &[f64],
    model: &dyn ParametricModel,
    pair: TuningPair,
    options: &FitOptions,
) -> Result<EstimationResult> {
    fit_pair(sample, model, pair, options, Method::Gbede)
}

/// The minimum L2 pilot fit, the (0, 1) member used as the anchor for root
/// tie-breaking and for tuning selection.
pub fn fit_l2_pilot(
    sample: &[f64],
    model: &dyn ParametricModel,
    options: &FitOptions,
) -> Result<EstimationResult> {
    let pair = TuningPair::new(0.0, 1.0);
    fit_pair(sample, model, pair, options, Method::L2Pilot)
}

fn fit_pair(
    sample: &[f64],
    model: &dyn ParametricModel,
    pair: TuningPair,
    options: &FitOptions,
    method: Method,
) -> Result<EstimationResult> {
    const OP: &str = "fit_gbede";
    validate_sample(sample, OP)?;
    let p = model.dim();

    let mut starts = model.default_starts(sample);
    if starts.iter().any(|s| !model.is_feasible(s)) {
        return Err(Error::domain(
            OP,
            "degenerate sample: default starting points are infeasible",
        ));
    }
    if let Some(mle) = model.closed_form_mle(sample) {
        if model.is_feasible(&mle) {
            starts.push(mle);
        }
    }

    // Pilot anchor. Skipped while fitting a pilot-family pair to avoid
    // recursion, and in reduced mode.
    let needs_pilot = !options.reduced_starts && !(pair.alpha == 0.0 && pair.beta == 1.0);
    let pilot_theta = if needs_pilot {
        let pilot_opts = FitOptions {
            sandwich: false,
            reduced_starts: true,
            dense_scan: false,
            extra_starts: Vec::new(),
            tol: options.tol,
        };
        fit_pair(sample, model, TuningPair::new(0.0, 1.0), &pilot_opts, Method::L2Pilot)
            .ok()
            .map(|r| r.theta_hat.values)
    } else {
        None
    };
    if let Some(ref pilot) = pilot_theta {
        starts.push(pilot.clone());
    }

    if !options.reduced_starts {
        if let Some(loc) = model.location_index() {
            // Location grid across the data range; other components come
            // from the first (robust) start.
            let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
            let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
            let base = starts[0].clone();
            for j in 0..9 {
                let mut s = base.clone();
                s[loc] = lo + (hi - lo) * j as f64 / 8.0;
                if model.is_feasible(&s) {
                    starts.push(s);
                }
            }
        }
    }
    for s in &options.extra_starts {
        if s.len() == p && model.is_feasible(s) {
            starts.push(s.clone());
        }
    }

    let system = |theta: &[f64]| estimating_fn_raw(sample, theta, &pair, model);
    let (mut roots, mut iterations) = solve_multistart(&system, &starts, options.tol);

    if p == 1 && options.dense_scan && !options.reduced_starts {
        let (scan_roots, scan_iters) = dense_scan_roots(&system, sample, options.tol);
        iterations += scan_iters;
        for r in scan_roots {
            if !roots
                .iter()
                .any(|q| (q[0] - r[0]).abs() <= ROOT_DEDUP_TOL * (1.0 + r[0].abs()))
            {
                roots.push(r);
            }
        }
    }

    // Plateau rejection: keep roots the data can actually see.
    roots.retain(|theta| mean_sample_weight(sample, theta, &pair, model) >= WEIGHT_FLOOR);
    if roots.is_empty() {
        return Err(Error::NoRoot { op: OP });
    }

    let mut scored: Vec<(Vec<f64>, f64)> = Vec::with_capacity(roots.len());
    for theta in &roots {
        let h = empirical_divergence(sample, theta, &pair, model)?;
        scored.push((theta.clone(), h));
    }

    let (selected_idx, selected_by) = if scored.len() == 1 {
        (0, RootSelection::UniqueRoot)
    } else {
        let mut best = 0;
        for i in 1..scored.len() {
            if scored[i].1 < scored[best].1 {
                best = i;
            }
        }
        // A tie hands the choice to the pilot distance; without a pilot the
        // smallest divergence (first in discovery order) stands.
        let ties: Vec<usize> = (0..scored.len())
            .filter(|&i| (scored[i].1 - scored[best].1).abs() < DIVERGENCE_TIE_TOL)
            .collect();
        if ties.len() > 1 {
            if let Some(ref pilot) = pilot_theta {
                let dist = |theta: &[f64]| -> f64 {
                    theta
                        .iter()
                        .zip(pilot)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum()
                };
                let chosen = *ties
                    .iter()
                    .min_by(|&&a, &&b| {
                        dist(&scored[a].0)
                            .partial_cmp(&dist(&scored[b].0))
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .expect("nonempty tie set");
                (chosen, RootSelection::MinObjective)
            } else {
                (best, RootSelection::MinEmpiricalDivergence)
            }
        } else {
            (best, RootSelection::MinEmpiricalDivergence)
        }
    };

    let (theta_hat, objective_value) = scored[selected_idx].clone();
    let residual = estimating_fn_raw(sample, &theta_hat, &pair, model);
    let residual_norm = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let converged = residual_norm <= 1e-6;

    let sandwich = if options.sandwich {
        asymptotics::empirical_sandwich(sample, &theta_hat, &pair, model)
            .ok()
            .map(|parts| parts.sandwich)
    } else {
        None
    };

    Ok(EstimationResult {
        theta_hat: wrap_theta(model, theta_hat),
        pair,
        method,
        residual_norm,
        objective_value,
        all_roots: roots
            .into_iter()
            .map(|theta| wrap_theta(model, theta))
            .collect(),
        selected_by,
        sandwich,
        converged,
        iterations,
    })
}

/// Dense sign-change scan for one-parameter models: evaluate the estimating
/// function on a uniform grid across the data range and bisect every
/// bracket. Newton polishing then brings each bracket root to full
/// tolerance.
fn dense_scan_roots(
    system: &dyn Fn(&[f64]) -> Vec<f64>,
    sample: &[f64],
    tol: f64,
) -> (Vec<Vec<f64>>, usize) {
    let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let mut iterations = 0usize;
    let eval = |t: f64| system(&[t])[0];
    let mut prev_t = lo;
    let mut prev_v = eval(lo);
    let mut roots = Vec::new();
    for j in 1..=SCAN_POINTS {
        let t = lo + (hi - lo) * j as f64 / SCAN_POINTS as f64;
        let v = eval(t);
        if prev_v.is_finite() && v.is_finite() && prev_v * v < 0.0 {
            let (mut a, mut b, mut fa) = (prev_t, t, prev_v);
            for _ in 0..80 {
                iterations += 1;
                let mid = 0.5 * (a + b);
                let fm = eval(mid);
                if !fm.is_finite() {
                    break;
                }
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
                if (b - a).abs() < 1e-13 * (1.0 + mid.abs()) {
                    break;
                }
            }
            let mid = 0.5 * (a + b);
            if eval(mid).abs() <= tol.max(1e-8) {
                roots.push(vec![mid]);
            }
        }
        prev_t = t;
        prev_v = v;
    }
    (roots, iterations)
}
