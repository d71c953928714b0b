//! Data-driven tuning selection: estimate the mean squared error of each
//! candidate (α, β) from the data itself and pick the minimizer.
//!
//! The MSE surrogate is squared distance to a pilot estimate plus the
//! plugged-in sandwich variance, MSE(α, β) = ‖θ̂_{α,β} − θ^P‖² +
//! tr(J⁻¹KJ⁻¹)/n with J, K evaluated empirically at θ̂_{α,β}. The pilot is
//! the minimum L2 fit (0, 1), whose own bias term is then zero but whose
//! variance keeps it from winning automatically.

use crate::divergence::TuningPair;
use crate::error::{Error, Result};
use crate::estimators::{fit_gbede, fit_l2_pilot, EstimationResult, FitOptions};
use crate::models::{ParamVector, ParametricModel};
use crate::{asymptotics, numerics::matrix_trace};

/// Two MSE estimates closer than this are a tie; ties prefer the larger β,
/// then the larger |α| (the more robust member).
const MSE_TIE_TOL: f64 = 1e-12;

/// One grid cell of the selection table.
#[derive(Debug, Clone)]
pub struct MSEEstimate {
    pub pair: TuningPair,
    /// bias_part + var_part, exactly.
    pub mse_hat: f64,
    /// Squared distance of the cell's fit to the pilot estimate.
    pub bias_part: f64,
    /// Trace of the empirical sandwich covariance divided by n.
    pub var_part: f64,
    pub theta_hat: ParamVector,
}

/// Outcome of a grid selection.
#[derive(Debug, Clone)]
pub struct TuningSelection {
    pub best: MSEEstimate,
    /// Every successfully evaluated cell, in grid order (α outer, β inner).
    pub table: Vec<MSEEstimate>,
    pub pilot: EstimationResult,
    /// Cells that failed to fit, with the failure reason.
    pub skipped: Vec<(TuningPair, String)>,
}

/// Default α grid: −3.0 to 0.0 in steps of 0.1. Constructed from integer
/// indices so every cell value is bit-identical to the matching literal.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=30).map(|i| (i as f64 - 30.0) / 10.0).collect()
}

/// Default β grid: 0.0 to 1.0 in steps of 0.1.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Estimated MSE of GBEDE(`pair`) around the pilot value `pilot_theta`.
pub fn wj_mse(
    sample: &[f64],
    model: &dyn ParametricModel,
    pair: TuningPair,
    pilot_theta: &[f64],
    options: &FitOptions,
) -> Result<MSEEstimate> {
    let mut cell_options = options.clone();
    cell_options.sandwich = false;
    cell_options.extra_starts.push(pilot_theta.to_vec());
    let fit = fit_gbede(sample, model, pair, &cell_options)?;
    let theta = &fit.theta_hat.values;
    let bias_part = theta
        .iter()
        .zip(pilot_theta)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    let parts = asymptotics::empirical_sandwich(sample, theta, &pair, model)?;
    let var_part = matrix_trace(&parts.sandwich) / sample.len() as f64;
    Ok(MSEEstimate {
        pair,
        mse_hat: bias_part + var_part,
        bias_part,
        var_part,
        theta_hat: fit.theta_hat,
    })
}

/// True when `candidate` beats `best` under the deterministic ordering:
/// smaller MSE, with near-ties resolved toward larger β then larger |α|.
/// The rule depends only on cell values, never on grid order.
fn better(candidate: &MSEEstimate, best: &MSEEstimate) -> bool {
    if candidate.mse_hat < best.mse_hat - MSE_TIE_TOL {
        return true;
    }
    if (candidate.mse_hat - best.mse_hat).abs() <= MSE_TIE_TOL {
        if candidate.pair.beta != best.pair.beta {
            return candidate.pair.beta > best.pair.beta;
        }
        return candidate.pair.alpha.abs() > best.pair.alpha.abs();
    }
    false
}

/// Evaluate the MSE surrogate over a grid and return the minimizing pair.
///
/// Cells whose fit or sandwich fails are excluded (reported in `skipped`);
/// selection errors only when nothing on the grid could be evaluated.
pub fn select_tuning(
    sample: &[f64],
    model: &dyn ParametricModel,
    alphas: &[f64],
    betas: &[f64],
    options: &FitOptions,
) -> Result<TuningSelection> {
    const OP: &str = "select_tuning";
    if alphas.is_empty() || betas.is_empty() {
        return Err(Error::domain(OP, "empty tuning grid"));
    }
    let pilot = fit_l2_pilot(sample, model, options)?;
    let pilot_theta = pilot.theta_hat.values.clone();

    let mut table = Vec::with_capacity(alphas.len() * betas.len());
    let mut skipped = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            let pair = match TuningPair::try_new(alpha, beta) {
                Ok(p) => p,
                Err(e) => {
                    skipped.push((TuningPair { alpha, beta }, e.to_string()));
                    continue;
                }
            };
            match wj_mse(sample, model, pair, &pilot_theta, options) {
                Ok(cell) => table.push(cell),
                Err(e) => skipped.push((pair, e.to_string())),
            }
        }
    }
    let best = table
        .iter()
        .fold(None::<&MSEEstimate>, |acc, cell| match acc {
            None => Some(cell),
            Some(b) if better(cell, b) => Some(cell),
            some => some,
        })
        .cloned()
        .ok_or_else(|| Error::domain(OP, "every grid cell failed to fit"))?;
    Ok(TuningSelection {
        best,
        table,
        pilot,
        skipped,
    })
}
