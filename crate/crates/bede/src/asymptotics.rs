//! Asymptotic distribution theory for the generalized estimators: sandwich
//! covariance J⁻¹KJ⁻¹, relative efficiency against maximum likelihood,
//! influence functions, and the efficiency-optimal α for a given β.
//!
//! At the model, J = ∫u uᵀ f^{1+β} e^{αf} and K = ∫u uᵀ f^{1+2β} e^{2αf}
//! − ξξᵀ with ξ = ∫u f^{1+β} e^{αf}; the cross terms in −E[∂ψ/∂θ] cancel
//! exactly there, which is why J needs no observed-information piece. Away
//! from the model (the empirical plug-in) those terms survive and are kept.

use crate::divergence::{psi_correction, TuningPair};
use crate::error::{Error, Result};
use crate::models::{feasibility_error, fisher_information, ParametricModel};
use crate::numerics::{integrate, sum_discrete, Matrix, SupportSpec, QUAD_TOL};

/// The two sandwich ingredients and their product.
#[derive(Debug, Clone)]
pub struct SandwichParts {
    pub j: Matrix,
    pub k: Matrix,
    /// Mean of the weighted score, ξ = ∫u f^{1+β} e^{αf} (or its sample
    /// analogue).
    pub xi: Vec<f64>,
    /// J⁻¹ K J⁻¹, the asymptotic covariance of √n(θ̂ − θ).
    pub sandwich: Matrix,
}

fn model_moment(entry: impl Fn(f64) -> f64, support: &SupportSpec) -> Result<f64> {
    if support.is_discrete() {
        Ok(sum_discrete(|k| entry(k as f64), support, QUAD_TOL)?.value)
    } else {
        Ok(integrate(entry, support, QUAD_TOL)?.value)
    }
}

fn sandwich_from(j: Matrix, k: Matrix, xi: Vec<f64>) -> Result<SandwichParts> {
    let j_inv = j.inverse_named("J")?;
    let sandwich = j_inv.mul(&k).mul(&j_inv).symmetrized();
    Ok(SandwichParts { j, k, xi, sandwich })
}

/// At-model sandwich matrices for GBEDE(α, β) at θ.
pub fn model_sandwich(
    model: &dyn ParametricModel,
    theta: &[f64],
    pair: &TuningPair,
) -> Result<SandwichParts> {
    feasibility_error(model, theta, "model_sandwich")?;
    let p = model.dim();
    let support = model.integration_support(theta);
    let xi = psi_correction(theta, pair, model);
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("model_sandwich", "xi integral failed"));
    }
    let mut j = Matrix::zeros(p, p);
    let mut k = Matrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let jv = model_moment(
                |x| {
                    let f = model.density(x, theta);
                    let u = model.score(x, theta);
                    u[a] * u[b] * f * pair.weight(f)
                },
                &support,
            )?;
            let kv = model_moment(
                |x| {
                    let f = model.density(x, theta);
                    let u = model.score(x, theta);
                    let w = pair.weight(f);
                    u[a] * u[b] * f * w * w
                },
                &support,
            )?;
            j[(a, b)] = jv;
            j[(b, a)] = jv;
            let centered = kv - xi[a] * xi[b];
            k[(a, b)] = centered;
            k[(b, a)] = centered;
        }
    }
    sandwich_from(j, k, xi)
}

/// Empirical plug-in sandwich at an arbitrary θ (typically a fitted root).
///
/// J is the exact θ-Jacobian of minus the estimating function, split into
/// the at-model term plus the empirical-minus-expected correction
/// (1/n)Σh(X_i) − ∫h f, h = {I_θ − (β + αf) u uᵀ} f^β e^{αf}; K is the
/// sample covariance of the weighted score.
pub fn empirical_sandwich(
    sample: &[f64],
    theta: &[f64],
    pair: &TuningPair,
    model: &dyn ParametricModel,
) -> Result<SandwichParts> {
    const OP: &str = "empirical_sandwich";
    if sample.is_empty() {
        return Err(Error::domain(OP, "empty sample"));
    }
    feasibility_error(model, theta, OP)?;
    let p = model.dim();
    let n = sample.len() as f64;
    let support = model.integration_support(theta);

    let h_entry = |x: f64, a: usize, b: usize| {
        let f = model.density(x, theta);
        let u = model.score(x, theta);
        let info = model.information(x, theta);
        (info[(a, b)] - (pair.beta + pair.alpha * f) * u[a] * u[b]) * pair.weight(f)
    };

    let mut j = Matrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let at_model = model_moment(
                |x| {
                    let f = model.density(x, theta);
                    let u = model.score(x, theta);
                    u[a] * u[b] * f * pair.weight(f)
                },
                &support,
            )?;
            let h_expected = model_moment(
                |x| h_entry(x, a, b) * model.density(x, theta),
                &support,
            )?;
            let h_sample = sample.iter().map(|&x| h_entry(x, a, b)).sum::<f64>() / n;
            let v = at_model + h_sample - h_expected;
            j[(a, b)] = v;
            j[(b, a)] = v;
        }
    }

    let mut mean = vec![0.0; p];
    let mut second = Matrix::zeros(p, p);
    for &x in sample {
        let f = model.density(x, theta);
        let w = pair.weight(f);
        let u = model.score(x, theta);
        for a in 0..p {
            mean[a] += u[a] * w;
            for b in 0..p {
                second[(a, b)] += u[a] * w * u[b] * w;
            }
        }
    }
    for a in 0..p {
        mean[a] /= n;
    }
    let mut k = Matrix::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            k[(a, b)] = second[(a, b)] / n - mean[a] * mean[b];
        }
    }
    sandwich_from(j, k.symmetrized(), mean)
}

/// Asymptotic relative efficiency (percent) of GBEDE(α, β) against maximum
/// likelihood for one parameter component, at the model:
/// 100·[I_F⁻¹]_cc / [J⁻¹KJ⁻¹]_cc.
pub fn are(
    model: &dyn ParametricModel,
    theta: &[f64],
    pair: &TuningPair,
    component: usize,
) -> Result<f64> {
    if component >= model.dim() {
        return Err(Error::domain(
            "are",
            format!("component {component} out of range for dimension {}", model.dim()),
        ));
    }
    let fisher = fisher_information(model, theta)?;
    let fisher_inv = fisher.inverse_named("J")?;
    let parts = model_sandwich(model, theta, pair)?;
    Ok(100.0 * fisher_inv[(component, component)] / parts.sandwich[(component, component)])
}

/// Efficiency table over a tuning grid: one row per α, one column per β.
pub fn are_table(
    model: &dyn ParametricModel,
    theta: &[f64],
    alphas: &[f64],
    betas: &[f64],
    component: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut row = Vec::with_capacity(betas.len());
        for &beta in betas {
            row.push(are(model, theta, &TuningPair::try_new(alpha, beta)?, component)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Influence function of the estimator at contamination point y:
/// IF(y) = J⁻¹(u f^β e^{αf}(y) − ξ).
///
/// Bounded in y whenever β > 0 or α < 0; the likelihood member (0, 0)
/// recovers the unbounded J⁻¹u.
pub fn influence_function(
    y: f64,
    model: &dyn ParametricModel,
    theta: &[f64],
    pair: &TuningPair,
) -> Result<Vec<f64>> {
    feasibility_error(model, theta, "influence_function")?;
    let parts = model_sandwich(model, theta, pair)?;
    let f = model.density(y, theta);
    let w = pair.weight(f);
    let rhs: Vec<f64> = model
        .score(y, theta)
        .iter()
        .zip(&parts.xi)
        .map(|(u, x)| u * w - x)
        .collect();
    parts.j.solve_named(&rhs, "J")
}

/// Lower end of the α search window. Beyond this the weighted information
/// underflows for standard models and the efficiency surface is numerically
/// flat.
pub const ALPHA_SEARCH_FLOOR: f64 = -20.0;

/// Golden-section search for the α maximizing the relative efficiency at
/// fixed β, over [floor, 0]. Returns (α*, ARE(α*)). Resolution 1e−3 on α;
/// boundary maximizers (e.g. α* = 0 at β = 0) are legitimate results.
pub fn optimal_alpha(
    model: &dyn ParametricModel,
    theta: &[f64],
    beta: f64,
    component: usize,
) -> Result<(f64, f64)> {
    let eff = |alpha: f64| -> Result<f64> {
        are(model, theta, &TuningPair::try_new(alpha, beta)?, component)
    };
    let (mut a, mut b) = (ALPHA_SEARCH_FLOOR, 0.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eff(c)?;
    let mut fd = eff(d)?;
    while (b - a).abs() > 1e-3 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eff(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eff(d)?;
        }
    }
    let alpha_star = 0.5 * (a + b);
    Ok((alpha_star, eff(alpha_star)?))
}
