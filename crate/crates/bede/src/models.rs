//! Parametric model abstraction: density f_θ, likelihood score u_θ,
//! information I_θ, and support, with concrete normal, normal-location, and
//! Poisson families.
//!
//! Infeasible parameter vectors make `density`/`score`/`information` return
//! NaN rather than panic; solvers treat NaN as "reject this point", and the
//! public fitting entry points validate feasibility up front with
//! [`feasibility_error`].

use crate::error::{Error, Result};
use crate::numerics::{integrate, sum_discrete, Matrix, SupportSpec, QUAD_TOL};

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Parameter vector together with its component names.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
    pub names: Vec<&'static str>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, names: Vec<&'static str>) -> Self {
        assert_eq!(values.len(), names.len(), "value/name length mismatch");
        ParamVector { values, names }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A univariate parametric family.
///
/// Implementations must keep `score` equal to the θ-gradient of
/// `log_density` and `information` equal to minus the θ-Jacobian of `score`
/// (both are enforced by finite-difference tests).
pub trait ParametricModel: Sync {
    /// Parameter dimension p.
    fn dim(&self) -> usize;

    fn param_names(&self) -> Vec<&'static str>;

    fn support(&self) -> SupportSpec;

    fn is_feasible(&self, theta: &[f64]) -> bool;

    /// Density (or probability mass) at `x`.
    fn density(&self, x: f64, theta: &[f64]) -> f64;

    fn log_density(&self, x: f64, theta: &[f64]) -> f64;

    /// Likelihood score u_θ(x) = ∂ log f_θ(x)/∂θ.
    fn score(&self, x: f64, theta: &[f64]) -> Vec<f64>;

    /// Information contribution I_θ(x) = −∂u_θ(x)/∂θ.
    fn information(&self, x: f64, theta: &[f64]) -> Matrix;

    /// Finite window outside which the density is below 1e−14 of its mode;
    /// `None` for discrete supports. Model integrals are truncated here.
    fn integration_window(&self, theta: &[f64]) -> Option<(f64, f64)>;

    /// Index of a location parameter, if the family has one. Start grids for
    /// root searches span the sample range along this coordinate.
    fn location_index(&self) -> Option<usize> {
        None
    }

    /// Effective integration support: the truncated window for continuous
    /// families, the full support for discrete ones.
    fn integration_support(&self, theta: &[f64]) -> SupportSpec {
        match self.integration_window(theta) {
            Some((lo, hi)) => SupportSpec::continuous(lo, hi),
            None => self.support(),
        }
    }

    /// Closed-form maximum likelihood estimate, when the family has one.
    /// May return an infeasible vector for degenerate samples; callers
    /// check feasibility.
    fn closed_form_mle(&self, _sample: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Starting points for root searches, most robust first. The first
    /// entry seeds the location grid.
    fn default_starts(&self, sample: &[f64]) -> Vec<Vec<f64>>;
}

/// Sample mean.
pub(crate) fn sample_mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Sample median (average of the middle pair for even n).
pub(crate) fn sample_median(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median absolute deviation scaled to be consistent for the normal σ.
pub(crate) fn normalized_mad(sample: &[f64]) -> f64 {
    let med = sample_median(sample);
    let dev: Vec<f64> = sample.iter().map(|x| (x - med).abs()).collect();
    1.4826 * sample_median(&dev)
}

/// Produce the domain error mandated for infeasible θ at API boundaries.
pub fn feasibility_error(
    model: &dyn ParametricModel,
    theta: &[f64],
    op: &'static str,
) -> Result<()> {
    if theta.len() != model.dim() {
        return Err(Error::domain(
            op,
            format!(
                "parameter dimension {} does not match model dimension {}",
                theta.len(),
                model.dim()
            ),
        ));
    }
    if !model.is_feasible(theta) {
        return Err(Error::domain(op, format!("infeasible parameter {theta:?}")));
    }
    Ok(())
}

/// Two-parameter normal family N(μ, σ²), parameterized by (μ, σ).
///
/// σ (not σ²) is the free scale coordinate; reports may show either.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalModel;

/// Width of the truncated integration window in standard deviations. At 9σ
/// the normal density is below 1e−17 of its mode.
const NORMAL_WINDOW_SD: f64 = 9.0;

impl ParametricModel for NormalModel {
    fn dim(&self) -> usize {
        2
    }

    fn param_names(&self) -> Vec<&'static str> {
        vec!["mu", "sigma"]
    }

    fn support(&self) -> SupportSpec {
        SupportSpec::real_line()
    }

    fn is_feasible(&self, theta: &[f64]) -> bool {
        theta.len() == 2 && theta.iter().all(|v| v.is_finite()) && theta[1] > 0.0
    }

    fn density(&self, x: f64, theta: &[f64]) -> f64 {
        self.log_density(x, theta).exp()
    }

    fn log_density(&self, x: f64, theta: &[f64]) -> f64 {
        if !self.is_feasible(theta) {
            return f64::NAN;
        }
        let (mu, sigma) = (theta[0], theta[1]);
        let z = (x - mu) / sigma;
        -0.5 * LN_2PI - sigma.ln() - 0.5 * z * z
    }

    fn score(&self, x: f64, theta: &[f64]) -> Vec<f64> {
        if !self.is_feasible(theta) {
            return vec![f64::NAN; 2];
        }
        let (mu, sigma) = (theta[0], theta[1]);
        let z = (x - mu) / sigma;
        vec![z / sigma, (z * z - 1.0) / sigma]
    }

    fn information(&self, x: f64, theta: &[f64]) -> Matrix {
        if !self.is_feasible(theta) {
            return Matrix::from_fn(2, 2, |_, _| f64::NAN);
        }
        let (mu, sigma) = (theta[0], theta[1]);
        let s2 = sigma * sigma;
        let d = x - mu;
        let off = 2.0 * d / (s2 * sigma);
        Matrix::from_rows(&[
            vec![1.0 / s2, off],
            vec![off, 3.0 * d * d / (s2 * s2) - 1.0 / s2],
        ])
    }

    fn integration_window(&self, theta: &[f64]) -> Option<(f64, f64)> {
        let (mu, sigma) = (theta[0], theta[1]);
        Some((mu - NORMAL_WINDOW_SD * sigma, mu + NORMAL_WINDOW_SD * sigma))
    }

    fn location_index(&self) -> Option<usize> {
        Some(0)
    }

    fn closed_form_mle(&self, sample: &[f64]) -> Option<Vec<f64>> {
        let mu = sample_mean(sample);
        let var = sample.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / sample.len() as f64;
        Some(vec![mu, var.sqrt()])
    }

    fn default_starts(&self, sample: &[f64]) -> Vec<Vec<f64>> {
        let med = sample_median(sample);
        let mad = normalized_mad(sample);
        let mean = sample_mean(sample);
        let sd = (sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / sample.len() as f64)
            .sqrt();
        // Half the sample at one point makes the MAD collapse; fall back to
        // the moment scale so the robust start stays feasible.
        let robust_scale = if mad > 0.0 { mad } else { sd };
        vec![vec![med, robust_scale], vec![mean, sd]]
    }
}

/// Normal location family N(μ, σ²) with σ known and fixed.
///
/// This is the family behind the location efficiency table and the
/// root-selection mixture study.
#[derive(Debug, Clone, Copy)]
pub struct NormalLocationModel {
    pub sigma: f64,
}

impl NormalLocationModel {
    /// # Panics
    /// Panics if `sigma <= 0` or is not finite.
    pub fn new(sigma: f64) -> Self {
        assert!(sigma.is_finite() && sigma > 0.0, "sigma must be positive");
        NormalLocationModel { sigma }
    }
}

impl ParametricModel for NormalLocationModel {
    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<&'static str> {
        vec!["mu"]
    }

    fn support(&self) -> SupportSpec {
        SupportSpec::real_line()
    }

    fn is_feasible(&self, theta: &[f64]) -> bool {
        theta.len() == 1 && theta[0].is_finite()
    }

    fn density(&self, x: f64, theta: &[f64]) -> f64 {
        self.log_density(x, theta).exp()
    }

    fn log_density(&self, x: f64, theta: &[f64]) -> f64 {
        if !self.is_feasible(theta) {
            return f64::NAN;
        }
        let z = (x - theta[0]) / self.sigma;
        -0.5 * LN_2PI - self.sigma.ln() - 0.5 * z * z
    }

    fn score(&self, x: f64, theta: &[f64]) -> Vec<f64> {
        if !self.is_feasible(theta) {
            return vec![f64::NAN];
        }
        vec![(x - theta[0]) / (self.sigma * self.sigma)]
    }

    fn information(&self, _x: f64, theta: &[f64]) -> Matrix {
        if !self.is_feasible(theta) {
            return Matrix::from_fn(1, 1, |_, _| f64::NAN);
        }
        Matrix::from_rows(&[vec![1.0 / (self.sigma * self.sigma)]])
    }

    fn integration_window(&self, theta: &[f64]) -> Option<(f64, f64)> {
        let mu = theta[0];
        Some((
            mu - NORMAL_WINDOW_SD * self.sigma,
            mu + NORMAL_WINDOW_SD * self.sigma,
        ))
    }

    fn location_index(&self) -> Option<usize> {
        Some(0)
    }

    fn closed_form_mle(&self, sample: &[f64]) -> Option<Vec<f64>> {
        Some(vec![sample_mean(sample)])
    }

    fn default_starts(&self, sample: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![sample_median(sample)], vec![sample_mean(sample)]]
    }
}

/// Poisson family with mean λ > 0.
///
/// Probability mass values feed the exponential weights e^{α f} exactly as
/// densities do in the continuous case.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoissonModel;

impl ParametricModel for PoissonModel {
    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<&'static str> {
        vec!["lambda"]
    }

    fn support(&self) -> SupportSpec {
        SupportSpec::NonnegativeIntegers
    }

    fn is_feasible(&self, theta: &[f64]) -> bool {
        theta.len() == 1 && theta[0].is_finite() && theta[0] > 0.0
    }

    fn density(&self, x: f64, theta: &[f64]) -> f64 {
        if x < 0.0 || (x - x.round()).abs() > 1e-8 {
            return 0.0;
        }
        self.log_density(x, theta).exp()
    }

    fn log_density(&self, x: f64, theta: &[f64]) -> f64 {
        if !self.is_feasible(theta) {
            return f64::NAN;
        }
        let lambda = theta[0];
        let k = x.round();
        -lambda + k * lambda.ln() - crate::numerics::ln_gamma(k + 1.0)
    }

    fn score(&self, x: f64, theta: &[f64]) -> Vec<f64> {
        if !self.is_feasible(theta) {
            return vec![f64::NAN];
        }
        vec![x / theta[0] - 1.0]
    }

    fn information(&self, x: f64, theta: &[f64]) -> Matrix {
        if !self.is_feasible(theta) {
            return Matrix::from_fn(1, 1, |_, _| f64::NAN);
        }
        Matrix::from_rows(&[vec![x / (theta[0] * theta[0])]])
    }

    fn integration_window(&self, _theta: &[f64]) -> Option<(f64, f64)> {
        None
    }

    fn closed_form_mle(&self, sample: &[f64]) -> Option<Vec<f64>> {
        Some(vec![sample_mean(sample)])
    }

    fn default_starts(&self, sample: &[f64]) -> Vec<Vec<f64>> {
        // The clamp keeps the start inside λ > 0 for zero-heavy samples.
        vec![
            vec![sample_median(sample).max(0.1)],
            vec![sample_mean(sample).max(0.1)],
        ]
    }
}

/// Fisher information E_θ[u uᵀ], computed by quadrature or summation over
/// the model support.
pub fn fisher_information(model: &dyn ParametricModel, theta: &[f64]) -> Result<Matrix> {
    feasibility_error(model, theta, "fisher_information")?;
    let p = model.dim();
    let support = model.integration_support(theta);
    let mut info = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let entry = |x: f64| {
                let u = model.score(x, theta);
                u[i] * u[j] * model.density(x, theta)
            };
            let value = if support.is_discrete() {
                sum_discrete(|k| entry(k as f64), &support, QUAD_TOL)?.value
            } else {
                integrate(entry, &support, QUAD_TOL)?.value
            };
            info[(i, j)] = value;
            info[(j, i)] = value;
        }
    }
    Ok(info)
}
