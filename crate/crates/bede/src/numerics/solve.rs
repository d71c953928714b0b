//! Root finding and derivative-free minimization.
//!
//! The estimating equations solved here are smooth but become nearly flat
//! far from the data: residuals can drift below any absolute tolerance on
//! the plateau without a root anywhere near. Convergence is therefore
//! judged on the Newton decrement ‖J⁻¹F‖ (which explodes on plateaus, where
//! J vanishes faster than F) rather than on the raw residual.

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Central-difference Jacobian of `f` at `x` with per-component step
/// `h · max(1, |x_i|)`. Rows index outputs, columns inputs.
pub fn finite_diff_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Matrix {
    let p = x.len();
    let probe = f(x);
    let m = probe.len();
    let mut jac = Matrix::zeros(m, p);
    let mut xp = x.to_vec();
    for j in 0..p {
        let step = h * x[j].abs().max(1.0);
        xp[j] = x[j] + step;
        let fp = f(&xp);
        xp[j] = x[j] - step;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    jac
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 30;
const JACOBIAN_STEP: f64 = 1e-6;

/// Damped Newton iteration from a single start. Returns the root and the
/// iteration count, or `None` when the start's basin does not lead to a root
/// (singular Jacobian, stalled line search, or the iteration cap).
///
/// Convergence requires the full Newton step to satisfy
/// ‖J⁻¹F‖∞ ≤ tol·(1 + ‖x‖∞) with the residual itself below √tol; the first
/// condition is scale-free and rejects plateau pseudo-roots, the second
/// rejects sharp non-root stationary points where the step alone would look
/// converged.
///
/// The map may signal infeasible points by returning non-finite components;
/// such points are never accepted.
pub fn damped_newton(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    start: &[f64],
    tol: f64,
) -> Option<(Vec<f64>, usize)> {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut norm = inf_norm(&fx);
    if !norm.is_finite() {
        return None;
    }
    let residual_guard = tol.max(f64::EPSILON).sqrt();
    for iter in 0..NEWTON_MAX_ITER {
        let jac = finite_diff_jacobian(|y| f(y), &x, JACOBIAN_STEP);
        let neg_fx: Vec<f64> = fx.iter().map(|v| -v).collect();
        let Ok(step) = jac.solve_named(&neg_fx, "jacobian") else {
            return None;
        };
        if inf_norm(&step) <= tol * (1.0 + inf_norm(&x)) && norm <= residual_guard {
            // Take the final (tiny) step when it still improves the
            // residual; quadratic convergence usually makes it free.
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + d).collect();
            let fc = f(&cand);
            if inf_norm(&fc).is_finite() && inf_norm(&fc) < norm {
                return Some((cand, iter + 1));
            }
            return Some((x, iter + 1));
        }
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            let fc = f(&cand);
            let cn = inf_norm(&fc);
            if cn.is_finite() && cn < norm {
                x = cand;
                fx = fc;
                norm = cn;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        if !advanced {
            return None;
        }
    }
    None
}

/// Distinct-root tolerance: candidates within this ∞-distance are merged.
pub const ROOT_DEDUP_TOL: f64 = 1e-6;

/// All distinct roots of `f` reachable by damped Newton from `starts`.
///
/// Each claimed root is re-verified by evaluation before acceptance; roots
/// within [`ROOT_DEDUP_TOL`] of an earlier one (in start order) are merged.
/// Returns the roots plus the total Newton iteration count. An empty result
/// means no start converged; the caller decides whether that is an error.
pub fn solve_multistart(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    starts: &[Vec<f64>],
    tol: f64,
) -> (Vec<Vec<f64>>, usize) {
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0;
    for start in starts {
        let Some((root, iters)) = damped_newton(f, start, tol) else {
            iterations += NEWTON_MAX_ITER;
            continue;
        };
        iterations += iters;
        if inf_norm(&f(&root)) > tol.max(f64::EPSILON).sqrt() {
            continue;
        }
        let duplicate = roots.iter().any(|r| {
            r.iter()
                .zip(&root)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                <= ROOT_DEDUP_TOL
        });
        if !duplicate {
            roots.push(root);
        }
    }
    (roots, iterations)
}

/// Nelder–Mead reflection/expansion/contraction coefficients.
const NM_REFLECT: f64 = 1.0;
const NM_EXPAND: f64 = 2.0;
const NM_CONTRACT: f64 = 0.5;
const NM_SHRINK: f64 = 0.5;

/// Derivative-free minimization by the Nelder–Mead simplex.
///
/// Terminates when the simplex ∞-diameter falls below `tol`; fails with the
/// best point found when the iteration cap is exceeded. `f` may return NaN
/// for infeasible points, which rank worse than any finite value.
pub fn minimize(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    const OP: &str = "minimize";
    let p = start.len();
    let clean = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(p + 1);
    simplex.push((start.to_vec(), clean(f(start))));
    for i in 0..p {
        let mut v = start.to_vec();
        v[i] += 0.05 * v[i].abs().max(1.0);
        let fv = clean(f(&v));
        simplex.push((v, fv));
    }
    if !simplex[0].1.is_finite() {
        return Err(Error::domain(OP, "objective not finite at the start"));
    }

    let max_iter = 500 * p.max(1) * p.max(1);
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0f64, f64::max);
        if diameter < tol {
            return Ok(simplex[0].clone());
        }

        let centroid: Vec<f64> = (0..p)
            .map(|j| simplex[..p].iter().map(|(v, _)| v[j]).sum::<f64>() / p as f64)
            .collect();
        let worst = simplex[p].clone();
        let at = |coef: f64| -> (Vec<f64>, f64) {
            let v: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            let fv = clean(f(&v));
            (v, fv)
        };

        let reflected = at(NM_REFLECT);
        if reflected.1 < simplex[0].1 {
            let expanded = at(NM_EXPAND);
            simplex[p] = if expanded.1 < reflected.1 {
                expanded
            } else {
                reflected
            };
        } else if reflected.1 < simplex[p - 1].1 {
            simplex[p] = reflected;
        } else {
            let contracted = if reflected.1 < worst.1 {
                at(NM_CONTRACT)
            } else {
                at(-NM_CONTRACT)
            };
            if contracted.1 < worst.1.min(reflected.1) {
                simplex[p] = contracted;
            } else {
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for j in 0..p {
                        v[j] = best[j] + NM_SHRINK * (v[j] - best[j]);
                    }
                    *fv = clean(f(v));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Err(Error::NotConverged {
        op: OP,
        best: simplex[0].0.clone(),
        value: simplex[0].1,
    })
}
