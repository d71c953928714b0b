//! Adaptive quadrature and discrete summation.
//!
//! All model integrals in this library are univariate, density-weighted and
//! decay at least as fast as the model density, so a globally adaptive
//! Simpson rule on a (possibly transformed) finite interval is sufficient.
//! Unbounded intervals are mapped to finite ones with the algebraic
//! substitutions x = t/(1-t²) (whole line) and x = a + t/(1-t) (half line);
//! the decay precondition makes the transformed integrand vanish at the
//! image of infinity.

use crate::error::{Error, Result};

/// Integration / summation domain of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportSpec {
    /// An interval of the real line; either bound may be infinite.
    ContinuousInterval { lower: f64, upper: f64 },
    /// The nonnegative integers 0, 1, 2, ...
    NonnegativeIntegers,
}

impl SupportSpec {
    /// The whole real line.
    pub fn real_line() -> Self {
        SupportSpec::ContinuousInterval {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    /// A continuous interval with the given bounds (infinite bounds allowed).
    ///
    /// # Panics
    /// Panics if `lower >= upper` or either bound is NaN.
    pub fn continuous(lower: f64, upper: f64) -> Self {
        assert!(!lower.is_nan() && !upper.is_nan(), "NaN support bound");
        assert!(lower < upper, "support requires lower < upper");
        SupportSpec::ContinuousInterval { lower, upper }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, SupportSpec::NonnegativeIntegers)
    }
}

/// Result of an adaptive quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Accumulated local error bound; finite by construction.
    pub abs_error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

/// Result of a truncated discrete sum.
#[derive(Debug, Clone, Copy)]
pub struct SumResult {
    pub value: f64,
    /// Index after the last term included.
    pub truncation_index: usize,
}

const MAX_DEPTH: u32 = 48;
/// Initial uniform panels; transformed infinite-interval integrands are
/// localized bumps that a single coarse panel would mistake for zero.
const INITIAL_PANELS: usize = 16;
/// Hard evaluation budget per integrate() call. Root-finding probes can hand
/// this module integrands of magnitude 1e80 and larger, where an absolute
/// tolerance is unreachable in f64; the budget turns such calls into a fast
/// quadrature failure instead of an effectively unbounded refinement.
const MAX_EVALS: usize = 400_000;

struct Worker<'a> {
    f: &'a dyn Fn(f64) -> f64,
    /// Relative acceptance floor: a panel whose correction is small against
    /// its own magnitude is converged even when the absolute target is
    /// below the f64 roundoff of a huge integrand.
    rel_tol: f64,
    evaluations: usize,
    error_sum: f64,
    failed: bool,
}

impl Worker<'_> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            v
        } else {
            // Permitted only by the decay precondition: overflowing transform
            // weights multiply an (under)flowing integrand near the boundary.
            0.0
        }
    }

    /// Recursive Simpson refinement of one panel. `fa`, `fm`, `fb` are the
    /// endpoint and midpoint values, `whole` the panel's Simpson estimate.
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let accept = 15.0 * (tol + self.rel_tol * (left + right).abs());
        if delta.abs() <= accept || depth >= MAX_DEPTH || self.evaluations > MAX_EVALS {
            if delta.abs() > accept {
                self.failed = true;
            }
            self.error_sum += delta.abs() / 15.0;
            // Richardson extrapolation: one order beyond plain Simpson.
            left + right + delta / 15.0
        } else {
            self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
        }
    }

    fn run(&mut self, a: f64, b: f64, tol: f64) -> f64 {
        let mut total = 0.0;
        let panel_tol = tol / INITIAL_PANELS as f64;
        let width = (b - a) / INITIAL_PANELS as f64;
        for i in 0..INITIAL_PANELS {
            let pa = a + i as f64 * width;
            let pb = if i + 1 == INITIAL_PANELS {
                b
            } else {
                a + (i + 1) as f64 * width
            };
            let pm = 0.5 * (pa + pb);
            let fa = self.eval(pa);
            let fm = self.eval(pm);
            let fb = self.eval(pb);
            let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
            total += self.refine(pa, pb, fa, fm, fb, whole, panel_tol, 0);
        }
        total
    }
}

/// Integrate `f` over `support` to absolute-or-relative tolerance `tol`.
///
/// For unbounded continuous supports, `f` must decay to zero at infinity.
/// Deterministic for fixed inputs. Fails with [`Error::Quadrature`] (carrying
/// the best estimate) when some panel still violates its local error bound at
/// the maximum subdivision depth.
pub fn integrate(f: impl Fn(f64) -> f64, support: &SupportSpec, tol: f64) -> Result<QuadResult> {
    const OP: &str = "integrate";
    if !(tol > 0.0) {
        return Err(Error::domain(OP, "tol must be > 0"));
    }
    let (lower, upper) = match support {
        SupportSpec::ContinuousInterval { lower, upper } => (*lower, *upper),
        SupportSpec::NonnegativeIntegers => {
            return Err(Error::domain(OP, "discrete support; use sum_discrete"))
        }
    };

    let run = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| -> Result<QuadResult> {
        let mut w = Worker {
            f: g,
            rel_tol: tol,
            evaluations: 0,
            error_sum: 0.0,
            failed: false,
        };
        let value = w.run(a, b, tol);
        let result = QuadResult {
            value,
            abs_error_estimate: w.error_sum,
            evaluations: w.evaluations,
        };
        if w.failed && w.error_sum > tol.max(tol * value.abs()) {
            Err(Error::Quadrature {
                op: OP,
                best: value,
                error_bound: w.error_sum,
            })
        } else {
            Ok(result)
        }
    };

    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => run(&f, lower, upper),
        (false, false) => {
            // x = t/(1-t²), dx = (1+t²)/(1-t²)² dt over t in (-1, 1).
            let g = |t: f64| {
                if t.abs() >= 1.0 {
                    return 0.0;
                }
                let d = 1.0 - t * t;
                f(t / d) * (1.0 + t * t) / (d * d)
            };
            run(&g, -1.0, 1.0)
        }
        (true, false) => {
            // x = a + t/(1-t), dx = dt/(1-t)² over t in [0, 1).
            let a = lower;
            let g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let d = 1.0 - t;
                f(a + t / d) / (d * d)
            };
            run(&g, 0.0, 1.0)
        }
        (false, true) => {
            let b = upper;
            let g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let d = 1.0 - t;
                f(b - t / d) / (d * d)
            };
            run(&g, 0.0, 1.0)
        }
    }
}

/// Hard cap on summation length; a sum that has not started decaying by then
/// is treated as divergent.
const SUM_CAP: usize = 1_000_000;
/// Consecutive sub-threshold terms required before truncating.
const SUM_QUIET_RUN: usize = 50;

/// Sum `f(k)` over a discrete support, truncating once 50 consecutive terms
/// fall below `tol · |partial sum|`.
pub fn sum_discrete(f: impl Fn(u64) -> f64, support: &SupportSpec, tol: f64) -> Result<SumResult> {
    const OP: &str = "sum_discrete";
    if !(tol > 0.0) {
        return Err(Error::domain(OP, "tol must be > 0"));
    }
    if !support.is_discrete() {
        return Err(Error::domain(OP, "continuous support; use integrate"));
    }
    let mut partial = 0.0;
    let mut quiet = 0usize;
    for k in 0..SUM_CAP as u64 {
        let term = f(k);
        if !term.is_finite() {
            return Err(Error::domain(OP, format!("non-finite term at k={k}")));
        }
        partial += term;
        if term.abs() <= tol * partial.abs() {
            quiet += 1;
            if quiet >= SUM_QUIET_RUN {
                return Ok(SumResult {
                    value: partial,
                    truncation_index: k as usize + 1,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SumDivergent { op: OP, cap: SUM_CAP })
}
