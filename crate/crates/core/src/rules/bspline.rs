use num::One;

use super::{check_interval, sample, Integrand, IntegrationRequest, QuadratureResult};
use crate::coeffgen::{coefficients, OffsetVec};
use crate::error::QuadError;
use crate::rational::{to_f64_nearest, Rational};
use crate::spline::SplineDegree;
use crate::summation::{NeumaierSum, Summation};

/// How the composite rule `T^p` is evaluated. Both give the same rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompositePath {
    /// Trapezoid plus `h·Σ_{i=1}^{2m} ξ[-i]·(f_{-i} - f_i + f_{N+i} - f_{N-i})`.
    /// Needs `N >= 4⌊p/2⌋ + 2` so the two boundary zones do not overlap.
    ClosedForm,
    /// Sum of the single-interval rule over every cell, with node weights
    /// accumulated first. Valid for any `N >= 1`.
    PerCell,
}

pub(crate) fn closed_form_min_n(degree: SplineDegree) -> usize {
    2 * degree.overhang() + 2
}

/// Single-interval rule: `(b - a)·Σ_j tau[j]·f(a + j·(b - a))`, `j = -2m ..= 2m + 1`.
pub fn integrate_single<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    degree: SplineDegree,
) -> Result<QuadratureResult, QuadError> {
    check_interval(a, b)?;
    let coeffs = coefficients(degree)?;
    let h = b - a;
    let s = sample(f, a, h, coeffs.tau.first(), coeffs.tau.last())?;
    let sum: NeumaierSum = coeffs.tau_float.iter().map(|(j, t)| t * s.at(j)).collect();
    Ok(QuadratureResult {
        value: h * sum.total(),
        evaluations: s.len(),
    })
}

/// Node weights of the per-cell composite rule, so that
/// `T^p(f) = h·Σ_k w[k]·f(x_k)` for `k = -2m ..= N + 2m`.
///
/// `w[k] = Σ_{i=0}^{N-1} tau[k - i]`, computed exactly and rounded once.
pub fn composite_weights(degree: SplineDegree, n: usize) -> Result<OffsetVec<f64>, QuadError> {
    super::check_subdivisions(n)?;
    let coeffs = coefficients(degree)?;
    let first = coeffs.tau.first();
    let last = coeffs.tau.last();
    let n = n as i64;

    // prefix[i - first + 1] = Σ_{j < i} tau[j] ... shifted so prefix[0] = 0.
    let mut prefix: Vec<Rational> = Vec::with_capacity(coeffs.tau.len() + 1);
    prefix.push(Rational::from_integer(0.into()));
    for t in coeffs.tau.values() {
        let next = prefix.last().expect("non-empty") + t;
        prefix.push(next);
    }
    let partial = |lo: i64, hi: i64| -> f64 {
        // Σ_{j=lo}^{hi} tau[j]
        let upper = &prefix[(hi - first + 1) as usize];
        let lower = &prefix[(lo - first) as usize];
        let w = upper - lower;
        if w.is_one() {
            1.0
        } else {
            to_f64_nearest(&w)
        }
    };

    let weights = (first..=n - 1 + last)
        .map(|k| {
            let lo = first.max(k - n + 1);
            let hi = last.min(k);
            if lo == first && hi == last {
                1.0
            } else {
                partial(lo, hi)
            }
        })
        .collect();
    Ok(OffsetVec::new(first, weights))
}

/// Composite rule `T^p` on `[a, b]` with `N` subdivisions, compensated summation.
pub fn integrate_composite<F: Integrand + ?Sized>(
    f: &F,
    req: &IntegrationRequest,
    path: CompositePath,
) -> Result<QuadratureResult, QuadError> {
    integrate_composite_with(f, req, path, Summation::Compensated)
}

/// [`integrate_composite`] with an explicit accumulation strategy.
///
/// The strategies differ only in rounding, by a few ulps of the result. The per-cell
/// path ignores `summation` beyond using a plain sum for [`Summation::Plain`].
pub fn integrate_composite_with<F: Integrand + ?Sized>(
    f: &F,
    req: &IntegrationRequest,
    path: CompositePath,
    summation: Summation,
) -> Result<QuadratureResult, QuadError> {
    let degree = req.degree;
    let n = req.n as i64;
    let h = req.step();
    let overhang = degree.overhang() as i64;

    match path {
        CompositePath::ClosedForm => {
            let min_n = closed_form_min_n(degree);
            if req.n < min_n {
                return Err(QuadError::InvalidSubdivisions {
                    n: req.n,
                    reason: "closed-form path needs N >= 4⌊p/2⌋ + 2",
                });
            }
            let coeffs = coefficients(degree)?;
            let s = sample(f, req.a, h, -overhang, n + overhang)?;
            let trap = std::iter::once(0.5 * s.at(0))
                .chain((1..n).map(|i| s.at(i)))
                .chain(std::iter::once(0.5 * s.at(n)));
            let corr = (1..=overhang).map(|i| {
                let diff = (s.at(-i) - s.at(i)) + (s.at(n + i) - s.at(n - i));
                coeffs.xi_float[-i] * diff
            });
            let value = match summation {
                Summation::Compensated => h * trap.chain(corr).collect::<NeumaierSum>().total(),
                Summation::Plain => h * trap.sum::<f64>() + h * corr.sum::<f64>(),
            };
            Ok(QuadratureResult {
                value,
                evaluations: s.len(),
            })
        }
        CompositePath::PerCell => {
            let w = composite_weights(degree, req.n)?;
            let s = sample(f, req.a, h, w.first(), w.last())?;
            let terms = w.iter().map(|(k, wk)| wk * s.at(k));
            let sum = match summation {
                Summation::Compensated => terms.collect::<NeumaierSum>().total(),
                Summation::Plain => terms.sum(),
            };
            Ok(QuadratureResult {
                value: h * sum,
                evaluations: s.len(),
            })
        }
    }
}
