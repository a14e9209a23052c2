use super::{check_interval, check_subdivisions, sample, Integrand, QuadratureResult};
use crate::error::QuadError;
use crate::summation::NeumaierSum;

/// Composite trapezoidal rule `h/2·(f_0 + f_N) + h·Σ_{i=1}^{N-1} f_i`.
///
/// Terms are summed as `½f_0, f_1, …, f_{N-1}, ½f_N`, the same order the per-cell
/// B-spline path uses, so `T^1` reproduces this bit for bit.
pub fn trapezoid<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
) -> Result<QuadratureResult, QuadError> {
    check_interval(a, b)?;
    check_subdivisions(n)?;
    let h = (b - a) / n as f64;
    let s = sample(f, a, h, 0, n as i64)?;
    let mut sum = NeumaierSum::new();
    sum.add(0.5 * s.at(0));
    for i in 1..n as i64 {
        sum.add(s.at(i));
    }
    sum.add(0.5 * s.at(n as i64));
    Ok(QuadratureResult {
        value: h * sum.total(),
        evaluations: s.len(),
    })
}

/// Composite Simpson rule; `n` must be even.
pub fn simpson<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
) -> Result<QuadratureResult, QuadError> {
    check_interval(a, b)?;
    check_subdivisions(n)?;
    if !n.is_multiple_of(2) {
        return Err(QuadError::InvalidSubdivisions {
            n,
            reason: "Simpson's rule needs an even number of subdivisions",
        });
    }
    let h = (b - a) / n as f64;
    let s = sample(f, a, h, 0, n as i64)?;
    let mut sum = NeumaierSum::new();
    sum.add(s.at(0));
    sum.add(s.at(n as i64));
    for i in 1..(n / 2) as i64 {
        sum.add(2.0 * s.at(2 * i));
    }
    for i in 1..=(n / 2) as i64 {
        sum.add(4.0 * s.at(2 * i - 1));
    }
    Ok(QuadratureResult {
        value: h / 3.0 * sum.total(),
        evaluations: s.len(),
    })
}
