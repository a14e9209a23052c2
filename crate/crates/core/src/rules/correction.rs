use num::{BigInt, One};

use super::{
    check_interval, check_subdivisions, checked_eval, sample, Integrand, QuadratureResult,
};
use crate::coeffgen::bernoulli_numbers;
use crate::error::QuadError;
use crate::rational::{to_f64_nearest, Rational};
use crate::summation::NeumaierSum;

/// The `M²_α` family: trapezoid plus
/// `(h²/12)·α·D₂ − (h²/12)·(2α + 1/(2h))·D₁`, where
/// `D_i = f_{-i} − f_i + f_{N+i} − f_{N-i}`.
///
/// `α = −1/(32h)` gives `T²` and `α = −1/(12h)` gives `T³`.
pub fn m_alpha_rule<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
    alpha: f64,
) -> Result<QuadratureResult, QuadError> {
    check_interval(a, b)?;
    check_subdivisions(n)?;
    if !alpha.is_finite() {
        return Err(QuadError::NonFiniteArgument(alpha));
    }
    let h = (b - a) / n as f64;
    let n = n as i64;
    let s = sample(f, a, h, -2, n + 2)?;
    let d = |i: i64| (s.at(-i) - s.at(i)) + (s.at(n + i) - s.at(n - i));

    let mut sum = NeumaierSum::new();
    sum.add(0.5 * s.at(0));
    for i in 1..n {
        sum.add(s.at(i));
    }
    sum.add(0.5 * s.at(n));
    // Everything is scaled by h at the end, hence one factor of h less here.
    sum.add(alpha * h / 12.0 * d(2));
    sum.add(-(2.0 * alpha * h + 0.5) / 12.0 * d(1));
    Ok(QuadratureResult {
        value: h * sum.total(),
        evaluations: s.len(),
    })
}

/// Trapezoid corrected with exact endpoint derivatives:
/// `T − Σ_{k=1}^{p} h^{2k}·B_{2k}/(2k)!·(f^{(2k−1)}(b) − f^{(2k−1)}(a))`.
///
/// `derivatives[k]` must be `f^{(2k+1)}`, so `p` of them are needed. The reported
/// evaluation count covers `f` only.
pub fn euler_maclaurin<F: Integrand + ?Sized>(
    f: &F,
    derivatives: &[&dyn Integrand],
    a: f64,
    b: f64,
    n: usize,
    p: usize,
) -> Result<QuadratureResult, QuadError> {
    check_interval(a, b)?;
    check_subdivisions(n)?;
    if derivatives.len() < p {
        return Err(QuadError::MissingDerivative {
            order: 2 * derivatives.len() + 1,
        });
    }
    let h = (b - a) / n as f64;
    let s = sample(f, a, h, 0, n as i64)?;
    let mut trap = NeumaierSum::new();
    trap.add(0.5 * s.at(0));
    for i in 1..n as i64 {
        trap.add(s.at(i));
    }
    trap.add(0.5 * s.at(n as i64));

    let bern = bernoulli_numbers(2 * p);
    let mut factorial = Rational::one();
    let mut total = NeumaierSum::new();
    total.add(h * trap.total());
    let mut h_pow = 1.0;
    for k in 1..=p {
        factorial *= Rational::from_integer(BigInt::from((2 * k - 1) * (2 * k)));
        h_pow *= h * h;
        let weight = to_f64_nearest(&(bern.get(2 * k).expect("table covers 2p") / &factorial));
        let df = derivatives[k - 1];
        let (lo, hi) = df.domain();
        let delta = checked_eval(df, b, lo, hi)? - checked_eval(df, a, lo, hi)?;
        total.add(-h_pow * weight * delta);
    }
    Ok(QuadratureResult {
        value: total.total(),
        evaluations: s.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{integrate_composite, trapezoid, CompositePath, IntegrationRequest};
    use crate::spline::SplineDegree;

    fn f1(x: f64) -> f64 {
        (x * x).exp()
    }

    fn df1(x: f64) -> f64 {
        2.0 * x * (x * x).exp()
    }

    const F1_REF: f64 = 1.4626517459071815;

    #[test]
    fn m_alpha_reproduces_low_order_rules() {
        let f = |x: f64| (2.0 * x).sin() + x * x;
        for n in [10, 17, 64] {
            let h = 1.0 / n as f64;
            for (p, alpha) in [(2, -1.0 / (32.0 * h)), (3, -1.0 / (12.0 * h))] {
                let req =
                    IntegrationRequest::new(0.0, 1.0, n, SplineDegree::new(p).unwrap()).unwrap();
                let t = integrate_composite(&f, &req, CompositePath::ClosedForm)
                    .unwrap()
                    .value;
                let m = m_alpha_rule(&f, 0.0, 1.0, n, alpha).unwrap();
                assert!((m.value - t).abs() <= 1e-15 * t.abs(), "p = {p}, n = {n}");
                assert_eq!(m.evaluations, n + 5);
            }
        }
    }

    #[test]
    fn m_alpha_linear_is_exact() {
        for alpha in [-3.0, 0.0, 0.7, 125.0] {
            let r = m_alpha_rule(&|x: f64| x, 0.0, 1.0, 8, alpha).unwrap();
            assert!((r.value - 0.5).abs() < 1e-14, "alpha = {alpha}");
        }
    }

    #[test]
    fn euler_maclaurin_quadratic() {
        let d: &dyn Integrand = &|x: f64| 2.0 * x;
        let r = euler_maclaurin(&|x: f64| x * x, &[d], 0.0, 1.0, 4, 1).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn euler_maclaurin_constant() {
        let zero: &dyn Integrand = &|_x: f64| 0.0;
        for p in 1..4 {
            let ds = vec![zero; p];
            let r = euler_maclaurin(&|_x: f64| 2.5, &ds, -1.0, 3.0, 7, p).unwrap();
            assert_eq!(r.value, 10.0);
        }
    }

    #[test]
    fn euler_maclaurin_fourth_order() {
        let d: &dyn Integrand = &df1;
        let e80 = (euler_maclaurin(&f1, &[d], 0.0, 1.0, 80, 1).unwrap().value - F1_REF).abs();
        let e160 = (euler_maclaurin(&f1, &[d], 0.0, 1.0, 160, 1).unwrap().value - F1_REF).abs();
        let order = (e80 / e160).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn euler_maclaurin_higher_order() {
        // f = e^x: every derivative is e^x, so the corrections reach high order quickly.
        let d: &dyn Integrand = &|x: f64| x.exp();
        let exact = 1f64.exp() - 1.0;
        let trap = (trapezoid(&|x: f64| x.exp(), 0.0, 1.0, 8).unwrap().value - exact).abs();
        let em3 = (euler_maclaurin(&|x: f64| x.exp(), &[d, d, d], 0.0, 1.0, 8, 3)
            .unwrap()
            .value
            - exact)
            .abs();
        assert!(trap > 1e-3);
        assert!(em3 < 1e-12, "{em3:e}");
    }

    #[test]
    fn euler_maclaurin_missing_derivative() {
        let d: &dyn Integrand = &df1;
        assert_eq!(
            euler_maclaurin(&f1, &[d], 0.0, 1.0, 8, 2).unwrap_err(),
            QuadError::MissingDerivative { order: 3 }
        );
    }
}
