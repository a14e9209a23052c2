//! Quadrature rules of arbitrary order built from cardinal B-spline
//! quasi-interpolation.
//!
//! The composite rule `T^p` is the trapezoidal rule plus boundary corrections
//! whose weights are generated exactly (as rationals) from the quasi-interpolation
//! functional that makes the degree-`p` spline operator reproduce polynomials.
//! Nodes extend `2⌊p/2⌋` steps past each end of the interval, so integrands must be
//! evaluable there.
//!
//! ```
//! use bspline_quad::{integrate_composite, CompositePath, IntegrationRequest, SplineDegree};
//!
//! let req = IntegrationRequest::new(0.0, 1.0, 80, SplineDegree::new(4).unwrap()).unwrap();
//! let r = integrate_composite(&|x: f64| (x * x).exp(), &req, CompositePath::ClosedForm).unwrap();
//! assert!((r.value - 1.4626517459071815).abs() < 1e-10);
//! assert_eq!(r.evaluations, 80 + 1 + 8);
//! ```

pub mod coeffgen;
pub mod error;
pub mod expr;
pub mod rational;
pub mod rules;
pub mod spline;
pub mod study;
pub mod summation;
pub mod tensor;

pub use coeffgen::{
    bernoulli_numbers, coefficients, compute_rule_coefficients, solve_quasi_interp_coeffs,
    BernoulliTable, OffsetVec, QuasiInterpCoeffs, RuleCoefficients,
};
pub use error::QuadError;
pub use expr::{EvalError, Expression, ParseError, ParseErrorKind};
pub use rational::Rational;
pub use rules::{
    composite_weights, euler_maclaurin, integrate_composite, integrate_composite_with,
    integrate_single, m_alpha_rule, simpson, trapezoid, Bounded, CompositePath, Integrand,
    IntegrationRequest, QuadratureResult, Rule,
};
pub use spline::{bspline_eval_float, bspline_eval_rational, SplineDegree, MAX_RULE_DEGREE};
pub use study::{
    auto_reference, auto_reference_box, budget_subdivisions, convergence_study, evalcount_study,
    BudgetPolicy, ConvergenceReport, ConvergenceRow, EvalCountCell, EvalCountReport, EvalCountRow,
    Reference, ReferenceSource,
};
pub use summation::{NeumaierSum, Summation};
pub use tensor::{integrate_box, AxisSpec, BoxRequest, MultiIntegrand};
