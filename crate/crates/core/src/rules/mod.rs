//! One-dimensional quadrature rules on uniform grids `x_i = a + i·h`, `h = (b-a)/N`.
//!
//! The B-spline rules sample the integrand at nodes outside `[a, b]` (indices down
//! to `-2⌊p/2⌋` and up to `N + 2⌊p/2⌋`); there is no one-sided fallback, so the
//! integrand has to be defined there.

mod bspline;
mod correction;
mod newton_cotes;

pub use bspline::{
    composite_weights, integrate_composite, integrate_composite_with, integrate_single,
    CompositePath,
};
pub use correction::{euler_maclaurin, m_alpha_rule};
pub use newton_cotes::{simpson, trapezoid};

use crate::error::QuadError;
use crate::spline::SplineDegree;
use crate::summation::Summation;

/// A real function of one real variable.
///
/// Any `Fn(f64) -> f64` is an integrand defined on the whole real line; wrap it in
/// [`Bounded`] to restrict the domain.
pub trait Integrand {
    fn eval(&self, x: f64) -> Result<f64, QuadError>;

    /// Closed interval on which `eval` is defined.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

impl<F: Fn(f64) -> f64 + ?Sized> Integrand for F {
    fn eval(&self, x: f64) -> Result<f64, QuadError> {
        Ok(self(x))
    }
}

/// An integrand restricted to `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Bounded<F> {
    pub f: F,
    pub lo: f64,
    pub hi: f64,
}

impl<F> Bounded<F> {
    pub fn new(f: F, lo: f64, hi: f64) -> Self {
        Bounded { f, lo, hi }
    }
}

impl<F: Integrand> Integrand for Bounded<F> {
    fn eval(&self, x: f64) -> Result<f64, QuadError> {
        self.f.eval(x)
    }

    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Interval, subdivision count and rule order of a composite B-spline integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationRequest {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub degree: SplineDegree,
}

impl IntegrationRequest {
    pub fn new(a: f64, b: f64, n: usize, degree: SplineDegree) -> Result<Self, QuadError> {
        check_interval(a, b)?;
        check_subdivisions(n)?;
        if degree.get() == 0 {
            return Err(QuadError::DegreeOutOfRange {
                degree: 0,
                min: 1,
                max: crate::spline::MAX_RULE_DEGREE,
            });
        }
        Ok(IntegrationRequest { a, b, n, degree })
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Number of distinct integrand evaluations.
    pub evaluations: usize,
}

/// The derivative-free rules, as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Composite B-spline rule `T^p`.
    BSpline {
        degree: SplineDegree,
        path: CompositePath,
        summation: Summation,
    },
    Trapezoid,
    Simpson,
    /// `M²_α`, the trapezoid corrected by a one-parameter difference approximation of
    /// the endpoint derivatives.
    MAlpha {
        alpha: f64,
    },
}

impl Rule {
    /// `T^p` with the closed-form path when `n` allows it, per-cell otherwise.
    pub fn bspline(degree: SplineDegree) -> Rule {
        Rule::BSpline {
            degree,
            path: CompositePath::ClosedForm,
            summation: Summation::Compensated,
        }
    }

    pub fn apply<F: Integrand + ?Sized>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        n: usize,
    ) -> Result<QuadratureResult, QuadError> {
        match *self {
            Rule::BSpline {
                degree,
                path,
                summation,
            } => {
                let req = IntegrationRequest::new(a, b, n, degree)?;
                let path = match path {
                    CompositePath::ClosedForm if n < bspline::closed_form_min_n(degree) => {
                        CompositePath::PerCell
                    }
                    other => other,
                };
                integrate_composite_with(f, &req, path, summation)
            }
            Rule::Trapezoid => trapezoid(f, a, b, n),
            Rule::Simpson => simpson(f, a, b, n),
            Rule::MAlpha { alpha } => m_alpha_rule(f, a, b, n, alpha),
        }
    }

    /// Integrand evaluations this rule makes with `n` subdivisions.
    pub fn evaluation_count(&self, n: usize) -> usize {
        match *self {
            Rule::BSpline { degree, .. } => n + 1 + 2 * degree.overhang(),
            Rule::Trapezoid | Rule::Simpson => n + 1,
            Rule::MAlpha { .. } => n + 5,
        }
    }

    /// Short label such as `tp4`, `trapezoid`, `simpson`, `malpha`.
    pub fn label(&self) -> String {
        match self {
            Rule::BSpline { degree, .. } => format!("tp{degree}"),
            Rule::Trapezoid => "trapezoid".into(),
            Rule::Simpson => "simpson".into(),
            Rule::MAlpha { .. } => "malpha".into(),
        }
    }
}

pub(crate) fn check_interval(a: f64, b: f64) -> Result<(), QuadError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    Ok(())
}

pub(crate) fn check_subdivisions(n: usize) -> Result<(), QuadError> {
    if n == 0 {
        return Err(QuadError::InvalidSubdivisions {
            n,
            reason: "need at least one subdivision",
        });
    }
    Ok(())
}

/// `a + i·h`, computed directly rather than by accumulation.
#[inline]
pub(crate) fn node(a: f64, h: f64, i: i64) -> f64 {
    a + i as f64 * h
}

/// Evaluates `f` once at every node `first..=last`, checking domain and finiteness.
pub(crate) fn sample<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    h: f64,
    first: i64,
    last: i64,
) -> Result<Samples, QuadError> {
    let (lo, hi) = f.domain();
    let values = (first..=last)
        .map(|i| {
            let x = node(a, h, i);
            checked_eval(f, x, lo, hi)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Samples { first, values })
}

pub(crate) fn checked_eval<F: Integrand + ?Sized>(
    f: &F,
    x: f64,
    lo: f64,
    hi: f64,
) -> Result<f64, QuadError> {
    if !(x >= lo && x <= hi) {
        return Err(QuadError::OutsideDomain { x, lo, hi });
    }
    let v = f.eval(x)?;
    if !v.is_finite() {
        return Err(QuadError::NonFinite { x, value: v });
    }
    Ok(v)
}

/// Integrand values on a contiguous range of node indices.
pub(crate) struct Samples {
    first: i64,
    values: Vec<f64>,
}

impl Samples {
    #[inline]
    pub(crate) fn at(&self, i: i64) -> f64 {
        self.values[(i - self.first) as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }
}
