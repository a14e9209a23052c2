//! Exact generation of the rule coefficients.
//!
//! For degree `p` (with `m = ⌊p/2⌋`) this produces
//!
//! * `c[j]`, `|j| <= m`: the symmetric functional `L_p(f) = Σ c[j] f(n + j)` for which
//!   `Q_p f = Σ_n L_p(f)(n) B_p(· - n)` reproduces every polynomial of degree `<= p`;
//! * `tau[j]`, `-2m <= j <= 2m + 1`: single-interval weights
//!   `tau[j] = Σ_r c[r] B_{p+1}(r - j + 1/2)`;
//! * `xi[i]`, `-2m <= i <= 0`: prefix sums of `tau`, the boundary weights of the
//!   composite rule.
//!
//! Everything is computed in exact rational arithmetic; the `*_float` tables are
//! nearest-double conversions of the exact values.

mod bernoulli;
mod linsolve;

use std::sync::OnceLock;

use num::{One, Zero};

use crate::error::QuadError;
use crate::rational::{half_integer, integer, ratio, to_f64_nearest, Rational};
use crate::spline::{bspline_eval_rational, SplineDegree, MAX_RULE_DEGREE};

pub use bernoulli::{bernoulli_numbers, BernoulliTable};
pub use linsolve::solve_exact;

/// A dense table indexed by a contiguous range of signed integers.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetVec<T> {
    first: i64,
    values: Vec<T>,
}

impl<T> OffsetVec<T> {
    pub fn new(first: i64, values: Vec<T>) -> Self {
        OffsetVec { first, values }
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    pub fn get(&self, index: i64) -> Option<&T> {
        let k = index.checked_sub(self.first)?;
        usize::try_from(k).ok().and_then(|k| self.values.get(k))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(index, value)` pairs in increasing index order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i64, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (self.first + k as i64, v))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> OffsetVec<U> {
        OffsetVec {
            first: self.first,
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl<T> std::ops::Index<i64> for OffsetVec<T> {
    type Output = T;
    fn index(&self, index: i64) -> &T {
        self.get(index)
            .unwrap_or_else(|| panic!("index {index} outside {}..={}", self.first, self.last()))
    }
}

/// Coefficients of the quasi-interpolation functional `L_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiInterpCoeffs {
    pub degree: SplineDegree,
    /// `c[j]` for `j = -⌊p/2⌋ ..= ⌊p/2⌋`; symmetric.
    pub c: OffsetVec<Rational>,
}

impl QuasiInterpCoeffs {
    /// `c[j]`, zero outside the stencil.
    pub fn coeff(&self, j: i64) -> Rational {
        self.c.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    /// `L_p` applied to the samples `f(n + j)`, `|j| <= ⌊p/2⌋`, given in order.
    pub fn apply(&self, samples: &[Rational]) -> Rational {
        assert_eq!(samples.len(), self.c.len());
        self.c
            .values()
            .iter()
            .zip(samples)
            .map(|(c, f)| c * f)
            .sum()
    }
}

/// Everything the integration rules of degree `p` need.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleCoefficients {
    pub degree: SplineDegree,
    pub quasi: QuasiInterpCoeffs,
    /// `tau[j]`, `j = -2⌊p/2⌋ ..= 2⌊p/2⌋ + 1`.
    pub tau: OffsetVec<Rational>,
    /// `xi[i] = Σ_{j <= i} tau[j]`, `i = -2⌊p/2⌋ ..= 0`.
    pub xi: OffsetVec<Rational>,
    pub tau_float: OffsetVec<f64>,
    pub xi_float: OffsetVec<f64>,
}

impl RuleCoefficients {
    /// `Σ_{j <= i} tau[j]` for any `i`: 0 left of the stencil, 1 right of it.
    pub fn cumulative(&self, i: i64) -> Rational {
        self.tau
            .iter()
            .take_while(|(j, _)| *j <= i)
            .map(|(_, t)| t)
            .sum()
    }
}

fn check_rule_degree(p: SplineDegree) -> Result<(), QuadError> {
    if p.get() == 0 {
        return Err(QuadError::DegreeOutOfRange {
            degree: 0,
            min: 1,
            max: MAX_RULE_DEGREE,
        });
    }
    Ok(())
}

fn pow(base: &Rational, exp: usize) -> Rational {
    (0..exp).fold(Rational::one(), |acc, _| acc * base)
}

/// Solves for the symmetric `c[j]` that make `Q_p` exact on polynomials of degree
/// `<= p`.
///
/// With symmetry imposed only the even monomials `x^0, x^2, …, x^{2m}` give
/// independent conditions; imposing them at `x = 0` yields a square system
/// `Σ_n B_p(n) Σ_j c[j] (n + j)^k = δ_{k0}`. Full reproduction on degree `<= p` is
/// then checked, not assumed.
pub fn solve_quasi_interp_coeffs(p: SplineDegree) -> Result<QuasiInterpCoeffs, QuadError> {
    check_rule_degree(p)?;
    let m = p.half();
    let reach = (p.get() as i64 + 1) / 2;
    let kernel: Vec<(Rational, Rational)> = (-reach..=reach)
        .map(|n| Ok((integer(n), bspline_eval_rational(p.get(), &integer(n))?)))
        .collect::<Result<Vec<_>, QuadError>>()?
        .into_iter()
        .filter(|(_, b)| !b.is_zero())
        .collect();

    let mut a = vec![vec![Rational::zero(); m + 1]; m + 1];
    let mut rhs = vec![Rational::zero(); m + 1];
    for (row, k) in (0..=2 * m).step_by(2).enumerate() {
        for (u, entry) in a[row].iter_mut().enumerate() {
            let shift = integer(u as i64);
            *entry = kernel
                .iter()
                .map(|(n, b)| {
                    let s = if u == 0 {
                        pow(n, k)
                    } else {
                        pow(&(n + &shift), k) + pow(&(n - &shift), k)
                    };
                    b * s
                })
                .sum();
        }
        rhs[row] = if k == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
    }

    let u = solve_exact(a, rhs).ok_or(QuadError::SingularSystem { degree: p.get() })?;
    let c = OffsetVec::new(
        -(m as i64),
        (-(m as i64)..=m as i64)
            .map(|j| u[j.unsigned_abs() as usize].clone())
            .collect(),
    );
    let coeffs = QuasiInterpCoeffs { degree: p, c };
    verify_reproduction(&coeffs)?;
    Ok(coeffs)
}

/// Checks `Q_p(x^k)(x) = x^k` exactly for `k = 0..=p` at `x = 0, 1/5, …, 4/5`.
/// Integer shift invariance of `Q_p` extends this to every unit interval.
fn verify_reproduction(coeffs: &QuasiInterpCoeffs) -> Result<(), QuadError> {
    let p = coeffs.degree.get();
    let m = coeffs.degree.half() as i64;
    let reach = p as i64 / 2 + 2;
    for t in 0..5 {
        let x = ratio(t, 5);
        let basis: Vec<(i64, Rational)> = (-reach..=reach + 1)
            .map(|n| Ok((n, bspline_eval_rational(p, &(&x - integer(n)))?)))
            .collect::<Result<Vec<_>, QuadError>>()?
            .into_iter()
            .filter(|(_, b)| !b.is_zero())
            .collect();
        for k in 0..=p {
            let q: Rational = basis
                .iter()
                .map(|(n, b)| {
                    let l: Rational = (-m..=m)
                        .map(|j| coeffs.coeff(j) * pow(&integer(n + j), k))
                        .sum();
                    l * b
                })
                .sum();
            if q != pow(&x, k) {
                return Err(QuadError::Internal(format!(
                    "degree {p} functional fails to reproduce x^{k} at x = {x}"
                )));
            }
        }
    }
    Ok(())
}

/// Computes `c`, `tau` and `xi` for degree `p` from scratch (no caching).
pub fn compute_rule_coefficients(p: SplineDegree) -> Result<RuleCoefficients, QuadError> {
    let quasi = solve_quasi_interp_coeffs(p)?;
    let m = p.half() as i64;
    let half = half_integer(1);

    let tau_values = (-2 * m..=2 * m + 1)
        .map(|j| {
            (j - 1 - m..=j + m)
                .filter(|r| r.abs() <= m)
                .map(|r| {
                    let arg = integer(r - j) + &half;
                    Ok(quasi.coeff(r) * bspline_eval_rational(p.get() + 1, &arg)?)
                })
                .sum::<Result<Rational, QuadError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tau = OffsetVec::new(-2 * m, tau_values);

    let mut running = Rational::zero();
    let xi_values: Vec<Rational> = tau
        .iter()
        .take_while(|(j, _)| *j <= 0)
        .map(|(_, t)| {
            running += t;
            running.clone()
        })
        .collect();
    let xi = OffsetVec::new(-2 * m, xi_values);

    Ok(RuleCoefficients {
        degree: p,
        tau_float: tau.map(to_f64_nearest),
        xi_float: xi.map(to_f64_nearest),
        quasi,
        tau,
        xi,
    })
}

static CACHE: [OnceLock<RuleCoefficients>; MAX_RULE_DEGREE + 1] =
    [const { OnceLock::new() }; MAX_RULE_DEGREE + 1];

/// Cached [`compute_rule_coefficients`]. Each degree is generated at most a handful
/// of times (concurrent first calls may race, the results are identical) and then
/// served from a process-wide table.
pub fn coefficients(p: SplineDegree) -> Result<&'static RuleCoefficients, QuadError> {
    check_rule_degree(p)?;
    let slot = &CACHE[p.get()];
    if let Some(c) = slot.get() {
        return Ok(c);
    }
    let fresh = compute_rule_coefficients(p)?;
    let _ = slot.set(fresh);
    Ok(slot.get().expect("slot initialised above"))
}
