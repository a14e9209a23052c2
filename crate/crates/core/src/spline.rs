//! Centred cardinal B-splines.
//!
//! `B_0` is the indicator of `[-1/2, 1/2)` and `B_p = B_{p-1} * B_0`, so `B_p` is a
//! piecewise polynomial of degree `p` on the integer-spaced knots
//! `-(p+1)/2, …, (p+1)/2`, symmetric about zero with unit integral.
//!
//! Evaluation uses the uniform-knot Cox–de Boor recursion
//!
//! ```text
//! B_d(y) = [ (y + (d+1)/2) B_{d-1}(y + 1/2) + ((d+1)/2 - y) B_{d-1}(y - 1/2) ] / d
//! ```
//!
//! unrolled as a triangular table: level `d` needs `B_d` at `x + s/2` for
//! `|s| <= p - d`, each entry computed once from two entries of level `d - 1`.
//! The same code runs in exact rational arithmetic and, for the float entry point,
//! in double-double arithmetic rounded once at the end.

use std::ops::{Add, Div, Mul, Sub};

use num::{FromPrimitive, One, Zero};

use crate::error::QuadError;
use crate::rational::Rational;

/// Largest rule order supported by coefficient generation.
pub const MAX_RULE_DEGREE: usize = 16;

/// Largest spline degree the kernel evaluates; rules of order `p` need `B_{p+1}`.
pub const MAX_KERNEL_DEGREE: usize = MAX_RULE_DEGREE + 1;

/// Polynomial degree `p` of a quasi-interpolation rule, `0 <= p <= 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplineDegree(usize);

impl SplineDegree {
    pub fn new(p: usize) -> Result<Self, QuadError> {
        if p > MAX_RULE_DEGREE {
            return Err(QuadError::DegreeOutOfRange {
                degree: p,
                min: 0,
                max: MAX_RULE_DEGREE,
            });
        }
        Ok(SplineDegree(p))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `⌊p/2⌋`, the half-width of the quasi-interpolation stencil.
    #[inline]
    pub fn half(self) -> usize {
        self.0 / 2
    }

    /// Number of nodes the composite rule places outside each end of the interval.
    #[inline]
    pub fn overhang(self) -> usize {
        2 * self.half()
    }
}

impl std::fmt::Display for SplineDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

trait KernelScalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn half_int(s: i64) -> Self {
        Self::from_i64(s).expect("small integer") / Self::from_i64(2).expect("small integer")
    }
}

impl KernelScalar for DoubleDouble {}
impl KernelScalar for Rational {}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving roughly 106 bits of
/// precision. The float kernel runs in this type so that the single final rounding
/// dominates its error even at degree 17.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        DoubleDouble {
            hi: s,
            lo: b - (s - a),
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, rhs.hi);
        let (t, f) = Self::two_sum(self.lo, rhs.lo);
        let r = Self::quick_two_sum(s, e + t);
        Self::quick_two_sum(r.hi, r.lo + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + DoubleDouble {
            hi: -rhs.hi,
            lo: -rhs.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.hi * rhs.hi;
        let e = self.hi.mul_add(rhs.hi, -p);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::quick_two_sum(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * DoubleDouble::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * DoubleDouble::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let q = Self::quick_two_sum(q1, q2);
        q + DoubleDouble::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::from_f64(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::from_f64(1.0)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        // Kernel integers are tiny, so the conversion is exact.
        Some(DoubleDouble::from_f64(n as f64))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(DoubleDouble::from_f64(n as f64))
    }
}

fn check_kernel_degree(degree: usize) -> Result<(), QuadError> {
    if degree > MAX_KERNEL_DEGREE {
        return Err(QuadError::DegreeOutOfRange {
            degree,
            min: 0,
            max: MAX_KERNEL_DEGREE,
        });
    }
    Ok(())
}

fn eval_triangular<T: KernelScalar>(degree: usize, x: &T) -> T {
    let p = degree as i64;
    let lo = T::half_int(-1);
    let hi = T::half_int(1);
    let support = T::half_int(p + 1);
    if degree > 0 && (*x >= support || *x <= T::zero() - support) {
        return T::zero();
    }

    // level[k] holds B_d(x + s/2) with s = -(p - d) + 2k.
    let mut level: Vec<T> = (0..=p)
        .map(|k| {
            let y = x.clone() + T::half_int(-p + 2 * k);
            if y >= lo && y < hi {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();

    for d in 1..=p {
        let width = (p - d) as usize;
        let dd = T::from_i64(d).expect("small integer");
        let half_span = T::half_int(d + 1);
        let next: Vec<T> = (0..=width)
            .map(|k| {
                let y = x.clone() + T::half_int(-(p - d) + 2 * k as i64);
                // B_{d-1}(y - 1/2) sits at index k, B_{d-1}(y + 1/2) at index k + 1.
                let left = &level[k];
                let right = &level[k + 1];
                let mut acc = T::zero();
                if !right.is_zero() {
                    acc = acc + (y.clone() + half_span.clone()) * right.clone();
                }
                if !left.is_zero() {
                    acc = acc + (half_span.clone() - y) * left.clone();
                }
                acc / dd.clone()
            })
            .collect();
        level = next;
    }
    level.swap_remove(0)
}

/// Exact value of the centred cardinal B-spline `B_degree(x)`.
///
/// `B_0` is left-closed/right-open: `B_0(-1/2) = 1`, `B_0(1/2) = 0`.
pub fn bspline_eval_rational(degree: usize, x: &Rational) -> Result<Rational, QuadError> {
    check_kernel_degree(degree)?;
    Ok(eval_triangular(degree, x))
}

/// Double-precision `B_degree(x)`; agrees with [`bspline_eval_rational`] to a few ulp.
pub fn bspline_eval_float(degree: usize, x: f64) -> Result<f64, QuadError> {
    check_kernel_degree(degree)?;
    if !x.is_finite() {
        return Err(QuadError::NonFiniteArgument(x));
    }
    Ok(eval_triangular(degree, &DoubleDouble::from_f64(x)).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_f64, half_integer, integer, ratio, to_f64_nearest};
    use num::Signed;
    use proptest::prelude::*;

    /// Piecewise polynomial on unit cells `[k - (p+1)/2, k + 1 - (p+1)/2)`, each piece
    /// stored as coefficients in the local variable `t = x - left_end`.
    struct Piecewise {
        degree: usize,
        pieces: Vec<Vec<Rational>>,
    }

    impl Piecewise {
        fn eval(&self, x: &Rational) -> Rational {
            let left = -half_integer(self.degree as i64 + 1);
            let offset = x - &left;
            if offset.is_negative() {
                return integer(0);
            }
            let k = offset.floor().to_integer();
            let k: usize = match k.try_into() {
                Ok(k) if k < self.pieces.len() => k,
                _ => return integer(0),
            };
            let t = &offset - integer(k as i64);
            self.pieces[k]
                .iter()
                .rev()
                .fold(integer(0), |acc, c| acc * &t + c)
        }
    }

    /// Brute-force oracle: B_p(x) = ∫_{x-1/2}^{x+1/2} B_{p-1}(s) ds, carried out by
    /// exact antiderivatives of the pieces of B_{p-1}.
    fn convolution_oracle(p: usize) -> Piecewise {
        let mut current = Piecewise {
            degree: 0,
            pieces: vec![vec![integer(1)]],
        };
        for d in 1..=p {
            // Antiderivative of each piece, with the constant chosen for continuity.
            let mut anti: Vec<Vec<Rational>> = Vec::new();
            let mut acc = integer(0);
            for piece in &current.pieces {
                let mut a = vec![acc.clone()];
                for (i, c) in piece.iter().enumerate() {
                    a.push(c / integer(i as i64 + 1));
                }
                acc = a.iter().fold(integer(0), |s, c| s + c);
                anti.push(a);
            }
            let prev = Piecewise {
                degree: d - 1,
                pieces: anti,
            };
            let total = acc;
            let big_f = |x: &Rational| -> Rational {
                let left = -half_integer(d as i64);
                if x <= &left {
                    integer(0)
                } else if x >= &-left.clone() {
                    total.clone()
                } else {
                    prev.eval(x)
                }
            };
            // B_d(x) = F(x + 1/2) - F(x - 1/2): sample at d+1 points per cell and
            // interpolate the degree-d piece by Lagrange.
            let mut pieces = Vec::new();
            for k in 0..=d {
                let left = -half_integer(d as i64 + 1) + integer(k as i64);
                let nodes: Vec<Rational> = (0..=d).map(|i| ratio(i as i64, d as i64)).collect();
                let values: Vec<Rational> = nodes
                    .iter()
                    .map(|t| {
                        let x = &left + t;
                        big_f(&(&x + ratio(1, 2))) - big_f(&(&x - ratio(1, 2)))
                    })
                    .collect();
                pieces.push(lagrange_coeffs(&nodes, &values));
            }
            current = Piecewise { degree: d, pieces };
        }
        current
    }

    fn lagrange_coeffs(nodes: &[Rational], values: &[Rational]) -> Vec<Rational> {
        let n = nodes.len();
        let mut out = vec![integer(0); n];
        for i in 0..n {
            let mut basis = vec![integer(1)];
            let mut denom = integer(1);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut next = vec![integer(0); basis.len() + 1];
                for (k, c) in basis.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * &nodes[j];
                }
                basis = next;
                denom *= &nodes[i] - &nodes[j];
            }
            for (k, c) in basis.iter().enumerate() {
                out[k] += c * &values[i] / &denom;
            }
        }
        out
    }

    #[test]
    fn support_endpoint() {
        assert_eq!(bspline_eval_rational(3, &integer(2)).unwrap(), integer(0));
        assert_eq!(bspline_eval_rational(3, &integer(-2)).unwrap(), integer(0));
    }

    #[test]
    fn hat_peak() {
        assert_eq!(bspline_eval_rational(1, &integer(0)).unwrap(), integer(1));
        assert_eq!(bspline_eval_float(1, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn quadratic_at_half_matches_oracle() {
        let oracle = convolution_oracle(2);
        assert_eq!(oracle.eval(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(bspline_eval_rational(2, &ratio(1, 2)).unwrap(), ratio(1, 2));
        assert_eq!(bspline_eval_float(2, 0.5).unwrap(), 0.5);
        // Central piece 3/4 - x².
        assert_eq!(
            bspline_eval_rational(2, &ratio(1, 4)).unwrap(),
            ratio(3, 4) - ratio(1, 16)
        );
    }

    #[test]
    fn boundary_of_support_is_zero() {
        assert_eq!(bspline_eval_float(5, 3.0).unwrap(), 0.0);
        assert_eq!(bspline_eval_float(5, -3.0).unwrap(), 0.0);
    }

    #[test]
    fn b0_convention() {
        assert_eq!(bspline_eval_rational(0, &ratio(-1, 2)).unwrap(), integer(1));
        assert_eq!(bspline_eval_rational(0, &ratio(1, 2)).unwrap(), integer(0));
        assert_eq!(bspline_eval_float(0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            bspline_eval_float(2, f64::NAN),
            Err(QuadError::NonFiniteArgument(_))
        ));
        assert!(bspline_eval_float(MAX_KERNEL_DEGREE + 1, 0.0).is_err());
        assert!(SplineDegree::new(17).is_err());
        assert_eq!(SplineDegree::new(7).unwrap().half(), 3);
    }

    #[test]
    fn agrees_with_convolution_oracle() {
        for p in 0..=6usize {
            let oracle = convolution_oracle(p);
            for num in -40..=40i64 {
                let x = ratio(num, 9);
                assert_eq!(
                    bspline_eval_rational(p, &x).unwrap(),
                    oracle.eval(&x),
                    "p = {p}, x = {x}"
                );
            }
        }
    }

    #[test]
    fn half_integer_agreement_within_four_ulp() {
        for p in 0..=MAX_KERNEL_DEGREE {
            for s in -(p as i64 + 2)..=(p as i64 + 2) {
                let x = half_integer(s);
                let exact = to_f64_nearest(&bspline_eval_rational(p, &x).unwrap());
                let float = bspline_eval_float(p, s as f64 / 2.0).unwrap();
                assert!(
                    ulps(exact, float) <= 4,
                    "p = {p}, s = {s}: {exact} vs {float}"
                );
            }
        }
    }

    pub(crate) fn ulps(a: f64, b: f64) -> u64 {
        if a == b {
            return 0;
        }
        let key = |v: f64| {
            let bits = v.to_bits() as i64;
            if bits < 0 {
                i64::MIN - bits
            } else {
                bits
            }
        };
        key(a).abs_diff(key(b))
    }

    proptest! {
        #[test]
        fn partition_of_unity_float(x in -10.0f64..10.0, p in 0usize..=8) {
            let s: f64 = (-20..=20).map(|n| bspline_eval_float(p, x - n as f64).unwrap()).sum();
            prop_assert!((s - 1.0).abs() < 1e-13, "sum = {}", s);
        }

        #[test]
        fn partition_of_unity_exact(num in -1000i64..=1000, den in 100i64..=1000, p in 0usize..=8) {
            let x = ratio(num, den);
            let s = (-20..=20i64)
                .map(|n| bspline_eval_rational(p, &(&x - integer(n))).unwrap())
                .fold(integer(0), |a, b| a + b);
            prop_assert_eq!(s, integer(1));
        }

        #[test]
        fn symmetric(num in -1000i64..1000, den in 1i64..100, p in 1usize..=10) {
            let x = ratio(num, den);
            prop_assert_eq!(
                bspline_eval_rational(p, &x).unwrap(),
                bspline_eval_rational(p, &-x).unwrap()
            );
        }

        #[test]
        fn support(num in -2000i64..2000, den in 1i64..100, p in 0usize..=10) {
            let x = ratio(num, den);
            let v = bspline_eval_rational(p, &x).unwrap();
            let bound = half_integer(p as i64 + 1);
            if x.abs() >= bound {
                prop_assert_eq!(v, integer(0));
            } else if p > 0 || (x >= ratio(-1, 2) && x < ratio(1, 2)) {
                prop_assert!(v > integer(0));
            }
        }

        #[test]
        fn float_matches_rational_at_dyadic_points(k in -4096i64..4096, p in 0usize..=8) {
            let x = k as f64 / 512.0;
            let exact = to_f64_nearest(&bspline_eval_rational(p, &from_f64(x).unwrap()).unwrap());
            let float = bspline_eval_float(p, x).unwrap();
            prop_assert!(ulps(exact, float) <= 4, "{} vs {}", exact, float);
        }
    }

    #[test]
    fn unit_integral() {
        for p in 0..=8usize {
            let half = (p as f64 + 1.0) / 2.0;
            let n = 20_000;
            let h = 2.0 * half / n as f64;
            let interior: f64 = (1..n)
                .map(|i| bspline_eval_float(p, -half + i as f64 * h).unwrap())
                .sum();
            let ends = 0.5
                * (bspline_eval_float(p, -half).unwrap() + bspline_eval_float(p, half).unwrap());
            let integral = h * (interior + ends);
            let tol = if p == 0 { 1e-3 } else { 1e-10 };
            assert!((integral - 1.0).abs() < tol, "p = {p}: {integral}");
        }
    }
}
