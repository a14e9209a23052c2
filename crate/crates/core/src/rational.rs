//! Exact rational helpers on top of `num::BigRational`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `s / 2`, the shape of every knot offset used by the centred B-splines.
pub fn half_integer(s: i64) -> Rational {
    ratio(s, 2)
}

/// Exact division; `None` when `den` is zero.
pub fn checked_div(num: &Rational, den: &Rational) -> Option<Rational> {
    if den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}

/// Exact rational value of a finite double (every double is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Formats as `num/den`, or just `num` for integers.
pub fn to_fraction_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_fraction(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Nearest double to `q`, ties to even. Overflows to ±infinity and underflows
/// through the subnormal range like an IEEE conversion would.
pub fn to_f64_nearest(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let negative = q.is_negative();
    let n = q.numer().abs();
    let d = q.denom().clone();

    // Choose `shift` so that n·2^shift / d lies in [2^52, 2^53).
    let mut shift = 53 - (n.bits() as i64 - d.bits() as i64);
    let scaled_quotient = |shift: i64| -> (BigInt, BigInt) {
        let (num, den) = if shift >= 0 {
            (&n << (shift as usize), d.clone())
        } else {
            (n.clone(), &d << ((-shift) as usize))
        };
        num.div_rem(&den)
    };
    let (mut quot, mut rem) = scaled_quotient(shift);
    let two53 = BigInt::one() << 53usize;
    if quot >= two53 {
        shift -= 1;
        (quot, rem) = scaled_quotient(shift);
    }
    // value = quot · 2^-shift with quot in [2^52, 2^53); the unbiased exponent of
    // the leading bit is 52 - shift.
    let exponent = 52 - shift;
    if exponent > 1023 {
        return if negative {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if exponent < -1022 {
        // Subnormal: re-quantise on the fixed 2^-1074 grid.
        shift = 1074;
        (quot, rem) = scaled_quotient(shift);
    }
    let den_for_rem = if shift >= 0 {
        d.clone()
    } else {
        &d << ((-shift) as usize)
    };
    let twice_rem: BigInt = rem << 1usize;
    let round_up = match twice_rem.cmp(&den_for_rem) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => quot.is_odd(),
    };
    if round_up {
        quot += 1;
    }
    // quot ≤ 2^53, exactly representable; the power-of-two scaling is exact.
    let mantissa = quot.to_u64().expect("mantissa fits in 54 bits") as f64;
    let magnitude = mantissa * pow2(-shift);
    if magnitude.is_infinite() {
        return if negative {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// 2^e for e in [-1074, 1023].
fn pow2(e: i64) -> f64 {
    if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (e + 1074))
    }
}
