//! Exact rational helpers shared by every module.
//!
//! All values are `BigRational`, which is always stored reduced with a
//! positive denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

/// `2^-k` as a rational.
pub fn dyadic(k: u32) -> Q {
    Q::new(BigInt::one(), pow2(k))
}

/// Largest `j / 2^k` (with `j >= 0` an integer) whose square is strictly
/// below `x`. Returns `None` when `x <= 0`.
pub fn dyadic_sqrt_below(x: &Q, k: u32) -> Option<Q> {
    if !x.is_positive() {
        return None;
    }
    let scale = pow2(2 * k);
    // j^2 * den < num * 4^k  <=>  j^2 <= floor((num * 4^k - 1) / den)
    let n = x.numer() * &scale - BigInt::one();
    let bound = n.div_floor(x.denom());
    let j = bound.sqrt();
    Some(Q::new(j, pow2(k)))
}

/// Exact test `x > sqrt(2)` style comparisons: is `x > a + sqrt(b)`?
/// Decided as `x - a > 0 && (x - a)^2 > b` for `b >= 0`.
pub fn exceeds_shifted_sqrt(x: &Q, a: &Q, b: &Q) -> bool {
    let d = x - a;
    d.is_positive() && &d * &d > *b
}

/// Decimal approximation, only for display.
pub fn approx(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse `"p"` or `"p/q"` into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}
