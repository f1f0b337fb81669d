//! Exact rational arithmetic for step-count ceilings.
//!
//! Step counts such as `⌈(tΓΩ)²/ε⌉` are frequently exact integers for the
//! decimal inputs users type (`t = 4`, `Γ = 10.6`, `ε = 1e-6`), and evaluating
//! them in binary floating point can land one ulp above the integer and round
//! up. Each `f64` is therefore read back as the shortest decimal that
//! round-trips to it, and the whole expression is evaluated over the
//! rationals before taking the ceiling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// The shortest decimal that round-trips to `x`, as an exact rational.
pub fn decimal(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(domain(format!("non-finite value {x}")));
    }
    if x == 0.0 {
        return Ok(BigRational::zero());
    }
    let repr = format!("{x:e}");
    let (mantissa, exponent) = repr.split_once('e').expect("exponent form");
    let exponent: i64 = exponent.parse().expect("integer exponent");
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    let mut q = if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

/// Exact sum of the decimal readings of `values`.
pub fn decimal_sum(values: impl IntoIterator<Item = f64>) -> Result<BigRational> {
    values.into_iter().try_fold(BigRational::zero(), |acc, v| Ok(acc + decimal(v)?))
}

/// `⌈q⌉` as an unsigned count.
pub fn ceil_count(q: &BigRational) -> Result<u128> {
    if q.is_negative() {
        return Err(domain("negative step count"));
    }
    q.ceil()
        .to_integer()
        .to_u128()
        .ok_or_else(|| Error::Overflow(format!("step count {} does not fit in 128 bits", q.ceil())))
}

/// Nearest `f64` to `q`.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `x` must be strictly positive and finite.
pub fn positive(name: &str, x: f64) -> Result<BigRational> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain(format!("{name} must be positive and finite, got {x}")));
    }
    decimal(x)
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn reads_shortest_decimal() {
        assert_eq!(decimal(10.6).unwrap(), ratio(53, 5));
        assert_eq!(decimal(1e-6).unwrap(), ratio(1, 1_000_000));
        assert_eq!(decimal(-0.25).unwrap(), ratio(-1, 4));
        assert_eq!(decimal(3e5).unwrap(), ratio(300_000, 1));
        assert_eq!(decimal(0.0).unwrap(), ratio(0, 1));
        assert!(decimal(f64::INFINITY).is_err());
    }

    #[test]
    fn decimal_sum_is_exact() {
        // 0.1 + 0.2 != 0.3 in binary
        assert_eq!(decimal_sum([0.1, 0.2]).unwrap(), decimal(0.3).unwrap());
        assert_eq!(to_f64(&decimal_sum([1.0; 7].into_iter().chain([0.5; 6]).chain([0.1; 6])).unwrap()), 10.6);
    }

    #[test]
    fn ceiling_of_exact_integers_does_not_round_up() {
        let q = ratio(1696, 10) * ratio(1696, 10) / ratio(1, 1_000_000);
        assert_eq!(ceil_count(&q).unwrap(), 28_764_160_000);
        assert_eq!(ceil_count(&ratio(1, 3)).unwrap(), 1);
        assert!(ceil_count(&ratio(-1, 3)).is_err());
    }

    #[test]
    fn float_evaluation_would_overshoot() {
        // 4·(0.1 + 0.2)/1e-3 is exactly 1200, binary arithmetic gives 1201.
        let naive = 4.0f64 * (0.1 + 0.2) / 1e-3;
        assert_eq!(naive.ceil(), 1201.0);
        let exact = BigRational::from_integer(4.into()) * decimal_sum([0.1, 0.2]).unwrap() / decimal(1e-3).unwrap();
        assert_eq!(ceil_count(&exact).unwrap(), 1200);
    }
}
