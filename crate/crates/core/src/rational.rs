//! Exact rational helpers on top of [`num_rational::BigRational`].
//!
//! Text form is `"n/d"` in lowest terms with a positive denominator; a bare
//! integer `"n"` is accepted on input.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    ratio(1, 2)
}

/// `2^-k` as an exact rational.
pub fn dyadic(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn in_unit(x: &Rational) -> bool {
    !x.is_negative() && x <= &one()
}

/// Parses `"n/d"` (lowest terms, `d > 0`) or `"n"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.sign() != Sign::Plus {
                return Err(Error::Parse(format!("denominator must be positive in {s:?}")));
            }
            if !n.gcd(&d).is_one() {
                return Err(Error::Parse(format!("{s:?} is not in lowest terms")));
            }
            Ok(Rational::new_raw(n, d))
        }
    }
}

/// Canonical file form, always with an explicit denominator.
pub fn format(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Short display form: integers print without a denominator.
pub fn display(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format(x)
    }
}

/// Number of bits needed for numerator plus denominator.
pub fn bit_size(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Exact `2^k`-th root of a non-negative rational, if it is rational.
pub fn root_pow2(x: &Rational, k: u32) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    for _ in 0..k {
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &rn * &rn != n || &rd * &rd != d {
            return None;
        }
        n = rn;
        d = rd;
    }
    Some(Rational::new(n, d))
}

/// Exact `x^(2^k)` by repeated squaring.
pub fn pow_pow2(x: &Rational, k: u32) -> Rational {
    let mut acc = x.clone();
    for _ in 0..k {
        acc = &acc * &acc;
    }
    acc
}

pub fn min<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("-1/2").unwrap(), ratio(-1, 2));
        assert_eq!(parse("1").unwrap(), one());
        assert_eq!(format(&one()), "1/1");
        assert_eq!(display(&one()), "1");
        assert_eq!(display(&ratio(2, 6)), "1/3");
        assert!(parse("2/4").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("1/-2").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn pow2_roots() {
        assert_eq!(pow_pow2(&half(), 2), ratio(1, 16));
        assert_eq!(pow_pow2(&half(), 4), ratio(1, 65536));
        assert_eq!(root_pow2(&ratio(1, 16), 2), Some(half()));
        assert_eq!(root_pow2(&half(), 1), None);
        assert_eq!(dyadic(3), ratio(1, 8));
    }
}
