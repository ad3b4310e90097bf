//! Exact rational scalars.
//!
//! `Rational` is `num_rational::BigRational`, which keeps every value in
//! canonical form (positive denominator, reduced by the gcd). The helpers
//! here add the checked operations and the string formats used at the
//! boundary of the crate.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Integer `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` as a rational. Panics on `den == 0`; use [`checked_div`] for data.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

pub fn checked_recip(a: &Rational) -> Result<Rational> {
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a.recip())
}

/// `a^k` for any integer `k`; negative powers of zero are an error.
pub fn pow(a: &Rational, k: i64) -> Result<Rational> {
    if k >= 0 {
        Ok(num_traits::pow(a.clone(), k as usize))
    } else {
        let inv = checked_recip(a)?;
        Ok(num_traits::pow(inv, k.unsigned_abs() as usize))
    }
}

/// Exact `n!`.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= k;
    }
    BigInt::from(acc)
}

/// Exact binomial coefficient, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Serializes as `"num/den"`; the denominator is always written.
pub fn to_string(a: &Rational) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

/// Parses `"p"`, `"p/q"`, or a terminating decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || fp.is_empty() {
            return Err(bad());
        }
        let whole = if ip_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(ip_digits).map_err(|_| bad())?
        };
        let frac = BigInt::from_str(fp).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let mut v = Rational::new(whole * &scale + frac, scale);
        if neg {
            v = -v;
        }
        return Ok(v);
    }
    BigInt::from_str(t)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// Floor of `log2 |a|` for nonzero `a`.
pub fn log2_floor(a: &Rational) -> Option<i64> {
    if a.is_zero() {
        return None;
    }
    let n = a.numer().abs();
    let d = a.denom();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e <= n/d < 2^(e+1) after at most one correction
    let (lhs, rhs) = if e >= 0 {
        (n.clone(), d << e as usize)
    } else {
        (n.clone() << (-e) as usize, d.clone())
    };
    if lhs < rhs {
        e -= 1;
    }
    Some(e)
}

/// Nearest `f64`, for diagnostics and plots only.
pub fn to_f64(a: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (a.numer().to_f64(), a.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let e = log2_floor(a).unwrap_or(0);
    let shift = 60 - e;
    let scaled = if shift >= 0 {
        (a.numer() << shift as usize).div_floor(a.denom())
    } else {
        a.numer().div_floor(&(a.denom() << (-shift) as usize))
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(-shift as i32)
}

pub fn max_abs<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter()
        .map(|x| x.abs())
        .fold(Rational::zero(), |m, x| if x > m { x } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_canonical_and_pow() {
        assert_eq!(ratio(1, 2) + ratio(1, 3), ratio(5, 6));
        let r = Rational::new(BigInt::from(2), BigInt::from(4));
        assert_eq!(r.numer(), &BigInt::from(1));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(pow(&ratio(1, 3), 5).unwrap(), ratio(1, 243));
        assert_eq!(pow(&ratio(2, 3), -2).unwrap(), ratio(9, 4));
        assert_eq!(pow(&rat(0), -1), Err(Error::DivisionByZero));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(checked_div(&rat(1), &rat(0)), Err(Error::DivisionByZero));
        assert_eq!(checked_div(&rat(1), &rat(4)).unwrap(), ratio(1, 4));
    }

    #[test]
    fn binomial_and_factorial() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(binomial(60, 30), BigInt::from(118264581564861424u64));
    }

    #[test]
    fn parse_formats() {
        assert_eq!(parse("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse(" -3 ").unwrap(), rat(-3));
        assert_eq!(parse("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert_eq!(to_string(&rat(3)), "3/1");
        assert_eq!(parse(&to_string(&ratio(-7, 9))).unwrap(), ratio(-7, 9));
    }

    #[test]
    fn log2_floor_values() {
        assert_eq!(log2_floor(&rat(1)), Some(0));
        assert_eq!(log2_floor(&rat(3)), Some(1));
        assert_eq!(log2_floor(&rat(4)), Some(2));
        assert_eq!(log2_floor(&ratio(1, 3)), Some(-2));
        assert_eq!(log2_floor(&ratio(-1, 4)), Some(-2));
        assert_eq!(log2_floor(&rat(0)), None);
    }
}
