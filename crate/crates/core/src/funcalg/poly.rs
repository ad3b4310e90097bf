use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numeric::{Ball, Rational};

/// Polynomial with exact rational coefficients, lowest degree first.
///
/// Trailing zero coefficients are always stripped, so the zero polynomial is
/// the empty coefficient list and `degree = len - 1` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// The identity function `t`.
    pub fn t() -> Self {
        Poly::monomial(1, Rational::one())
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(
            cs.iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `t^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.len().max(other.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let c = match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            v.push(c);
        }
        Poly::new(v)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Poly::new(v)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0: `t^k -> t^(k+1) / (k+1)`.
    pub fn integrate(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(Rational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            v.push(c / Rational::from_integer(BigInt::from(k + 1)));
        }
        Poly::new(v)
    }

    /// `int_0^1 p(t) dt`.
    pub fn integral_01(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / Rational::from_integer(BigInt::from(k + 1)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_ball(&self, t: &Ball) -> Ball {
        let prec = t.prec();
        self.coeffs.iter().rev().fold(Ball::zero(prec), |acc, c| {
            acc.mul(t).add(&Ball::from_rational(c, prec))
        })
    }

    /// `t -> p(c t)`.
    pub fn scale_arg(&self, c: &Rational) -> Poly {
        let mut pow = Rational::one();
        let mut v = Vec::with_capacity(self.len());
        for a in &self.coeffs {
            v.push(a * &pow);
            pow *= c;
        }
        Poly::new(v)
    }

    /// `t -> p(1 - t)`.
    pub fn reflect(&self) -> Poly {
        // Horner in the variable (1 - t)
        let one_minus_t = Poly::from_i64s(&[1, -1]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            acc.mul(&one_minus_t).add(&Poly::constant(c.clone()))
        })
    }

    /// Integer coefficients and a common positive denominator.
    pub fn common_denominator(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }

    /// Sum of absolute values of the coefficients.
    pub fn abs_coeff_sum(&self) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |a, c| a + c.abs())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, ratio};

    #[test]
    fn arithmetic_basics() {
        let one = Poly::one();
        assert!(one.add(&one.neg()).is_zero());
        assert_eq!(Poly::t().mul(&Poly::t()), Poly::monomial(2, rat(1)));
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::from_i64s(&[1, 2, 0, 0]).degree(), Some(1));
    }

    #[test]
    fn calculus() {
        let p = Poly::from_i64s(&[1, 2, 3]);
        assert_eq!(p.derivative(), Poly::from_i64s(&[2, 6]));
        assert_eq!(p.integrate().derivative(), p);
        assert_eq!(p.integrate().eval(&rat(0)), rat(0));
        assert_eq!(p.integral_01(), rat(3));
        assert_eq!(Poly::monomial(2, rat(1)).integral_01(), ratio(1, 3));
    }

    #[test]
    fn reflect_and_scale() {
        let p = Poly::from_i64s(&[0, 0, 1]);
        assert_eq!(p.reflect(), Poly::from_i64s(&[1, -2, 1]));
        assert_eq!(p.scale_arg(&ratio(1, 2)), Poly::monomial(2, ratio(1, 4)));
        let q = Poly::new(vec![ratio(1, 2), ratio(2, 3)]);
        let (nums, den) = q.common_denominator();
        assert_eq!(den, BigInt::from(6));
        assert_eq!(nums, vec![BigInt::from(3), BigInt::from(4)]);
    }

    #[test]
    fn ball_evaluation_contains_exact() {
        let p = Poly::new(vec![ratio(1, 3), ratio(-7, 5), ratio(2, 9)]);
        let t = ratio(3, 7);
        let b = p.eval_ball(&Ball::from_rational(&t, 64));
        assert!(b.contains_rational(&p.eval(&t)));
    }
}
