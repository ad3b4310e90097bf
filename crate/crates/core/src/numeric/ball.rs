//! Certified real balls `[mid - rad, mid + rad]`.
//!
//! The midpoint is a dyadic rounded to the ball's precision; every rounding
//! error is added to the radius, and radii themselves are rounded upward to
//! [`RAD_BITS`] bits. Every operation therefore returns a ball that contains
//! the exact image of its input intervals.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::dyadic::{Dyadic, Round};
use crate::numeric::rational::Rational;

/// Mantissa bits kept for radii.
pub const RAD_BITS: u32 = 64;

/// Default midpoint precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Ceiling for automatic precision escalation.
pub const MAX_PRECISION: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

fn up(d: Dyadic) -> Dyadic {
    d.up(RAD_BITS)
}

impl Ball {
    /// Builds a ball, rounding `mid` to `prec` bits and folding the error into `rad`.
    pub fn new(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        let (m, err) = mid.round_with_err(prec);
        Ball {
            mid: m,
            rad: up(rad.add(&err)),
            prec,
        }
    }

    pub fn exact(mid: Dyadic, prec: u32) -> Self {
        Ball::new(mid, Dyadic::zero(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Ball::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Ball::exact(Dyadic::one(), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Ball::exact(Dyadic::from_i64(v), prec)
    }

    /// Embeds a rational; the radius is zero exactly when the value is
    /// representable with `prec` mantissa bits.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let (m, inexact) = Dyadic::from_rational(r, prec, Round::Trunc);
        let rad = if inexact {
            // truncation error is below one unit in the last place
            Dyadic::pow2(m.magnitude().max(r_magnitude(r)) - prec as i64)
        } else {
            Dyadic::zero()
        };
        Ball {
            mid: m,
            rad: up(rad),
            prec,
        }
    }

    /// Ball covering the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        let mid = lo.add(hi).half();
        let rad = hi.sub(lo).half();
        Ball::new(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Ball::new(self.mid.clone(), self.rad.clone(), prec)
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.lower() <= Dyadic::zero() && self.upper() >= Dyadic::zero()
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lower().to_rational() <= *x && *x <= self.upper().to_rational()
    }

    /// True when every point of `other` lies inside `self`.
    pub fn contains(&self, other: &Ball) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    fn prec2(&self, other: &Ball) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn neg(&self) -> Self {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Ball) -> Self {
        Ball::new(
            self.mid.add(&other.mid),
            self.rad.add(&other.rad),
            self.prec2(other),
        )
    }

    pub fn sub(&self, other: &Ball) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ball) -> Self {
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Ball::new(self.mid.mul(&other.mid), up(rad), self.prec2(other))
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        self.mul(&Ball::from_rational(r, self.prec))
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Ball {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        a.mul(&a)
    }

    pub fn div(&self, other: &Ball) -> Result<Self> {
        if other.contains_zero() {
            return Err(if other.is_exact() {
                Error::DivisionByZero
            } else {
                Error::domain("div", "divisor interval contains zero")
            });
        }
        let prec = self.prec2(other);
        let (q, inexact) = self.mid.div(&other.mid, prec, Round::Trunc)?;
        let ym = other.mid.abs();
        let denom_low = ym.sub(&other.rad);
        let ratio_up = self.mid.abs().div(&ym, RAD_BITS, Round::Up)?.0;
        let num = up(self.rad.add(&ratio_up.mul(&other.rad)));
        let mut rad = if num.is_zero() {
            Dyadic::zero()
        } else {
            num.div(&denom_low, RAD_BITS, Round::Up)?.0
        };
        if inexact {
            rad = rad.add(&Dyadic::pow2(q.magnitude() - prec as i64));
        }
        Ok(Ball::new(q, up(rad), prec))
    }

    pub fn recip(&self) -> Result<Self> {
        Ball::one(self.prec).div(self)
    }

    pub fn abs(&self) -> Self {
        let lo = self.lower();
        let hi = self.upper();
        if !lo.is_negative() {
            self.clone()
        } else if !hi.is_negative() && !hi.is_zero() {
            let m = lo.abs().max(hi);
            Ball::from_interval(&Dyadic::zero(), &m, self.prec)
        } else {
            self.neg()
        }
    }

    pub fn max(&self, other: &Ball) -> Self {
        let lo = self.lower().max(other.lower());
        let hi = self.upper().max(other.upper());
        if self.is_exact() && other.is_exact() {
            return Ball::exact(lo, self.prec2(other));
        }
        Ball::from_interval(&lo, &hi, self.prec2(other))
    }

    pub fn min(&self, other: &Ball) -> Self {
        self.neg().max(&other.neg()).neg()
    }

    /// Square root; the whole interval must be nonnegative.
    pub fn sqrt(&self) -> Result<Self> {
        if self.lower().is_negative() {
            return Err(Error::domain("sqrt", "interval reaches below zero"));
        }
        Ok(self.sqrt_nonneg())
    }

    /// Square root of a quantity known to be nonnegative; the negative part
    /// of the interval is clipped to zero.
    pub fn sqrt_nonneg(&self) -> Self {
        let lo = self.lower().max(Dyadic::zero());
        let hi = self.upper().max(Dyadic::zero());
        let bits = self.prec + 8;
        if self.is_exact() {
            let s_lo = lo.sqrt(bits, false).expect("nonnegative");
            let s_hi = lo.sqrt(bits, true).expect("nonnegative");
            if s_lo == s_hi {
                return Ball::exact(s_lo, self.prec);
            }
            return Ball::from_interval(&s_lo, &s_hi, self.prec);
        }
        let s_lo = lo.sqrt(bits, false).expect("nonnegative");
        let s_hi = hi.sqrt(bits, true).expect("nonnegative");
        Ball::from_interval(&s_lo, &s_hi, self.prec)
    }

    /// Exponential.
    pub fn exp(&self) -> Self {
        let e_mid = exp_dyadic(&self.mid, self.prec);
        if self.rad.is_zero() {
            return e_mid;
        }
        // exp(m + s) = exp(m) * exp(s), |exp(s) - 1| <= exp(r) - 1 for |s| <= r
        let delta = if self.rad < Dyadic::pow2(-1) {
            // e^r - 1 <= r e^r <= r (1 + 2r) for r <= 1/2
            up(self.rad.mul(&Dyadic::one().add(&self.rad.mul_pow2(1))))
        } else {
            let er = exp_dyadic(&self.rad, RAD_BITS + 8);
            up(er.upper().sub(&Dyadic::one()))
        };
        e_mid.mul(&Ball::new(Dyadic::one(), delta, self.prec))
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        let lo = self.lower();
        if lo.is_negative() || lo.is_zero() {
            return Err(Error::domain("ln", "interval not strictly positive"));
        }
        let l = ln_dyadic(&self.mid, self.prec);
        if self.rad.is_zero() {
            return Ok(l);
        }
        let slack = self.rad.div(&lo, RAD_BITS, Round::Up)?.0;
        Ok(l.add(&Ball::new(Dyadic::zero(), slack, self.prec)))
    }

    /// `x^k` for a nonnegative integer exponent.
    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Ball::one(self.prec);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Certified comparison: `Some` only when the intervals decide it.
    pub fn cmp_certified(&self, other: &Ball) -> Option<Ordering> {
        if self.upper() < other.lower() {
            Some(Ordering::Less)
        } else if self.lower() > other.upper() {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() && self.mid == other.mid {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn lt_certain(&self, other: &Ball) -> bool {
        self.upper() < other.lower()
    }

    pub fn le_certain(&self, other: &Ball) -> bool {
        self.upper() <= other.lower()
    }

    /// Certified `self <= r`.
    pub fn le_rational(&self, r: &Rational) -> bool {
        self.upper().to_rational() <= *r
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Radius relative to |mid| as f64, for diagnostics.
    pub fn rel_rad(&self) -> f64 {
        if self.mid.is_zero() {
            return if self.rad.is_zero() {
                0.0
            } else {
                f64::INFINITY
            };
        }
        self.rad.to_f64() / self.mid.abs().to_f64()
    }
}

fn r_magnitude(r: &Rational) -> i64 {
    if r.is_zero() {
        return 0;
    }
    crate::numeric::rational::log2_floor(r).unwrap_or(0) + 1
}

/// `exp(d)` for an exact dyadic, certified, with `prec` output bits.
fn exp_dyadic(d: &Dyadic, prec: u32) -> Ball {
    if d.is_zero() {
        return Ball::one(prec);
    }
    // reduce to |y| <= 2^-8, then square back r times
    let r = (d.magnitude() + 8).max(0);
    let wp = prec + 32 + r as u32;
    let y = Ball::exact(d.mul_pow2(-r), wp);
    let mut sum = Ball::one(wp);
    let mut term = Ball::one(wp);
    let mut k: i64 = 1;
    let target = -(wp as i64) - 4;
    loop {
        term = term.mul(&y).div(&Ball::from_i64(k, wp)).expect("k > 0");
        sum = sum.add(&term);
        // geometric tail with ratio <= 2^-8
        if term.upper().abs().magnitude() < target {
            break;
        }
        k += 1;
    }
    let tail = up(term.mid().abs().add(term.rad()).mul_pow2(1));
    let mut e = sum.add(&Ball::new(Dyadic::zero(), tail, wp));
    for _ in 0..r {
        e = e.mul(&e);
    }
    e.with_prec(prec)
}

/// `atanh(z)` for an exact ball with |z| <= 1/3.
fn atanh_small(z: &Ball, wp: u32) -> Ball {
    if z.mid().is_zero() && z.is_exact() {
        return Ball::zero(wp);
    }
    let z2 = z.mul(z);
    let mut pow = z.clone();
    let mut sum = z.clone();
    let target = -(wp as i64) - 4;
    let mut k: i64 = 1;
    loop {
        pow = pow.mul(&z2);
        let t = pow.div(&Ball::from_i64(2 * k + 1, wp)).expect("odd");
        sum = sum.add(&t);
        if pow.upper().abs().magnitude() < target {
            break;
        }
        k += 1;
    }
    // remaining terms bounded by |z|^(2k+3)/(1 - z^2) <= 2 |pow| z^2
    let tail = up(pow.mul(&z2).upper().abs().mul_pow2(1));
    sum.add(&Ball::new(Dyadic::zero(), tail, wp))
}

fn ln2(wp: u32) -> Ball {
    let third = Ball::one(wp).div(&Ball::from_i64(3, wp)).expect("3 != 0");
    atanh_small(&third, wp).mul_pow2(1)
}

/// `ln(d)` for an exact positive dyadic.
fn ln_dyadic(d: &Dyadic, prec: u32) -> Ball {
    debug_assert!(d.signum() > 0);
    if *d == Dyadic::one() {
        return Ball::zero(prec);
    }
    let wp = prec + 32;
    // d = u * 2^k with u in [2/3, 4/3]
    let mut k = d.magnitude() - 1;
    let mut u = d.mul_pow2(-k);
    if u > Dyadic::new(21.into(), -4) {
        // u in (21/16, 2): use u/2 in (0.65, 1)
        u = u.half();
        k += 1;
    }
    let ub = Ball::exact(u, wp + 8);
    let one = Ball::one(wp + 8);
    let z = ub.sub(&one).div(&ub.add(&one)).expect("u + 1 > 0");
    let mut l = atanh_small(&z, wp).mul_pow2(1);
    if k != 0 {
        l = l.add(&ln2(wp).mul(&Ball::from_i64(k, wp)));
    }
    l.with_prec(prec)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {:.3e}]", self.mid.to_f64(), self.rad.to_f64())
    }
}

/// JSON form `{"mid": "<hex float>", "rad": "<hex float>"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson {
    pub mid: String,
    pub rad: String,
}

impl From<&Ball> for BallJson {
    fn from(b: &Ball) -> Self {
        BallJson {
            mid: b.mid.to_hex(),
            rad: b.rad.to_hex(),
        }
    }
}

impl BallJson {
    pub fn to_ball(&self, prec: u32) -> Result<Ball> {
        let mid = Dyadic::from_hex(&self.mid)?;
        let rad = Dyadic::from_hex(&self.rad)?;
        if rad.is_negative() {
            return Err(Error::Parse("negative radius".into()));
        }
        Ok(Ball { mid, rad, prec })
    }
}

impl Serialize for Ball {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BallJson::from(self).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{rat, ratio};

    #[test]
    fn dyadic_embedding_is_exact() {
        let b = Ball::from_rational(&ratio(1, 2), 64);
        assert!(b.is_exact());
        assert_eq!(b.mid(), &Dyadic::pow2(-1));
        let b = Ball::from_rational(&rat(-12345), 16);
        assert!(b.is_exact());
    }

    #[test]
    fn non_dyadic_embedding_has_radius() {
        let b = Ball::from_rational(&ratio(1, 3), 8);
        assert!(!b.is_exact());
        assert!(b.contains_rational(&ratio(1, 3)));
        let b = Ball::from_rational(&ratio(-22, 7), 8);
        assert!(b.contains_rational(&ratio(-22, 7)));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let e = Ball::zero(64).exp();
        assert!(e.contains_rational(&rat(1)));
        assert!(e.is_exact());
    }

    #[test]
    fn exp_ln_known_values() {
        let e = Ball::one(128).exp();
        // e = 2.718281828459045235360287471352662497757...
        let lo = ratio(2718281828459045235, 1_000_000_000_000_000_000);
        let hi = ratio(2718281828459045236, 1_000_000_000_000_000_000);
        assert!(e.lower().to_rational() > lo && e.upper().to_rational() < hi);
        assert!(e.rad().to_f64() < 1e-35);
        let l = Ball::from_i64(2, 128).ln().unwrap();
        // ln 2 = 0.693147180559945309417232121458176568...
        let lo = ratio(693147180559945309, 1_000_000_000_000_000_000);
        let hi = ratio(693147180559945310, 1_000_000_000_000_000_000);
        assert!(l.lower().to_rational() > lo && l.upper().to_rational() < hi);
        let round = Ball::from_i64(7, 128).ln().unwrap().exp();
        assert!(round.contains_rational(&rat(7)));
        assert!(Ball::one(64).ln().unwrap().is_exact());
    }

    #[test]
    fn exp_of_negative_and_large() {
        let x = Ball::from_i64(-30, 96).exp();
        let y = Ball::from_i64(30, 96).exp();
        assert!(x.mul(&y).contains_rational(&rat(1)));
        assert!(x.rel_rad() < 1e-20);
    }

    #[test]
    fn sqrt_and_domain_errors() {
        let s = Ball::from_i64(2, 64).sqrt().unwrap();
        assert!(s.mul(&s).contains_rational(&rat(2)));
        assert!(Ball::from_i64(-1, 64).sqrt().is_err());
        assert!(Ball::zero(64).ln().is_err());
        assert_eq!(
            Ball::one(64).div(&Ball::zero(64)),
            Err(Error::DivisionByZero)
        );
        let straddle = Ball::new(Dyadic::zero(), Dyadic::one(), 64);
        assert!(Ball::one(64).div(&straddle).is_err());
        assert!(Ball::from_i64(16, 64).sqrt().unwrap().is_exact());
    }

    #[test]
    fn abs_max_min() {
        let b = Ball::new(Dyadic::from_i64(-1), Dyadic::from_i64(2), 64);
        let a = b.abs();
        assert!(a.lower() >= Dyadic::zero());
        assert!(a.contains_dyadic(&Dyadic::from_i64(3)));
        let m = Ball::from_i64(2, 64).max(&Ball::from_i64(5, 64));
        assert_eq!(m, Ball::from_i64(5, 64));
        let m = Ball::from_i64(2, 64).min(&Ball::from_i64(5, 64));
        assert_eq!(m, Ball::from_i64(2, 64));
    }

    #[test]
    fn certified_comparison() {
        let a = Ball::from_rational(&ratio(1, 3), 64);
        let b = Ball::from_rational(&ratio(1, 2), 64);
        assert_eq!(a.cmp_certified(&b), Some(Ordering::Less));
        assert_eq!(a.cmp_certified(&a), None);
        assert_eq!(b.cmp_certified(&b), Some(Ordering::Equal));
    }

    #[test]
    fn json_round_trip() {
        let b = Ball::from_rational(&ratio(1, 3), 64);
        let j = BallJson::from(&b);
        assert_eq!(j.to_ball(64).unwrap(), b);
        let s = serde_json::to_string(&Ball::from_rational(&ratio(1, 2), 64)).unwrap();
        assert_eq!(s, r#"{"mid":"0x1p-1","rad":"0x0p+0"}"#);
    }
}
