//! Exact binary floating values `mant * 2^exp` with directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::rational::Rational;

/// Rounding direction for the operations that cannot be exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward zero.
    Trunc,
    Down,
    Up,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: e,
        }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|) + 1` (0 for zero): the exponent just above the leading bit.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 4
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    /// Rounds to at most `bits` mantissa bits. Returns the rounded value and
    /// whether any bits were discarded.
    pub fn round(&self, bits: u32, mode: Round) -> (Self, bool) {
        let nb = self.mant.bits();
        if nb <= bits as u64 {
            return (self.clone(), false);
        }
        let shift = nb - bits as u64;
        let neg = self.is_negative();
        let abs = self.mant.abs();
        let q = &abs >> shift as usize;
        let inexact = (&q << shift as usize) != abs;
        let away = inexact
            && match mode {
                Round::Trunc => false,
                Round::Up => !neg,
                Round::Down => neg,
            };
        let q = if away { q + 1u32 } else { q };
        let m = if neg { -q } else { q };
        (Dyadic::new(m, self.exp + shift as i64), inexact)
    }

    /// Rounds toward zero and returns an upper bound on the discarded part.
    pub fn round_with_err(&self, bits: u32) -> (Self, Self) {
        let nb = self.mant.bits();
        if nb <= bits as u64 {
            return (self.clone(), Dyadic::zero());
        }
        let shift = (nb - bits as u64) as i64;
        let (r, inexact) = self.round(bits, Round::Trunc);
        let err = if inexact {
            Dyadic::pow2(self.exp + shift)
        } else {
            Dyadic::zero()
        };
        (r, err)
    }

    /// Upward rounding for radii and other nonnegative bounds.
    pub fn up(&self, bits: u32) -> Self {
        self.round(bits, Round::Up).0
    }

    /// `a / b` rounded as requested to `bits` significant bits.
    pub fn div(&self, other: &Self, bits: u32, mode: Round) -> Result<(Self, bool)> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok((Dyadic::zero(), false));
        }
        // quotient with at least bits + 2 bits
        let want = bits as i64 + 2;
        let have = self.mant.bits() as i64 - other.mant.bits() as i64;
        let sh = (want - have).max(0);
        let num = &self.mant << sh as usize;
        let (q, r) = num.div_rem(&other.mant);
        let inexact = !r.is_zero();
        let neg = (self.is_negative()) != (other.is_negative());
        let mut qa = q.abs();
        // sticky bit keeps directed rounding correct after the final round
        qa <<= 1usize;
        if inexact {
            qa += 1u32;
        }
        let m = if neg { -qa } else { qa };
        let d = Dyadic::new(m, self.exp - other.exp - sh - 1);
        let (out, lost) = d.round(bits, mode);
        Ok((out, inexact || lost))
    }

    /// Square root of a nonnegative value rounded down or up to `bits` bits.
    pub fn sqrt(&self, bits: u32, up: bool) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::domain("sqrt", "negative argument"));
        }
        if self.is_zero() {
            return Ok(Dyadic::zero());
        }
        let want = 2 * (bits as i64 + 2);
        let mut sh = (want - self.mant.bits() as i64).max(0);
        if (self.exp - sh).rem_euclid(2) != 0 {
            sh += 1;
        }
        let m = &self.mant << sh as usize;
        let r = m.sqrt();
        let exact = &r * &r == m;
        let r = if up && !exact { r + 1u32 } else { r };
        let d = Dyadic::new(r, (self.exp - sh) / 2);
        let mode = if up { Round::Up } else { Round::Down };
        Ok(d.round(bits, mode).0)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Rounds a rational to `bits` bits in the given direction.
    pub fn from_rational(r: &Rational, bits: u32, mode: Round) -> (Self, bool) {
        let n = Dyadic::new(r.numer().clone(), 0);
        let d = Dyadic::new(r.denom().clone(), 0);
        n.div(&d, bits, mode).expect("denominator is positive")
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (r, _) = self.round(60, Round::Trunc);
        let m = r.mant.to_f64().unwrap_or(0.0);
        let e = r.exp;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Hex-float text, e.g. `0x3p-2` for 0.75 or `-0x1p+0`.
    pub fn to_hex(&self) -> String {
        let sign = if self.is_negative() { "-" } else { "" };
        let e = self.exp;
        let esign = if e < 0 { "-" } else { "+" };
        format!("{sign}0x{:x}p{esign}{}", self.mant.abs(), e.abs())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a hex float: {s:?}"));
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let rest = rest
            .strip_prefix("0x")
            .or_else(|| rest.strip_prefix("0X"))
            .ok_or_else(bad)?;
        let (m, e) = rest.split_once(['p', 'P']).ok_or_else(bad)?;
        let (int_part, frac_part) = m.split_once('.').unwrap_or((m, ""));
        let digits = format!("{int_part}{frac_part}");
        if digits.is_empty() {
            return Err(bad());
        }
        let mant = BigInt::parse_bytes(digits.as_bytes(), 16).ok_or_else(bad)?;
        let exp: i64 = e.parse().map_err(|_| bad())?;
        let exp = exp - 4 * frac_part.len() as i64;
        let mant = if neg { -mant } else { mant };
        Ok(Dyadic::new(mant, exp))
    }

    /// Integer part toward negative infinity, if it fits an `i64`.
    pub fn floor_i64(&self) -> Option<i64> {
        if self.exp >= 0 {
            (&self.mant << self.exp as usize).to_i64()
        } else {
            let d = BigInt::one() << (-self.exp) as usize;
            self.mant.div_floor(&d).to_i64()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        // same nonzero sign; compare magnitudes quickly first
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            let c = ma.cmp(&mb);
            return if sa > 0 { c } else { c.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}
