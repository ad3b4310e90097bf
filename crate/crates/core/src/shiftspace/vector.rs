//! Truncated sequence-space vectors with a certified tail bound.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{rational, Ball, Dyadic, Rational, Round};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    L1,
    L2,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::L1 => "l1",
            Space::L2 => "l2",
        })
    }
}

/// A coordinate: exact, or a certified enclosure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Exact(#[serde(with = "crate::report::rational_str")] Rational),
    Approx(Ball),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(b) => b.mid().is_zero() && b.rad().is_zero(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Scalar::Exact(r) => Ball::from_rational(r, prec),
            Scalar::Approx(b) => b.clone(),
        }
    }

    fn prec_of(&self, other: &Scalar) -> u32 {
        match (self, other) {
            (Scalar::Approx(a), _) => a.prec(),
            (_, Scalar::Approx(b)) => b.prec(),
            _ => crate::numeric::DEFAULT_PRECISION,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => {
                let p = self.prec_of(other);
                Scalar::Approx(self.to_ball(p).add(&other.to_ball(p)))
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a * r),
            Scalar::Approx(b) => Scalar::Approx(b.mul_rational(r)),
        }
    }

    /// Upper bound on `|x|`.
    pub fn abs_upper(&self) -> Dyadic {
        match self {
            Scalar::Exact(r) => Dyadic::from_rational(&r.abs(), 64, Round::Up).0,
            Scalar::Approx(b) => b.abs().upper(),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Ball> for Scalar {
    fn from(b: Ball) -> Self {
        Scalar::Approx(b)
    }
}

/// `coords` holds indices `0..coords.len()`; `tail` bounds the norm of
/// everything beyond.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailedVector {
    space: Space,
    coords: Vec<Scalar>,
    tail: Ball,
}

impl TailedVector {
    pub fn new(space: Space, coords: Vec<Scalar>, tail: Ball) -> Result<Self> {
        if tail.lower().is_negative() {
            return Err(Error::Precondition(
                "tail bound must be non-negative".into(),
            ));
        }
        Ok(TailedVector {
            space,
            coords,
            tail,
        })
    }

    /// Finitely supported exact vector.
    pub fn finite(space: Space, coords: Vec<Rational>) -> Self {
        TailedVector {
            space,
            coords: coords.into_iter().map(Scalar::Exact).collect(),
            tail: Ball::zero(crate::numeric::DEFAULT_PRECISION),
        }
    }

    /// Basis vector `e_n`.
    pub fn basis(space: Space, n: usize) -> Self {
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::from_integer(1.into());
        TailedVector::finite(space, c)
    }

    /// Parses `e3`, or a comma-separated list of rationals `1,-4,1/2`.
    pub fn parse(space: Space, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(idx) = s.strip_prefix('e') {
            let n: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad basis vector {s:?}")))?;
            return Ok(TailedVector::basis(space, n));
        }
        let coords = s
            .split(',')
            .map(rational::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(TailedVector::finite(space, coords))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn tail(&self) -> &Ball {
        &self.tail
    }

    pub fn coord(&self, n: usize) -> Scalar {
        self.coords.get(n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_finite(&self) -> bool {
        self.tail.mid().is_zero() && self.tail.rad().is_zero()
    }

    /// All coordinates, if every one is exact.
    pub fn exact_coords(&self) -> Option<Vec<Rational>> {
        self.coords.iter().map(|c| c.exact().cloned()).collect()
    }

    /// Index one past the last nonzero coordinate.
    pub fn support_len(&self) -> usize {
        self.coords
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.is_finite() && self.support_len() == 0
    }

    pub(crate) fn from_parts(space: Space, coords: Vec<Scalar>, tail: Ball) -> Self {
        TailedVector {
            space,
            coords,
            tail,
        }
    }

    /// Exact norm when finitely supported with rational coordinates in `l1`.
    pub fn norm_exact(&self) -> Option<Rational> {
        if self.space != Space::L1 || !self.is_finite() {
            return None;
        }
        let c = self.exact_coords()?;
        Some(c.iter().map(|x| x.abs()).sum())
    }

    /// Exact squared norm for finitely supported rational `l2` vectors.
    pub fn norm_sq_exact(&self) -> Option<Rational> {
        if self.space != Space::L2 || !self.is_finite() {
            return None;
        }
        let c = self.exact_coords()?;
        Some(c.iter().map(|x| x * x).sum())
    }

    /// Enclosure of the full (infinite-dimensional) norm: between the norm
    /// of the coordinates and that plus the tail bound.
    pub fn norm(&self, prec: u32) -> Ball {
        if let Some(r) = self.norm_exact() {
            return Ball::from_rational(&r, prec);
        }
        let head = match self.space {
            Space::L1 => self
                .coords
                .iter()
                .fold(Ball::zero(prec), |a, c| a.add(&c.to_ball(prec).abs())),
            Space::L2 => match self.norm_sq_exact() {
                Some(r) => Ball::from_rational(&r, prec).sqrt_nonneg(),
                None => self
                    .coords
                    .iter()
                    .fold(Ball::zero(prec), |a, c| a.add(&c.to_ball(prec).sqr()))
                    .sqrt_nonneg(),
            },
        };
        if self.is_finite() {
            return head;
        }
        let lo = head.lower().max(Dyadic::zero());
        let hi = head.upper().add(&self.tail.upper());
        Ball::from_interval(&lo, &hi, prec)
    }
}

impl fmt::Display for TailedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.space)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match c {
                Scalar::Exact(r) => write!(f, "{r}")?,
                Scalar::Approx(b) => write!(f, "{b}")?,
            }
        }
        write!(f, "] + tail {}", self.tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, ratio};

    #[test]
    fn norm_examples() {
        assert_eq!(TailedVector::basis(Space::L1, 0).norm(64), Ball::one(64));
        let v = TailedVector::finite(Space::L1, vec![rat(1), rat(-1), rat(0)]);
        assert_eq!(v.norm_exact(), Some(rat(2)));
        let v = TailedVector::finite(Space::L2, vec![ratio(3, 5), ratio(4, 5)]);
        assert!(v.norm(128).contains_rational(&rat(1)));
        assert!(v.norm(128).rel_rad() < 1e-30);
    }

    #[test]
    fn tail_widens_the_enclosure() {
        let tail = Ball::from_rational(&ratio(1, 8), 64);
        let v = TailedVector::new(Space::L1, vec![Scalar::Exact(rat(1))], tail).unwrap();
        let n = v.norm(64);
        assert!(n.contains_rational(&rat(1)));
        assert!(n.contains_rational(&ratio(9, 8)));
        assert!(!n.contains_rational(&ratio(5, 4)));
    }

    #[test]
    fn parse_vectors() {
        assert_eq!(
            TailedVector::parse(Space::L1, "e2").unwrap(),
            TailedVector::basis(Space::L1, 2)
        );
        let v = TailedVector::parse(Space::L1, "1,-4").unwrap();
        assert_eq!(v.exact_coords().unwrap(), vec![rat(1), rat(-4)]);
        assert!(TailedVector::parse(Space::L1, "ex").is_err());
        assert_eq!(v.support_len(), 2);
    }

    #[test]
    fn json_shape() {
        let v = TailedVector::finite(Space::L1, vec![ratio(1, 2)]);
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["space"], "l1");
        assert_eq!(j["coords"][0], "1/2");
        assert!(j["tail"]["mid"].is_string());
    }
}
