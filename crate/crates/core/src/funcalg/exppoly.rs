use std::fmt;

use num_traits::Zero;

use crate::funcalg::poly::Poly;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numeric::{rational, Ball, Rational};

/// One summand `poly(t) * e^(rate * t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub rate: Rational,
    pub poly: Poly,
}

/// Exponential polynomial `sum_i p_i(t) e^(a_i t)` on `[0, 1]`.
///
/// Rates are distinct and sorted ascending and no term carries the zero
/// polynomial, so structural equality is equality of functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

impl ExpPoly {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut ts: Vec<Term> = terms.into_iter().collect();
        ts.sort_by(|a, b| a.rate.cmp(&b.rate));
        let mut out: Vec<Term> = Vec::with_capacity(ts.len());
        for t in ts {
            match out.last_mut() {
                Some(last) if last.rate == t.rate => last.poly = last.poly.add(&t.poly),
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.poly.is_zero());
        ExpPoly { terms: out }
    }

    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        ExpPoly::from(Poly::one())
    }

    /// `poly(t) e^(rate t)`.
    pub fn term(rate: Rational, poly: Poly) -> Self {
        ExpPoly::new([Term { rate, poly }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rate-0 (plain polynomial) part.
    pub fn rate0(&self) -> Poly {
        self.terms
            .iter()
            .find(|t| t.rate.is_zero())
            .map(|t| t.poly.clone())
            .unwrap_or_default()
    }

    pub fn is_poly(&self) -> bool {
        self.terms.iter().all(|t| t.rate.is_zero())
    }

    pub fn as_poly(&self) -> Option<Poly> {
        self.is_poly().then(|| self.rate0())
    }

    /// Largest polynomial degree over all terms.
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.poly.degree()).max()
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        ExpPoly::new(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    rate: t.rate.clone(),
                    poly: t.poly.neg(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> ExpPoly {
        ExpPoly::new(self.terms.iter().map(|t| Term {
            rate: t.rate.clone(),
            poly: t.poly.scale(s),
        }))
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term {
                    rate: &a.rate + &b.rate,
                    poly: a.poly.mul(&b.poly),
                });
            }
        }
        ExpPoly::new(out)
    }

    /// `d/dt [p e^(at)] = (p' + a p) e^(at)`.
    pub fn differentiate(&self) -> ExpPoly {
        ExpPoly::new(self.terms.iter().map(|t| Term {
            rate: t.rate.clone(),
            poly: t.poly.derivative().add(&t.poly.scale(&t.rate)),
        }))
    }

    /// Adds `delta` to every rate, i.e. multiplies by `e^(delta t)`.
    pub fn shift_rates(&self, delta: &Rational) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    rate: &t.rate + delta,
                    poly: t.poly.clone(),
                })
                .collect(),
        }
    }

    pub fn eval_ball(&self, t: &Ball) -> Ball {
        let prec = t.prec();
        self.terms.iter().fold(Ball::zero(prec), |acc, term| {
            let p = term.poly.eval_ball(t);
            let v = if term.rate.is_zero() {
                p
            } else {
                p.mul(&t.mul_rational(&term.rate).exp())
            };
            acc.add(&v)
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    rate: String,
    coeffs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ExpPolyJson {
    terms: Vec<TermJson>,
}

impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExpPolyJson {
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    rate: rational::to_string(&t.rate),
                    coeffs: t.poly.coeffs().iter().map(rational::to_string).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ExpPolyJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let rate = rational::parse(&t.rate).map_err(serde::de::Error::custom)?;
            let coeffs = t
                .coeffs
                .iter()
                .map(|c| rational::parse(c))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(serde::de::Error::custom)?;
            terms.push(Term {
                rate,
                poly: Poly::new(coeffs),
            });
        }
        Ok(ExpPoly::new(terms))
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExpPoly::from(self.clone()).serialize(s)
    }
}

impl From<Poly> for ExpPoly {
    fn from(p: Poly) -> Self {
        ExpPoly::term(Rational::zero(), p)
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.rate.is_zero() {
                write!(f, "[{}]", t.poly)?;
            } else {
                write!(f, "[{}]e^({}t)", t.poly, t.rate)?;
            }
        }
        Ok(())
    }
}
