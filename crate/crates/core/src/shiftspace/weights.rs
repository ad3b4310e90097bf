//! Rule-based weight sequences `w_1, w_2, ...` with a declared bound.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{rational, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `w_n = 1/n`.
    Harmonic,
    /// `w_n = n^-alpha`, integer `alpha >= 1`.
    Power(u32),
    /// `w_n = r^n`, `0 < |r| <= 1`.
    Geometric(Rational),
    /// `w_n = v`.
    Const(Rational),
    /// Explicit `w_1 .. w_m`, then `default` for larger indices.
    Table {
        values: Vec<Rational>,
        default: Box<WeightKind>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSeq {
    kind: WeightKind,
    bound: Rational,
    spec: String,
}

impl WeightKind {
    fn raw(&self, n: u64) -> Rational {
        match self {
            WeightKind::Harmonic => Rational::new(BigInt::one(), BigInt::from(n)),
            WeightKind::Power(a) => {
                Rational::new(BigInt::one(), num_traits::pow(BigInt::from(n), *a as usize))
            }
            WeightKind::Geometric(r) => num_traits::pow(r.clone(), n as usize),
            WeightKind::Const(v) => v.clone(),
            WeightKind::Table { values, default } => match values.get(n as usize - 1) {
                Some(v) => v.clone(),
                None => default.raw(n),
            },
        }
    }

    fn bound(&self) -> Rational {
        match self {
            WeightKind::Harmonic | WeightKind::Power(_) => Rational::one(),
            WeightKind::Geometric(r) => r.abs(),
            WeightKind::Const(v) => v.abs(),
            WeightKind::Table { values, default } => values
                .iter()
                .map(|v| v.abs())
                .fold(default.bound(), |a, b| if b > a { b } else { a }),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            WeightKind::Power(0) => Err(Error::Weight("power exponent must be >= 1".into())),
            WeightKind::Geometric(r) if r.is_zero() || r.abs() > Rational::one() => {
                Err(Error::Weight(format!(
                    "geometric ratio must satisfy 0 < |r| <= 1, got {r}"
                )))
            }
            WeightKind::Const(v) if v.is_zero() => {
                Err(Error::Weight("constant weight must be nonzero".into()))
            }
            WeightKind::Table { values, default } => {
                if let Some(i) = values.iter().position(|v| v.is_zero()) {
                    return Err(Error::Weight(format!("table weight w_{} is zero", i + 1)));
                }
                default.validate()
            }
            _ => Ok(()),
        }
    }
}

impl WeightSeq {
    pub fn new(kind: WeightKind) -> Result<Self> {
        kind.validate()?;
        let bound = kind.bound();
        let spec = describe(&kind);
        Ok(WeightSeq { kind, bound, spec })
    }

    /// Overrides the declared bound; queries above it become errors.
    pub fn with_bound(mut self, bound: Rational) -> Self {
        self.bound = bound;
        self
    }

    pub fn harmonic() -> Self {
        WeightSeq::new(WeightKind::Harmonic).expect("valid")
    }

    pub fn power(alpha: u32) -> Result<Self> {
        WeightSeq::new(WeightKind::Power(alpha))
    }

    pub fn geometric(r: Rational) -> Result<Self> {
        WeightSeq::new(WeightKind::Geometric(r))
    }

    pub fn constant(v: Rational) -> Result<Self> {
        WeightSeq::new(WeightKind::Const(v))
    }

    pub fn table(values: Vec<Rational>, default: WeightKind) -> Result<Self> {
        WeightSeq::new(WeightKind::Table {
            values,
            default: Box::new(default),
        })
    }

    /// Parses `harmonic`, `power:2`, `geometric:1/2`, `const:1` or
    /// `table:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s, None),
        };
        let mut w = match head {
            "harmonic" if arg.is_none() => WeightSeq::harmonic(),
            "power" => {
                let a = rational::parse(need(s, arg)?)?;
                if !a.is_integer() || !a.is_positive() {
                    return Err(Error::Unsupported(format!(
                        "power weights need a positive integer exponent, got {a}"
                    )));
                }
                let a = a
                    .to_integer()
                    .to_u32()
                    .ok_or_else(|| Error::Parse("exponent too large".into()))?;
                WeightSeq::power(a)?
            }
            "geometric" => WeightSeq::geometric(rational::parse(need(s, arg)?)?)?,
            "const" => WeightSeq::constant(rational::parse(need(s, arg)?)?)?,
            "table" => WeightSeq::from_csv(Path::new(need(s, arg)?))?,
            _ => return Err(Error::Parse(format!("unknown weight spec {s:?}"))),
        };
        w.spec = s.to_string();
        Ok(w)
    }

    /// Reads `index,value` rows (indices `1..=m`, in order). An optional
    /// `default,<spec>` row sets the rule past the table; otherwise the
    /// default is harmonic.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut values = Vec::new();
        let mut default = WeightKind::Harmonic;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("index") {
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("line {}: expected index,value", lineno + 1))
            })?;
            if a.trim() == "default" {
                default = WeightSeq::parse(b)?.kind;
                continue;
            }
            let idx: usize = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad index {a:?}", lineno + 1)))?;
            if idx != values.len() + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected index {}, got {idx}",
                    lineno + 1,
                    values.len() + 1
                )));
            }
            values.push(rational::parse(b)?);
        }
        let mut w = WeightSeq::table(values, default)?;
        w.spec = format!("table:{}", path.display());
        Ok(w)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// `w_n`, `n >= 1`. Checks nonvanishing and the declared bound.
    pub fn weight(&self, n: u64) -> Result<Rational> {
        if n == 0 {
            return Err(Error::Domain {
                op: "weight",
                detail: "weights are indexed from 1".into(),
            });
        }
        let w = self.kind.raw(n);
        if w.is_zero() {
            return Err(Error::Weight(format!("w_{n} = 0")));
        }
        if w.abs() > self.bound {
            return Err(Error::Weight(format!(
                "w_{n} = {w} exceeds the declared bound {}",
                self.bound
            )));
        }
        Ok(w)
    }

    /// `w_1 ..= w_n`.
    pub fn prefix(&self, n: u64) -> Result<Vec<Rational>> {
        (1..=n).map(|k| self.weight(k)).collect()
    }

    /// Certified `sum_(j > n) w_j^2`, when a closed-form bound exists.
    pub fn l2_tail_bound(&self, n: u64) -> Option<Rational> {
        let n_big = BigInt::from(n.max(1));
        match &self.kind {
            // sum_(j>n) 1/j^2 <= 1/n
            WeightKind::Harmonic => Some(Rational::new(BigInt::one(), n_big)),
            // sum_(j>n) j^(-2a) <= int_n^inf x^(-2a) = 1 / ((2a-1) n^(2a-1))
            WeightKind::Power(a) => {
                let e = 2 * *a as usize - 1;
                Some(Rational::new(
                    BigInt::one(),
                    BigInt::from(e) * num_traits::pow(n_big, e),
                ))
            }
            WeightKind::Geometric(r) if r.abs() < Rational::one() => {
                let r2 = r * r;
                Some(num_traits::pow(r2.clone(), n as usize + 1) / (Rational::one() - r2))
            }
            WeightKind::Table { values, default } if (n as usize) >= values.len() => {
                WeightSeq::new((**default).clone()).ok()?.l2_tail_bound(n)
            }
            _ => None,
        }
    }
}

fn need<'a>(spec: &str, arg: Option<&'a str>) -> Result<&'a str> {
    arg.ok_or_else(|| Error::Parse(format!("weight spec {spec:?} needs an argument")))
}

fn describe(kind: &WeightKind) -> String {
    match kind {
        WeightKind::Harmonic => "harmonic".into(),
        WeightKind::Power(a) => format!("power:{a}"),
        WeightKind::Geometric(r) => format!("geometric:{r}"),
        WeightKind::Const(v) => format!("const:{v}"),
        WeightKind::Table { values, default } => {
            format!("table[{}]+{}", values.len(), describe(default))
        }
    }
}

impl fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, ratio};

    #[test]
    fn parse_kinds() {
        assert_eq!(
            WeightSeq::parse("harmonic").unwrap().weight(4).unwrap(),
            ratio(1, 4)
        );
        assert_eq!(
            WeightSeq::parse("power:2").unwrap().weight(3).unwrap(),
            ratio(1, 9)
        );
        assert_eq!(
            WeightSeq::parse("geometric:1/2")
                .unwrap()
                .weight(3)
                .unwrap(),
            ratio(1, 8)
        );
        assert_eq!(
            WeightSeq::parse("const:1").unwrap().weight(10).unwrap(),
            rat(1)
        );
        for bad in [
            "bogus",
            "power:1/2",
            "const:0",
            "geometric:2",
            "power",
            "harmonic:3",
        ] {
            assert!(WeightSeq::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(WeightSeq::parse(" power:2 ").unwrap().spec(), "power:2");
    }

    #[test]
    fn bound_is_enforced_lazily() {
        let w = WeightSeq::harmonic().with_bound(ratio(1, 3));
        assert!(w.weight(2).is_err());
        assert!(w.weight(3).is_ok());
        assert!(WeightSeq::harmonic().weight(0).is_err());
    }

    #[test]
    fn table_from_csv() {
        let dir = std::env::temp_dir().join(format!("kitai-w-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("w.csv");
        std::fs::write(&p, "index,value\n1,1/2\n2,-3/4\ndefault,power:2\n").unwrap();
        let w = WeightSeq::parse(&format!("table:{}", p.display())).unwrap();
        assert_eq!(w.weight(2).unwrap(), ratio(-3, 4));
        assert_eq!(w.weight(3).unwrap(), ratio(1, 9));
        assert_eq!(w.bound(), &rat(1));
        std::fs::write(&p, "1,1\n3,1\n").unwrap();
        assert!(WeightSeq::from_csv(&p).is_err());
        std::fs::write(&p, "1,0\n").unwrap();
        assert!(WeightSeq::from_csv(&p).is_err());
    }

    #[test]
    fn tail_bounds_dominate_partial_sums() {
        for w in [
            WeightSeq::harmonic(),
            WeightSeq::power(2).unwrap(),
            WeightSeq::geometric(ratio(1, 2)).unwrap(),
        ] {
            for n in [1u64, 5, 20] {
                let bound = w.l2_tail_bound(n).unwrap();
                let partial: Rational = (n + 1..n + 400)
                    .map(|j| {
                        let x = w.weight(j).unwrap();
                        &x * &x
                    })
                    .sum();
                assert!(partial <= bound, "{w} n={n}");
            }
        }
        assert!(WeightSeq::constant(rat(1))
            .unwrap()
            .l2_tail_bound(3)
            .is_none());
    }
}
