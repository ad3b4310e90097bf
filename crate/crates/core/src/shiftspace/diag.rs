//! Diagonal similarities, the growth condition on weights, and window
//! products.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{factorial, Ball, Rational};
use crate::report::rational_str;
use crate::shiftspace::ops::backward_shift;
use crate::shiftspace::vector::{Space, TailedVector};
use crate::shiftspace::weights::{WeightKind, WeightSeq};

/// `D e_n = d_n e_n` on a computed prefix `0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalMap {
    pub tag: String,
    #[serde(serialize_with = "ser_rationals")]
    pub d: Vec<Rational>,
    /// `sup_(n <= N) |d_n|`.
    #[serde(with = "rational_str")]
    pub sup: Rational,
    /// Every queried `|d_n|` equals 1.
    pub isometric: bool,
    /// The defining intertwining identity held exactly on `e_0 ..= e_N`.
    pub verified: bool,
}

pub(crate) fn ser_rationals<S: serde::Serializer>(
    v: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&crate::numeric::rational::to_string(r))?;
    }
    seq.end()
}

impl DiagonalMap {
    fn from_d(tag: String, d: Vec<Rational>, verified: bool) -> Self {
        let sup = d
            .iter()
            .map(|x| x.abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        let isometric = d.iter().all(|x| x.abs().is_one());
        DiagonalMap {
            tag,
            d,
            sup,
            isometric,
            verified,
        }
    }

    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.d.get(n)
    }

    pub fn apply(&self, x: &TailedVector) -> Result<TailedVector> {
        let c = x
            .exact_coords()
            .ok_or_else(|| Error::Unsupported("diagonal maps act on exact vectors".into()))?;
        if c.len() > self.d.len() || !x.is_finite() {
            return Err(Error::Precondition(
                "vector exceeds the computed diagonal prefix".into(),
            ));
        }
        Ok(TailedVector::finite(
            x.space(),
            c.iter().zip(&self.d).map(|(a, b)| a * b).collect(),
        ))
    }
}

/// `d_0 = 1`, `d_n = prod_(j <= n) w_j / u_j`, with `T_u = D^-1 T_w D`
/// checked exactly on `e_0 ..= e_N`.
pub fn diag_similarity(w: &WeightSeq, u: &WeightSeq, n_max: usize) -> Result<DiagonalMap> {
    let mut d = vec![Rational::one()];
    for j in 1..=n_max as u64 {
        let ratio = w.weight(j)? / u.weight(j)?;
        let next = d.last().expect("non-empty") * ratio;
        d.push(next);
    }
    let dm = DiagonalMap::from_d(format!("diag({w}/{u})"), d, false);
    let mut ok = true;
    for n in 0..=n_max {
        let e = TailedVector::basis(Space::L1, n);
        let lhs = backward_shift(u, &e)?;
        let twd = backward_shift(w, &dm.apply(&e)?)?;
        // D^-1 on the (at most one) nonzero coordinate
        let rhs: Vec<Rational> = twd
            .exact_coords()
            .expect("exact")
            .iter()
            .enumerate()
            .map(|(i, c)| c / &dm.d[i])
            .collect();
        ok &= lhs.exact_coords().expect("exact") == rhs;
    }
    Ok(DiagonalMap { verified: ok, ..dm })
}

/// `d_0 = 1`, `d_n = d_(n-1) c / (n w_n)`, the unique choice with
/// `T J = c J S` for `J e'_n = d_n e_n` and the harmonic backward shift
/// `S e'_n = e'_(n-1) / n`. The identity is checked exactly on
/// `e'_0 ..= e'_N`.
pub fn thm2_diag(w: &WeightSeq, c: &Rational, n_max: usize) -> Result<DiagonalMap> {
    if !c.is_positive() {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    let mut d = vec![Rational::one()];
    for n in 1..=n_max as u64 {
        let next =
            d.last().expect("non-empty") * c / (Rational::from_integer(n.into()) * w.weight(n)?);
        d.push(next);
    }
    let dm = DiagonalMap::from_d(format!("thm2({w}, c={c})"), d, false);
    let harmonic = WeightSeq::harmonic();
    let mut ok = true;
    for n in 0..=n_max {
        let e = TailedVector::basis(Space::L1, n);
        let lhs = backward_shift(w, &dm.apply(&e)?)?;
        let se = backward_shift(&harmonic, &e)?;
        let rhs = dm.apply(&se)?;
        let rhs: Vec<Rational> = rhs
            .exact_coords()
            .expect("exact")
            .iter()
            .map(|x| x * c)
            .collect();
        ok &= lhs.exact_coords().expect("exact") == rhs;
    }
    Ok(DiagonalMap { verified: ok, ..dm })
}

/// Non-rigorous reading of `liminf c_n > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightThresholds {
    /// Satisfied when the last-quartile minimum exceeds this.
    #[serde(with = "rational_str")]
    pub satisfied_above: Rational,
    /// Violated when the last quartile is decreasing and ends below this.
    #[serde(with = "rational_str")]
    pub violated_below: Rational,
}

impl Default for WeightThresholds {
    fn default() -> Self {
        WeightThresholds {
            satisfied_above: Rational::new(1.into(), 100.into()),
            violated_below: Rational::new(1.into(), 100.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightConditionReport {
    pub weights: String,
    pub n: usize,
    /// `c_n = (n! prod_(j<=n) |w_j|)^(1/n)`, `n = 1..=N`.
    pub c: Vec<Ball>,
    /// Indices where `c_n` is exactly 1.
    pub exact_ones: usize,
    pub running_min: Vec<Ball>,
    pub thresholds: WeightThresholds,
    pub verdict: WeightVerdict,
    pub rigorous: bool,
}

/// The sequence `c_n = (n! prod |w_j|)^(1/n)` and a heuristic verdict on
/// its liminf, from the last quartile of `1..=N`.
pub fn weight_condition_check(
    w: &WeightSeq,
    n_max: usize,
    thresholds: &WeightThresholds,
    prec: u32,
) -> Result<WeightConditionReport> {
    if n_max < 1 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    let mut prod = Rational::one();
    let mut c = Vec::with_capacity(n_max);
    let mut exact_ones = 0;
    for n in 1..=n_max {
        prod = prod * Rational::from_integer(BigInt::from(n)) * w.weight(n as u64)?.abs();
        if prod.is_one() {
            exact_ones += 1;
            c.push(Ball::one(prec));
        } else {
            let ln = Ball::from_rational(&prod, prec).ln()?;
            c.push(
                ln.mul_rational(&Rational::new(BigInt::one(), BigInt::from(n)))
                    .exp(),
            );
        }
    }
    let mut running_min: Vec<Ball> = Vec::with_capacity(n_max);
    for b in &c {
        let m = match running_min.last() {
            Some(prev) => prev.min(b),
            None => b.clone(),
        };
        running_min.push(m);
    }
    let start = n_max - n_max.div_ceil(4);
    let quartile = &c[start..];
    let qmin = quartile
        .iter()
        .skip(1)
        .fold(quartile[0].clone(), |a, b| a.min(b));
    let sat = Ball::from_rational(&thresholds.satisfied_above, prec);
    let vio = Ball::from_rational(&thresholds.violated_below, prec);
    let decreasing = quartile.windows(2).all(|p| p[1].lt_certain(&p[0]));
    // a tail still falling toward the line is not evidence of a positive liminf
    let verdict = if sat.lt_certain(&qmin) && !(decreasing && quartile.len() > 1) {
        WeightVerdict::Satisfied
    } else if decreasing
        && quartile.len() > 1
        && quartile.last().expect("non-empty").lt_certain(&vio)
    {
        WeightVerdict::Violated
    } else {
        WeightVerdict::Inconclusive
    };
    Ok(WeightConditionReport {
        weights: w.spec().to_string(),
        n: n_max,
        c,
        exact_ones,
        running_min,
        thresholds: thresholds.clone(),
        verdict,
        rigorous: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerNorm {
    pub k: u64,
    /// Largest window product seen on `[k, N]`; a lower bound for `||T^k||`.
    #[serde(with = "rational_str")]
    pub value: Rational,
    pub argmax: u64,
    /// Exact `||T^k||` where known in closed form.
    #[serde(serialize_with = "ser_opt_rational")]
    pub closed_form: Option<Rational>,
}

fn ser_opt_rational<S: serde::Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&crate::numeric::rational::to_string(r)),
        None => s.serialize_none(),
    }
}

/// `max_(k <= n <= N) prod_(j = n-k+1..=n) |w_j|`.
pub fn operator_power_norm(w: &WeightSeq, k: u64, n_max: u64) -> Result<PowerNorm> {
    if k < 1 || n_max < k {
        return Err(Error::Precondition(format!(
            "need 1 <= k <= N, got k={k}, N={n_max}"
        )));
    }
    let ws = w.prefix(n_max)?;
    let abs: Vec<Rational> = ws.iter().map(|x| x.abs()).collect();
    let mut window: Rational = abs[..k as usize].iter().product();
    let mut best = window.clone();
    let mut argmax = k;
    // |w_n| nonincreasing: the first window is the largest
    let monotone = matches!(
        w.kind(),
        WeightKind::Harmonic
            | WeightKind::Power(_)
            | WeightKind::Geometric(_)
            | WeightKind::Const(_)
    );
    if !monotone {
        for n in (k + 1)..=n_max {
            window = window * &abs[n as usize - 1] / &abs[(n - k) as usize - 1];
            if window > best {
                best = window.clone();
                argmax = n;
            }
        }
    }
    let closed_form = match w.kind() {
        WeightKind::Harmonic => Some(Rational::new(BigInt::one(), factorial(k))),
        WeightKind::Power(a) => Some(Rational::new(
            BigInt::one(),
            num_traits::pow(factorial(k), *a as usize),
        )),
        _ => None,
    };
    Ok(PowerNorm {
        k,
        value: best,
        argmax,
        closed_form,
    })
}
