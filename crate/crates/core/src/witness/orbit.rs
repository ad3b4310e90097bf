//! Orbit norms of `(I + lambda T)^(+-n) x` on the sequence side, growth
//! exponents, and probes for the absence of decaying orbits.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::Direction;
use crate::numeric::{Ball, Rational};
use crate::report::{rational_str, Status};
use crate::shiftspace::{
    affine_power, backward_shift, inverse_affine_apply, operator_power_norm, TailedVector,
    WeightSeq,
};
use crate::witness::grid::{last_half, loglog_slope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitVerdict {
    Decays,
    Grows,
    Flat,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub weights: String,
    #[serde(with = "rational_str")]
    pub lambda: Rational,
    pub direction: Direction,
    pub vector: String,
    pub n_values: Vec<u64>,
    pub norms: Vec<Ball>,
    /// Log-log slope over the last half of the grid.
    pub fitted_exponent: Option<Ball>,
    pub verdict: OrbitVerdict,
}

impl OrbitReport {
    /// Smallest certified lower bound among the recorded norms.
    pub fn min_lower(&self) -> Option<crate::numeric::Dyadic> {
        self.norms.iter().map(Ball::lower).min()
    }
}

fn verdict(first: &Ball, last: &Ball) -> OrbitVerdict {
    match last.cmp_certified(first) {
        Some(Ordering::Less) => OrbitVerdict::Decays,
        Some(Ordering::Greater) => OrbitVerdict::Grows,
        Some(Ordering::Equal) => OrbitVerdict::Flat,
        None => OrbitVerdict::Undecided,
    }
}

/// Certified `||(I + lambda T)^(+-n) x||` over the grid.
pub fn orbit_norms(
    w: &WeightSeq,
    lambda: &Rational,
    x: &TailedVector,
    grid: &[u64],
    direction: Direction,
    prec: u32,
) -> Result<OrbitReport> {
    let mut norms = Vec::with_capacity(grid.len());
    for &n in grid {
        let y = match direction {
            Direction::Forward => affine_power(w, lambda, n, x)?,
            Direction::Inverse => inverse_affine_apply(w, lambda, n, x)?,
        };
        norms.push(y.norm(prec));
    }
    let points: Vec<(u64, Ball)> = grid.iter().copied().zip(norms.iter().cloned()).collect();
    let fitted_exponent = loglog_slope(&last_half(&points), prec);
    let verdict = match (norms.first(), norms.last()) {
        (Some(a), Some(b)) if norms.len() > 1 => verdict(a, b),
        _ => OrbitVerdict::Undecided,
    };
    Ok(OrbitReport {
        weights: w.spec().to_string(),
        lambda: lambda.clone(),
        direction,
        vector: x.to_string(),
        n_values: grid.to_vec(),
        norms,
        fitted_exponent,
        verdict,
    })
}

/// `min { k : T^k x = 0 }` for finitely supported `x`.
pub fn nilpotency_index(w: &WeightSeq, x: &TailedVector) -> Result<u64> {
    if !x.is_finite() {
        return Err(Error::Precondition(
            "nilpotency index needs a finitely supported vector".into(),
        ));
    }
    let mut y = x.clone();
    let mut k = 0;
    while !y.is_zero() {
        y = backward_shift(w, &y)?;
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisPoint {
    pub n: u64,
    /// `n ||T^n||^(1/n)`, window products over `N = 2n`.
    pub value: Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtzmonReport {
    pub k_star: u64,
    pub target_exponent: u64,
    #[serde(with = "rational_str")]
    pub tolerance: Rational,
    pub orbit: OrbitReport,
    pub hypothesis: Vec<HypothesisPoint>,
    pub status: Status,
}

/// Largest `n` at which the hypothesis diagnostic is evaluated.
pub const HYPOTHESIS_MAX_N: u64 = 1024;

/// Fits the growth exponent of `(I + T)^n x` and compares it with
/// `k* - 1`, where `k* = min { k : T^k x = 0 }`. The check passes when the
/// whole slope enclosure lies within `tol` of the target.
pub fn atzmon_check(
    w: &WeightSeq,
    x: &TailedVector,
    grid: &[u64],
    tol: &Rational,
    prec: u32,
) -> Result<AtzmonReport> {
    let k_star = nilpotency_index(w, x)?;
    let target_exponent = k_star.saturating_sub(1);
    let orbit = orbit_norms(w, &Rational::one(), x, grid, Direction::Forward, prec)?;
    let status = match &orbit.fitted_exponent {
        Some(s) => {
            let lo = Ball::from_rational(
                &(Rational::from_integer(target_exponent.into()) - tol),
                prec,
            );
            let hi = Ball::from_rational(
                &(Rational::from_integer(target_exponent.into()) + tol),
                prec,
            );
            if s.lower() >= lo.upper() && s.upper() <= hi.lower() {
                Status::Pass
            } else if s.upper() < lo.lower() || s.lower() > hi.upper() {
                Status::Fail
            } else {
                Status::Undecided
            }
        }
        None => Status::Undecided,
    };
    let mut hypothesis = Vec::new();
    for &n in grid.iter().filter(|&&n| n >= 1 && n <= HYPOTHESIS_MAX_N) {
        let pn = operator_power_norm(w, n, 2 * n)?;
        if pn.value.is_zero() {
            hypothesis.push(HypothesisPoint {
                n,
                value: Ball::zero(prec),
            });
            continue;
        }
        let v = Ball::from_rational(&pn.value, prec)
            .ln()?
            .div(&Ball::from_i64(n as i64, prec))?
            .exp()
            .mul(&Ball::from_i64(n as i64, prec));
        hypothesis.push(HypothesisPoint { n, value: v });
    }
    Ok(AtzmonReport {
        k_star,
        target_exponent,
        tolerance: tol.clone(),
        orbit,
        hypothesis,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub vector: String,
    /// Certified lower bound on `min_n ||(I + lambda T)^n x||` over the grid.
    pub min_norm_lower: Ball,
    pub argmin: u64,
    pub verdict: OrbitVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeProbeReport {
    pub weights: String,
    #[serde(with = "rational_str")]
    pub lambda: Rational,
    pub n_values: Vec<u64>,
    pub probes: Vec<ProbeResult>,
    /// No probe shows a certified decay from `n = 0` to the last grid point.
    pub none_decay: Status,
    pub exhaustive: bool,
}

/// Runs each probe's forward orbit and records the smallest certified norm.
/// Evidence only: a finite list of probes decides nothing.
pub fn kitai_negative_probe(
    w: &WeightSeq,
    lambda: &Rational,
    probes: &[TailedVector],
    grid: &[u64],
    prec: u32,
) -> Result<NegativeProbeReport> {
    let mut out = Vec::with_capacity(probes.len());
    let mut none_decay = Status::Pass;
    for x in probes {
        if !x.is_finite() {
            return Err(Error::Precondition(
                "probes must be finitely supported".into(),
            ));
        }
        let r = orbit_norms(w, lambda, x, grid, Direction::Forward, prec)?;
        let (i, lo) = r
            .norms
            .iter()
            .map(Ball::lower)
            .enumerate()
            .min_by(|a, b| a.1.cmp(&b.1))
            .ok_or_else(|| Error::Precondition("empty grid".into()))?;
        none_decay = none_decay.and(match r.verdict {
            OrbitVerdict::Decays => Status::Fail,
            OrbitVerdict::Undecided => Status::Undecided,
            _ => Status::Pass,
        });
        out.push(ProbeResult {
            vector: r.vector.clone(),
            min_norm_lower: Ball::exact(lo, prec),
            argmin: grid[i],
            verdict: r.verdict,
        });
    }
    Ok(NegativeProbeReport {
        weights: w.spec().to_string(),
        lambda: lambda.clone(),
        n_values: grid.to_vec(),
        probes: out,
        none_decay,
        exhaustive: false,
    })
}
