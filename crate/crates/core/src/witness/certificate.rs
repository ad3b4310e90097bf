//! Orbit-decay certificates for `I - 2cT` and `(I + 2cT)^-1` on `J*` images,
//! obtained from the function side, and the two-route cross-check.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::{
    inv_power_i_plus_cv, l2_norm_sq, l2_norm_sq_ball, power_affine_volterra, Direction, ExpPoly,
    L2Sq, Poly, Sign,
};
use crate::numeric::{escalate, Ball, Dyadic, Rational};
use crate::report::{rational_str, Status};
use crate::shiftspace::{affine_power, jstar, Scalar, WeightSeq};

/// `C = sum_(m >= 0) 2^-m (2m+1)^(-1/2)`, with the tail after `M` terms
/// bounded by `2^-M`.
pub fn embedding_constant(prec: u32) -> Ball {
    let m_max = prec as i64 + 8;
    let mut sum = Ball::zero(prec);
    for m in 0..m_max {
        let s = Ball::from_i64(2 * m + 1, prec).sqrt().expect("positive");
        sum = sum.add(&s.recip().expect("nonzero").mul_pow2(-m));
    }
    sum.add(&Ball::new(Dyadic::zero(), Dyadic::pow2(-m_max), prec))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub f: ExpPoly,
    #[serde(with = "rational_str")]
    pub lambda: Rational,
    #[serde(with = "rational_str")]
    pub c: Rational,
    pub direction: Direction,
    pub n_values: Vec<u64>,
    /// Enclosures of `||g_n||_L2`.
    pub l2_norms: Vec<Ball>,
    /// Certified upper bounds `B_n >= ||A^n J* f||_l1`.
    pub bounds: Vec<Ball>,
    pub embedding_constant: Ball,
    pub precision: u32,
    /// Strict decrease of `B_n` along the grid.
    pub decreasing: Status,
}

impl WitnessCertificate {
    pub fn bound_upper(&self, i: usize) -> Dyadic {
        self.bounds[i].upper()
    }
}

/// Certified strict decrease of a sequence of balls.
pub fn strictly_decreasing(v: &[Ball]) -> Status {
    let mut st = Status::Pass;
    for w in v.windows(2) {
        let s = match w[1].cmp_certified(&w[0]) {
            Some(Ordering::Less) => Status::Pass,
            Some(_) => Status::Fail,
            None => Status::Undecided,
        };
        st = st.and(s);
    }
    st
}

/// `B_n = C ||(I - cV)^n f||` with `c = |lambda| / 2`.
pub fn forward_witness(
    f: &ExpPoly,
    lambda: &Rational,
    grid: &[u64],
    prec: u32,
) -> Result<WitnessCertificate> {
    build(f, lambda, grid, Direction::Forward, prec)
}

/// `B_n = C ||(I + cV)^-n f||` with `c = |lambda| / 2`.
pub fn inverse_witness(
    f: &ExpPoly,
    lambda: &Rational,
    grid: &[u64],
    prec: u32,
) -> Result<WitnessCertificate> {
    build(f, lambda, grid, Direction::Inverse, prec)
}

fn build(
    f: &ExpPoly,
    lambda: &Rational,
    grid: &[u64],
    direction: Direction,
    prec: u32,
) -> Result<WitnessCertificate> {
    if lambda.is_zero() {
        return Err(Error::Precondition("lambda must be nonzero".into()));
    }
    let c = lambda.abs() / Rational::from_integer(2.into());
    let orbit: Vec<ExpPoly> = grid
        .par_iter()
        .map(|&n| match direction {
            Direction::Forward => power_affine_volterra(f, &c, n, Sign::Minus),
            Direction::Inverse => inv_power_i_plus_cv(f, &c, n),
        })
        .collect::<Result<_>>()?;
    let exact: Vec<Option<Rational>> = orbit
        .par_iter()
        .map(|g| g.as_poly().map(|p| crate::funcalg::poly_l2_sq_exact(&p)))
        .collect();
    let attempt = |p: u32| -> Result<(Vec<Ball>, Vec<Ball>, Ball)> {
        let cst = embedding_constant(p);
        let mut norms = Vec::with_capacity(orbit.len());
        for (g, ex) in orbit.iter().zip(&exact) {
            let sq = match ex {
                Some(r) => L2Sq::Exact(r.clone()),
                None => L2Sq::Certified(l2_norm_sq_ball(g, p)?),
            };
            norms.push(sq.norm(p));
        }
        let bounds = norms.iter().map(|n| cst.mul(n)).collect();
        Ok((norms, bounds, cst))
    };
    let (res, used, _) = escalate(
        prec,
        attempt,
        |r| matches!(r, Ok((_, b, _)) if strictly_decreasing(b) != Status::Undecided),
    );
    let (l2_norms, bounds, cst) = res?;
    let decreasing = strictly_decreasing(&bounds);
    Ok(WitnessCertificate {
        f: f.clone(),
        lambda: lambda.clone(),
        c,
        direction,
        n_values: grid.to_vec(),
        l2_norms,
        bounds,
        embedding_constant: cst,
        precision: used,
        decreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub f: Poly,
    #[serde(with = "rational_str")]
    pub lambda: Rational,
    pub n: u64,
    pub truncation: usize,
    pub coords_compared: usize,
    pub exact_agreement: bool,
    #[serde(with = "rational_str")]
    pub max_discrepancy: Rational,
    pub route_a_norm: Ball,
    pub route_b_norm: Ball,
    pub tails_consistent: bool,
}

/// Route A: `J*((I - cV)^n f)`. Route B: `(I - 2cT)^n` applied to `J* f`
/// truncated at `N + n`, harmonic `T`. Coordinates `0..=N` must agree
/// exactly and both norm enclosures must overlap.
pub fn cross_validate(
    f: &Poly,
    lambda: &Rational,
    n: u64,
    n_trunc: usize,
    prec: u32,
) -> Result<CrossValidation> {
    if lambda.is_zero() {
        return Err(Error::Precondition("lambda must be nonzero".into()));
    }
    let c = lambda.abs() / Rational::from_integer(2.into());
    let fe = ExpPoly::from(f.clone());
    let a = jstar(
        &power_affine_volterra(&fe, &c, n, Sign::Minus)?,
        n_trunc,
        prec,
    )?;
    let b0 = jstar(&fe, n_trunc + n as usize, prec)?;
    let b = affine_power(
        &WeightSeq::harmonic(),
        &(-&c * Rational::from_integer(2.into())),
        n,
        &b0,
    )?;
    let mut max_disc = Rational::zero();
    let mut exact = true;
    for m in 0..=n_trunc {
        match (a.coord(m), b.coord(m)) {
            (Scalar::Exact(x), Scalar::Exact(y)) => {
                let d = (x - y).abs();
                if d > max_disc {
                    max_disc = d;
                }
            }
            (x, y) => {
                exact = false;
                if !x.to_ball(prec).overlaps(&y.to_ball(prec)) {
                    return Err(Error::Verification(format!(
                        "routes disagree at coordinate {m}"
                    )));
                }
            }
        }
    }
    if !max_disc.is_zero() {
        return Err(Error::Verification(format!(
            "routes disagree: max coordinate discrepancy {max_disc}"
        )));
    }
    let na = a.norm(prec);
    let nb = b.norm(prec);
    let tails_consistent = na.overlaps(&nb);
    if !tails_consistent {
        return Err(Error::Verification(
            "norm enclosures of the two routes are disjoint".into(),
        ));
    }
    Ok(CrossValidation {
        f: f.clone(),
        lambda: lambda.clone(),
        n,
        truncation: n_trunc,
        coords_compared: n_trunc + 1,
        exact_agreement: exact,
        max_discrepancy: max_disc,
        route_a_norm: na,
        route_b_norm: nb,
        tails_consistent,
    })
}

/// `||g||_L2` as a ball, exact route for polynomials.
pub fn l2_norm(g: &ExpPoly, prec: u32) -> Result<Ball> {
    Ok(l2_norm_sq(g, prec)?.norm(prec))
}
