//! Function-side studies: the two-sided orbit check and Laguerre decay.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::{
    inv_power_i_minus_cv, laguerre_scaled, power_affine_volterra, poly_l2_sq_exact, sup_bound, volterra_apply,
    ExpPoly, Sign,
};
use crate::numeric::{Ball, Rational};
use crate::report::{rational_str, Status};
use crate::witness::certificate::l2_norm;
use crate::witness::grid::{last_half, loglog_slope};

/// Default smallness threshold, relative to `||f||`.
pub fn qn_default_threshold() -> Rational {
    Rational::new(1.into(), 1000.into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QnReport {
    pub f: ExpPoly,
    #[serde(with = "rational_str")]
    pub c: Rational,
    pub n_values: Vec<u64>,
    pub f_norm: Ball,
    /// `||(I - cV)^n f||`.
    pub forward: Vec<Ball>,
    /// `||(I - cV)^-n f||`.
    pub inverse: Vec<Ball>,
    #[serde(with = "rational_str")]
    pub threshold: Rational,
    /// Grid points where both norms are certified below `threshold ||f||`.
    pub both_small: Vec<u64>,
    pub status: Status,
    pub empirical: bool,
}

/// Checks that no grid point has both `||(I - cV)^n f||` and
/// `||(I - cV)^-n f||` below `threshold ||f||`. Per-vector evidence only.
pub fn qn_two_sided_check(f: &ExpPoly, c: &Rational, grid: &[u64], threshold: &Rational, prec: u32) -> Result<QnReport> {
    if !c.is_positive() {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    if f.is_zero() {
        return Err(Error::Precondition("f must be nonzero".into()));
    }
    let f_norm = l2_norm(f, prec)?;
    let level = f_norm.mul_rational(threshold);
    let pairs: Vec<(Ball, Ball)> = grid
        .par_iter()
        .map(|&n| {
            let fw = l2_norm(&power_affine_volterra(f, c, n, Sign::Minus)?, prec)?;
            let inv = l2_norm(&inv_power_i_minus_cv(f, c, n)?, prec)?;
            Ok((fw, inv))
        })
        .collect::<Result<_>>()?;
    let mut status = Status::Pass;
    let mut both_small = Vec::new();
    for (&n, (fw, inv)) in grid.iter().zip(&pairs) {
        let below = |x: &Ball| x.upper() < level.lower();
        let above = |x: &Ball| x.lower() >= level.upper();
        if below(fw) && below(inv) {
            both_small.push(n);
            status = Status::Fail;
        } else if !(above(fw) || above(inv)) {
            status = status.and(Status::Undecided);
        }
    }
    let (forward, inverse) = pairs.into_iter().unzip();
    Ok(QnReport {
        f: f.clone(),
        c: c.clone(),
        n_values: grid.to_vec(),
        f_norm,
        forward,
        inverse,
        threshold: threshold.clone(),
        both_small,
        status,
        empirical: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaguerreIdentityReport {
    #[serde(with = "rational_str")]
    pub c: Rational,
    pub n_max: u64,
    /// `n` where repeated application of `I - cV` to `1` differs from `L_n(ct)`.
    pub iterated_mismatches: Vec<u64>,
    /// `n` where the closed form of `(I - cV)^n 1` differs from `L_n(ct)`.
    pub closed_form_mismatches: Vec<u64>,
    pub status: Status,
}

/// Coefficient-wise `(I - cV)^n 1 = L_n(ct)` for `n <= n_max`, checked against
/// both the step-by-step iteration and the closed form.
pub fn laguerre_identity_check(c: &Rational, n_max: u64) -> Result<LaguerreIdentityReport> {
    if !c.is_positive() {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    let mut g = ExpPoly::one();
    let mut iterated = Vec::new();
    let mut closed = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            g = g.sub(&volterra_apply(&g).scale(c));
        }
        let want = ExpPoly::from(laguerre_scaled(n, c));
        if g != want {
            iterated.push(n);
        }
        if power_affine_volterra(&ExpPoly::one(), c, n, Sign::Minus)? != want {
            closed.push(n);
        }
    }
    let status = Status::from_bool(iterated.is_empty() && closed.is_empty());
    Ok(LaguerreIdentityReport {
        c: c.clone(),
        n_max,
        iterated_mismatches: iterated,
        closed_form_mismatches: closed,
        status,
    })
}

/// Largest cell-count exponent used for sup bounds. With the Markov bound
/// this covers degrees up to 64.
pub const SUP_MAX_DEPTH: u32 = 14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaguerreDecayReport {
    #[serde(with = "rational_str")]
    pub c: Rational,
    #[serde(with = "rational_str")]
    pub a: Rational,
    #[serde(with = "rational_str")]
    pub b: Rational,
    pub n_values: Vec<u64>,
    /// `||L_n(ct)||_L2[0,1] = ||(I - cV)^n 1||`, exact before the square root.
    pub l2_norms: Vec<Ball>,
    pub l2_slope: Option<Ball>,
    /// `sup_[a,b] |L_n(ct)|`, `null` where the degree is beyond the sup range.
    pub sup_ab: Vec<Option<Ball>>,
    pub sup_ab_slope: Option<Ball>,
    pub sup_0b: Vec<Option<Ball>>,
    /// `e^(cb/2)`, which dominates `|L_n(ct)|` on `[0, b]`.
    pub bound_0b: Ball,
    pub bounded_0b: Status,
}

fn sup_depth(degree: u64) -> Option<u32> {
    // Markov needs d^2 / 2^depth < 1/2; ask for 1/4 so the factor stays <= 4/3
    let need = 4 * degree * degree;
    let depth = 64 - need.saturating_sub(1).leading_zeros();
    (depth <= SUP_MAX_DEPTH).then_some(depth.max(4))
}

pub fn laguerre_decay_study(c: &Rational, a: &Rational, b: &Rational, grid: &[u64], prec: u32) -> Result<LaguerreDecayReport> {
    if !(a.is_positive() && a < b && *b <= Rational::one()) {
        return Err(Error::Precondition(format!("need 0 < a < b <= 1, got [{a}, {b}]")));
    }
    if !c.is_positive() {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    let rows: Vec<(Ball, Option<Ball>, Option<Ball>)> = grid
        .par_iter()
        .map(|&n| {
            let p = laguerre_scaled(n, c);
            let l2 = poly_l2_sq_exact(&p);
            let l2 = Ball::from_rational(&l2, prec).sqrt_nonneg();
            let (sab, s0b) = match sup_depth(n) {
                Some(depth) => {
                    let e = ExpPoly::from(p);
                    (
                        Some(sup_bound(&e, a, b, depth, prec)?),
                        Some(sup_bound(&e, &Rational::zero(), b, depth, prec)?),
                    )
                }
                None => (None, None),
            };
            Ok((l2, sab, s0b))
        })
        .collect::<Result<_>>()?;
    let mut l2_norms = Vec::new();
    let mut sup_ab = Vec::new();
    let mut sup_0b = Vec::new();
    for (l2, sab, s0b) in rows {
        l2_norms.push(l2);
        sup_ab.push(sab);
        sup_0b.push(s0b);
    }
    let fit = |vals: &[Option<Ball>]| {
        let pts: Vec<(u64, Ball)> = grid
            .iter()
            .zip(vals)
            .filter_map(|(&n, v)| v.clone().map(|v| (n, v)))
            .collect();
        loglog_slope(&last_half(&pts), prec)
    };
    let l2_slope = fit(&l2_norms.iter().cloned().map(Some).collect::<Vec<_>>());
    let sup_ab_slope = fit(&sup_ab);
    let bound_0b = Ball::from_rational(&(c * b / Rational::from_integer(2.into())), prec).exp();
    let mut bounded_0b = Status::Pass;
    for s in sup_0b.iter().flatten() {
        bounded_0b = bounded_0b.and(if s.upper() <= bound_0b.lower() {
            Status::Pass
        } else if s.lower() > bound_0b.upper() {
            Status::Fail
        } else {
            Status::Undecided
        });
    }
    Ok(LaguerreDecayReport {
        c: c.clone(),
        a: a.clone(),
        b: b.clone(),
        n_values: grid.to_vec(),
        l2_norms,
        l2_slope,
        sup_ab,
        sup_ab_slope,
        sup_0b,
        bound_0b,
        bounded_0b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::Poly;
    use crate::numeric::{rat, ratio};
    use crate::witness::grid::geometric_grid;

    #[test]
    fn qn_examples() {
        let one = ExpPoly::one();
        let th = qn_default_threshold();
        let r = qn_two_sided_check(&one, &rat(1), &[1, 4, 16, 64], &th, 128).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.forward.last().unwrap().upper() < r.forward[0].lower());
        assert!(r.inverse.last().unwrap().lower() > r.inverse[0].upper());
        assert!(qn_two_sided_check(&ExpPoly::zero(), &rat(1), &[1], &th, 64).is_err());
        assert!(qn_two_sided_check(&one, &rat(0), &[1], &th, 64).is_err());
    }

    #[test]
    fn qn_inverse_n1() {
        // (I - V)^-1 1 = e^t, ||e^t||^2 = (e^2 - 1) / 2
        let r = qn_two_sided_check(&ExpPoly::one(), &rat(1), &[1], &qn_default_threshold(), 128).unwrap();
        let e2 = Ball::from_i64(2, 128).exp();
        let want = e2.sub(&Ball::one(128)).mul_pow2(-1).sqrt().unwrap();
        assert!(r.inverse[0].overlaps(&want));
    }

    #[test]
    fn qn_t_half() {
        let t = ExpPoly::from(Poly::t());
        let grid: Vec<u64> = (1..=40).collect();
        let r = qn_two_sided_check(&t, &ratio(1, 2), &grid, &qn_default_threshold(), 128).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.both_small.is_empty());
    }

    #[test]
    fn laguerre_study_small() {
        let r = laguerre_decay_study(&rat(1), &ratio(1, 4), &rat(1), &[0, 1, 2, 8, 64], 128).unwrap();
        assert!(r.sup_ab[0].as_ref().unwrap().contains_rational(&rat(1)));
        assert!(r.l2_norms[1].overlaps(&Ball::from_rational(&ratio(1, 3), 128).sqrt().unwrap()));
        assert_eq!(r.bounded_0b, Status::Pass);
        assert!(laguerre_decay_study(&rat(1), &rat(0), &rat(1), &[1], 64).is_err());
    }

    #[test]
    fn l2_slope_quarter() {
        let grid = geometric_grid(64, 1024);
        let r = laguerre_decay_study(&rat(1), &ratio(1, 4), &rat(1), &grid, 128).unwrap();
        let s = r.l2_slope.unwrap().to_f64();
        assert!((s + 0.25).abs() < 0.03, "{s}");
        assert!(r.sup_ab[0].is_some());
        assert!(r.sup_ab[1..].iter().all(Option::is_none));
    }

    #[test]
    fn identity_small() {
        for c in [ratio(1, 2), rat(1), rat(2)] {
            let r = laguerre_identity_check(&c, 20).unwrap();
            assert_eq!(r.status, Status::Pass);
        }
        assert!(laguerre_identity_check(&rat(-1), 3).is_err());
    }

    #[test]
    fn sup_depth_range() {
        assert_eq!(sup_depth(0), Some(4));
        assert_eq!(sup_depth(64), Some(14));
        assert!(sup_depth(65).is_none());
    }
}
