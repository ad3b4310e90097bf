//! `L2[0, 1]` norms, the auxiliary integrals they need, and certified
//! sup bounds on subintervals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::exppoly::ExpPoly;
use crate::funcalg::poly::Poly;
use crate::numeric::{factorial, Ball, Dyadic, Rational, Round};

/// Squared `L2` norm: exact for polynomials, a ball otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum L2Sq {
    Exact(#[serde(with = "crate::report::rational_str")] Rational),
    Certified(Ball),
}

impl L2Sq {
    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            L2Sq::Exact(r) => Ball::from_rational(r, prec),
            L2Sq::Certified(b) => b.with_prec(prec),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            L2Sq::Exact(r) => Some(r),
            L2Sq::Certified(_) => None,
        }
    }

    /// The norm itself (square root), as a ball.
    pub fn norm(&self, prec: u32) -> Ball {
        self.to_ball(prec).sqrt_nonneg()
    }
}

/// `int_0^1 t^m (1-t)^n dt = m! n! / (m+n+1)!`.
pub fn beta_integral(m: u64, n: u64) -> Rational {
    Rational::new(factorial(m) * factorial(n), factorial(m + n + 1))
}

/// `int_0^1 f^2`.
pub fn l2_norm_sq(f: &ExpPoly, prec: u32) -> Result<L2Sq> {
    match f.as_poly() {
        Some(p) => Ok(L2Sq::Exact(poly_l2_sq_exact(&p))),
        None => Ok(L2Sq::Certified(l2_norm_sq_ball(f, prec)?)),
    }
}

/// Exact `int_0^1 p^2` through an integer self-convolution.
pub fn poly_l2_sq_exact(p: &Poly) -> Rational {
    let Some(d) = p.degree() else {
        return Rational::zero();
    };
    let (nums, den) = p.common_denominator();
    let conv = self_convolution(&nums);
    let mut l = BigInt::one();
    for k in 1..=(2 * d + 1) {
        l = l.lcm(&BigInt::from(k));
    }
    let mut total = BigInt::zero();
    for (k, s) in conv.iter().enumerate() {
        if !s.is_zero() {
            total += s * (&l / BigInt::from(k + 1));
        }
    }
    Rational::new(total, l * &den * &den)
}

/// `s_k = sum_(i+j=k) a_i a_j`.
fn self_convolution(a: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); 2 * n - 1];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        out[2 * i] += &a[i] * &a[i];
        let twice = &a[i] << 1u32;
        for j in (i + 1)..n {
            if !a[j].is_zero() {
                out[i + j] += &twice * &a[j];
            }
        }
    }
    out
}

fn convolution(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Coefficients rounded to nearest multiples of `2^-frac`.
fn fixed_point(p: &Poly, frac: u32) -> Vec<BigInt> {
    let scale = BigInt::one() << frac;
    p.coeffs()
        .iter()
        .map(|c| {
            let x = c * Rational::from_integer(scale.clone());
            (x + Rational::new(BigInt::one(), BigInt::from(2)))
                .floor()
                .to_integer()
        })
        .collect()
}

/// Certified `int_0^1 f^2` for any exponential polynomial.
///
/// Coefficients are rounded to a fixed-point grid of `2^-F`, `F = prec + 32`,
/// convolved exactly as integers, and paired with enclosures of
/// `int t^s e^(gamma t)`. With rounding error `eps <= 2^-(F+1)` per
/// coefficient, the convolution error summed over all output indices is at
/// most `eps (A (dq+1) + B (dp+1)) 2^-F + (dp+1)(dq+1) eps^2` where `A`, `B`
/// are the sums of absolute rounded coefficients; each weight satisfies
/// `|int t^s e^(gamma t)| <= max(1, e^gamma)`.
pub fn l2_norm_sq_ball(f: &ExpPoly, prec: u32) -> Result<Ball> {
    let frac = prec + 32;
    let terms = f.terms();
    let fixed: Vec<Vec<BigInt>> = terms.iter().map(|t| fixed_point(&t.poly, frac)).collect();
    let eps = Dyadic::pow2(-(frac as i64) - 1);
    let mut acc = Ball::zero(prec);
    for i in 0..terms.len() {
        for j in i..terms.len() {
            let gamma = &terms[i].rate + &terms[j].rate;
            let conv = if i == j {
                self_convolution(&fixed[i])
            } else {
                convolution(&fixed[i], &fixed[j])
            };
            let weights = exp_monomial_integrals(conv.len() - 1, &gamma, prec)?;
            let mut part = Ball::zero(prec);
            for (c, w) in conv.iter().zip(&weights) {
                if !c.is_zero() {
                    part = part
                        .add(&Ball::exact(Dyadic::new(c.clone(), -2 * frac as i64), prec).mul(w));
                }
            }
            let a_sum: BigInt = fixed[i].iter().map(|x| x.abs()).sum();
            let b_sum: BigInt = fixed[j].iter().map(|x| x.abs()).sum();
            let dp = BigInt::from(fixed[i].len());
            let dq = BigInt::from(fixed[j].len());
            let lin = Dyadic::new(a_sum * &dq + b_sum * &dp, -(frac as i64)).mul(&eps);
            let quad = Dyadic::new(dp * dq, 0).mul(&eps).mul(&eps);
            let weight_bound = if gamma.is_positive() {
                Ball::from_rational(&gamma, prec).exp().upper()
            } else {
                Dyadic::one()
            };
            let err = lin.add(&quad).mul(&weight_bound);
            part = part.add(&Ball::new(Dyadic::zero(), err, prec));
            if i != j {
                part = part.mul_pow2(1);
            }
            acc = acc.add(&part);
        }
    }
    // the true value is non-negative
    Ok(clip_nonneg(acc))
}

fn clip_nonneg(b: Ball) -> Ball {
    if b.lower().is_negative() {
        let hi = b.upper().max(Dyadic::zero());
        Ball::from_interval(&Dyadic::zero(), &hi, b.prec())
    } else {
        b
    }
}

/// Ball containing `int_0^1 t^k e^(gamma t) dt`.
///
/// Uses the series `sum_j gamma^j / (j! (k+j+1))` when `|gamma| <= k` and
/// the upward recurrence `I_s = (e^gamma - s I_(s-1)) / gamma` otherwise.
pub fn exp_monomial_integral(k: usize, gamma: &Rational, prec: u32) -> Result<Ball> {
    if gamma.is_zero() {
        return Ok(Ball::from_rational(
            &Rational::new(BigInt::one(), BigInt::from(k + 1)),
            prec,
        ));
    }
    if gamma.abs() <= Rational::from_integer(BigInt::from(k)) {
        Ok(exp_monomial_series(k, gamma, prec))
    } else {
        Ok(upward(k, gamma, prec)?.pop().expect("non-empty"))
    }
}

/// `int_0^1 t^s e^(gamma t) dt` for every `s <= kmax`.
///
/// Indices below `|gamma|` come from the upward recurrence, the rest from
/// the series at `kmax` followed by the downward recurrence
/// `I_(s-1) = (e^gamma - gamma I_s) / s`; both directions contract errors.
pub fn exp_monomial_integrals(kmax: usize, gamma: &Rational, prec: u32) -> Result<Vec<Ball>> {
    if gamma.is_zero() {
        return Ok((0..=kmax)
            .map(|s| Ball::from_rational(&Rational::new(BigInt::one(), BigInt::from(s + 1)), prec))
            .collect());
    }
    let g = gamma.abs().ceil().to_integer();
    let split: usize = if g > BigInt::from(kmax) {
        kmax + 1
    } else {
        g.try_into().expect("small")
    };
    let wprec = prec + 32;
    let mut out = if split > 0 {
        upward(split - 1, gamma, wprec)?
    } else {
        Vec::new()
    };
    if split <= kmax {
        let e = Ball::from_rational(gamma, wprec).exp();
        let gb = Ball::from_rational(gamma, wprec);
        let mut down = vec![exp_monomial_series(kmax, gamma, wprec)];
        for s in ((split + 1)..=kmax).rev() {
            let cur = down.last().expect("non-empty");
            let prev = e.sub(&gb.mul(cur)).div(&Ball::from_i64(s as i64, wprec))?;
            down.push(prev);
        }
        down.reverse();
        out.extend(down);
    }
    Ok(out.into_iter().map(|b| b.with_prec(prec)).collect())
}

fn upward(kmax: usize, gamma: &Rational, prec: u32) -> Result<Vec<Ball>> {
    let gb = Ball::from_rational(gamma, prec);
    let e = gb.exp();
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(e.sub(&Ball::one(prec)).div(&gb)?);
    for s in 1..=kmax {
        let prev = out.last().expect("non-empty");
        out.push(e.sub(&prev.mul(&Ball::from_i64(s as i64, prec))).div(&gb)?);
    }
    Ok(out)
}

fn exp_monomial_series(k: usize, gamma: &Rational, prec: u32) -> Ball {
    let g = gamma.abs();
    let target = Dyadic::pow2(-(prec as i64) - 8);
    let mut u = Ball::one(prec);
    let mut sum = Ball::zero(prec);
    let mut j: u64 = 0;
    loop {
        let denom = Ball::from_i64((k as u64 + j + 1) as i64, prec);
        // after 2|gamma| terms the ratio is <= 1/2 so the tail is <= 2 |next|
        if Rational::from_integer(BigInt::from(j)) >= &g * Rational::from_integer(2.into())
            && u.abs().upper() <= target
        {
            let tail = u.abs().upper().mul_pow2(1);
            let tail = tail.div(&Dyadic::from_i64((k as u64 + j + 1) as i64), 64, Round::Up);
            let tail = tail.map(|(d, _)| d).unwrap_or(Dyadic::pow2(-(prec as i64)));
            return sum.add(&Ball::new(Dyadic::zero(), tail, prec));
        }
        sum = sum.add(&u.div(&denom).expect("positive denominator"));
        j += 1;
        u = u.mul_rational(&(gamma / Rational::from_integer(BigInt::from(j))));
    }
}

/// Enclosure of `sup_[a, b] |f|`.
///
/// `[a, b]` is cut into `2^depth` cells; on each cell `|f|` is at most its
/// midpoint value plus half the width times a bound on `|f'|`. For plain
/// polynomials of degree `d` the Markov inequality
/// `sup |p'| <= 2 d^2 / (b - a) sup |p|` gives the self-consistent bound
/// `sup |p| <= G / (1 - d^2 / 2^depth)`, which is used whenever it applies
/// and is sharper; otherwise the derivative is bounded by interval
/// evaluation on each cell. The lower end is the largest certified midpoint
/// value.
pub fn sup_bound(f: &ExpPoly, a: &Rational, b: &Rational, depth: u32, prec: u32) -> Result<Ball> {
    if !(a < b) || a.is_negative() || *b > Rational::one() {
        return Err(Error::Precondition(format!(
            "sup_bound needs 0 <= a < b <= 1, got [{a}, {b}]"
        )));
    }
    if depth > 24 {
        return Err(Error::Precondition(format!("depth {depth} exceeds 24")));
    }
    let cells = 1u64 << depth;
    let h = (b - a) / Rational::from_integer(BigInt::from(2 * cells));
    let markov = f.as_poly().and_then(|p| {
        let d = p.degree().unwrap_or(0) as u64;
        let kappa = Rational::new(BigInt::from(d * d), BigInt::from(cells));
        (kappa < Rational::new(1.into(), 2.into())).then_some(kappa)
    });
    let deriv = f.differentiate();
    let (h_up, _) = Dyadic::from_rational(&h, 64, Round::Up);
    let slack = Ball::new(Dyadic::zero(), h_up.clone(), prec);
    let mut g_lo = Dyadic::zero();
    let mut g_hi = Dyadic::zero();
    let mut crude = Dyadic::zero();
    for i in 0..cells {
        let m = a + &h * Rational::from_integer(BigInt::from(2 * i + 1));
        let mb = Ball::from_rational(&m, prec);
        let v = f.eval_ball(&mb).abs();
        g_lo = g_lo.max(v.lower());
        g_hi = g_hi.max(v.upper());
        if markov.is_none() {
            let dv = deriv.eval_ball(&mb.add(&slack)).abs().upper();
            crude = crude.max(v.upper().add(&dv.mul(&h_up)));
        }
    }
    let upper = match markov {
        Some(kappa) => {
            let factor = Rational::one() / (Rational::one() - kappa);
            let (fd, _) = Dyadic::from_rational(&factor, 64, Round::Up);
            g_hi.mul(&fd).up(64)
        }
        None => crude.up(64),
    };
    Ok(Ball::from_interval(&g_lo, &upper.max(g_lo.clone()), prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::exppoly::Term;
    use crate::funcalg::laguerre::laguerre;
    use crate::numeric::{rat, ratio};

    #[test]
    fn exact_norms() {
        let n = |p: Poly| poly_l2_sq_exact(&p);
        assert_eq!(n(Poly::one()), rat(1));
        assert_eq!(n(Poly::t()), ratio(1, 3));
        assert_eq!(n(Poly::from_i64s(&[1, -1])), ratio(1, 3));
        assert_eq!(n(Poly::zero()), rat(0));
        // oracle: integrate the square directly
        let p = Poly::new(vec![ratio(1, 3), ratio(-7, 5), ratio(2, 9), rat(4)]);
        assert_eq!(n(p.clone()), p.mul(&p).integral_01());
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_integral(0, 0), rat(1));
        assert_eq!(beta_integral(1, 1), ratio(1, 6));
        assert_eq!(beta_integral(0, 3), ratio(1, 4));
        let p = Poly::monomial(2, rat(1))
            .mul(&Poly::from_i64s(&[1, -1]).mul(&Poly::from_i64s(&[1, -1])));
        assert_eq!(beta_integral(2, 2), p.integral_01());
    }

    #[test]
    fn exp_monomial_values() {
        assert_eq!(
            exp_monomial_integral(0, &rat(0), 128).unwrap(),
            Ball::one(128)
        );
        let e1 = exp_monomial_integral(0, &rat(1), 128).unwrap();
        let want = Ball::one(128).exp().sub(&Ball::one(128));
        assert!(e1.overlaps(&want));
        assert!(e1.rel_rad() < 1e-30);
        // k = 3, gamma = -2 against a 4096-bit evaluation of the same series
        let lo = exp_monomial_integral(3, &rat(-2), 128).unwrap();
        let hi = exp_monomial_integral(3, &rat(-2), 4096).unwrap();
        assert!(lo.contains(&hi) || lo.overlaps(&hi));
        assert!(hi.rad() < &Dyadic::pow2(-4000));
        // closed form: int t e^t = 1
        let t1 = exp_monomial_integral(1, &rat(1), 128).unwrap();
        assert!(t1.contains_rational(&rat(1)));
    }

    #[test]
    fn batch_integrals_agree_with_single() {
        for gamma in [ratio(-5, 2), ratio(1, 3), rat(7)] {
            let all = exp_monomial_integrals(12, &gamma, 192).unwrap();
            for (s, b) in all.iter().enumerate() {
                let one = exp_monomial_integral(s, &gamma, 192).unwrap();
                assert!(b.overlaps(&one), "s = {s}, gamma = {gamma}");
                assert!(
                    b.rel_rad() < 1e-40,
                    "s = {s}, gamma = {gamma}, rel {}",
                    b.rel_rad()
                );
            }
        }
    }

    #[test]
    fn ball_norm_matches_exact_on_polynomials() {
        let p = laguerre(30).scale_arg(&ratio(1, 2));
        let exact = poly_l2_sq_exact(&p);
        let b = l2_norm_sq_ball(&ExpPoly::from(p), 256).unwrap();
        assert!(b.contains_rational(&exact));
        assert!(b.rel_rad() < 1e-50);
    }

    #[test]
    fn ball_norm_of_exponential() {
        // int e^(-2t) = (1 - e^-2) / 2
        let f = ExpPoly::term(rat(-1), Poly::one());
        let b = l2_norm_sq_ball(&f, 128).unwrap();
        let e2 = Ball::from_i64(-2, 128).exp();
        let want = Ball::one(128).sub(&e2).mul_pow2(-1);
        assert!(b.overlaps(&want));
        assert!(b.rel_rad() < 1e-30);
        // (1 - e^-t)^2 = 1 - 2e^-t + e^-2t integrates to 1 - 2(1 - e^-1) + (1 - e^-2)/2
        let g = ExpPoly::new([
            Term {
                rate: rat(0),
                poly: Poly::one(),
            },
            Term {
                rate: rat(-1),
                poly: Poly::constant(rat(-1)),
            },
        ]);
        let b = l2_norm_sq(&g, 128).unwrap().to_ball(128);
        let e1 = Ball::from_i64(-1, 128).exp();
        let want = Ball::one(128)
            .sub(&Ball::one(128).sub(&e1).mul_pow2(1))
            .add(&Ball::one(128).sub(&e2).mul_pow2(-1));
        assert!(b.overlaps(&want));
    }

    #[test]
    fn sup_simple() {
        let one = ExpPoly::one();
        let s = sup_bound(&one, &rat(0), &rat(1), 8, 128).unwrap();
        assert!(s.contains_rational(&rat(1)));
        assert!(s.upper().to_f64() < 1.0 + 1e-9);
        let t = ExpPoly::from(Poly::t());
        let s = sup_bound(&t, &rat(0), &ratio(1, 2), 10, 128).unwrap();
        assert!(s.upper().to_f64() >= 0.5 && s.upper().to_f64() < 0.5 + 1e-3);
        let e = ExpPoly::term(rat(-1), Poly::one());
        let s = sup_bound(&e, &rat(0), &rat(1), 10, 128).unwrap();
        assert!(s.upper().to_f64() >= 1.0 && s.upper().to_f64() < 1.0 + 1e-3);
        assert!(sup_bound(&t, &rat(1), &rat(0), 4, 64).is_err());
    }

    #[test]
    fn sup_of_laguerre_20() {
        let f = ExpPoly::from(laguerre(20));
        let (a, b) = (ratio(1, 4), rat(1));
        // dense grid oracle at 10^4 points in f64
        let coeffs: Vec<f64> = laguerre(20)
            .coeffs()
            .iter()
            .map(crate::numeric::rational::to_f64)
            .collect();
        let grid_max = (0..=10_000)
            .map(|i| {
                let t = 0.25 + 0.75 * i as f64 / 10_000.0;
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c).abs()
            })
            .fold(0.0f64, f64::max);
        let s10 = sup_bound(&f, &a, &b, 10, 128).unwrap();
        let s12 = sup_bound(&f, &a, &b, 12, 128).unwrap();
        assert!(s12.upper() <= s10.upper());
        assert!(s12.upper().to_f64() >= grid_max * (1.0 - 1e-12));
        assert!(s12.lower().to_f64() <= grid_max * (1.0 + 1e-12));
    }
}
