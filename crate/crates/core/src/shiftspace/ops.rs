//! Shifts, affine powers, and the `J` / `J*` intertwiners.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::funcalg::{beta_integral, exp_monomial_integral, l2_norm_sq, ExpPoly, Poly};
use crate::numeric::{binomial, Ball, Dyadic, Rational, Round};
use crate::shiftspace::vector::{Scalar, Space, TailedVector};
use crate::shiftspace::weights::WeightSeq;

fn bound_up(r: &Rational) -> Dyadic {
    Dyadic::from_rational(&r.abs(), 64, Round::Up).0
}

fn tail_ball(d: Dyadic, prec: u32) -> Ball {
    Ball::exact(d.up(64), prec)
}

/// `T x` with `T e_0 = 0`, `T e_n = w_n e_(n-1)`. The result keeps one
/// coordinate fewer; the discarded part is `T` of the old tail.
pub fn backward_shift(w: &WeightSeq, x: &TailedVector) -> Result<TailedVector> {
    let mut coords = Vec::with_capacity(x.len().saturating_sub(1));
    for n in 1..x.len() {
        coords.push(x.coords()[n].scale(&w.weight(n as u64)?));
    }
    let tail = if x.is_finite() {
        x.tail().clone()
    } else {
        tail_ball(x.tail().upper().mul(&bound_up(w.bound())), x.tail().prec())
    };
    Ok(TailedVector::from_parts(x.space(), coords, tail))
}

/// `T^k x`.
pub fn shift_power(w: &WeightSeq, k: u64, x: &TailedVector) -> Result<TailedVector> {
    let mut y = x.clone();
    for _ in 0..k {
        if y.is_zero() {
            break;
        }
        y = backward_shift(w, &y)?;
    }
    Ok(y)
}

/// `S x` with `S e_n = e_(n+1) / (n+1)`.
pub fn forward_shift(x: &TailedVector) -> TailedVector {
    let mut coords = Vec::with_capacity(x.len() + 1);
    coords.push(Scalar::zero());
    for (n, c) in x.coords().iter().enumerate() {
        coords.push(c.scale(&Rational::new(BigInt::one(), BigInt::from(n + 1))));
    }
    // discarded indices m > N move to m + 1 with factor 1/(m+1) <= 1/(N+2)
    let tail = if x.is_finite() {
        x.tail().clone()
    } else {
        let f = Dyadic::one().div(&Dyadic::from_i64(x.len() as i64 + 1), 64, Round::Up);
        let f = f.map(|(d, _)| d).unwrap_or_else(|_| Dyadic::one());
        tail_ball(x.tail().upper().mul(&f), x.tail().prec())
    };
    TailedVector::from_parts(x.space(), coords, tail)
}

fn pad(mut v: Vec<Scalar>, len: usize) -> Vec<Scalar> {
    v.resize(len, Scalar::zero());
    v
}

fn combine(acc: &mut [Scalar], y: &TailedVector, coef: &Rational) {
    for (a, c) in acc.iter_mut().zip(y.coords()) {
        if !c.is_zero() {
            *a = a.add(&c.scale(coef));
        }
    }
}

/// `(I + lambda T)^n x`.
///
/// Finitely supported inputs use the terminating binomial sum
/// `sum_j C(n, j) lambda^j T^j x`. Otherwise each step drops the last
/// coordinate into the tail: the new tail is `|x_N| + (1 + |lambda| b) tail`.
pub fn affine_power(
    w: &WeightSeq,
    lambda: &Rational,
    n: u64,
    x: &TailedVector,
) -> Result<TailedVector> {
    if x.is_finite() {
        let len = x.len();
        let mut acc = vec![Scalar::zero(); len];
        let mut y = x.clone();
        let mut lam_pow = Rational::one();
        let mut j = 0u64;
        while j <= n && !y.is_zero() {
            combine(
                &mut acc,
                &y,
                &(Rational::from_integer(binomial(n, j)) * &lam_pow),
            );
            y = backward_shift(w, &y)?;
            lam_pow *= lambda;
            j += 1;
        }
        return Ok(TailedVector::from_parts(x.space(), acc, x.tail().clone()));
    }
    let growth = Dyadic::one().add(&bound_up(lambda).mul(&bound_up(w.bound())));
    let mut y = x.clone();
    for _ in 0..n {
        let ty = backward_shift(w, &y)?;
        let keep = ty.len();
        let mut coords = pad(y.coords()[..keep].to_vec(), keep);
        for (a, c) in coords.iter_mut().zip(ty.coords()) {
            *a = a.add(&c.scale(lambda));
        }
        let dropped = y
            .coords()
            .get(keep)
            .map_or(Dyadic::zero(), Scalar::abs_upper);
        let tail = dropped.add(&y.tail().upper().mul(&growth));
        y = TailedVector::from_parts(y.space(), coords, tail_ball(tail, y.tail().prec()));
    }
    Ok(y)
}

/// `(I + lambda T)^-n x = sum_k (-1)^k C(n+k-1, k) lambda^k T^k x` for
/// finitely supported `x` (the sum terminates because `T` is nilpotent
/// there).
pub fn inverse_affine_apply(
    w: &WeightSeq,
    lambda: &Rational,
    n: u64,
    x: &TailedVector,
) -> Result<TailedVector> {
    if !x.is_finite() {
        return Err(Error::Unsupported(
            "inverse powers need a finitely supported vector; use the function-side route".into(),
        ));
    }
    if n == 0 {
        return Ok(x.clone());
    }
    let mut acc = vec![Scalar::zero(); x.len()];
    let mut y = x.clone();
    let mut lam_pow = Rational::one();
    let mut k = 0u64;
    while !y.is_zero() {
        let sign = if k % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        let coef = sign * Rational::from_integer(binomial(n + k - 1, k)) * &lam_pow;
        combine(&mut acc, &y, &coef);
        y = backward_shift(w, &y)?;
        lam_pow *= lambda;
        k += 1;
    }
    Ok(TailedVector::from_parts(x.space(), acc, x.tail().clone()))
}

/// `J* f` in `l1`: coordinate `m` is `2^-m int_0^1 f(t) (1-t)^m dt`, for
/// `m <= N`. The tail is `2^-N ||f||_L2`, which dominates
/// `sum_(m>N) 2^-m (2m+1)^(-1/2) ||f||`.
pub fn jstar(f: &ExpPoly, n_max: usize, prec: u32) -> Result<TailedVector> {
    let norm_up = l2_norm_sq(f, prec)?.norm(prec).upper();
    let tail = tail_ball(norm_up.mul_pow2(-(n_max as i64)), prec);
    let coords: Vec<Scalar> = match f.as_poly() {
        Some(p) => (0..=n_max)
            .map(|m| Scalar::Exact(poly_moment(&p, m as u64) / pow2(m)))
            .collect(),
        None => {
            let mut out = Vec::with_capacity(n_max + 1);
            for m in 0..=n_max {
                out.push(Scalar::Approx(
                    exppoly_moment(f, m, prec)?.mul_pow2(-(m as i64)),
                ));
            }
            out
        }
    };
    TailedVector::new(Space::L1, coords, tail)
}

fn pow2(m: usize) -> Rational {
    Rational::from_integer(BigInt::one() << m)
}

/// `int_0^1 p(t) (1-t)^m dt`.
fn poly_moment(p: &Poly, m: u64) -> Rational {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| c * beta_integral(k as u64, m))
        .sum()
}

/// `int_0^1 q(t) e^(at) (1-t)^m dt = e^a int_0^1 q(1-u) u^m e^(-au) du`.
fn exppoly_moment(f: &ExpPoly, m: usize, prec: u32) -> Result<Ball> {
    let mut acc = Ball::zero(prec);
    for t in f.terms() {
        if t.rate.is_zero() {
            acc = acc.add(&Ball::from_rational(&poly_moment(&t.poly, m as u64), prec));
            continue;
        }
        let q = t.poly.reflect();
        let mut part = Ball::zero(prec);
        for (k, c) in q.coeffs().iter().enumerate() {
            if !c.is_zero() {
                part = part.add(&exp_monomial_integral(k + m, &-&t.rate, prec)?.mul_rational(c));
            }
        }
        acc = acc.add(&part.mul(&Ball::from_rational(&t.rate, prec).exp()));
    }
    Ok(acc)
}

/// `J x = sum_(n <= N) x_n (1-t)^n / 2^n`, plus a bound on the sup norm of
/// the discarded part, `<= sup_(n > N) |x_n| 2^-N`.
pub fn j_apply(x: &TailedVector, n_max: usize) -> Result<(Poly, Ball)> {
    let coords = x
        .exact_coords()
        .ok_or_else(|| Error::Unsupported("j_apply needs exact coordinates".into()))?;
    let base = Poly::new(vec![
        Rational::new(1.into(), 2.into()),
        Rational::new((-1).into(), 2.into()),
    ]);
    let mut power = Poly::one();
    let mut out = Poly::zero();
    for (n, c) in coords.iter().enumerate().take(n_max + 1) {
        if n > 0 {
            power = power.mul(&base);
        }
        if !c.is_zero() {
            out = out.add(&power.scale(c));
        }
    }
    let beyond = coords
        .iter()
        .skip(n_max + 1)
        .map(|c| bound_up(c))
        .fold(Dyadic::zero(), |a, b| a.max(b));
    // for l2 and l1 alike each discarded coordinate is at most the tail norm
    let sup = beyond.max(x.tail().upper());
    let rem = sup.mul_pow2(-(n_max as i64));
    let prec = x.tail().prec();
    Ok((out, Ball::from_interval(&Dyadic::zero(), &rem, prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::{power_affine_volterra, volterra_star_apply, Sign};
    use crate::numeric::{rat, ratio};

    fn e(n: usize) -> TailedVector {
        TailedVector::basis(Space::L1, n)
    }

    fn coords(x: &TailedVector) -> Vec<Rational> {
        let mut c = x.exact_coords().unwrap();
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        c
    }

    #[test]
    fn backward_shift_examples() {
        let w = WeightSeq::harmonic();
        assert_eq!(
            coords(&backward_shift(&w, &e(2)).unwrap()),
            vec![rat(0), ratio(1, 2)]
        );
        assert!(backward_shift(&w, &e(0)).unwrap().is_zero());
        assert_eq!(
            coords(&shift_power(&w, 2, &e(2)).unwrap()),
            vec![ratio(1, 2)]
        );
    }

    #[test]
    fn forward_shift_examples() {
        assert_eq!(coords(&forward_shift(&e(0))), vec![rat(0), rat(1)]);
        assert_eq!(
            coords(&forward_shift(&e(1))),
            vec![rat(0), rat(0), ratio(1, 2)]
        );
        // T S e_5 = T e_6 / 6 = e_5 / 36
        let ts = backward_shift(&WeightSeq::harmonic(), &forward_shift(&e(5))).unwrap();
        let mut want = vec![rat(0); 6];
        want[5] = ratio(1, 36);
        assert_eq!(coords(&ts), want);
    }

    #[test]
    fn affine_power_examples() {
        let w2 = WeightSeq::power(2).unwrap();
        assert_eq!(affine_power(&w2, &rat(1), 0, &e(2)).unwrap(), e(2));
        for n in [1u64, 7, 100] {
            let y = affine_power(&w2, &rat(1), n, &e(2)).unwrap();
            let nn = Rational::from_integer(n.into());
            let c2 = Rational::from_integer(binomial(n, 2));
            assert_eq!(coords(&y), vec![c2 / rat(4), nn / rat(4), rat(1)]);
        }
        let y = affine_power(&WeightSeq::harmonic(), &rat(1), 3, &e(1)).unwrap();
        assert_eq!(coords(&y), vec![rat(3), rat(1)]);
    }

    #[test]
    fn inverse_examples() {
        let w = WeightSeq::harmonic();
        for n in [0u64, 1, 5] {
            assert_eq!(
                coords(&inverse_affine_apply(&w, &rat(1), n, &e(0)).unwrap()),
                vec![rat(1)]
            );
        }
        let y = inverse_affine_apply(&w, &rat(1), 1, &e(1)).unwrap();
        assert_eq!(coords(&y), vec![rat(-1), rat(1)]);
        assert_eq!(
            coords(&affine_power(&w, &rat(1), 1, &y).unwrap()),
            vec![rat(0), rat(1)]
        );
        assert_eq!(inverse_affine_apply(&w, &rat(1), 0, &e(3)).unwrap(), e(3));
        let x = TailedVector::parse(Space::L1, "1,2,-3,1/2").unwrap();
        let y = inverse_affine_apply(&w, &ratio(-3, 2), 4, &x).unwrap();
        assert_eq!(
            coords(&affine_power(&w, &ratio(-3, 2), 4, &y).unwrap()),
            coords(&x)
        );
        let tailed =
            TailedVector::new(Space::L1, vec![Scalar::Exact(rat(1))], Ball::one(64)).unwrap();
        assert!(inverse_affine_apply(&w, &rat(1), 1, &tailed).is_err());
    }

    #[test]
    fn jstar_examples() {
        let j = jstar(&ExpPoly::one(), 10, 128).unwrap();
        assert_eq!(j.coord(0), Scalar::Exact(rat(1)));
        assert_eq!(j.coord(1), Scalar::Exact(ratio(1, 4)));
        for m in 0..=10usize {
            let want = Rational::new(1.into(), BigInt::from(m + 1) << m);
            assert_eq!(j.coord(m), Scalar::Exact(want));
        }
        let z = jstar(&ExpPoly::zero(), 5, 64).unwrap();
        assert!(z.is_zero());
        let j = jstar(&ExpPoly::from(Poly::from_i64s(&[1, -1])), 8, 64).unwrap();
        for m in 0..=8usize {
            let want = Rational::new(1.into(), BigInt::from(m + 2) << m);
            assert_eq!(j.coord(m), Scalar::Exact(want));
        }
    }

    #[test]
    fn jstar_of_exponential_contains_truth() {
        // coordinate 0 of J*(e^-t) is 1 - e^-1
        let f = ExpPoly::term(rat(-1), Poly::one());
        let j = jstar(&f, 4, 128).unwrap();
        let c0 = j.coord(0).to_ball(128);
        let want = Ball::one(128).sub(&Ball::from_i64(-1, 128).exp());
        assert!(c0.overlaps(&want));
        assert!(c0.rel_rad() < 1e-25);
        // coordinate 1: (1/2) int e^-t (1 - t) = (1/2) e^-1
        let c1 = j.coord(1).to_ball(128);
        assert!(c1.overlaps(&Ball::from_i64(-1, 128).exp().mul_pow2(-1)));
    }

    #[test]
    fn j_apply_examples() {
        let (p, r) = j_apply(&e(0), 10).unwrap();
        assert_eq!(p, Poly::one());
        assert!(r.upper().is_zero());
        let (p, _) = j_apply(&e(2), 10).unwrap();
        assert_eq!(p, Poly::new(vec![ratio(1, 4), ratio(-1, 2), ratio(1, 4)]));
        let (p, _) = j_apply(&TailedVector::parse(Space::L1, "1,1").unwrap(), 10).unwrap();
        assert_eq!(p, Poly::new(vec![ratio(3, 2), ratio(-1, 2)]));
        let (_, r) = j_apply(&e(5), 3).unwrap();
        assert_eq!(r.upper().to_rational(), ratio(1, 8));
    }

    #[test]
    fn intertwining_2js_equals_vstar_j() {
        for n in 0..=40 {
            let (lhs, _) = j_apply(&forward_shift(&e(n)), n + 2).unwrap();
            let (jn, _) = j_apply(&e(n), n + 2).unwrap();
            let rhs = volterra_star_apply(&ExpPoly::from(jn)).unwrap();
            assert_eq!(ExpPoly::from(lhs.scale(&rat(2))), rhs, "n = {n}");
        }
    }

    #[test]
    fn sim1_on_small_data() {
        // J*((I - cV) f) = (I - 2cT) J* f on indices <= N
        let w = WeightSeq::harmonic();
        let f = ExpPoly::from(Poly::from_i64s(&[2, -1, 3]));
        for c in [ratio(1, 2), rat(1)] {
            let lhs = jstar(
                &power_affine_volterra(&f, &c, 1, Sign::Minus).unwrap(),
                20,
                64,
            )
            .unwrap();
            let rhs = affine_power(&w, &(-&c * rat(2)), 1, &jstar(&f, 21, 64).unwrap()).unwrap();
            for m in 0..=20 {
                assert_eq!(lhs.coord(m), rhs.coord(m), "c = {c}, m = {m}");
            }
            assert!(lhs.tail().upper() <= rhs.tail().upper().add(&Dyadic::one()));
        }
    }

    #[test]
    fn tail_propagation() {
        let w = WeightSeq::harmonic();
        let x = TailedVector::new(
            Space::L1,
            vec![Scalar::Exact(rat(1)), Scalar::Exact(rat(2))],
            Ball::one(64),
        )
        .unwrap();
        let y = backward_shift(&w, &x).unwrap();
        assert_eq!(y.len(), 1);
        assert!(y.tail().upper() >= Dyadic::one());
        let z = affine_power(&w, &rat(1), 1, &x).unwrap();
        // dropped |x_1| = 2 plus (1 + 1) * 1
        assert!(z.tail().upper() >= Dyadic::from_i64(4));
        assert_eq!(z.coord(0), Scalar::Exact(rat(3)));
    }
}
