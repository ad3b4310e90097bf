//! Laguerre polynomials `L_n(t) = sum_k n! (-t)^k / ((n-k)! (k!)^2)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::funcalg::poly::Poly;
use crate::numeric::Rational;

/// `L_n` from the explicit sum.
pub fn laguerre(n: u64) -> Poly {
    // c_k = (-1)^k C(n, k) / k!, built incrementally
    let mut c = Rational::one();
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(c.clone());
    for k in 1..=n {
        c = -c * Rational::new(BigInt::from(n - k + 1), BigInt::from(k) * BigInt::from(k));
        out.push(c.clone());
    }
    Poly::new(out)
}

/// `L_0 .. L_n` from `(k+1) L_(k+1) = (2k+1-t) L_k - k L_(k-1)`.
pub fn laguerre_by_recurrence(n: u64) -> Vec<Poly> {
    let mut out = vec![Poly::one()];
    if n == 0 {
        return out;
    }
    out.push(Poly::from_i64s(&[1, -1]));
    for k in 1..n {
        let kk = k as i64;
        let a = out[k as usize].mul(&Poly::from_i64s(&[2 * kk + 1, -1]));
        let b = out[k as usize - 1].scale(&Rational::from_integer(kk.into()));
        let next = a
            .sub(&b)
            .scale(&Rational::new(BigInt::one(), BigInt::from(k + 1)));
        out.push(next);
    }
    out
}

/// `L_n(ct)`.
pub fn laguerre_scaled(n: u64, c: &Rational) -> Poly {
    if c.is_zero() {
        return Poly::one();
    }
    laguerre(n).scale_arg(c)
}
