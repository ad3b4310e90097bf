//! The Volterra operator `Vf(t) = int_0^t f`, its adjoint, the exponential
//! conjugation `M_c f = e^(-ct) f`, and powers of `I -+ cV`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::funcalg::exppoly::{ExpPoly, Term};
use crate::funcalg::poly::Poly;
use crate::numeric::Rational;

/// Rate-0 degrees above this are refused.
pub const DEGREE_LIMIT: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Sign in `I - cV` (`Minus`) or `I + cV` (`Plus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Minus,
    Plus,
}

/// `Q` with `Q' + aQ = p`, so that `d/dt [Q e^(at)] = p e^(at)`. Needs `a != 0`.
fn exp_antiderivative(p: &Poly, a: &Rational) -> Poly {
    let Some(d) = p.degree() else {
        return Poly::zero();
    };
    let mut q = vec![Rational::zero(); d + 1];
    q[d] = p.coeff(d) / a;
    for k in (0..d).rev() {
        let next = &q[k + 1] * Rational::from_integer(BigInt::from(k + 1));
        q[k] = (p.coeff(k) - next) / a;
    }
    Poly::new(q)
}

/// `Vf`: the antiderivative of `f` vanishing at 0.
pub fn volterra_apply(f: &ExpPoly) -> ExpPoly {
    let mut out = Vec::with_capacity(f.terms().len() + 1);
    let mut constant = Rational::zero();
    for t in f.terms() {
        if t.rate.is_zero() {
            out.push(Term {
                rate: Rational::zero(),
                poly: t.poly.integrate(),
            });
        } else {
            let q = exp_antiderivative(&t.poly, &t.rate);
            constant -= q.coeff(0);
            out.push(Term {
                rate: t.rate.clone(),
                poly: q,
            });
        }
    }
    out.push(Term {
        rate: Rational::zero(),
        poly: Poly::constant(constant),
    });
    ExpPoly::new(out)
}

/// `V*f(t) = int_t^1 f`.
///
/// The total integral of `p e^(at)` is `Q(1) e^a - Q(0)`, which is
/// irrational unless `Q(1) = 0`; such inputs are rejected because the
/// result would leave the exact algebra.
pub fn volterra_star_apply(f: &ExpPoly) -> Result<ExpPoly> {
    let vf = volterra_apply(f);
    let mut total = Rational::zero();
    for t in vf.terms() {
        let at_one = t.poly.coeffs().iter().fold(Rational::zero(), |a, c| a + c);
        if t.rate.is_zero() {
            total += at_one;
        } else if !at_one.is_zero() {
            return Err(Error::Unsupported(format!(
                "V* of a rate-{} term has an irrational constant",
                t.rate
            )));
        }
    }
    Ok(ExpPoly::from(Poly::constant(total)).sub(&vf))
}

/// `M_c f = e^(-ct) f` (forward) or `M_c^-1 f = e^(ct) f` (inverse).
pub fn mc_conjugate(f: &ExpPoly, c: &Rational, direction: Direction) -> Result<ExpPoly> {
    if !c.is_positive() {
        return Err(Error::Precondition(format!("M_c needs c > 0, got {c}")));
    }
    Ok(match direction {
        Direction::Forward => f.shift_rates(&-c),
        Direction::Inverse => f.shift_rates(c),
    })
}

/// `(I + sV)^n` applied to a plain polynomial, in closed form:
/// `t^k -> sum_j C(n, j) s^j k!/(k+j)! t^(k+j)`.
fn affine_power_poly(p: &Poly, s: &Rational, n: u64) -> Result<Poly> {
    let Some(d) = p.degree() else {
        return Ok(Poly::zero());
    };
    let top = d + n as usize;
    if top > DEGREE_LIMIT {
        return Err(Error::DegreeGuard {
            degree: top,
            limit: DEGREE_LIMIT,
        });
    }
    let mut out = vec![Rational::zero(); top + 1];
    for (k, pk) in p.coeffs().iter().enumerate() {
        if pk.is_zero() {
            continue;
        }
        let mut term = pk.clone();
        out[k] += &term;
        for j in 0..n {
            let ratio = Rational::new(
                BigInt::from(n - j),
                BigInt::from(j + 1) * BigInt::from(k as u64 + j + 1),
            );
            term = term * s * ratio;
            out[k + j as usize + 1] += &term;
        }
    }
    Ok(Poly::new(out))
}

/// `(I + sV)^n f` for any exponential polynomial.
///
/// The polynomial part uses the closed form above. For `h = p e^(at)`,
/// `a != 0`, write `(I + sV)^n = I + k *` with the convolution kernel
/// `k(u) = sum_(j=1..n) C(n, j) s^j u^(j-1) / (j-1)!`; then
/// `k * (t^m e^(at)) = m! e^(at) V^(m+1)[k(u) e^(-au)]`.
fn affine_power(f: &ExpPoly, s: &Rational, n: u64) -> Result<ExpPoly> {
    let mut out = ExpPoly::from(affine_power_poly(&f.rate0(), s, n)?);
    if n == 0 {
        return Ok(out.add(&f.sub(&ExpPoly::from(f.rate0()))));
    }
    let rated: Vec<&Term> = f.terms().iter().filter(|t| !t.rate.is_zero()).collect();
    if rated.is_empty() {
        return Ok(out);
    }
    let kernel = convolution_kernel(s, n)?;
    for t in rated {
        out = out.add(&ExpPoly::term(t.rate.clone(), t.poly.clone()));
        let mut v = ExpPoly::term(-&t.rate, kernel.clone());
        let mut fact = Rational::one();
        for (m, pm) in t.poly.coeffs().iter().enumerate() {
            if m > 0 {
                fact *= Rational::from_integer(BigInt::from(m));
            }
            v = volterra_apply(&v);
            if !pm.is_zero() {
                out = out.add(&v.shift_rates(&t.rate).scale(&(pm * &fact)));
            }
        }
    }
    Ok(out)
}

fn convolution_kernel(s: &Rational, n: u64) -> Result<Poly> {
    if n as usize > DEGREE_LIMIT {
        return Err(Error::DegreeGuard {
            degree: n as usize,
            limit: DEGREE_LIMIT,
        });
    }
    // coefficient of u^(j-1) is C(n, j) s^j / (j-1)!
    let mut coef = Rational::from_integer(BigInt::from(n)) * s;
    let mut out = Vec::with_capacity(n as usize);
    out.push(coef.clone());
    for j in 1..n {
        coef = coef * s * Rational::new(BigInt::from(n - j), BigInt::from(j + 1) * BigInt::from(j));
        out.push(coef.clone());
    }
    Ok(Poly::new(out))
}

/// `(I - cV)^n f` or `(I + cV)^n f`, exactly.
pub fn power_affine_volterra(f: &ExpPoly, c: &Rational, n: u64, sign: Sign) -> Result<ExpPoly> {
    if !c.is_positive() {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    let s = match sign {
        Sign::Minus => -c,
        Sign::Plus => c.clone(),
    };
    affine_power(f, &s, n)
}

/// `(I + cV)^-n f = M_c (I - cV)^n M_c^-1 f`.
pub fn inv_power_i_plus_cv(f: &ExpPoly, c: &Rational, n: u64) -> Result<ExpPoly> {
    let g = mc_conjugate(f, c, Direction::Inverse)?;
    let g = power_affine_volterra(&g, c, n, Sign::Minus)?;
    mc_conjugate(&g, c, Direction::Forward)
}

/// `(I - cV)^-n f = M_c^-1 (I + cV)^n M_c f`.
pub fn inv_power_i_minus_cv(f: &ExpPoly, c: &Rational, n: u64) -> Result<ExpPoly> {
    let g = mc_conjugate(f, c, Direction::Forward)?;
    let g = power_affine_volterra(&g, c, n, Sign::Plus)?;
    mc_conjugate(&g, c, Direction::Inverse)
}

/// `(I + sV)^n f` by n explicit applications; the independent route used
/// to check the closed forms.
pub fn power_affine_iterated(f: &ExpPoly, s: &Rational, n: u64) -> ExpPoly {
    let mut g = f.clone();
    for _ in 0..n {
        g = g.add(&volterra_apply(&g).scale(s));
    }
    g
}

/// Polynomial `q(t) = sum_j j! p_j t^j`, so that `q(V) 1 = p`.
pub fn q_of_v_preimage(p: &Poly) -> Poly {
    let mut fact = Rational::one();
    let mut out = Vec::with_capacity(p.len());
    for (j, c) in p.coeffs().iter().enumerate() {
        if j > 0 {
            fact *= Rational::from_integer(BigInt::from(j));
        }
        out.push(c * &fact);
    }
    Poly::new(out)
}

/// `q(V) f` for a polynomial `q` (Horner in the operator `V`).
pub fn apply_poly_of_v(q: &Poly, f: &ExpPoly) -> ExpPoly {
    q.coeffs().iter().rev().fold(ExpPoly::zero(), |acc, c| {
        volterra_apply(&acc).add(&f.scale(c))
    })
}
