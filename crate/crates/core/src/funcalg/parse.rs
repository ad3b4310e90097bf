//! Text syntax for exponential polynomials.
//!
//! A sum of signed terms; each term is a `*`-separated product of
//! rationals, `t`, `t^k` and `exp(a)` (meaning `e^(a t)`), e.g.
//! `t^2 - 1/3` or `2*t*exp(-1/2) + 1`. A leading `{` switches to the JSON
//! form `{"terms": [{"rate": "a/b", "coeffs": [...]}]}`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::funcalg::exppoly::ExpPoly;
use crate::funcalg::poly::Poly;
use crate::numeric::{rational, Rational};

pub fn parse_exppoly(src: &str) -> Result<ExpPoly> {
    let s = src.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Error::Parse(format!("function JSON: {e}")));
    }
    if s.is_empty() {
        return Err(Error::Parse("empty function".into()));
    }
    let mut out = ExpPoly::zero();
    for (sign, term) in split_terms(s)? {
        out = out.add(&parse_term(term, src)?.scale(&sign));
    }
    Ok(out)
}

/// Splits on top-level `+` / `-` (not inside parentheses, not after `^`).
fn split_terms(s: &str) -> Result<Vec<(Rational, &str)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = Rational::one();
    let mut prev_sig: Option<u8> = None;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && !matches!(prev_sig, Some(b'^' | b'*' | b'/')) => {
                let piece = s[start..i].trim();
                if !piece.is_empty() {
                    out.push((sign, piece));
                    sign = Rational::one();
                }
                if b == b'-' {
                    sign = -sign;
                }
                start = i + 1;
            }
            _ => {}
        }
        if !b.is_ascii_whitespace() {
            prev_sig = Some(b);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    let piece = s[start..].trim();
    if piece.is_empty() {
        return Err(Error::Parse(format!("trailing operator in {s:?}")));
    }
    out.push((sign, piece));
    Ok(out)
}

fn parse_term(term: &str, src: &str) -> Result<ExpPoly> {
    let mut coef = Rational::one();
    let mut degree = 0usize;
    let mut rate = Rational::zero();
    for factor in term.split('*') {
        let f = factor.trim();
        if f == "t" {
            degree += 1;
        } else if let Some(k) = f.strip_prefix("t^") {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {src:?}")))?;
            degree += k;
        } else if let Some(inner) = f.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
            rate += rational::parse(inner)?;
        } else {
            coef *= rational::parse(f)
                .map_err(|_| Error::Parse(format!("cannot read {f:?} in {src:?}")))?;
        }
    }
    Ok(ExpPoly::term(rate, Poly::monomial(degree, coef)))
}
