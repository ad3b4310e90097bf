//! Block schedules `n_k`, `b_k` with summable margins for an `l2` weight.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{Ball, Rational};
use crate::report::rational_str;
use crate::shiftspace::diag::ser_rationals;
use crate::shiftspace::WeightSeq;

/// How far past `n_k` the scheduler searches for `n_(k+1)`.
pub const PROBE_HORIZON: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockMargin {
    pub k: usize,
    pub n_k: u64,
    #[serde(with = "rational_str")]
    pub b_k: Rational,
    /// `b_k |a_(n_k)|` (zero for `k = 0`, where `a_0` does not exist).
    #[serde(with = "rational_str")]
    pub weighted: Rational,
    /// `sum_(j = n_k+1 ..= n_(k+1)) a_j^2`, exact; `None` for the open last
    /// block.
    #[serde(serialize_with = "ser_opt")]
    pub block_sq: Option<Rational>,
    /// Certified `sum_(j > n_k) a_j^2`.
    #[serde(with = "rational_str")]
    pub tail_sq: Rational,
}

fn ser_opt<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&crate::numeric::rational::to_string(r)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSchedule {
    pub weights: String,
    pub n_k: Vec<u64>,
    #[serde(serialize_with = "ser_rationals")]
    pub b_k: Vec<Rational>,
    pub margins: Vec<BlockMargin>,
    /// `sum_(k <= K) b_k |a_(n_k)|`.
    #[serde(with = "rational_str")]
    pub weighted_sum: Rational,
    /// `sum_(1 <= k <= K) 2^-k`, dominating the weighted sum.
    #[serde(with = "rational_str")]
    pub weighted_envelope: Rational,
    /// Enclosure of `sum_(1 <= k < K) (block_k)^(1/2)`; block 0 is reported
    /// separately since it only adds a finite constant.
    pub block_sum: Ball,
    pub block0: Option<Ball>,
    #[serde(with = "rational_str")]
    pub block_envelope: Rational,
    /// Both partial sums sit below their envelopes (exact comparison).
    pub margins_hold: bool,
}

/// Greedy schedule: `n_0 = 0`, `b_k = 3 + k`, and for `k >= 1`, `n_k` is the
/// least index with `n_k >= n_(k-1) + 2`, `b_k |a_(n_k)| <= 2^-k` and
/// `sum_(j > n_k) a_j^2 <= 4^-k`. Blocks `k >= 1` then have `l2` mass at
/// most `2^-k`.
pub fn su2_schedule(a: &WeightSeq, k_max: usize) -> Result<BlockSchedule> {
    let tail = |n: u64| {
        a.l2_tail_bound(n)
            .ok_or_else(|| Error::Precondition(format!("{a}: no certified l2 tail bound")))
    };
    // fail fast when the weight has no closed-form tail
    tail(1)?;
    su2_schedule_with(&a.to_string(), &|n| a.weight(n), &tail, k_max)
}

/// As [`su2_schedule`] with the weight and its squared tail supplied
/// directly (weights may vanish here).
pub fn su2_schedule_with(
    name: &str,
    a: &dyn Fn(u64) -> Result<Rational>,
    tail_sq: &dyn Fn(u64) -> Result<Rational>,
    k_max: usize,
) -> Result<BlockSchedule> {
    let mut n_k = vec![0u64];
    let mut b_k = vec![Rational::from_integer(3.into())];
    let mut pow2 = Rational::one();
    for k in 1..=k_max {
        pow2 /= Rational::from_integer(2.into());
        let pow4 = &pow2 * &pow2;
        let b = Rational::from_integer((3 + k as i64).into());
        let start = n_k[k - 1] + 2;
        let mut n = start;
        loop {
            if n - start > PROBE_HORIZON {
                return Err(Error::Precondition(format!(
                    "{name}: no admissible n_{k} within {PROBE_HORIZON} indices of {start}"
                )));
            }
            if &b * a(n)?.abs() <= pow2 && tail_sq(n)? <= pow4 {
                break;
            }
            n += 1;
        }
        n_k.push(n);
        b_k.push(b);
    }
    let prec = 128;
    let mut margins = Vec::with_capacity(n_k.len());
    let mut weighted_sum = Rational::zero();
    let mut weighted_envelope = Rational::zero();
    let mut block_sum = Ball::zero(prec);
    let mut block_envelope = Rational::zero();
    let mut block0 = None;
    let mut ok = true;
    let mut pow2 = Rational::one();
    for k in 0..n_k.len() {
        let weighted = if k == 0 {
            Rational::zero()
        } else {
            &b_k[k] * a(n_k[k])?.abs()
        };
        let block_sq = match n_k.get(k + 1) {
            Some(&hi) => {
                let mut s = Rational::zero();
                for j in n_k[k] + 1..=hi {
                    let x = a(j)?;
                    s += &x * &x;
                }
                Some(s)
            }
            None => None,
        };
        let t = if k == 0 { tail_sq(1).unwrap_or_else(|_| Rational::zero()) } else { tail_sq(n_k[k])? };
        if k >= 1 {
            weighted_sum += &weighted;
            weighted_envelope += &pow2;
            if let Some(s) = &block_sq {
                ok &= *s <= &pow2 * &pow2;
                block_sum = block_sum.add(&Ball::from_rational(s, prec).sqrt_nonneg());
                block_envelope += &pow2;
            }
        } else if let Some(s) = &block_sq {
            block0 = Some(Ball::from_rational(s, prec).sqrt_nonneg());
        }
        margins.push(BlockMargin {
            k,
            n_k: n_k[k],
            b_k: b_k[k].clone(),
            weighted,
            block_sq,
            tail_sq: t,
        });
        pow2 /= Rational::from_integer(2.into());
    }
    ok &= weighted_sum <= weighted_envelope;
    ok &= block_sum.upper().to_rational() <= block_envelope;
    Ok(BlockSchedule {
        weights: name.to_string(),
        n_k,
        b_k,
        margins,
        weighted_sum,
        weighted_envelope,
        block_sum,
        block0,
        block_envelope,
        margins_hold: ok,
    })
}

impl BlockSchedule {
    /// Number of blocks that start below `n`.
    pub fn blocks_below(&self, n: u64) -> usize {
        self.n_k.iter().filter(|&&x| x < n).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    #[test]
    fn harmonic_schedule() {
        let s = su2_schedule(&WeightSeq::harmonic(), 4).unwrap();
        // 4/n <= 1/2 and 1/n <= 1/4; 5/n <= 1/4; 1/n <= 1/64; 1/n <= 1/256
        assert_eq!(s.n_k, vec![0, 8, 20, 64, 256]);
        assert!(s.margins_hold);
        assert!(s.n_k.windows(2).all(|w| w[1] >= w[0] + 2));
        assert!(s.b_k.iter().all(|b| *b >= ratio(3, 1)));
    }

    #[test]
    fn geometric_schedule_is_roughly_linear() {
        let s = su2_schedule(&WeightSeq::geometric(ratio(1, 2)).unwrap(), 12).unwrap();
        assert!(s.margins_hold);
        for (k, &n) in s.n_k.iter().enumerate().skip(1) {
            assert!(n as usize >= k && (n as usize) <= 2 * k + 6, "k={k} n={n}");
        }
    }

    #[test]
    fn finitely_supported_weight() {
        let a = |n: u64| Ok(if n <= 5 { ratio(1, n as i64) } else { Rational::zero() });
        let tail = |n: u64| Ok((n + 1..=5).map(|j| ratio(1, (j * j) as i64)).sum());
        let s = su2_schedule_with("finite", &a, &tail, 6).unwrap();
        assert!(s.margins_hold);
        assert_eq!(s.n_k[1..].windows(2).filter(|w| w[1] == w[0] + 2).count(), s.n_k.len() - 2);
        assert_eq!(s.n_k[1], 6);
    }

    #[test]
    fn no_tail_bound() {
        assert!(su2_schedule(&WeightSeq::constant(ratio(1, 2)).unwrap(), 2).is_err());
    }
}
