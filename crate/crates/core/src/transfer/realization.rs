//! Finite realization of `T = T0 + T1 + T2` on `R^N` with an orthonormal
//! system `x_j` (columns of `Q`), `f_j = <., x_j>`, and `J e_j = x_j`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{Ball, Dyadic, Rational};
use crate::report::{rational_str, Status};
use crate::shiftspace::WeightSeq;
use crate::transfer::schedule::BlockSchedule;
use crate::witness::{BallMatrix, MatrixStage};

/// Source of the orthonormal system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisSeed {
    /// Gram-Schmidt of a ChaCha8 matrix seeded with the value.
    Seeded(u64),
    /// `Q = I`: `T` is the plain weighted shift and `J` the identity.
    Identity,
}

impl BasisSeed {
    pub fn seed(&self) -> Option<u64> {
        match self {
            BasisSeed::Seeded(s) => Some(*s),
            BasisSeed::Identity => None,
        }
    }
}

pub fn orthonormality_tolerance() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(10).pow(20))
}

pub fn intertwining_tolerance() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(10).pow(9))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SNormCheck {
    pub k: usize,
    /// `||S_k||^2 = max a_j^2` over `j = n_k+2 ..= n_(k+1)-1` (orthonormal case).
    #[serde(with = "rational_str")]
    pub norm_sq: Rational,
    /// `36 sum_(j = n_k+1 ..= n_(k+1)) a_j^2`.
    #[serde(with = "rational_str")]
    pub bound_sq: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationSummary {
    pub dim: usize,
    pub basis: BasisSeed,
    pub precision: u32,
    pub n_k: Vec<u64>,
    pub orthonormality_residual: Ball,
    pub tx0_residual: Ball,
    /// `max_n |T x_n - a_n x_(n-1)|` over `1 <= n < N`.
    pub shift_residual: Ball,
    /// `max |(T J - J T_a) e_n|` over `n < N - 1`.
    pub intertwining_residual: Ball,
    /// `max |T - Q T_a Q^T|`.
    pub assembly_residual: Ball,
    pub s_norms: Vec<SNormCheck>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRealization {
    pub weights: WeightSeq,
    pub a: Vec<Rational>,
    pub q: BallMatrix,
    pub t0: BallMatrix,
    pub t1: BallMatrix,
    pub t2: BallMatrix,
    pub t: BallMatrix,
    pub summary: RealizationSummary,
}

fn random_orthogonal(n: usize, seed: u64, prec: u32) -> Result<BallMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Ball>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Ball::exact(Dyadic::new(BigInt::from(rng.gen_range(-(1i64 << 30)..(1i64 << 30))), -30), prec))
                .collect()
        })
        .collect();
    // modified Gram-Schmidt
    for j in 0..n {
        for i in 0..j {
            let dot = cols[i].iter().zip(&cols[j]).fold(Ball::zero(prec), |s, (x, y)| s.add(&x.mul(y)));
            let qi = cols[i].clone();
            for (v, q) in cols[j].iter_mut().zip(&qi) {
                *v = v.sub(&dot.mul(q));
            }
        }
        let norm = cols[j].iter().fold(Ball::zero(prec), |s, x| s.add(&x.sqr())).sqrt()?;
        for v in cols[j].iter_mut() {
            *v = v.div(&norm)?;
        }
    }
    // exact midpoints; orthonormality is certified afterwards
    let mut entries = vec![Ball::zero(prec); n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            entries[i * n + j] = Ball::exact(v.mid().clone(), prec);
        }
    }
    BallMatrix::new(n, entries)
}

fn rank_one(q: &BallMatrix, coef: &Rational, col: usize, row: usize, acc: &mut [Ball], prec: u32) {
    // acc += coef x_col x_row^T
    let n = q.dim;
    let c = Ball::from_rational(coef, prec);
    for i in 0..n {
        let xi = q.get(i, col).mul(&c);
        for j in 0..n {
            acc[i * n + j] = acc[i * n + j].add(&xi.mul(q.get(j, row)));
        }
    }
}

fn max_abs(v: impl Iterator<Item = Ball>) -> Dyadic {
    v.map(|b| b.abs().upper()).fold(Dyadic::zero(), |a, b| a.max(b))
}

/// Builds the realization on `R^N`. The schedule must reach `N` so that
/// every index below `N` lies in a closed block, and at least three blocks
/// must start below `N`.
pub fn build_transfer_realization(
    weights: &WeightSeq,
    schedule: &BlockSchedule,
    n: usize,
    basis: BasisSeed,
    prec: u32,
) -> Result<TransferRealization> {
    let blocks = schedule.blocks_below(n as u64);
    if blocks < 3 {
        return Err(Error::Precondition(format!(
            "N = {n} covers {blocks} schedule block(s); at least 3 are needed (n_2 = {})",
            schedule.n_k.get(2).map_or("?".to_string(), |x| x.to_string())
        )));
    }
    let last = *schedule.n_k.last().expect("n_0");
    if (last as usize) < n {
        return Err(Error::Precondition(format!(
            "schedule ends at n_K = {last}; extend it past N = {n}"
        )));
    }
    let mut a = vec![Rational::zero()];
    for j in 1..n as u64 {
        a.push(weights.weight(j)?);
    }
    let q = match basis {
        BasisSeed::Seeded(s) => random_orthogonal(n, s, prec)?,
        BasisSeed::Identity => BallMatrix::identity(n, prec),
    };
    let zero = || vec![Ball::zero(prec); n * n];
    let (mut t0, mut t1, mut t2) = (zero(), zero(), zero());
    let n_k = &schedule.n_k;
    let mut s_norms = Vec::new();
    for k in 0..n_k.len() - 1 {
        let (lo, hi) = (n_k[k], n_k[k + 1]);
        // S_k: j = n_k+2 ..= n_(k+1)-1
        let mut norm_sq = Rational::zero();
        for j in lo + 2..hi {
            if (j as usize) < n {
                rank_one(&q, &a[j as usize], j as usize - 1, j as usize, &mut t0, prec);
            }
            let w = weights.weight(j)?;
            let sq = &w * &w;
            if sq > norm_sq {
                norm_sq = sq;
            }
        }
        if (lo as usize) < n {
            let block: Rational = (lo + 1..=hi)
                .map(|j| weights.weight(j).map(|w| &w * &w))
                .sum::<Result<Rational>>()?;
            let bound_sq = Rational::from_integer(36.into()) * block;
            s_norms.push(SNormCheck {
                k,
                holds: norm_sq <= bound_sq,
                norm_sq,
                bound_sq,
            });
        }
        // T1: k >= 1, j = n_k; T2: j = n_k + 1
        if k >= 1 && (lo as usize) < n {
            rank_one(&q, &a[lo as usize], lo as usize - 1, lo as usize, &mut t1, prec);
        }
        if ((lo + 1) as usize) < n {
            rank_one(&q, &a[lo as usize + 1], lo as usize, lo as usize + 1, &mut t2, prec);
        }
    }
    let t0 = BallMatrix::new(n, t0)?;
    let t1 = BallMatrix::new(n, t1)?;
    let t2 = BallMatrix::new(n, t2)?;
    let t_entries: Vec<Ball> = (0..n * n)
        .map(|i| t0.entries[i].add(&t1.entries[i]).add(&t2.entries[i]))
        .collect();
    let t = BallMatrix::new(n, t_entries)?;

    let mut ta = vec![Ball::zero(prec); n * n];
    for j in 1..n {
        ta[(j - 1) * n + j] = Ball::from_rational(&a[j], prec);
    }
    let ta = BallMatrix::new(n, ta)?;
    let tq = t.mul(&q);
    let qta = q.mul(&ta);
    let tx0 = max_abs((0..n).map(|i| tq.get(i, 0).clone()));
    let shift = max_abs((1..n).flat_map(|c| (0..n).map(move |i| (i, c))).map(|(i, c)| tq.get(i, c).sub(qta.get(i, c))));
    let inter = max_abs(
        (0..n.saturating_sub(1))
            .flat_map(|c| (0..n).map(move |i| (i, c)))
            .map(|(i, c)| tq.get(i, c).sub(qta.get(i, c))),
    );
    let assembled = qta.mul(&q.transpose());
    let assembly = max_abs((0..n * n).map(|i| t.entries[i].sub(&assembled.entries[i])));
    let orth = q.orthonormality_residual();

    let ot = Ball::from_rational(&orthonormality_tolerance(), prec);
    let it = Ball::from_rational(&intertwining_tolerance(), prec);
    let ok = orth <= ot.lower()
        && tx0 <= it.lower()
        && shift <= it.lower()
        && inter <= it.lower()
        && assembly <= it.lower()
        && s_norms.iter().all(|s| s.holds);
    let summary = RealizationSummary {
        dim: n,
        basis,
        precision: prec,
        n_k: n_k.clone(),
        orthonormality_residual: Ball::exact(orth, prec),
        tx0_residual: Ball::exact(tx0, prec),
        shift_residual: Ball::exact(shift, prec),
        intertwining_residual: Ball::exact(inter, prec),
        assembly_residual: Ball::exact(assembly, prec),
        s_norms,
        status: Status::from_bool(ok),
    };
    Ok(TransferRealization {
        weights: weights.clone(),
        a,
        q,
        t0,
        t1,
        t2,
        t,
        summary,
    })
}

impl TransferRealization {
    pub fn matrix_stage(&self) -> MatrixStage {
        let tag = match self.summary.basis {
            BasisSeed::Seeded(s) => format!("transfer(N={}, seed={s})", self.summary.dim),
            BasisSeed::Identity => format!("transfer(N={}, identity)", self.summary.dim),
        };
        MatrixStage {
            tag,
            j: self.q.clone(),
            t: self.t.clone(),
            source: self.weights.clone(),
        }
    }

    /// Writes `J`, `T0`, `T1`, `T2` and `T` as `row,col,mid,rad` CSV files.
    pub fn dump_csv(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let mut out = Vec::new();
        for (name, m) in [("J", &self.q), ("T0", &self.t0), ("T1", &self.t1), ("T2", &self.t2), ("T", &self.t)] {
            let mut s = String::from("row,col,mid,rad\n");
            for i in 0..m.dim {
                for j in 0..m.dim {
                    let b = m.get(i, j);
                    let _ = writeln!(s, "{i},{j},{:e},{:e}", b.mid().to_f64(), b.rad().to_f64());
                }
            }
            let p = dir.join(format!("{name}.csv"));
            std::fs::write(&p, s).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Is `|x| <= tol` for every entry?
pub fn all_small(m: &BallMatrix, tol: &Rational) -> bool {
    m.entries.iter().all(|b| b.abs().upper().to_rational() <= tol.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::schedule::su2_schedule;

    fn harmonic_schedule() -> BlockSchedule {
        su2_schedule(&WeightSeq::harmonic(), 3).unwrap()
    }

    #[test]
    fn seeded_n32() {
        let h = WeightSeq::harmonic();
        let r = build_transfer_realization(&h, &harmonic_schedule(), 32, BasisSeed::Seeded(0), 256).unwrap();
        let s = &r.summary;
        assert_eq!(s.status, Status::Pass);
        assert!(s.orthonormality_residual.upper().to_f64() <= 1e-20);
        assert!(s.intertwining_residual.upper().to_f64() <= 1e-9);
        assert!(s.s_norms.iter().all(|c| c.holds));
        // three-part split is exercised: every part is nonzero
        for m in [&r.t0, &r.t1, &r.t2] {
            assert!(!all_small(m, &Rational::zero()));
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let h = WeightSeq::harmonic();
        let s = harmonic_schedule();
        let a = build_transfer_realization(&h, &s, 24, BasisSeed::Seeded(7), 128).unwrap();
        let b = build_transfer_realization(&h, &s, 24, BasisSeed::Seeded(7), 128).unwrap();
        let c = build_transfer_realization(&h, &s, 24, BasisSeed::Seeded(8), 128).unwrap();
        assert_eq!(a.q, b.q);
        assert_ne!(a.q, c.q);
    }

    #[test]
    fn identity_sentinel_is_plain_shift() {
        let h = WeightSeq::harmonic();
        let r = build_transfer_realization(&h, &harmonic_schedule(), 32, BasisSeed::Identity, 128).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let want = if j == i + 1 { Rational::new(1.into(), BigInt::from(j)) } else { Rational::zero() };
                let got = r.t.get(i, j);
                assert!(got.contains_rational(&want) && got.rad().to_f64() < 1e-30, "({i},{j})");
            }
        }
        assert_eq!(r.summary.orthonormality_residual.upper(), Dyadic::zero());
    }

    #[test]
    fn too_few_blocks() {
        let h = WeightSeq::harmonic();
        let e = build_transfer_realization(&h, &harmonic_schedule(), 8, BasisSeed::Seeded(0), 64).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
        let short = su2_schedule(&h, 2).unwrap();
        assert!(build_transfer_realization(&h, &short, 32, BasisSeed::Seeded(0), 64).is_err());
    }

    #[test]
    fn csv_dump() {
        let h = WeightSeq::harmonic();
        let r = build_transfer_realization(&h, &harmonic_schedule(), 24, BasisSeed::Identity, 64).unwrap();
        let dir = std::env::temp_dir().join(format!("kitai-csv-{}", std::process::id()));
        let files = r.dump_csv(&dir).unwrap();
        assert_eq!(files.len(), 5);
        let text = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(text.lines().count(), 1 + 24 * 24);
        std::fs::remove_dir_all(dir).ok();
    }
}
