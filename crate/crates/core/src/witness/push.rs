//! Moving a certificate through intertwiners.
//!
//! A stage `J` with `J T_src = kappa T_dst J` turns a decay bound for
//! `(I + mu T_src)^(+-n) x` into one for `(I + mu kappa T_dst)^(+-n) J x`,
//! scaled by a bound on `||J||`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::Direction;
use crate::numeric::{Ball, Dyadic, Rational};
use crate::report::{rational_str, Status};
use crate::shiftspace::{backward_shift, thm2_diag, DiagonalMap, Space, TailedVector, WeightSeq};
use crate::witness::certificate::{strictly_decreasing, WitnessCertificate};

/// Dense square matrix with ball entries, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallMatrix {
    pub dim: usize,
    pub entries: Vec<Ball>,
}

impl BallMatrix {
    pub fn new(dim: usize, entries: Vec<Ball>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Precondition(format!(
                "matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(BallMatrix { dim, entries })
    }

    pub fn identity(dim: usize, prec: u32) -> Self {
        let mut entries = vec![Ball::zero(prec); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Ball::one(prec);
        }
        BallMatrix { dim, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &Ball {
        &self.entries[i * self.dim + j]
    }

    pub fn column(&self, j: usize) -> Vec<Ball> {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &BallMatrix) -> BallMatrix {
        let n = self.dim;
        let prec = self.entries.first().map_or(64, Ball::prec);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Ball::zero(prec);
                for k in 0..n {
                    s = s.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.push(s);
            }
        }
        BallMatrix { dim: n, entries: out }
    }

    pub fn transpose(&self) -> BallMatrix {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.get(j, i).clone());
            }
        }
        BallMatrix { dim: n, entries: out }
    }

    pub fn mul_vec(&self, v: &[Ball]) -> Vec<Ball> {
        let prec = v.first().map_or(64, Ball::prec);
        (0..self.dim)
            .map(|i| {
                (0..self.dim).fold(Ball::zero(prec), |s, k| s.add(&self.get(i, k).mul(&v[k])))
            })
            .collect()
    }

    /// `max |(M^T M - I)_ij|`, certified upper bound.
    pub fn orthonormality_residual(&self) -> Dyadic {
        let g = self.transpose().mul(self);
        let mut worst = Dyadic::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut e = g.get(i, j).clone();
                if i == j {
                    e = e.sub(&Ball::one(e.prec()));
                }
                worst = worst.max(e.abs().upper());
            }
        }
        worst
    }
}

/// `J T_a = T J` on `R^dim`, `J` with orthonormal columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixStage {
    pub tag: String,
    pub j: BallMatrix,
    pub t: BallMatrix,
    /// Source weights `a`, a backward shift on the coordinates.
    #[serde(skip)]
    pub source: WeightSeq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Identity,
    /// `D T_src = kappa T_dst D`.
    Diagonal {
        map: DiagonalMap,
        src: WeightSeq,
        dst: WeightSeq,
        kappa: Rational,
    },
    Matrix(MatrixStage),
}

impl Stage {
    /// `D = diag((-1)^n)`: `D T_w = -T_w D`.
    pub fn sign(w: &WeightSeq, n_max: usize) -> Self {
        let d: Vec<Rational> = (0..=n_max)
            .map(|n| if n % 2 == 0 { Rational::one() } else { -Rational::one() })
            .collect();
        Stage::Diagonal {
            map: DiagonalMap {
                tag: "sign".into(),
                d,
                sup: Rational::one(),
                isometric: true,
                verified: false,
            },
            src: w.clone(),
            dst: w.clone(),
            kappa: -Rational::one(),
        }
    }

    /// The diagonal `J` with `T J = c J S`, `S` the harmonic backward shift.
    pub fn thm2(w: &WeightSeq, c: &Rational, n_max: usize) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Precondition("c must be nonzero".into()));
        }
        Ok(Stage::Diagonal {
            map: thm2_diag(w, c, n_max)?,
            src: WeightSeq::harmonic(),
            dst: w.clone(),
            kappa: c.recip(),
        })
    }

    fn kind(&self) -> &'static str {
        match self {
            Stage::Identity => "identity",
            Stage::Diagonal { .. } => "diagonal",
            Stage::Matrix(_) => "matrix",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub kind: String,
    pub tag: String,
    /// Largest certified intertwining residual over the checked basis vectors.
    pub residual: Ball,
    /// Certified bound on `||J||`.
    pub norm_bound: Ball,
    /// The norm bound covers only the represented coordinates.
    pub truncated: bool,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushedCertificate {
    pub source_operator: String,
    pub target_operator: String,
    pub direction: Direction,
    #[serde(with = "rational_str")]
    pub target_coefficient: Rational,
    pub stages: Vec<StageReport>,
    pub norm_factor: Ball,
    pub n_values: Vec<u64>,
    pub source_bounds: Vec<Ball>,
    pub bounds: Vec<Ball>,
    pub decreasing: Status,
    pub status: Status,
}

/// Operator coefficient of the certificate: forward certificates cover
/// `I - |lambda| T`, inverse ones `(I + |lambda| T)^-1`, harmonic `T`.
pub fn certificate_coefficient(cert: &WitnessCertificate) -> Rational {
    let two_c = &cert.c * Rational::from_integer(2.into());
    match cert.direction {
        Direction::Forward => -two_c,
        Direction::Inverse => two_c,
    }
}

fn describe(mu: &Rational, t: &str, dir: Direction) -> String {
    let base = format!("I + ({}) {t}", crate::numeric::rational::to_string(mu));
    match dir {
        Direction::Forward => base,
        Direction::Inverse => format!("({base})^-1"),
    }
}

fn check_diagonal(map: &DiagonalMap, src: &WeightSeq, dst: &WeightSeq, kappa: &Rational) -> Result<bool> {
    // D T_src e_n = kappa T_dst D e_n on the represented prefix
    for n in 0..map.d.len() {
        let e = TailedVector::basis(Space::L1, n);
        let lhs = map.apply(&backward_shift(src, &e)?)?;
        let rhs = backward_shift(dst, &map.apply(&e)?)?;
        let l = lhs.exact_coords().expect("exact");
        let r: Vec<Rational> = rhs.exact_coords().expect("exact").iter().map(|x| x * kappa).collect();
        if l != r {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_matrix(m: &MatrixStage, prec: u32) -> Result<(Dyadic, Dyadic)> {
    let n = m.j.dim;
    let tj = m.t.mul(&m.j);
    let mut worst = Dyadic::zero();
    // J T_a e_k = a_k x_(k-1) against T x_k, for k < n - 1
    for k in 0..n.saturating_sub(1) {
        let want: Vec<Ball> = if k == 0 {
            vec![Ball::zero(prec); n]
        } else {
            let a = m.source.weight(k as u64)?;
            m.j.column(k - 1).iter().map(|x| x.mul_rational(&a)).collect()
        };
        for i in 0..n {
            worst = worst.max(tj.get(i, k).sub(&want[i]).abs().upper());
        }
    }
    Ok((worst, m.j.orthonormality_residual()))
}

/// Pushes `cert` through `stages` in order. Each stage's relation is
/// re-verified; the pushed bounds are the source bounds times the product
/// of the stage norm bounds.
pub fn push_witness(cert: &WitnessCertificate, stages: &[Stage], tol: &Rational, prec: u32) -> Result<PushedCertificate> {
    let mut current = WeightSeq::harmonic();
    let mut t_name = "T[harmonic]".to_string();
    let source_mu = certificate_coefficient(cert);
    let mut mu = source_mu.clone();
    let mut factor = Ball::one(prec);
    let mut reports = Vec::new();
    let mut status = Status::Pass;
    let tol_ball = Ball::from_rational(tol, prec);
    for stage in stages {
        let report = match stage {
            Stage::Identity => StageReport {
                kind: stage.kind().into(),
                tag: "identity".into(),
                residual: Ball::zero(prec),
                norm_bound: Ball::one(prec),
                truncated: false,
                status: Status::Pass,
            },
            Stage::Diagonal { map, src, dst, kappa } => {
                if *src != current {
                    return Err(Error::Precondition(format!(
                        "stage {} expects source weights {src}, certificate is on {current}",
                        map.tag
                    )));
                }
                let ok = check_diagonal(map, src, dst, kappa)?;
                mu *= kappa;
                current = dst.clone();
                t_name = format!("T[{dst}]");
                StageReport {
                    kind: stage.kind().into(),
                    tag: map.tag.clone(),
                    residual: Ball::zero(prec),
                    norm_bound: Ball::from_rational(&map.sup, prec),
                    truncated: !map.isometric,
                    status: Status::from_bool(ok),
                }
            }
            Stage::Matrix(m) => {
                if m.source != current {
                    return Err(Error::Precondition(format!(
                        "stage {} expects source weights {}, certificate is on {current}",
                        m.tag, m.source
                    )));
                }
                let (res, delta) = check_matrix(m, prec)?;
                // ||J||_2^2 = ||J^T J|| <= 1 + dim * delta
                let norm_bound = if delta.is_zero() {
                    Ball::one(prec)
                } else {
                    Ball::one(prec)
                        .add(&Ball::exact(delta, prec).mul(&Ball::from_i64(m.j.dim as i64, prec)))
                        .sqrt_nonneg()
                };
                let residual = Ball::exact(res, prec);
                let st = if residual.upper() <= tol_ball.lower() {
                    Status::Pass
                } else {
                    Status::Fail
                };
                t_name = format!("T[{}]", m.tag);
                StageReport {
                    kind: stage.kind().into(),
                    tag: m.tag.clone(),
                    residual,
                    norm_bound,
                    truncated: true,
                    status: st,
                }
            }
        };
        status = status.and(report.status);
        factor = factor.mul(&report.norm_bound);
        reports.push(report);
    }
    let unit = factor.is_exact() && *factor.mid() == Dyadic::one();
    let bounds: Vec<Ball> = if unit {
        cert.bounds.clone()
    } else {
        cert.bounds.iter().map(|b| factor.mul(b)).collect()
    };
    let decreasing = strictly_decreasing(&bounds);
    Ok(PushedCertificate {
        source_operator: describe(&source_mu, "T[harmonic]", cert.direction),
        target_operator: describe(&mu, &t_name, cert.direction),
        direction: cert.direction,
        target_coefficient: mu,
        stages: reports,
        norm_factor: factor,
        n_values: cert.n_values.clone(),
        source_bounds: cert.bounds.clone(),
        bounds,
        decreasing,
        status: status.and(decreasing),
    })
}

/// Bound on `||x||_2` from `||x||_1`, used when a matrix stage moves an
/// `l1` certificate into `l2`.
pub fn l1_dominates_l2(x: &[Rational]) -> bool {
    let l1: Rational = x.iter().map(|v| v.abs()).sum();
    let l2sq: Rational = x.iter().map(|v| v * v).sum();
    l2sq <= &l1 * &l1
}
