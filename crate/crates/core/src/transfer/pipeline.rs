//! End to end: harmonic weights, block schedule, realization, and the
//! harmonic-shift certificates pushed through `J` onto `I + T`.

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::ExpPoly;
use crate::numeric::Rational;
use crate::report::{Check, Status};
use crate::shiftspace::WeightSeq;
use crate::transfer::realization::{build_transfer_realization, intertwining_tolerance, BasisSeed, RealizationSummary, TransferRealization};
use crate::transfer::schedule::{su2_schedule, BlockSchedule};
use crate::witness::{forward_witness, inverse_witness, push_witness, PushedCertificate, Stage};

pub const PIPELINE_GRID: [u64; 3] = [10, 100, 1000];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub x_dim: usize,
    pub basis: BasisSeed,
    pub precision: u32,
    pub schedule: BlockSchedule,
    pub realization: RealizationSummary,
    pub forward: PushedCertificate,
    pub inverse: PushedCertificate,
    pub checks: Vec<Check>,
    pub status: Status,
    #[serde(skip)]
    pub matrices: TransferRealization,
}

/// Smallest `K` whose schedule reaches `n`.
fn schedule_reaching(a: &WeightSeq, n: usize) -> Result<BlockSchedule> {
    let mut k = 2;
    loop {
        let s = su2_schedule(a, k)?;
        if *s.n_k.last().expect("n_0") as usize >= n {
            return Ok(s);
        }
        k += 1;
    }
}

pub fn theorem1_pipeline(x_dim: usize, basis: BasisSeed, prec: u32) -> Result<Theorem1Report> {
    let a = WeightSeq::harmonic();
    let schedule = schedule_reaching(&a, x_dim)?;
    if schedule.blocks_below(x_dim as u64) < 3 {
        return Err(Error::Precondition(format!(
            "X_dim = {x_dim} covers {} schedule block(s) of {:?}; at least 3 are needed",
            schedule.blocks_below(x_dim as u64),
            schedule.n_k
        )));
    }
    let real = build_transfer_realization(&a, &schedule, x_dim, basis, prec)?;
    let stage = Stage::Matrix(real.matrix_stage());
    let one = Rational::one();
    let f = ExpPoly::one();
    let fw = forward_witness(&f, &one, &PIPELINE_GRID, prec)?;
    let inv = inverse_witness(&f, &one, &PIPELINE_GRID, prec)?;
    let tol = intertwining_tolerance();
    let forward = push_witness(&fw, &[Stage::sign(&a, x_dim - 1), stage.clone()], &tol, prec)?;
    let inverse = push_witness(&inv, &[stage], &tol, prec)?;

    let s = &real.summary;
    let mut checks = vec![
        Check::new("schedule margins", Status::from_bool(schedule.margins_hold), format!("n_k = {:?}", schedule.n_k)),
        Check::new(
            "orthonormality",
            Status::from_bool(s.orthonormality_residual.upper().to_f64() <= 1e-20),
            format!("residual <= {:e}", s.orthonormality_residual.upper().to_f64()),
        ),
        Check::new(
            "intertwining",
            Status::from_bool(s.intertwining_residual.upper().to_rational() <= tol),
            format!("max |(T J - J T_a) e_n| <= {:e}", s.intertwining_residual.upper().to_f64()),
        ),
        Check::new(
            "block norms",
            Status::from_bool(s.s_norms.iter().all(|c| c.holds)),
            format!("{} blocks with ||S_k||^2 <= 36 block_sq", s.s_norms.len()),
        ),
        Check::new("realization", s.status, "T x_0, T x_n, assembly residuals"),
    ];
    for (name, p) in [("forward push", &forward), ("inverse push", &inverse)] {
        checks.push(Check::new(
            name,
            p.status,
            format!("{} -> {}, factor {:e}", p.source_operator, p.target_operator, p.norm_factor.upper().to_f64()),
        ));
    }
    let status = checks.iter().fold(Status::Pass, |acc, c| acc.and(c.status));
    Ok(Theorem1Report {
        x_dim,
        basis,
        precision: prec,
        schedule,
        realization: real.summary.clone(),
        forward,
        inverse,
        checks,
        status,
        matrices: real,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim32_seed0() {
        let r = theorem1_pipeline(32, BasisSeed::Seeded(0), 256).unwrap();
        for c in &r.checks {
            assert_eq!(c.status, Status::Pass, "{}: {}", c.name, c.detail);
        }
        assert_eq!(r.forward.target_coefficient, Rational::one());
        assert_eq!(r.inverse.target_coefficient, Rational::one());
        assert_eq!(r.forward.decreasing, Status::Pass);
        assert_eq!(r.inverse.decreasing, Status::Pass);
    }

    #[test]
    fn dim8_too_small() {
        let e = theorem1_pipeline(8, BasisSeed::Seeded(0), 128).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)), "{e}");
    }

    #[test]
    fn identity_keeps_bounds() {
        let r = theorem1_pipeline(24, BasisSeed::Identity, 128).unwrap();
        assert_eq!(r.forward.bounds, r.forward.source_bounds);
        assert_eq!(r.inverse.bounds, r.inverse.source_bounds);
    }
}
