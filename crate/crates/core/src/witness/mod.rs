//! Orbit-decay certificates for `I + lambda T`, growth exponents, and the
//! two-sided orbit check.

pub mod certificate;
pub mod grid;
pub mod orbit;
pub mod push;
pub mod studies;

pub use certificate::{
    cross_validate, embedding_constant, forward_witness, inverse_witness, l2_norm,
    strictly_decreasing, CrossValidation, WitnessCertificate,
};
pub use grid::{geometric_grid, last_half, loglog_slope, parse_grid};
pub use orbit::{
    atzmon_check, kitai_negative_probe, nilpotency_index, orbit_norms, AtzmonReport,
    HypothesisPoint, NegativeProbeReport, OrbitReport, OrbitVerdict, ProbeResult, HYPOTHESIS_MAX_N,
};
pub use studies::{
    laguerre_decay_study, laguerre_identity_check, qn_default_threshold, qn_two_sided_check,
    LaguerreDecayReport, LaguerreIdentityReport, QnReport,
    SUP_MAX_DEPTH,
};
pub use push::{
    certificate_coefficient, push_witness, BallMatrix, MatrixStage, PushedCertificate, Stage, StageReport,
};
