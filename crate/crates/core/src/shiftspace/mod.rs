//! Weighted shifts on truncated `l1` / `l2` vectors with certified tails,
//! the `J` / `J*` intertwiners and the diagonal similarities.

pub mod diag;
pub mod ops;
pub mod vector;
pub mod weights;

pub use diag::{
    diag_similarity, operator_power_norm, thm2_diag, weight_condition_check, DiagonalMap,
    PowerNorm, WeightConditionReport, WeightThresholds, WeightVerdict,
};
pub use ops::{
    affine_power, backward_shift, forward_shift, inverse_affine_apply, j_apply, jstar, shift_power,
};
pub use vector::{Scalar, Space, TailedVector};
pub use weights::{WeightKind, WeightSeq};
