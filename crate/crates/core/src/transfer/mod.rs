//! Permutation and block-schedule combinatorics, and the Hilbert-space
//! realization of `T = T0 + T1 + T2` with its intertwiner `J`.

pub mod pipeline;
pub mod realization;
pub mod schedule;
pub mod seq;

pub use seq::{check_blocks, lemma_seq_bijection, prop1_domain, prop1_permutation, PermutationPlan, SeqRule};
pub use schedule::{su2_schedule, su2_schedule_with, BlockMargin, BlockSchedule, PROBE_HORIZON};
pub use realization::{build_transfer_realization, intertwining_tolerance, orthonormality_tolerance, BasisSeed, RealizationSummary, SNormCheck, TransferRealization};
pub use pipeline::{theorem1_pipeline, Theorem1Report, PIPELINE_GRID};
