//! Blind inference of the finest pattern of mutual independence of a
//! Gaussian random vector.
//!
//! A pattern of mutual independence is a set partition of the variables.
//! Each of the `2^(n-1) - 1` two-block patterns is tested with a Gaussian
//! minimum discrimination information statistic, the p-values are corrected
//! for multiple comparisons, and the meet of the surviving bipartitions in
//! the partition lattice is the estimated finest pattern.
//!
//! ```
//! use mutindep::{datasets, infer_from_model, InferenceSettings};
//!
//! let outcome = infer_from_model(&datasets::hiv_model(), InferenceSettings::default()).unwrap();
//! assert_eq!(outcome.mu_hat.to_string(), "12356|4");
//! ```

pub mod correction;
pub mod datasets;
pub mod error;
pub mod inference;
pub mod lattice;
pub mod mdi;
pub mod numstats;
pub mod simulation;

pub use correction::{bh_fdr, bonferroni, Correction, CorrectionOutcome};
pub use error::{Error, Result};
pub use inference::{
    classify_against_truth, infer_from_data, infer_from_model, Confusion, InferenceOutcome,
    InferenceSettings,
};
pub use lattice::{format_partition, parse_partition, Bipartition, Partition};
pub use mdi::{test_bipartition, TestMode, TestResult};
pub use numstats::{CorrelationModel, DataMatrix, Matrix, RngStream};
