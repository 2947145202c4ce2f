//! Feature screening and evaluation kernels.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation: the dataset model and its transforms, distance
//! correlation, the two feature selectors (distance-correlation screening
//! and mRMR), three native classifiers and the leave-one-subject-out
//! evaluation harness. Parallelism and wall-clock timing are injected through
//! the [`runtime::Runtime`] trait so a std host can supply thread pools and
//! clocks; [`runtime::Sequential`] is the in-crate default.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod dcorr;
pub mod error;
pub mod evaluation;
mod math;
pub mod models;
pub mod runtime;
pub mod selectors;

pub use dataset::{Dataset, Fold, Label, ScalerKind, ScalerParams};
pub use dcorr::{DistanceMatrix, Metric};
pub use error::{Error, Result};
pub use evaluation::{EvaluationReport, FoldResult, ShrinkResult, StabilityReport};
pub use models::{Classifier, ClassifierSpec, RowMatrix, TrainedModel};
pub use runtime::{Runtime, Sequential};
pub use selectors::{FeatureRanking, Method, Selector, SelectorConfig};
