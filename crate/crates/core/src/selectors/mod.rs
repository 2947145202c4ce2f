//! Feature selectors.
//!
//! Both selectors produce a [`FeatureRanking`]. Distance-correlation
//! screening always ranks every feature (its cost does not depend on `k`);
//! mRMR stops after `k` greedy steps.

mod dcsis;
mod mrmr;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use dcsis::{dcsis_rank, dcsis_select};
pub use mrmr::{discretize, mrmr_select, mutual_information, BinConfig, DiscretizedMatrix, MrmrVariant};

use crate::dataset::Dataset;
use crate::dcorr::Metric;
use crate::error::Result;
use crate::runtime::Runtime;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Dcsis,
    MrmrMid,
    MrmrMiq,
    /// A selector supplied from outside the crate.
    Custom(String),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dcsis => f.write_str("dcsis"),
            Method::MrmrMid => f.write_str("mrmr-mid"),
            Method::MrmrMiq => f.write_str("mrmr-miq"),
            Method::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankEntry {
    pub feature: usize,
    pub score: f64,
}

/// Named wall-clock segment of a selector run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

impl Phase {
    pub(crate) fn new(name: &str, seconds: f64) -> Self {
        Self {
            name: String::from(name),
            seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureRanking {
    pub entries: Vec<RankEntry>,
    pub method: Method,
    pub k_requested: usize,
    pub phases: Vec<Phase>,
}

impl FeatureRanking {
    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.feature).collect()
    }

    /// First `k` feature indices.
    pub fn top(&self, k: usize) -> Result<Vec<usize>> {
        if k > self.entries.len() {
            return Err(crate::Error::InvalidK {
                k,
                p: self.entries.len(),
            });
        }
        Ok(self.entries[..k].iter().map(|e| e.feature).collect())
    }

    pub fn total_seconds(&self) -> f64 {
        self.phases.iter().map(|p| p.seconds).sum()
    }
}

/// Anything that ranks the features of a training set.
///
/// The returned ranking must contain at least `k` entries. Implementations
/// see only the rows they are given; the evaluation harness relies on that
/// to keep held-out observations out of selection.
pub trait Selector: Sync {
    fn rank<R: Runtime>(&self, train: &Dataset, k: usize, rt: &R) -> Result<FeatureRanking>;

    fn method(&self) -> Method;
}

/// The built-in selectors.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SelectorConfig {
    Dcsis { metric: Metric },
    Mrmr { variant: MrmrVariant, bins: BinConfig },
}

impl SelectorConfig {
    pub fn dcsis() -> Self {
        SelectorConfig::Dcsis {
            metric: Metric::Euclidean,
        }
    }

    pub fn mrmr(variant: MrmrVariant) -> Self {
        SelectorConfig::Mrmr {
            variant,
            bins: BinConfig::default(),
        }
    }
}

impl Selector for SelectorConfig {
    fn rank<R: Runtime>(&self, train: &Dataset, k: usize, rt: &R) -> Result<FeatureRanking> {
        match *self {
            SelectorConfig::Dcsis { metric } => {
                let mut ranking = dcsis_rank(train, metric, rt)?;
                if k > ranking.entries.len() {
                    return Err(crate::Error::InvalidK {
                        k,
                        p: ranking.entries.len(),
                    });
                }
                ranking.k_requested = k;
                Ok(ranking)
            }
            SelectorConfig::Mrmr { variant, bins } => {
                let start = rt.now();
                let codes = discretize(train, bins)?;
                let discretize_time = crate::runtime::elapsed(rt, start);
                let mut ranking = mrmr_select(&codes, train.response(), k, variant, rt)?;
                ranking.phases.insert(0, Phase::new("discretize", discretize_time));
                Ok(ranking)
            }
        }
    }

    fn method(&self) -> Method {
        match self {
            SelectorConfig::Dcsis { .. } => Method::Dcsis,
            SelectorConfig::Mrmr {
                variant: MrmrVariant::Mid,
                ..
            } => Method::MrmrMid,
            SelectorConfig::Mrmr {
                variant: MrmrVariant::Miq,
                ..
            } => Method::MrmrMiq,
        }
    }
}
