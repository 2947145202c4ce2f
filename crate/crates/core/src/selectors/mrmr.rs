//! Minimum-redundancy maximum-relevance selection on discretized features.
//!
//! Mutual information is the plug-in estimate over empirical cell
//! frequencies, in bits. Continuous predictors are first cut into bins at
//! the training mean plus or minus `width_sigmas` standard deviations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{FeatureRanking, Method, Phase, RankEntry};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::math;
use crate::runtime::{elapsed, Runtime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MrmrVariant {
    /// Relevance minus mean redundancy.
    #[default]
    Mid,
    /// Relevance divided by mean redundancy.
    Miq,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinConfig {
    pub bins: u8,
    pub width_sigmas: f64,
}

impl Default for BinConfig {
    fn default() -> Self {
        Self {
            bins: 3,
            width_sigmas: 1.0,
        }
    }
}

pub const MAX_BINS: u8 = 16;

impl BinConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_BINS).contains(&self.bins) {
            return Err(Error::InvalidArgument(format!(
                "bins must be in 2..={MAX_BINS}, got {}",
                self.bins
            )));
        }
        if !(self.width_sigmas > 0.0 && self.width_sigmas.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bin width must be positive, got {}",
                self.width_sigmas
            )));
        }
        Ok(())
    }

    // Bin edges for a feature with the given mean and spread. With three
    // bins these are (mean - w*sd, mean + w*sd).
    fn edges(&self, mean: f64, sd: f64) -> Vec<f64> {
        let half = self.width_sigmas * sd;
        let b = usize::from(self.bins);
        if b == 2 {
            return vec![mean];
        }
        (0..b - 1)
            .map(|i| mean - half + 2.0 * half * i as f64 / (b - 2) as f64)
            .collect()
    }
}

// The lowest edge is inclusive from above, all others exclusive, so the
// middle bin of a three-way split is the closed interval [low, high].
fn code(v: f64, edges: &[f64]) -> u8 {
    let mut c = u8::from(v >= edges[0]);
    for &e in &edges[1..] {
        c += u8::from(v > e);
    }
    c
}

/// Integer-coded feature matrix plus the edges that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedMatrix {
    n: usize,
    p: usize,
    bins: u8,
    codes: Vec<u8>,
    edges: Vec<f64>,
}

impl DiscretizedMatrix {
    /// Wraps precomputed codes (column-major); edges are left empty.
    pub fn from_codes(n: usize, p: usize, bins: u8, codes: Vec<u8>) -> Result<Self> {
        if codes.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                found: codes.len(),
            });
        }
        if let Some(&c) = codes.iter().find(|&&c| c >= bins) {
            return Err(Error::InvalidArgument(format!("code {c} out of range for {bins} bins")));
        }
        Ok(Self {
            n,
            p,
            bins,
            codes,
            edges: Vec::new(),
        })
    }

    pub fn n_observations(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    pub fn bins(&self) -> u8 {
        self.bins
    }

    pub fn column(&self, j: usize) -> &[u8] {
        &self.codes[j * self.n..(j + 1) * self.n]
    }

    pub fn edges(&self, j: usize) -> &[f64] {
        let w = usize::from(self.bins) - 1;
        &self.edges[j * w..(j + 1) * w]
    }

    /// Outermost edges of feature `j`.
    pub fn thresholds(&self, j: usize) -> (f64, f64) {
        let e = self.edges(j);
        (e[0], e[e.len() - 1])
    }

    /// Codes another dataset with the edges fitted here.
    pub fn apply(&self, data: &Dataset) -> Result<DiscretizedMatrix> {
        if data.n_features() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: data.n_features(),
            });
        }
        if self.edges.is_empty() && self.p > 0 {
            return Err(Error::InvalidArgument("matrix was built from raw codes".into()));
        }
        let n = data.n_observations();
        let mut codes = Vec::with_capacity(n * self.p);
        for j in 0..self.p {
            let e = self.edges(j);
            codes.extend(data.column(j).iter().map(|&v| code(v, e)));
        }
        Ok(DiscretizedMatrix {
            n,
            p: self.p,
            bins: self.bins,
            codes,
            edges: self.edges.clone(),
        })
    }
}

/// Fits per-feature edges on `train` (population standard deviation) and
/// codes it.
pub fn discretize(train: &Dataset, config: BinConfig) -> Result<DiscretizedMatrix> {
    config.validate()?;
    let n = train.n_observations();
    let p = train.n_features();
    let nf = n as f64;
    let mut edges = Vec::with_capacity(p * (usize::from(config.bins) - 1));
    let mut codes = Vec::with_capacity(n * p);
    for col in train.columns() {
        let mean = col.iter().sum::<f64>() / nf;
        let sd = math::sqrt(col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf);
        let e = config.edges(mean, sd);
        codes.extend(col.iter().map(|&v| code(v, &e)));
        edges.extend(e);
    }
    Ok(DiscretizedMatrix {
        n,
        p,
        bins: config.bins,
        codes,
        edges,
    })
}

fn alphabet(a: &[u8]) -> usize {
    a.iter().copied().max().map_or(1, |m| usize::from(m) + 1)
}

// Plug-in MI for codes below `ka` and `kb`.
fn mi_with_alphabets(a: &[u8], b: &[u8], ka: usize, kb: usize) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut small = [0u32; 256];
    let mut large = Vec::new();
    let joint: &mut [u32] = if ka * kb <= small.len() {
        &mut small[..ka * kb]
    } else {
        large.resize(ka * kb, 0);
        &mut large
    };
    for (&x, &y) in a.iter().zip(b) {
        joint[usize::from(x) * kb + usize::from(y)] += 1;
    }
    let mut pa = [0u32; 256];
    let mut pb = [0u32; 256];
    for x in 0..ka {
        for y in 0..kb {
            let c = joint[x * kb + y];
            pa[x] += c;
            pb[y] += c;
        }
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let c = joint[x * kb + y];
            if c > 0 {
                let c = f64::from(c);
                mi += c / nf * math::log2(c * nf / (f64::from(pa[x]) * f64::from(pb[y])));
            }
        }
    }
    mi.max(0.0)
}

/// Mutual information of two discrete columns, in bits.
pub fn mutual_information(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(mi_with_alphabets(a, b, alphabet(a), alphabet(b)))
}

fn criterion(variant: MrmrVariant, relevance: f64, redundancy: f64) -> f64 {
    match variant {
        MrmrVariant::Mid => relevance - redundancy,
        MrmrVariant::Miq => {
            if redundancy > 0.0 {
                relevance / redundancy
            } else if relevance > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
    }
}

// Highest score wins, lowest index on ties.
fn argmax(scores: &[Option<f64>]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
            }
        }
    }
    best
}

/// Greedy forward mRMR selection of `k` features.
///
/// The first pick maximizes relevance `I(X_j; c)`. Each later step scores
/// every unselected candidate against the current set `S` with relevance
/// minus (or divided by) the mean of `I(X_j; X_i)` over `i ∈ S`,
/// recomputing the redundancy terms at every step, so step `t` costs `t`
/// mutual-information evaluations per candidate. Candidate scans go
/// through `rt`; the reduction is deterministic.
pub fn mrmr_select<R: Runtime>(
    matrix: &DiscretizedMatrix,
    response: &[Label],
    k: usize,
    variant: MrmrVariant,
    rt: &R,
) -> Result<FeatureRanking> {
    let p = matrix.p;
    if p == 0 {
        return Err(Error::NoFeatures);
    }
    if k > p {
        return Err(Error::InvalidK { k, p });
    }
    if response.len() != matrix.n {
        return Err(Error::DimensionMismatch {
            expected: matrix.n,
            found: response.len(),
        });
    }
    if matrix.n < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: matrix.n,
        });
    }
    let ka = usize::from(matrix.bins);
    let kc = alphabet(response);

    let start = rt.now();
    let relevance = rt.map(p, |j| mi_with_alphabets(matrix.column(j), response, ka, kc));
    let t_relevance = elapsed(rt, start);

    let start = rt.now();
    let mut chosen = vec![false; p];
    let mut entries: Vec<RankEntry> = Vec::with_capacity(k);
    while entries.len() < k {
        let selected: &[RankEntry] = &entries;
        let scores = rt.map(p, |j| {
            if chosen[j] {
                return None;
            }
            if selected.is_empty() {
                return Some(relevance[j]);
            }
            let col = matrix.column(j);
            let total: f64 = selected
                .iter()
                .map(|e| mi_with_alphabets(col, matrix.column(e.feature), ka, ka))
                .sum();
            Some(criterion(variant, relevance[j], total / selected.len() as f64))
        });
        let (feature, score) = argmax(&scores).expect("k <= p leaves a candidate");
        chosen[feature] = true;
        entries.push(RankEntry { feature, score });
    }
    let t_greedy = elapsed(rt, start);

    Ok(FeatureRanking {
        entries,
        method: match variant {
            MrmrVariant::Mid => Method::MrmrMid,
            MrmrVariant::Miq => Method::MrmrMiq,
        },
        k_requested: k,
        phases: vec![Phase::new("relevance", t_relevance), Phase::new("greedy", t_greedy)],
    })
}
