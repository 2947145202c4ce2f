//! Tabular datasets with subject structure.
//!
//! Values are stored column-major: the selectors work one predictor at a time
//! and a contiguous column is what the distance kernels want.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math;
use crate::models::RowMatrix;

/// Binary class label: 1 is the positive class, 0 the negative one.
pub type Label = u8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    n: usize,
    p: usize,
    values: Vec<f64>,
    feature_names: Vec<String>,
    subject_ids: Vec<String>,
    response: Vec<Label>,
}

impl Dataset {
    /// Builds a dataset from column-major storage (`values.len() == n * p`).
    ///
    /// Rejects empty tables, non-finite values, non-binary labels and
    /// inconsistent lengths.
    pub fn from_column_major(
        n: usize,
        values: Vec<f64>,
        feature_names: Vec<String>,
        subject_ids: Vec<String>,
        response: Vec<Label>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let p = feature_names.len();
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                found: values.len(),
            });
        }
        if subject_ids.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: subject_ids.len(),
            });
        }
        if response.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: response.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos % n,
                column: pos / n,
            });
        }
        if let Some(&bad) = response.iter().find(|&&c| c > 1) {
            return Err(Error::NonBinaryLabel(bad));
        }
        Ok(Self {
            n,
            p,
            values,
            feature_names,
            subject_ids,
            response,
        })
    }

    pub fn from_columns(
        columns: Vec<Vec<f64>>,
        feature_names: Vec<String>,
        subject_ids: Vec<String>,
        response: Vec<Label>,
    ) -> Result<Self> {
        let n = response.len();
        if columns.len() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                found: columns.len(),
            });
        }
        let mut values = Vec::with_capacity(n * columns.len());
        for col in &columns {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: col.len(),
                });
            }
            values.extend_from_slice(col);
        }
        Self::from_column_major(n, values, feature_names, subject_ids, response)
    }

    pub fn n_observations(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn value(&self, row: usize, column: usize) -> f64 {
        self.values[column * self.n + row]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.p).map(move |j| self.column(j))
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn response(&self) -> &[Label] {
        &self.response
    }

    /// Distinct subjects in order of first appearance, each with the indices
    /// of its observations.
    pub fn subjects(&self) -> Vec<(String, Vec<usize>)> {
        let mut slot: BTreeMap<&str, usize> = BTreeMap::new();
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, id) in self.subject_ids.iter().enumerate() {
            let k = *slot.entry(id.as_str()).or_insert_with(|| {
                groups.push((id.clone(), Vec::new()));
                groups.len() - 1
            });
            groups[k].1.push(i);
        }
        groups
    }

    /// Copy restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let m = rows.len();
        let mut values = Vec::with_capacity(m * self.p);
        for j in 0..self.p {
            let col = self.column(j);
            values.extend(rows.iter().map(|&r| col[r]));
        }
        Dataset {
            n: m,
            p: self.p,
            values,
            feature_names: self.feature_names.clone(),
            subject_ids: rows.iter().map(|&r| self.subject_ids[r].clone()).collect(),
            response: rows.iter().map(|&r| self.response[r]).collect(),
        }
    }

    /// Copy restricted to the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Dataset> {
        let mut values = Vec::with_capacity(self.n * columns.len());
        let mut names = Vec::with_capacity(columns.len());
        for &j in columns {
            if j >= self.p {
                return Err(Error::InvalidK { k: j + 1, p: self.p });
            }
            values.extend_from_slice(self.column(j));
            names.push(self.feature_names[j].clone());
        }
        Ok(Dataset {
            n: self.n,
            p: columns.len(),
            values,
            feature_names: names,
            subject_ids: self.subject_ids.clone(),
            response: self.response.clone(),
        })
    }

    /// Row-major copy of the chosen columns, the layout the classifiers use.
    pub fn to_rows(&self, columns: &[usize]) -> RowMatrix {
        let d = columns.len();
        let mut data = alloc::vec![0.0; self.n * d];
        for (c, &j) in columns.iter().enumerate() {
            for (i, &v) in self.column(j).iter().enumerate() {
                data[i * d + c] = v;
            }
        }
        RowMatrix::new(self.n, d, data).expect("shape is consistent by construction")
    }

    /// Response as reals, for the distance kernels.
    pub fn response_f64(&self) -> Vec<f64> {
        self.response.iter().map(|&c| f64::from(c)).collect()
    }

    /// Copy with every feature value on the given rows multiplied by `factor`.
    /// Used by tests and diagnostics that perturb individual observations.
    pub fn scaled_rows(&self, rows: &[usize], factor: f64) -> Dataset {
        let mut out = self.clone();
        for j in 0..self.p {
            for &r in rows {
                out.values[j * self.n + r] *= factor;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ScalerKind {
    #[default]
    Standardize,
    PredictorNormalize,
    SampleNormalize,
}

/// Fitted per-feature transform. `center` and `scale` are empty for
/// [`ScalerKind::SampleNormalize`], which works row by row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalerParams {
    pub kind: ScalerKind,
    pub n_features: usize,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

impl ScalerParams {
    pub fn identity(n_features: usize) -> Self {
        Self {
            kind: ScalerKind::Standardize,
            n_features,
            center: alloc::vec![0.0; n_features],
            scale: alloc::vec![1.0; n_features],
        }
    }
}

// A spread this small relative to the column's magnitude is rounding noise.
fn guard_scale(spread: f64, magnitude: f64) -> f64 {
    if spread > 1e-12 * magnitude.max(1.0) {
        spread
    } else {
        1.0
    }
}

pub fn fit_scaler(train: &Dataset, kind: ScalerKind) -> ScalerParams {
    let p = train.n_features();
    let mut center = Vec::new();
    let mut scale = Vec::new();
    match kind {
        ScalerKind::Standardize => {
            let n = train.n_observations() as f64;
            for col in train.columns() {
                let mean = col.iter().sum::<f64>() / n;
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                center.push(mean);
                scale.push(guard_scale(math::sqrt(var), math::abs(mean)));
            }
        }
        ScalerKind::PredictorNormalize => {
            for col in train.columns() {
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                center.push(lo);
                scale.push(guard_scale(hi - lo, math::abs(lo).max(math::abs(hi))));
            }
        }
        ScalerKind::SampleNormalize => {}
    }
    ScalerParams {
        kind,
        n_features: p,
        center,
        scale,
    }
}

pub fn apply_scaler(data: &Dataset, params: &ScalerParams) -> Result<Dataset> {
    if data.n_features() != params.n_features {
        return Err(Error::DimensionMismatch {
            expected: params.n_features,
            found: data.n_features(),
        });
    }
    let mut out = data.clone();
    let n = data.n;
    match params.kind {
        ScalerKind::Standardize | ScalerKind::PredictorNormalize => {
            for j in 0..data.p {
                let (c, s) = (params.center[j], params.scale[j]);
                for v in &mut out.values[j * n..(j + 1) * n] {
                    *v = (*v - c) / s;
                }
            }
        }
        ScalerKind::SampleNormalize => {
            for i in 0..n {
                let norm = math::sqrt((0..data.p).map(|j| data.value(i, j) * data.value(i, j)).sum());
                if norm > 0.0 {
                    for j in 0..data.p {
                        out.values[j * n + i] /= norm;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One leave-one-subject-out split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub subject: String,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// One fold per subject, ordered by the subject's first appearance.
pub fn loso_folds(data: &Dataset) -> Result<Vec<Fold>> {
    let subjects = data.subjects();
    if subjects.len() < 2 {
        return Err(Error::TooFewSubjects(subjects.len()));
    }
    let n = data.n_observations();
    let folds = subjects
        .into_iter()
        .map(|(subject, test)| {
            let mut held = alloc::vec![false; n];
            for &i in &test {
                held[i] = true;
            }
            let train = (0..n).filter(|&i| !held[i]).collect();
            Fold {
                subject,
                train,
                test,
            }
        })
        .collect();
    Ok(folds)
}

/// Class-conditional mean shift, in noise standard deviations, applied to
/// the informative features of [`synth_generate`].
pub const SYNTH_SHIFT: f64 = 1.0;

/// Deterministic synthetic dataset with subjects in consecutive triples.
///
/// Half of the subjects (rounded down) are positive and the labels are
/// shuffled by the seeded generator. The first `n_informative` columns are
/// `N(0, 1) + SYNTH_SHIFT * label`, the rest are pure `N(0, 1)` noise.
pub fn synth_generate(n: usize, p: usize, n_informative: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: n,
        });
    }
    if n_informative == 0 || n_informative > p {
        return Err(Error::InvalidArgument(format!(
            "n_informative must be in 1..={p}, got {n_informative}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_subjects = n.div_ceil(3);
    let mut subject_labels: Vec<Label> = (0..n_subjects).map(|s| u8::from(s < n_subjects / 2)).collect();
    subject_labels.shuffle(&mut rng);

    let subject_ids: Vec<String> = (0..n).map(|i| format!("s{:04}", i / 3)).collect();
    let response: Vec<Label> = (0..n).map(|i| subject_labels[i / 3]).collect();

    let mut values = Vec::with_capacity(n * p);
    for j in 0..p {
        for &c in &response {
            let z: f64 = rng.sample(StandardNormal);
            let shift = if j < n_informative { SYNTH_SHIFT * f64::from(c) } else { 0.0 };
            values.push(z + shift);
        }
    }
    let names = (0..p)
        .map(|j| {
            if j < n_informative {
                format!("informative_{j}")
            } else {
                format!("noise_{j}")
            }
        })
        .collect();
    Dataset::from_column_major(n, values, names, subject_ids, response)
}
