//! Leave-one-subject-out evaluation.
//!
//! Every fold fits its scaler, selector and classifier on the training
//! subjects only; the held-out subject's rows are transformed with the
//! training parameters and never reach a fitting routine. Predictions for a
//! subject are majority-voted and broadcast to all of its observations.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{apply_scaler, fit_scaler, loso_folds, Dataset, Fold, Label, ScalerKind, ScalerParams};
use crate::error::{Error, Result};
use crate::math;
use crate::models::Classifier;
use crate::runtime::{elapsed, Runtime};
use crate::selectors::{FeatureRanking, Phase, Selector};

/// Modal label broadcast to every entry; an even split goes positive.
pub fn majority_vote(predictions: &[Label]) -> Result<Vec<Label>> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pos = predictions.iter().filter(|&&c| c == 1).count();
    let label = u8::from(2 * pos >= predictions.len());
    Ok(vec![label; predictions.len()])
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub accuracy: f64,
    pub f1: f64,
    pub mcc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Confusion {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: u64,
}

impl Confusion {
    pub fn from_labels(y_true: &[Label], y_pred: &[Label]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::DimensionMismatch {
                expected: y_true.len(),
                found: y_pred.len(),
            });
        }
        if y_true.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut c = Confusion::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t, p) {
                (1, 1) => c.tp += 1,
                (0, 0) => c.tn += 1,
                (0, 1) => c.fp += 1,
                (1, 0) => c.fn_ += 1,
                _ => return Err(Error::NonBinaryLabel(t.max(p))),
            }
        }
        Ok(c)
    }

    pub fn metrics(&self) -> Metrics {
        let (tp, tn, fp, fn_) = (self.tp as f64, self.tn as f64, self.fp as f64, self.fn_ as f64);
        let total = tp + tn + fp + fn_;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
        let mcc = if factors.iter().any(|&f| f == 0.0) {
            0.0
        } else {
            (tp * tn - fp * fn_) / math::sqrt(factors.iter().product())
        };
        Metrics {
            accuracy: (tp + tn) / total,
            f1,
            mcc,
        }
    }
}

/// Accuracy, F1 (positive class 1) and Matthews correlation.
pub fn metrics(y_true: &[Label], y_pred: &[Label]) -> Result<Metrics> {
    Ok(Confusion::from_labels(y_true, y_pred)?.metrics())
}

/// Jackknife standard error `sqrt((n-1)/n Σ (θ_i - θ̄)²)` of leave-one-out
/// replicates `θ_i`.
pub fn jackknife_se(replicates: &[f64]) -> Result<f64> {
    let n = replicates.len();
    if n < 2 {
        return Err(Error::TooFewFolds(n));
    }
    let nf = n as f64;
    let mean = replicates.iter().sum::<f64>() / nf;
    let ss: f64 = replicates.iter().map(|t| (t - mean) * (t - mean)).sum();
    Ok(math::sqrt((nf - 1.0) / nf * ss))
}

/// Pooled accuracy with subject `i` removed, for every subject, given each
/// subject's correct and total observation counts.
pub fn leave_one_out_accuracies(correct: &[usize], totals: &[usize]) -> Vec<f64> {
    let c: usize = correct.iter().sum();
    let t: usize = totals.iter().sum();
    correct
        .iter()
        .zip(totals)
        .map(|(&ci, &ti)| {
            let rest = t - ti;
            if rest == 0 {
                0.0
            } else {
                (c - ci) as f64 / rest as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldResult {
    pub subject_id: String,
    pub test_indices: Vec<usize>,
    pub selected_features: Vec<usize>,
    /// Classifier output before the per-subject vote.
    pub raw_predictions: Vec<Label>,
    pub per_observation_predictions: Vec<Label>,
    pub true_labels: Vec<Label>,
    pub selection_time: f64,
    pub selection_phases: Vec<Phase>,
    pub train_time: f64,
}

impl FoldResult {
    pub fn correct(&self) -> usize {
        self.per_observation_predictions
            .iter()
            .zip(&self.true_labels)
            .filter(|(p, t)| p == t)
            .count()
    }

    /// Fraction of this subject's observations predicted correctly.
    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.true_labels.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationReport {
    pub method: String,
    pub classifier: String,
    pub k: usize,
    pub scaler: ScalerKind,
    pub n_observations: usize,
    pub n_subjects: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub mcc: f64,
    pub accuracy_se: f64,
    pub confusion: Confusion,
    pub per_fold: Vec<FoldResult>,
    pub notes: Vec<String>,
}

impl EvaluationReport {
    pub fn selection_seconds(&self) -> f64 {
        self.per_fold.iter().map(|f| f.selection_time).sum()
    }
}

/// One fold after scaling and selection, before any classifier is trained.
#[derive(Debug, Clone)]
pub struct PreparedFold {
    pub fold: Fold,
    pub scaler: ScalerParams,
    pub train: Dataset,
    pub test: Dataset,
    pub ranking: FeatureRanking,
    pub selection_time: f64,
}

/// Fits the scaler on the fold's training rows, transforms both sides, and
/// ranks features on the transformed training rows.
pub fn prepare_fold<S: Selector, R: Runtime>(
    data: &Dataset,
    fold: &Fold,
    selector: &S,
    k: usize,
    scaler: ScalerKind,
    rt: &R,
) -> Result<PreparedFold> {
    let raw_train = data.select_rows(&fold.train);
    let params = fit_scaler(&raw_train, scaler);
    let train = apply_scaler(&raw_train, &params)?;
    let test = apply_scaler(&data.select_rows(&fold.test), &params)?;
    let start = rt.now();
    let ranking = selector.rank(&train, k, rt)?;
    let selection_time = elapsed(rt, start);
    if ranking.entries.len() < k {
        return Err(Error::InvalidK {
            k,
            p: ranking.entries.len(),
        });
    }
    Ok(PreparedFold {
        fold: fold.clone(),
        scaler: params,
        train,
        test,
        ranking,
        selection_time,
    })
}

fn fit_and_predict<R: Runtime>(
    prepared: &PreparedFold,
    k: usize,
    classifier: &dyn Classifier,
    rt: &R,
) -> Result<FoldResult> {
    let selected = prepared.ranking.top(k)?;
    let start = rt.now();
    let model = classifier.fit(&prepared.train.to_rows(&selected), prepared.train.response())?;
    let raw = model.predict(&prepared.test.to_rows(&selected))?;
    let train_time = elapsed(rt, start);
    if raw.len() != prepared.fold.test.len() {
        return Err(Error::DimensionMismatch {
            expected: prepared.fold.test.len(),
            found: raw.len(),
        });
    }
    let voted = majority_vote(&raw)?;
    Ok(FoldResult {
        subject_id: prepared.fold.subject.clone(),
        test_indices: prepared.fold.test.clone(),
        selected_features: selected,
        raw_predictions: raw,
        per_observation_predictions: voted,
        true_labels: prepared.test.response().to_vec(),
        selection_time: prepared.selection_time,
        selection_phases: prepared.ranking.phases.clone(),
        train_time,
    })
}

fn check_k(k: usize, p: usize) -> Result<()> {
    if k == 0 || k > p {
        return Err(Error::InvalidK { k, p });
    }
    Ok(())
}

// Runs every fold once and evaluates the classifier on each requested
// prefix size of that fold's ranking. Result is indexed [size][fold].
fn run_folds<S: Selector, R: Runtime>(
    data: &Dataset,
    selector: &S,
    sizes: &[usize],
    classifier: &dyn Classifier,
    scaler: ScalerKind,
    rt: &R,
) -> Result<Vec<Vec<FoldResult>>> {
    let k_max = sizes.iter().copied().max().unwrap_or(0);
    for &k in sizes {
        check_k(k, data.n_features())?;
    }
    let folds = loso_folds(data)?;
    let per_fold = rt
        .map(folds.len(), |i| -> Result<Vec<FoldResult>> {
            let prepared = prepare_fold(data, &folds[i], selector, k_max, scaler, rt)?;
            sizes.iter().map(|&k| fit_and_predict(&prepared, k, classifier, rt)).collect()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut by_size: Vec<Vec<FoldResult>> = sizes.iter().map(|_| Vec::with_capacity(folds.len())).collect();
    for fold in per_fold {
        for (slot, result) in by_size.iter_mut().zip(fold) {
            slot.push(result);
        }
    }
    Ok(by_size)
}

fn assemble(
    data: &Dataset,
    method: String,
    classifier: String,
    k: usize,
    scaler: ScalerKind,
    per_fold: Vec<FoldResult>,
) -> Result<EvaluationReport> {
    let mut y_true = Vec::with_capacity(data.n_observations());
    let mut y_pred = Vec::with_capacity(data.n_observations());
    for f in &per_fold {
        y_true.extend_from_slice(&f.true_labels);
        y_pred.extend_from_slice(&f.per_observation_predictions);
    }
    let confusion = Confusion::from_labels(&y_true, &y_pred)?;
    let m = confusion.metrics();
    let correct: Vec<usize> = per_fold.iter().map(FoldResult::correct).collect();
    let totals: Vec<usize> = per_fold.iter().map(|f| f.true_labels.len()).collect();
    let accuracy_se = jackknife_se(&leave_one_out_accuracies(&correct, &totals))?;
    Ok(EvaluationReport {
        method,
        classifier,
        k,
        scaler,
        n_observations: y_true.len(),
        n_subjects: per_fold.len(),
        accuracy: m.accuracy,
        f1: m.f1,
        mcc: m.mcc,
        accuracy_se,
        confusion,
        per_fold,
        notes: vec![
            String::from("hyperparameters are fixed for the run; no per-fold tuning"),
            String::from("metrics pool per-observation predictions after the per-subject majority vote"),
            String::from("accuracy_se is the leave-one-subject-out jackknife standard error"),
        ],
    })
}

/// Leave-one-subject-out evaluation of `selector` + `classifier` at size `k`.
pub fn loso_evaluate<S: Selector, R: Runtime>(
    data: &Dataset,
    selector: &S,
    k: usize,
    classifier: &dyn Classifier,
    scaler: ScalerKind,
    rt: &R,
) -> Result<EvaluationReport> {
    let per_fold = run_folds(data, selector, &[k], classifier, scaler, rt)?
        .pop()
        .expect("one size requested");
    assemble(data, selector.method().to_string(), classifier.name(), k, scaler, per_fold)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub k: usize,
    pub accuracy: f64,
    pub accuracy_se: f64,
    pub f1: f64,
    pub mcc: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShrinkResult {
    pub k_star: usize,
    pub k_max: usize,
    /// `accuracy(k_max) - se(k_max)`.
    pub threshold: f64,
    pub curve: Vec<CurvePoint>,
    pub reference: EvaluationReport,
    pub shrunk: EvaluationReport,
}

/// Smallest model size whose accuracy is at most one standard error below
/// the size-`k_max` model. Each fold ranks features once and every size
/// reuses a prefix of that ranking.
pub fn shrink_scan<S: Selector, R: Runtime>(
    data: &Dataset,
    selector: &S,
    classifier: &dyn Classifier,
    scaler: ScalerKind,
    k_max: usize,
    rt: &R,
) -> Result<ShrinkResult> {
    let sizes: Vec<usize> = (1..=k_max).collect();
    let runs = run_folds(data, selector, &sizes, classifier, scaler, rt)?;
    let method = selector.method().to_string();
    let name = classifier.name();
    let mut reports = runs
        .into_iter()
        .zip(&sizes)
        .map(|(folds, &k)| assemble(data, method.clone(), name.clone(), k, scaler, folds))
        .collect::<Result<Vec<_>>>()?;
    let curve: Vec<CurvePoint> = reports
        .iter()
        .map(|r| CurvePoint {
            k: r.k,
            accuracy: r.accuracy,
            accuracy_se: r.accuracy_se,
            f1: r.f1,
            mcc: r.mcc,
        })
        .collect();
    let reference = reports.pop().expect("k_max >= 1");
    let threshold = reference.accuracy - reference.accuracy_se;
    let k_star = curve
        .iter()
        .find(|c| c.accuracy >= threshold)
        .map_or(k_max, |c| c.k);
    let shrunk = if k_star == k_max {
        reference.clone()
    } else {
        reports.swap_remove(k_star - 1)
    };
    Ok(ShrinkResult {
        k_star,
        k_max,
        threshold,
        curve,
        reference,
        shrunk,
    })
}

/// Each fold's top-`k` features, in fold order.
pub fn fold_selections<S: Selector, R: Runtime>(
    data: &Dataset,
    selector: &S,
    k: usize,
    scaler: ScalerKind,
    rt: &R,
) -> Result<Vec<Vec<usize>>> {
    check_k(k, data.n_features())?;
    let folds = loso_folds(data)?;
    rt.map(folds.len(), |i| prepare_fold(data, &folds[i], selector, k, scaler, rt)?.ranking.top(k))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureProbability {
    pub feature: usize,
    pub folds_selected: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityReport {
    pub folds: usize,
    pub k: usize,
    /// Mean over fold pairs of `|S_i ∩ S_j| / k` for the first method.
    pub within_a: f64,
    pub within_b: f64,
    /// Mean over folds of `|S_i^A ∩ S_i^B| / k`.
    pub between: f64,
    pub probabilities_a: Vec<FeatureProbability>,
    pub probabilities_b: Vec<FeatureProbability>,
    pub always_a: Vec<usize>,
    pub always_b: Vec<usize>,
    /// Features selected in every fold by both methods, ascending.
    pub always_both: Vec<usize>,
}

fn selection_size(sets: &[Vec<usize>]) -> Result<usize> {
    let k = sets.first().map_or(0, Vec::len);
    if k == 0 || sets.iter().any(|s| s.len() != k) {
        return Err(Error::InvalidArgument("selections must be non-empty and of equal size".into()));
    }
    for s in sets {
        let mut sorted = s.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("selection contains a duplicate feature".into()));
        }
    }
    Ok(k)
}

fn membership(set: &[usize], p: usize) -> Vec<bool> {
    let mut m = vec![false; p];
    for &f in set {
        m[f] = true;
    }
    m
}

fn overlap(a: &[usize], b_members: &[bool]) -> usize {
    a.iter().filter(|&&f| b_members[f]).count()
}

fn within(sets: &[Vec<usize>], masks: &[Vec<bool>], k: usize) -> f64 {
    let mut total = 0.0;
    let mut pairs = 0u64;
    for i in 0..sets.len() {
        for mask in &masks[i + 1..] {
            total += overlap(&sets[i], mask) as f64 / k as f64;
            pairs += 1;
        }
    }
    total / pairs as f64
}

fn probabilities(sets: &[Vec<usize>], p: usize) -> (Vec<FeatureProbability>, Vec<usize>) {
    let mut counts = vec![0usize; p];
    for s in sets {
        for &f in s {
            counts[f] += 1;
        }
    }
    let folds = sets.len();
    let mut table: Vec<FeatureProbability> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(feature, &c)| FeatureProbability {
            feature,
            folds_selected: c,
            probability: c as f64 / folds as f64,
        })
        .collect();
    table.sort_by(|a, b| b.folds_selected.cmp(&a.folds_selected).then(a.feature.cmp(&b.feature)));
    let always = (0..p).filter(|&f| counts[f] == folds).collect();
    (table, always)
}

/// Selection stability within and between two methods over the same folds.
pub fn stability_report(a: &[Vec<usize>], b: &[Vec<usize>]) -> Result<StabilityReport> {
    if a.len() != b.len() {
        return Err(Error::FoldCountMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewFolds(a.len()));
    }
    let k = selection_size(a)?;
    if selection_size(b)? != k {
        return Err(Error::InvalidArgument("both methods must select the same number of features".into()));
    }
    let p = a.iter().chain(b).flatten().copied().max().unwrap_or(0) + 1;
    let masks_a: Vec<Vec<bool>> = a.iter().map(|s| membership(s, p)).collect();
    let masks_b: Vec<Vec<bool>> = b.iter().map(|s| membership(s, p)).collect();
    let between = a
        .iter()
        .zip(&masks_b)
        .map(|(s, m)| overlap(s, m) as f64 / k as f64)
        .sum::<f64>()
        / a.len() as f64;
    let (probabilities_a, always_a) = probabilities(a, p);
    let (probabilities_b, always_b) = probabilities(b, p);
    let always_both = always_a.iter().copied().filter(|f| always_b.contains(f)).collect();
    Ok(StabilityReport {
        folds: a.len(),
        k,
        within_a: within(a, &masks_a, k),
        within_b: within(b, &masks_b, k),
        between,
        probabilities_a,
        probabilities_b,
        always_a,
        always_b,
        always_both,
    })
}
