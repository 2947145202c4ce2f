//! Distance-correlation sure independence screening.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{FeatureRanking, Method, Phase, RankEntry};
use crate::dataset::Dataset;
use crate::dcorr::{Metric, ResponseKernel};
use crate::error::{Error, Result};
use crate::runtime::{elapsed, Runtime};

/// Scores every feature by its squared distance correlation with the
/// response and sorts descending, ties by ascending column index.
///
/// The response's centered distance matrix is built once and shared by all
/// per-feature computations, which run through `rt`.
pub fn dcsis_rank<R: Runtime>(train: &Dataset, metric: Metric, rt: &R) -> Result<FeatureRanking> {
    let p = train.n_features();
    if p == 0 {
        return Err(Error::NoFeatures);
    }
    let start = rt.now();
    let kernel = ResponseKernel::new(&train.response_f64(), metric)?;
    let t_response = elapsed(rt, start);

    let start = rt.now();
    let scores = rt
        .map(p, |j| kernel.correlation_sq(train.column(j)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let t_scan = elapsed(rt, start);

    let start = rt.now();
    let mut entries: Vec<RankEntry> = scores
        .into_iter()
        .enumerate()
        .map(|(feature, score)| RankEntry { feature, score })
        .collect();
    entries.sort_by(by_score_then_index);
    let t_sort = elapsed(rt, start);

    Ok(FeatureRanking {
        entries,
        method: Method::Dcsis,
        k_requested: p,
        phases: alloc::vec![
            Phase::new("response_matrix", t_response),
            Phase::new("feature_scan", t_scan),
            Phase::new("sort", t_sort),
        ],
    })
}

fn by_score_then_index(a: &RankEntry, b: &RankEntry) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then(a.feature.cmp(&b.feature))
}

/// The `k` best features of a full screening ranking.
pub fn dcsis_select(ranking: &FeatureRanking, k: usize) -> Result<Vec<usize>> {
    ranking.top(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{apply_scaler, fit_scaler, synth_generate, ScalerKind};
    use crate::runtime::Sequential;
    use alloc::string::{String, ToString};
    use alloc::vec;
    use alloc::format;

    fn standardized(d: &Dataset) -> Dataset {
        apply_scaler(d, &fit_scaler(d, ScalerKind::Standardize)).unwrap()
    }

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("f{j}")).collect()
    }

    #[test]
    fn recovers_informative_features() {
        let d = standardized(&synth_generate(600, 20, 5, 2).unwrap());
        let r = dcsis_rank(&d, Metric::Euclidean, &Sequential).unwrap();
        let mut top = dcsis_select(&r, 5).unwrap();
        top.sort_unstable();
        assert_eq!(top, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.entries.len(), 20);
        assert!(r.entries.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn response_duplicate_ranks_first() {
        let y: Vec<u8> = (0..12).map(|i| u8::from(i % 3 != 1)).collect();
        let dup: Vec<f64> = y.iter().map(|&c| f64::from(c)).collect();
        let noise: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64).collect();
        let d = Dataset::from_columns(
            vec![dup, noise],
            names(2),
            (0..12).map(|i| (i / 3).to_string()).collect(),
            y,
        )
        .unwrap();
        let r = dcsis_rank(&d, Metric::Euclidean, &Sequential).unwrap();
        assert_eq!(r.entries[0].feature, 0);
        assert!((r.entries[0].score - 1.0).abs() < 1e-12);
        assert_eq!(dcsis_select(&r, 1).unwrap(), vec![0]);
        assert_eq!(dcsis_select(&r, 2).unwrap().len(), 2);
        assert!(matches!(dcsis_select(&r, 3), Err(Error::InvalidK { k: 3, p: 2 })));
    }

    #[test]
    fn constant_features_tie_in_index_order() {
        let d = Dataset::from_columns(
            vec![vec![2.0; 6], vec![0.0; 6], vec![-1.0; 6]],
            names(3),
            (0..6).map(|i| i.to_string()).collect(),
            vec![0, 1, 0, 1, 0, 1],
        )
        .unwrap();
        let r = dcsis_rank(&d, Metric::Euclidean, &Sequential).unwrap();
        assert_eq!(r.indices(), vec![0, 1, 2]);
        assert!(r.entries.iter().all(|e| e.score == 0.0));
    }

    #[test]
    fn no_features_is_an_error() {
        let d = Dataset::from_column_major(3, vec![], vec![], vec!["a".into(), "b".into(), "c".into()], vec![0, 1, 0])
            .unwrap();
        assert_eq!(dcsis_rank(&d, Metric::Euclidean, &Sequential), Err(Error::NoFeatures));
    }
}
