//! Wall-clock comparison of DC-SIS and mRMR selection.
//!
//! Timing covers selection only: data generation, loading and scaling the
//! benchmark input happen before the clock starts.

use std::io::Write;
use std::time::Instant;

use dcsis_core::dataset::{apply_scaler, fit_scaler, ScalerKind};
use dcsis_core::evaluation::fold_selections;
use dcsis_core::selectors::MrmrVariant;
use dcsis_core::{Dataset, FeatureRanking, Selector, SelectorConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pool::{available_workers, Pool};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub method: String,
    pub median_seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
    pub samples: Vec<f64>,
}

impl MethodTiming {
    fn from_samples(method: String, mut samples: Vec<f64>) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();
        let median = if m % 2 == 1 {
            sorted[m / 2]
        } else {
            0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
        };
        // A clock that cannot resolve the run still reports a positive time.
        samples.iter_mut().for_each(|s| *s = s.max(f64::MIN_POSITIVE));
        Self {
            method,
            median_seconds: median.max(f64::MIN_POSITIVE),
            min_seconds: sorted[0].max(f64::MIN_POSITIVE),
            max_seconds: sorted[m - 1].max(f64::MIN_POSITIVE),
            samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchKind {
    /// One ranking of the whole (standardized) dataset per repeat.
    Selection,
    /// Selection inside every leave-one-subject-out fold.
    Jackknife,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub kind: BenchKind,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub repeats: usize,
    pub folds: usize,
    pub workers: usize,
    pub dcsis: MethodTiming,
    pub mrmr: Option<MethodTiming>,
    /// Median mRMR time over median DC-SIS time.
    pub speedup: Option<f64>,
    pub machine: String,
}

pub const CSV_HEADER: [&str; 10] = [
    "kind", "n", "p", "k", "workers", "method", "median_seconds", "min_seconds", "max_seconds", "speedup",
];

impl BenchReport {
    /// One CSV row per method, without header.
    pub fn write_csv_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        let kind = match self.kind {
            BenchKind::Selection => "selection",
            BenchKind::Jackknife => "jackknife",
        };
        let speedup = self.speedup.map_or_else(String::new, |s| s.to_string());
        for t in std::iter::once(&self.dcsis).chain(&self.mrmr) {
            w.write_record([
                kind.to_string(),
                self.n.to_string(),
                self.p.to_string(),
                self.k.to_string(),
                self.workers.to_string(),
                t.method.clone(),
                t.median_seconds.to_string(),
                t.min_seconds.to_string(),
                t.max_seconds.to_string(),
                speedup.clone(),
            ])?;
        }
        Ok(())
    }
}

pub fn machine_note(workers: usize) -> String {
    format!(
        "{} {}, {} hardware threads, {} workers",
        std::env::consts::OS,
        std::env::consts::ARCH,
        available_workers(),
        workers
    )
}

fn dcsis() -> SelectorConfig {
    SelectorConfig::dcsis()
}

fn mrmr() -> SelectorConfig {
    SelectorConfig::mrmr(MrmrVariant::Mid)
}

fn time<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Rankings from a timed run, exposed so callers can check that timing
/// does not change results.
#[derive(Debug, Clone)]
pub struct SelectionRun {
    pub report: BenchReport,
    pub dcsis: FeatureRanking,
    pub mrmr: FeatureRanking,
}

/// Ranks the standardized dataset `repeats` times with each method. DC-SIS
/// always scores all `p` features; mRMR stops after `k`.
pub fn bench_selection(data: &Dataset, k: usize, repeats: usize, workers: usize) -> Result<SelectionRun> {
    if repeats == 0 {
        return Err(Error::Core(dcsis_core::Error::InvalidArgument("repeats must be at least 1".into())));
    }
    let pool = Pool::new(workers)?;
    let z = apply_scaler(data, &fit_scaler(data, ScalerKind::Standardize))?;
    let run = |sel: SelectorConfig| -> Result<(FeatureRanking, MethodTiming)> {
        let mut samples = Vec::with_capacity(repeats);
        let mut last = None;
        for _ in 0..repeats {
            let (ranking, secs) = time(|| Ok(sel.rank(&z, k, &pool)?))?;
            samples.push(secs);
            last = Some(ranking);
        }
        Ok((last.expect("repeats >= 1"), MethodTiming::from_samples(sel.method().to_string(), samples)))
    };
    let (dcsis_ranking, dcsis_time) = run(dcsis())?;
    let (mrmr_ranking, mrmr_time) = run(mrmr())?;
    let speedup = mrmr_time.median_seconds / dcsis_time.median_seconds;
    Ok(SelectionRun {
        report: BenchReport {
            kind: BenchKind::Selection,
            n: data.n_observations(),
            p: data.n_features(),
            k,
            repeats,
            folds: 1,
            workers,
            dcsis: dcsis_time,
            mrmr: Some(mrmr_time),
            speedup: Some(speedup),
            machine: machine_note(workers),
        },
        dcsis: dcsis_ranking,
        mrmr: mrmr_ranking,
    })
}

/// Times per-fold selection across every leave-one-subject-out fold (fold
/// scaling included, classifier training excluded). `skip_mrmr` leaves the
/// mRMR side out, which at large shapes can take hours.
pub fn bench_jackknife(data: &Dataset, k: usize, workers: usize, skip_mrmr: bool) -> Result<BenchReport> {
    let pool = Pool::new(workers)?;
    let run = |sel: SelectorConfig| -> Result<(usize, MethodTiming)> {
        let (sets, secs) = time(|| Ok(fold_selections(data, &sel, k, ScalerKind::Standardize, &pool)?))?;
        Ok((sets.len(), MethodTiming::from_samples(sel.method().to_string(), vec![secs])))
    };
    let (folds, dcsis_time) = run(dcsis())?;
    let mrmr_time = if skip_mrmr { None } else { Some(run(mrmr())?.1) };
    let speedup = mrmr_time.as_ref().map(|m| m.median_seconds / dcsis_time.median_seconds);
    Ok(BenchReport {
        kind: BenchKind::Jackknife,
        n: data.n_observations(),
        p: data.n_features(),
        k,
        repeats: 1,
        folds,
        workers,
        dcsis: dcsis_time,
        mrmr: mrmr_time,
        speedup,
        machine: machine_note(workers),
    })
}
