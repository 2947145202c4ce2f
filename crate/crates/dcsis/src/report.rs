//! Machine-readable outputs (CSV, JSON) and short text summaries.
//!
//! Column layouts and JSON shapes are pinned by the files in `schemas/`.

use std::fmt::Write as _;
use std::io::Write;

use dcsis_core::evaluation::{EvaluationReport, ShrinkResult, StabilityReport};
use dcsis_core::FeatureRanking;
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const RANKING_HEADER: [&str; 5] = ["rank", "feature_index", "feature_name", "score", "method"];
pub const CURVE_HEADER: [&str; 5] = ["k", "accuracy", "accuracy_se", "f1", "mcc"];
pub const STABILITY_HEADER: [&str; 3] = ["feature", "probability", "method"];

/// JSON keys holding wall-clock measurements.
pub const TIMING_KEYS: [&str; 3] = ["selection_time", "train_time", "selection_phases"];

/// One row per ranked feature, best first, at most `limit` rows.
pub fn write_ranking<W: Write>(w: W, ranking: &FeatureRanking, names: &[String], limit: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(RANKING_HEADER)?;
    let method = ranking.method.to_string();
    for (i, e) in ranking.entries.iter().take(limit).enumerate() {
        w.write_record([
            (i + 1).to_string(),
            e.feature.to_string(),
            names[e.feature].clone(),
            e.score.to_string(),
            method.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| crate::Error::io("<json output>", e))?;
    Ok(())
}

/// Removes every timing field from a serialized report, recursively, so
/// that two runs can be compared for equality.
pub fn strip_timings(value: &mut Value) {
    match value {
        Value::Object(map) => {
            for key in TIMING_KEYS {
                map.remove(key);
            }
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

pub fn evaluation_table(r: &EvaluationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "method      {}", r.method);
    let _ = writeln!(s, "classifier  {}", r.classifier);
    let _ = writeln!(s, "k           {}", r.k);
    let _ = writeln!(s, "subjects    {} ({} observations)", r.n_subjects, r.n_observations);
    let _ = writeln!(s, "accuracy    {:.4} (se {:.4})", r.accuracy, r.accuracy_se);
    let _ = writeln!(s, "f1          {:.4}", r.f1);
    let _ = writeln!(s, "mcc         {:.4}", r.mcc);
    let c = &r.confusion;
    let _ = writeln!(s, "confusion   tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_);
    let _ = writeln!(s, "selection   {:.3}s over {} folds", r.selection_seconds(), r.per_fold.len());
    for note in &r.notes {
        let _ = writeln!(s, "note        {note}");
    }
    s
}

pub fn write_curve<W: Write>(w: W, shrink: &ShrinkResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(CURVE_HEADER)?;
    for c in &shrink.curve {
        w.write_record([
            c.k.to_string(),
            c.accuracy.to_string(),
            c.accuracy_se.to_string(),
            c.f1.to_string(),
            c.mcc.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn shrink_summary(s: &ShrinkResult) -> String {
    format!(
        "k_star {} (accuracy {:.4}); reference k={} accuracy {:.4} se {:.4}; threshold {:.4}\n",
        s.k_star, s.shrunk.accuracy, s.k_max, s.reference.accuracy, s.reference.accuracy_se, s.threshold
    )
}

/// Selection probability of every feature picked in at least one fold,
/// first method then second.
pub fn write_stability<W: Write>(
    w: W,
    report: &StabilityReport,
    names: &[String],
    methods: [&str; 2],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(STABILITY_HEADER)?;
    for (table, method) in [&report.probabilities_a, &report.probabilities_b].into_iter().zip(methods) {
        for fp in table {
            w.write_record([names[fp.feature].as_str(), &fp.probability.to_string(), method])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn stability_summary(r: &StabilityReport, names: &[String], methods: [&str; 2]) -> String {
    let list = |fs: &[usize]| fs.iter().map(|&f| names[f].as_str()).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "folds {}, k {}", r.folds, r.k);
    let _ = writeln!(s, "within {}: {:.4}", methods[0], r.within_a);
    let _ = writeln!(s, "within {}: {:.4}", methods[1], r.within_b);
    let _ = writeln!(s, "between: {:.4}", r.between);
    let _ = writeln!(s, "always selected by both ({}): {}", r.always_both.len(), list(&r.always_both));
    s
}
