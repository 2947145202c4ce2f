//! The `dcsis` command line.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for usage errors
//! (bad flags, missing input file, impossible `--k`). Flags are validated
//! before any data is read, and output files are only created once the
//! result is ready.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcsis_core::dataset::{apply_scaler, fit_scaler, synth_generate};
use dcsis_core::evaluation::{fold_selections, loso_evaluate, shrink_scan, stability_report};
use dcsis_core::models::ClassifierRegistry;
use dcsis_core::selectors::{BinConfig, MrmrVariant};
use dcsis_core::{Classifier, Dataset, Metric, ScalerKind, Selector, SelectorConfig};

use crate::bench::{bench_jackknife, bench_selection, BenchReport, CSV_HEADER};
use crate::error::Error;
use crate::io::{load_csv, write_csv, Schema};
use crate::pool::{available_workers, Pool};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "dcsis", version, about = "Distance-correlation feature screening with leave-one-subject-out evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank features on the whole (scaled) dataset.
    Rank(RankArgs),
    /// Leave-one-subject-out accuracy, F1 and MCC at a fixed k.
    Evaluate(EvaluateArgs),
    /// Accuracy for k = 1..k-max and the one-standard-error choice of k.
    Shrink(ShrinkArgs),
    /// How consistently two methods select the same features across folds.
    Stability(StabilityArgs),
    /// Time DC-SIS against mRMR.
    Bench(BenchArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "id")]
    pub id_col: String,
    #[arg(long, default_value = "class")]
    pub response_col: String,
    #[arg(long, default_value = "1")]
    pub positive_label: String,
    /// Lines to skip before the header row.
    #[arg(long, default_value_t = 0)]
    pub skip_lines: usize,
}

impl InputArgs {
    fn schema(&self) -> Schema {
        Schema {
            id_column: self.id_col.clone(),
            response_column: self.response_col.clone(),
            positive_label: self.positive_label.clone(),
            skip_lines: self.skip_lines,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dcsis,
    #[value(alias = "mrmr")]
    MrmrMid,
    MrmrMiq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalerArg {
    Standardize,
    PredictorNorm,
    SampleNorm,
}

impl From<ScalerArg> for ScalerKind {
    fn from(s: ScalerArg) -> Self {
        match s {
            ScalerArg::Standardize => ScalerKind::Standardize,
            ScalerArg::PredictorNorm => ScalerKind::PredictorNormalize,
            ScalerArg::SampleNorm => ScalerKind::SampleNormalize,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectorArgs {
    #[arg(long, value_enum, default_value = "dcsis")]
    pub method: MethodArg,
    /// euclidean, manhattan, cosine or minkowski:<p>.
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    pub metric: Metric,
    /// mRMR discretization bins.
    #[arg(long, default_value_t = 3)]
    pub bins: u8,
    /// mRMR bin width in training standard deviations.
    #[arg(long, default_value_t = 1.0)]
    pub bin_width_sigmas: f64,
}

impl SelectorArgs {
    fn config(&self, method: MethodArg) -> SelectorConfig {
        let bins = BinConfig {
            bins: self.bins,
            width_sigmas: self.bin_width_sigmas,
        };
        match method {
            MethodArg::Dcsis => SelectorConfig::Dcsis { metric: self.metric },
            MethodArg::MrmrMid => SelectorConfig::Mrmr {
                variant: MrmrVariant::Mid,
                bins,
            },
            MethodArg::MrmrMiq => SelectorConfig::Mrmr {
                variant: MrmrVariant::Miq,
                bins,
            },
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        self.metric.validate().map_err(usage)?;
        BinConfig {
            bins: self.bins,
            width_sigmas: self.bin_width_sigmas,
        }
        .validate()
        .map_err(usage)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "standardize")]
    pub scaler: ScalerArg,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    /// Rows to emit. DC-SIS defaults to every feature; mRMR requires it.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    /// nb, knn:k=18,p=3, logreg:l1=0.25,c=1 ...
    #[arg(long, default_value = "nb")]
    pub model: String,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ShrinkArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    /// Largest (reference) model size.
    #[arg(long, alias = "k", default_value_t = 50)]
    pub k_max: usize,
    #[arg(long, default_value = "logreg:l1=0.25")]
    pub model: String,
    /// Also write the full result as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    /// Method compared against `--method`.
    #[arg(long, value_enum, default_value = "mrmr-mid")]
    pub versus: MethodArg,
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Synthetic shape as NxP, e.g. 74x84.
    #[arg(long, value_parser = parse_shape, conflicts_with = "input", required_unless_present = "input")]
    pub shape: Option<(usize, usize)>,
    /// Benchmark a CSV dataset instead of synthetic data.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "id")]
    pub id_col: String,
    #[arg(long, default_value = "class")]
    pub response_col: String,
    #[arg(long, default_value = "1")]
    pub positive_label: String,
    #[arg(long, default_value_t = 0)]
    pub skip_lines: usize,
    #[arg(long, default_value_t = 50)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Time selection in every leave-one-subject-out fold.
    #[arg(long)]
    pub jackknife: bool,
    /// With --jackknife, time DC-SIS only.
    #[arg(long)]
    pub skip_mrmr: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Informative synthetic features (default: min(10, P)).
    #[arg(long)]
    pub informative: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// JSON report path. CSV rows always go to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Default: min(10, p).
    #[arg(long)]
    pub informative: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse::<Metric>().map_err(|e| e.to_string())
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (n, p) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxP, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(n)?, parse(p)?))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Core(dcsis_core::Error::InvalidK { .. }) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

impl From<dcsis_core::Error> for Failure {
    fn from(e: dcsis_core::Error) -> Self {
        Error::from(e).into()
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Rank(a) => cmd_rank(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Shrink(a) => cmd_shrink(a),
        Command::Stability(a) => cmd_stability(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn check_input(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("input file {} does not exist", path.display())))
    }
}

fn check_k(k: usize) -> Result<(), Failure> {
    if k == 0 {
        Err(Failure::Usage("--k must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn pool(workers: Option<usize>) -> Result<Pool, Failure> {
    match workers {
        Some(0) => Err(Failure::Usage("--workers must be at least 1".into())),
        w => Ok(Pool::new(w.unwrap_or_else(available_workers))?),
    }
}

fn classifier(spec: &str) -> Result<Arc<dyn Classifier>, Failure> {
    ClassifierRegistry::new().resolve(spec).map_err(usage)
}

fn check_fits(k: usize, data: &Dataset) -> Result<(), Failure> {
    if k > data.n_features() {
        return Err(Failure::Usage(format!(
            "--k {k} exceeds the {} features in the input",
            data.n_features()
        )));
    }
    Ok(())
}

/// Writes to `out`, or to standard output when absent.
fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush().map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

/// Human-readable text goes to stdout when the data went to a file, and to
/// stderr otherwise.
fn summary(out: Option<&Path>, text: &str) {
    if out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn cmd_rank(a: RankArgs) -> Result<(), Failure> {
    check_input(&a.input.input)?;
    a.selector.validate()?;
    if let Some(k) = a.k {
        check_k(k)?;
    }
    if a.selector.method != MethodArg::Dcsis && a.k.is_none() {
        return Err(Failure::Usage("mRMR ranking needs --k".into()));
    }
    let rt = pool(a.run.workers)?;
    let data = load_csv(&a.input.input, &a.input.schema())?;
    let k = a.k.unwrap_or(data.n_features());
    check_fits(k, &data)?;
    let scaled = apply_scaler(&data, &fit_scaler(&data, a.run.scaler.into()))?;
    let ranking = a.selector.config(a.selector.method).rank(&scaled, k, &rt)?;
    emit(a.run.out.as_deref(), |w| report::write_ranking(w, &ranking, data.feature_names(), k))
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    check_input(&a.input.input)?;
    a.selector.validate()?;
    check_k(a.k)?;
    let model = classifier(&a.model)?;
    let rt = pool(a.run.workers)?;
    let data = load_csv(&a.input.input, &a.input.schema())?;
    check_fits(a.k, &data)?;
    let selector = a.selector.config(a.selector.method);
    let result = loso_evaluate(&data, &selector, a.k, model.as_ref(), a.run.scaler.into(), &rt)?;
    emit(a.run.out.as_deref(), |w| report::write_json(w, &result))?;
    summary(a.run.out.as_deref(), &report::evaluation_table(&result));
    Ok(())
}

fn cmd_shrink(a: ShrinkArgs) -> Result<(), Failure> {
    check_input(&a.input.input)?;
    a.selector.validate()?;
    check_k(a.k_max)?;
    let model = classifier(&a.model)?;
    let rt = pool(a.run.workers)?;
    let data = load_csv(&a.input.input, &a.input.schema())?;
    check_fits(a.k_max, &data)?;
    let selector = a.selector.config(a.selector.method);
    let result = shrink_scan(&data, &selector, model.as_ref(), a.run.scaler.into(), a.k_max, &rt)?;
    if let Some(path) = &a.report {
        emit(Some(path), |w| report::write_json(w, &result))?;
    }
    emit(a.run.out.as_deref(), |w| report::write_curve(w, &result))?;
    summary(a.run.out.as_deref(), &report::shrink_summary(&result));
    Ok(())
}

fn cmd_stability(a: StabilityArgs) -> Result<(), Failure> {
    check_input(&a.input.input)?;
    a.selector.validate()?;
    check_k(a.k)?;
    let rt = pool(a.run.workers)?;
    let data = load_csv(&a.input.input, &a.input.schema())?;
    check_fits(a.k, &data)?;
    let scaler: ScalerKind = a.run.scaler.into();
    let first = a.selector.config(a.selector.method);
    let second = a.selector.config(a.versus);
    let sets_a = fold_selections(&data, &first, a.k, scaler, &rt)?;
    let sets_b = fold_selections(&data, &second, a.k, scaler, &rt)?;
    let result = stability_report(&sets_a, &sets_b)?;
    let names_a = first.method().to_string();
    let names_b = second.method().to_string();
    let methods = [names_a.as_str(), names_b.as_str()];
    if let Some(path) = &a.report {
        emit(Some(path), |w| report::write_json(w, &result))?;
    }
    emit(a.run.out.as_deref(), |w| report::write_stability(w, &result, data.feature_names(), methods))?;
    summary(a.run.out.as_deref(), &report::stability_summary(&result, data.feature_names(), methods));
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    check_k(a.k)?;
    if a.repeats == 0 {
        return Err(Failure::Usage("--repeats must be at least 1".into()));
    }
    if a.skip_mrmr && !a.jackknife {
        return Err(Failure::Usage("--skip-mrmr only applies with --jackknife".into()));
    }
    let workers = match a.workers {
        Some(0) => return Err(Failure::Usage("--workers must be at least 1".into())),
        w => w.unwrap_or_else(available_workers),
    };
    let data = match (&a.input, a.shape) {
        (Some(path), _) => {
            check_input(path)?;
            let schema = Schema {
                id_column: a.id_col.clone(),
                response_column: a.response_col.clone(),
                positive_label: a.positive_label.clone(),
                skip_lines: a.skip_lines,
            };
            load_csv(path, &schema)?
        }
        (None, Some((n, p))) => {
            let informative = a.informative.unwrap_or(p.min(10));
            synth_generate(n, p, informative, a.seed).map_err(usage)?
        }
        (None, None) => unreachable!("clap requires --shape or --input"),
    };
    check_fits(a.k, &data)?;
    let result: BenchReport = if a.jackknife {
        bench_jackknife(&data, a.k, workers, a.skip_mrmr)?
    } else {
        bench_selection(&data, a.k, a.repeats, workers)?.report
    };
    if let Some(path) = &a.out {
        emit(Some(path), |w| report::write_json(w, &result))?;
    }
    emit(None, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(CSV_HEADER)?;
        result.write_csv_rows(&mut csv)?;
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    })
}

fn cmd_synth(a: SynthArgs) -> Result<(), Failure> {
    let informative = a.informative.unwrap_or(a.p.min(10));
    let data = synth_generate(a.n, a.p, informative, a.seed).map_err(usage)?;
    emit(a.out.as_deref(), |w| write_csv(w, &data, &Schema::default()))
}
