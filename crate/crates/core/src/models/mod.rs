//! Native binary classifiers and the plug-in contract for external ones.
//!
//! Native kinds are described by a [`ClassifierSpec`] and parsed from short
//! strings such as `nb`, `knn:k=18,p=3` or `logreg:l1=0.25,c=1.0`. Anything
//! implementing [`Classifier`] can be evaluated by the harness; the
//! [`ClassifierRegistry`] keys external implementations by name.

mod knn;
mod logreg;
mod nb;
mod spec;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::marker::PhantomData;

pub use knn::Knn;
pub use logreg::{FitTrace, LogReg};
pub use nb::GaussianNb;
pub use spec::{ClassifierSpec, LogRegSpec, Penalty};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Dense row-major matrix of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RowMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

pub(crate) fn check_training(x: &RowMatrix, y: &[Label]) -> Result<()> {
    if x.cols == 0 {
        return Err(Error::NoFeatures);
    }
    if x.rows != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows,
            found: y.len(),
        });
    }
    check_finite(x)?;
    if let Some(&bad) = y.iter().find(|&&c| c > 1) {
        return Err(Error::NonBinaryLabel(bad));
    }
    let positives = y.iter().filter(|&&c| c == 1).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub(crate) fn check_input(x: &RowMatrix, cols: usize) -> Result<()> {
    if x.cols != cols {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: x.cols,
        });
    }
    check_finite(x)
}

fn check_finite(x: &RowMatrix) -> Result<()> {
    match x.data.iter().position(|v| !v.is_finite()) {
        Some(pos) => Err(Error::NonFinite {
            row: pos / x.cols,
            column: pos % x.cols,
        }),
        None => Ok(()),
    }
}

/// A fitted native model.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    GaussianNb(GaussianNb),
    Knn(Knn),
    LogReg(LogReg),
}

/// Fits a native classifier. Deterministic for identical inputs.
pub fn train(spec: &ClassifierSpec, x: &RowMatrix, y: &[Label]) -> Result<TrainedModel> {
    spec.validate()?;
    Ok(match spec {
        ClassifierSpec::GaussianNb => TrainedModel::GaussianNb(GaussianNb::fit(x, y)?),
        ClassifierSpec::Knn {
            neighbors,
            minkowski_order,
        } => TrainedModel::Knn(Knn::fit(x, y, *neighbors, *minkowski_order)?),
        ClassifierSpec::LogReg(s) => TrainedModel::LogReg(LogReg::fit(x, y, s)?.0),
    })
}

impl TrainedModel {
    pub fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>> {
        match self {
            TrainedModel::GaussianNb(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::LogReg(m) => m.predict(x),
        }
    }
}

/// Something the evaluation harness can train once per fold.
pub trait Classifier: Send + Sync {
    fn name(&self) -> String;

    fn fit(&self, x: &RowMatrix, y: &[Label]) -> Result<Box<dyn Predictor>>;
}

pub trait Predictor: Send + Sync {
    fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>>;
}

impl Predictor for TrainedModel {
    fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>> {
        TrainedModel::predict(self, x)
    }
}

impl Classifier for ClassifierSpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn fit(&self, x: &RowMatrix, y: &[Label]) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(train(self, x, y)?))
    }
}

/// Plug-in built from a `(train, predict)` pair of functions.
pub struct FnClassifier<M, T, P> {
    name: String,
    train: T,
    predict: Arc<P>,
    _model: PhantomData<fn() -> M>,
}

impl<M, T, P> FnClassifier<M, T, P>
where
    M: Send + Sync + 'static,
    T: Fn(&RowMatrix, &[Label]) -> Result<M> + Send + Sync,
    P: Fn(&M, &RowMatrix) -> Result<Vec<Label>> + Send + Sync + 'static,
{
    pub fn new(name: impl Into<String>, train: T, predict: P) -> Self {
        Self {
            name: name.into(),
            train,
            predict: Arc::new(predict),
            _model: PhantomData,
        }
    }
}

struct FnModel<M, P> {
    model: M,
    predict: Arc<P>,
}

impl<M, P> Predictor for FnModel<M, P>
where
    M: Send + Sync,
    P: Fn(&M, &RowMatrix) -> Result<Vec<Label>> + Send + Sync,
{
    fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>> {
        (self.predict)(&self.model, x)
    }
}

impl<M, T, P> Classifier for FnClassifier<M, T, P>
where
    M: Send + Sync + 'static,
    T: Fn(&RowMatrix, &[Label]) -> Result<M> + Send + Sync,
    P: Fn(&M, &RowMatrix) -> Result<Vec<Label>> + Send + Sync + 'static,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn fit(&self, x: &RowMatrix, y: &[Label]) -> Result<Box<dyn Predictor>> {
        let model = (self.train)(x, y)?;
        Ok(Box::new(FnModel {
            model,
            predict: Arc::clone(&self.predict),
        }))
    }
}

/// Name-keyed collection of external classifiers. Native kind names are
/// reserved: [`ClassifierRegistry::resolve`] falls back to parsing a
/// [`ClassifierSpec`] when no plug-in matches.
#[derive(Default, Clone)]
pub struct ClassifierRegistry {
    entries: BTreeMap<String, Arc<dyn Classifier>>,
}

impl ClassifierRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, classifier: Arc<dyn Classifier>) -> Result<()> {
        if self.entries.contains_key(name) || spec::is_native_name(name) {
            return Err(Error::DuplicateClassifier(name.to_string()));
        }
        self.entries.insert(name.to_string(), classifier);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Classifier>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Registered plug-in by exact name, otherwise a native spec string.
    pub fn resolve(&self, spec: &str) -> Result<Arc<dyn Classifier>> {
        if let Some(c) = self.get(spec) {
            return Ok(c);
        }
        let native: ClassifierSpec = spec.parse().map_err(|e| match e {
            Error::InvalidSpec { .. } if !spec.contains(':') => Error::UnknownClassifier(spec.to_string()),
            other => other,
        })?;
        Ok(Arc::new(native))
    }
}
