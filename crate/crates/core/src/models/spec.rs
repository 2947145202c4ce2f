use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Overall elastic-net strength.
///
/// `Strength(λ)` multiplies the penalty directly against the mean logistic
/// loss. `InverseC(C)` follows the liblinear/saga convention of a summed
/// loss with weight `C`, which is the same objective at `λ = 1 / (C n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Penalty {
    Strength(f64),
    InverseC(f64),
}

impl Penalty {
    pub fn lambda(&self, n: usize) -> f64 {
        match *self {
            Penalty::Strength(l) => l,
            Penalty::InverseC(c) => 1.0 / (c * n as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogRegSpec {
    pub l1_ratio: f64,
    pub penalty: Penalty,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for LogRegSpec {
    fn default() -> Self {
        Self {
            l1_ratio: 0.25,
            penalty: Penalty::InverseC(1.0),
            max_iterations: 1000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ClassifierSpec {
    GaussianNb,
    Knn { neighbors: usize, minkowski_order: f64 },
    LogReg(LogRegSpec),
}

pub const DEFAULT_NEIGHBORS: usize = 18;
pub const DEFAULT_MINKOWSKI_ORDER: f64 = 3.0;

pub(crate) fn is_native_name(name: &str) -> bool {
    matches!(name, "nb" | "gaussian_nb" | "knn" | "logreg")
}

impl ClassifierSpec {
    pub fn knn(neighbors: usize, minkowski_order: f64) -> Self {
        ClassifierSpec::Knn {
            neighbors,
            minkowski_order,
        }
    }

    pub fn logreg(l1_ratio: f64) -> Self {
        ClassifierSpec::LogReg(LogRegSpec {
            l1_ratio,
            ..LogRegSpec::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidSpec {
                spec: self.to_string(),
                reason,
            })
        };
        match *self {
            ClassifierSpec::GaussianNb => Ok(()),
            ClassifierSpec::Knn {
                neighbors,
                minkowski_order,
            } => {
                if neighbors == 0 {
                    return fail("neighbors must be at least 1".into());
                }
                if !(minkowski_order >= 1.0 && minkowski_order.is_finite()) {
                    return fail(format!("minkowski order must be >= 1, got {minkowski_order}"));
                }
                Ok(())
            }
            ClassifierSpec::LogReg(s) => {
                if !(0.0..=1.0).contains(&s.l1_ratio) {
                    return fail(format!("l1 ratio must be in [0, 1], got {}", s.l1_ratio));
                }
                match s.penalty {
                    Penalty::Strength(l) if !(l >= 0.0 && l.is_finite()) => {
                        return fail(format!("penalty strength must be >= 0, got {l}"))
                    }
                    Penalty::InverseC(c) if !(c > 0.0 && c.is_finite()) => {
                        return fail(format!("c must be positive, got {c}"))
                    }
                    _ => {}
                }
                if s.max_iterations == 0 || !(s.tolerance > 0.0) {
                    return fail("iterations and tolerance must be positive".into());
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::GaussianNb => f.write_str("nb"),
            ClassifierSpec::Knn {
                neighbors,
                minkowski_order,
            } => write!(f, "knn:k={neighbors},p={minkowski_order}"),
            ClassifierSpec::LogReg(s) => {
                write!(f, "logreg:l1={}", s.l1_ratio)?;
                match s.penalty {
                    Penalty::InverseC(c) => write!(f, ",c={c}")?,
                    Penalty::Strength(l) => write!(f, ",lambda={l}")?,
                }
                write!(f, ",iter={},tol={}", s.max_iterations, s.tolerance)
            }
        }
    }
}

impl FromStr for ClassifierSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidSpec {
            spec: s.to_string(),
            reason,
        };
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a),
            None => (s.trim(), ""),
        };
        let pairs = args.split(',').map(str::trim).filter(|a| !a.is_empty()).map(|a| {
            a.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| invalid(format!("expected key=value, got `{a}`")))
        });
        let num = |key: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| invalid(format!("`{key}` expects a number, got `{v}`")))
        };
        let count = |key: &str, v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| invalid(format!("`{key}` expects a count, got `{v}`")))
        };

        let spec = match kind {
            "nb" | "gaussian_nb" => {
                if let Some(p) = pairs.into_iter().next() {
                    let (k, _) = p?;
                    return Err(invalid(format!("naive bayes takes no parameter `{k}`")));
                }
                ClassifierSpec::GaussianNb
            }
            "knn" => {
                let mut neighbors = DEFAULT_NEIGHBORS;
                let mut order = DEFAULT_MINKOWSKI_ORDER;
                for p in pairs {
                    match p? {
                        ("k", v) => neighbors = count("k", v)?,
                        ("p", v) => order = num("p", v)?,
                        (k, _) => return Err(invalid(format!("unknown knn parameter `{k}`"))),
                    }
                }
                ClassifierSpec::knn(neighbors, order)
            }
            "logreg" => {
                let mut spec = LogRegSpec::default();
                for p in pairs {
                    match p? {
                        ("l1", v) => spec.l1_ratio = num("l1", v)?,
                        ("c", v) => spec.penalty = Penalty::InverseC(num("c", v)?),
                        ("lambda", v) => spec.penalty = Penalty::Strength(num("lambda", v)?),
                        ("iter", v) => spec.max_iterations = count("iter", v)?,
                        ("tol", v) => spec.tolerance = num("tol", v)?,
                        (k, _) => return Err(invalid(format!("unknown logreg parameter `{k}`"))),
                    }
                }
                ClassifierSpec::LogReg(spec)
            }
            other => return Err(invalid(format!("unknown classifier kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
