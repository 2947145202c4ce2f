//! Gaussian naive Bayes with priors estimated from the training labels.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_input, check_training, RowMatrix};
use crate::dataset::Label;
use crate::error::Result;
use crate::math;

pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    log_prior: [f64; 2],
    mean: [Vec<f64>; 2],
    var: [Vec<f64>; 2],
}

impl GaussianNb {
    pub fn fit(x: &RowMatrix, y: &[Label]) -> Result<Self> {
        check_training(x, y)?;
        let d = x.cols();
        let mut count = [0usize; 2];
        let mut mean = [vec![0.0; d], vec![0.0; d]];
        for (i, &c) in y.iter().enumerate() {
            let c = usize::from(c);
            count[c] += 1;
            for (m, v) in mean[c].iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        for c in 0..2 {
            for m in &mut mean[c] {
                *m /= count[c] as f64;
            }
        }
        let mut var = [vec![0.0; d], vec![0.0; d]];
        for (i, &c) in y.iter().enumerate() {
            let c = usize::from(c);
            for ((s, v), m) in var[c].iter_mut().zip(x.row(i)).zip(&mean[c]) {
                *s += (v - m) * (v - m);
            }
        }
        for c in 0..2 {
            for s in &mut var[c] {
                *s = (*s / count[c] as f64).max(VARIANCE_FLOOR);
            }
        }
        let n = y.len() as f64;
        Ok(Self {
            log_prior: [math::ln(count[0] as f64 / n), math::ln(count[1] as f64 / n)],
            mean,
            var,
        })
    }

    fn log_joint(&self, c: usize, row: &[f64]) -> f64 {
        let ll: f64 = row
            .iter()
            .zip(&self.mean[c])
            .zip(&self.var[c])
            .map(|((v, m), s)| -0.5 * math::ln(2.0 * core::f64::consts::PI * s) - (v - m) * (v - m) / (2.0 * s))
            .sum();
        self.log_prior[c] + ll
    }

    /// `log P(1 | x) - log P(0 | x)`.
    pub fn log_odds(&self, row: &[f64]) -> f64 {
        self.log_joint(1, row) - self.log_joint(0, row)
    }

    /// Labels with ties going to the positive class.
    pub fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>> {
        check_input(x, self.mean[0].len())?;
        Ok((0..x.rows()).map(|i| u8::from(self.log_odds(x.row(i)) >= 0.0)).collect())
    }
}
