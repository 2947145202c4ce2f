//! Elastic-net logistic regression fitted by proximal gradient descent.
//!
//! Objective: mean logistic loss + λ [α ‖β‖₁ + (1 − α) ½ ‖β‖₂²], intercept
//! unpenalized. The ridge part is treated as smooth; the lasso part goes
//! through soft-thresholding. Steps start at `1/L` for a power-iteration
//! estimate of the Lipschitz constant and are halved until the sufficient
//! decrease condition holds, so the objective never increases.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_input, check_training, LogRegSpec, RowMatrix};
use crate::dataset::Label;
use crate::error::Result;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct LogReg {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

/// Objective value after each accepted step (index 0 is the starting point).
#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    x: &'a RowMatrix,
    y: &'a [Label],
    l1: f64,
    l2: f64,
}

impl Problem<'_> {
    fn margins(&self, beta: &[f64], b0: f64) -> Vec<f64> {
        (0..self.x.rows())
            .map(|i| b0 + self.x.row(i).iter().zip(beta).map(|(v, w)| v * w).sum::<f64>())
            .collect()
    }

    // Mean loss plus ridge term.
    fn smooth(&self, beta: &[f64], b0: f64) -> f64 {
        let z = self.margins(beta, b0);
        let loss: f64 = z
            .iter()
            .zip(self.y)
            .map(|(&z, &c)| math::softplus(z) - f64::from(c) * z)
            .sum::<f64>()
            / self.x.rows() as f64;
        loss + 0.5 * self.l2 * beta.iter().map(|w| w * w).sum::<f64>()
    }

    fn objective(&self, beta: &[f64], b0: f64) -> f64 {
        self.smooth(beta, b0) + self.l1 * beta.iter().map(|w| math::abs(*w)).sum::<f64>()
    }

    fn gradient(&self, beta: &[f64], b0: f64) -> (Vec<f64>, f64) {
        let n = self.x.rows() as f64;
        let z = self.margins(beta, b0);
        let mut g = vec![0.0; beta.len()];
        let mut g0 = 0.0;
        for (i, (&z, &c)) in z.iter().zip(self.y).enumerate() {
            let r = (math::sigmoid(z) - f64::from(c)) / n;
            g0 += r;
            for (gj, v) in g.iter_mut().zip(self.x.row(i)) {
                *gj += r * v;
            }
        }
        for (gj, w) in g.iter_mut().zip(beta) {
            *gj += self.l2 * w;
        }
        (g, g0)
    }

    // Largest eigenvalue of [X 1]ᵀ[X 1] / n by power iteration.
    fn gram_norm(&self) -> f64 {
        let d = self.x.cols();
        let n = self.x.rows();
        let mut v = vec![1.0; d + 1];
        let mut lambda = 0.0;
        for _ in 0..100 {
            let norm = math::sqrt(v.iter().map(|t| t * t).sum());
            v.iter_mut().for_each(|t| *t /= norm);
            let mut w = vec![0.0; d + 1];
            for i in 0..n {
                let row = self.x.row(i);
                let s = v[d] + row.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
                for (wj, a) in w.iter_mut().zip(row) {
                    *wj += s * a;
                }
                w[d] += s;
            }
            let next = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            v = w;
            if math::abs(next - lambda) <= 1e-9 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl LogReg {
    pub fn fit(x: &RowMatrix, y: &[Label], spec: &LogRegSpec) -> Result<(Self, FitTrace)> {
        check_training(x, y)?;
        let lambda = spec.penalty.lambda(x.rows());
        let problem = Problem {
            x,
            y,
            l1: lambda * spec.l1_ratio,
            l2: lambda * (1.0 - spec.l1_ratio),
        };
        let d = x.cols();
        let mut beta = vec![0.0; d];
        let mut b0 = 0.0;
        let lipschitz = problem.gram_norm() / 4.0 + problem.l2;
        let mut step = 1.0 / lipschitz.max(1e-12);

        let mut smooth = problem.smooth(&beta, b0);
        let mut trace = FitTrace {
            objective: vec![problem.objective(&beta, b0)],
            iterations: 0,
            converged: false,
        };
        while trace.iterations < spec.max_iterations {
            trace.iterations += 1;
            let (g, g0) = problem.gradient(&beta, b0);
            loop {
                let cand: Vec<f64> = beta
                    .iter()
                    .zip(&g)
                    .map(|(w, gw)| soft_threshold(w - step * gw, step * problem.l1))
                    .collect();
                let cand0 = b0 - step * g0;
                let diff0 = cand0 - b0;
                let mut lin = g0 * diff0;
                let mut sq = diff0 * diff0;
                for ((c, w), gw) in cand.iter().zip(&beta).zip(&g) {
                    lin += gw * (c - w);
                    sq += (c - w) * (c - w);
                }
                let cand_smooth = problem.smooth(&cand, cand0);
                if cand_smooth <= smooth + lin + sq / (2.0 * step) || step < 1e-20 {
                    let max_change = cand
                        .iter()
                        .zip(&beta)
                        .map(|(c, w)| math::abs(c - w))
                        .fold(math::abs(diff0), f64::max);
                    beta = cand;
                    b0 = cand0;
                    smooth = cand_smooth;
                    trace.objective.push(problem.objective(&beta, b0));
                    if max_change <= spec.tolerance {
                        trace.converged = true;
                    }
                    break;
                }
                step *= 0.5;
            }
            if trace.converged {
                break;
            }
        }
        Ok((
            Self {
                coefficients: beta,
                intercept: b0,
            },
            trace,
        ))
    }

    pub fn decision(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.coefficients).map(|(v, w)| v * w).sum::<f64>()
    }

    /// Positive when the fitted probability is at least one half.
    pub fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>> {
        check_input(x, self.coefficients.len())?;
        Ok((0..x.rows()).map(|i| u8::from(self.decision(x.row(i)) >= 0.0)).collect())
    }
}
