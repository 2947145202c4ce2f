//! k-nearest neighbors under a Minkowski distance.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{check_input, check_training, RowMatrix};
use crate::dataset::Label;
use crate::error::Result;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    train: RowMatrix,
    labels: Vec<Label>,
    neighbors: usize,
    order: f64,
}

// Σ |a_i - b_i|^order; ranking by this is the same as by the distance.
fn powered_distance(a: &[f64], b: &[f64], order: f64) -> f64 {
    let it = a.iter().zip(b).map(|(x, y)| math::abs(x - y));
    if order == 1.0 {
        it.sum()
    } else if order == 2.0 {
        it.map(|d| d * d).sum()
    } else if order == 3.0 {
        it.map(|d| d * d * d).sum()
    } else {
        it.map(|d| math::powf(d, order)).sum()
    }
}

// Nearer first; among equal distances the positive label first, so the
// chosen neighborhood depends only on distances and labels, never on row order.
fn neighbor_order(a: &(f64, Label), b: &(f64, Label)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(b.1.cmp(&a.1))
}

impl Knn {
    pub fn fit(x: &RowMatrix, y: &[Label], neighbors: usize, order: f64) -> Result<Self> {
        check_training(x, y)?;
        Ok(Self {
            train: x.clone(),
            labels: y.to_vec(),
            neighbors,
            order,
        })
    }

    /// Number of positive labels among the neighbors of `row`, and the
    /// neighborhood size (capped at the training set size).
    pub fn vote(&self, row: &[f64]) -> (usize, usize) {
        let mut dist: Vec<(f64, Label)> = (0..self.train.rows())
            .map(|i| (powered_distance(row, self.train.row(i), self.order), self.labels[i]))
            .collect();
        let k = self.neighbors.min(dist.len());
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, neighbor_order);
        }
        let positives = dist[..k].iter().filter(|d| d.1 == 1).count();
        (positives, k)
    }

    /// Majority of the neighborhood; an even split goes to the positive class.
    pub fn predict(&self, x: &RowMatrix) -> Result<Vec<Label>> {
        check_input(x, self.train.cols())?;
        Ok((0..x.rows())
            .map(|i| {
                let (pos, k) = self.vote(x.row(i));
                u8::from(2 * pos >= k)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn one_neighbor_reproduces_training_labels() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![(i * 7 % 10) as f64, (i % 3) as f64]).collect();
        let x = RowMatrix::from_rows(&rows).unwrap();
        let y: Vec<u8> = (0..10).map(|i| ((i * 3) % 2) as u8).collect();
        let m = Knn::fit(&x, &y, 1, 2.0).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
    }

    #[test]
    fn eighteen_neighbors_split_ten_to_eight() {
        // 10 negatives at distance 1..=10, 8 positives at 1.5..=8.5, far positives beyond.
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 1..=10 {
            rows.push(vec![f64::from(i)]);
            y.push(0);
        }
        for i in 1..=8 {
            rows.push(vec![-(f64::from(i) + 0.5)]);
            y.push(1);
        }
        for i in 0..5 {
            rows.push(vec![100.0 + f64::from(i)]);
            y.push(1);
        }
        let m = Knn::fit(&RowMatrix::from_rows(&rows).unwrap(), &y, 18, 3.0).unwrap();
        assert_eq!(m.vote(&[0.0]), (8, 18));
        assert_eq!(m.predict(&RowMatrix::from_rows(&[vec![0.0]]).unwrap()).unwrap(), vec![0]);
    }

    #[test]
    fn even_split_goes_positive() {
        let x = RowMatrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        let m = Knn::fit(&x, &[0, 1], 2, 2.0).unwrap();
        assert_eq!(m.predict(&RowMatrix::from_rows(&[vec![0.3]]).unwrap()).unwrap(), vec![1]);
    }

    #[test]
    fn boundary_ties_ignore_row_order() {
        let a = RowMatrix::from_rows(&[vec![1.0], vec![-1.0], vec![5.0]]).unwrap();
        let b = RowMatrix::from_rows(&[vec![-1.0], vec![1.0], vec![5.0]]).unwrap();
        let ma = Knn::fit(&a, &[0, 1, 0], 1, 2.0).unwrap();
        let mb = Knn::fit(&b, &[1, 0, 0], 1, 2.0).unwrap();
        assert_eq!(ma.vote(&[0.0]), mb.vote(&[0.0]));
    }
}
