//! Distance correlation.
//!
//! Distance covariance uses Székely's `1/n²` normalization. The constant
//! cancels in the correlation, which is the only quantity the selectors
//! consume, so raw `V²` values are the only place the convention shows.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math;

/// Marginal distance variances below this are treated as a constant variable.
pub const DEGENERATE_VARIANCE: f64 = 1e-14;

// Tolerance used to check the `centered` flag on caller-built matrices.
const CENTER_CHECK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Minkowski(f64),
    Cosine,
}

impl Metric {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Metric::Minkowski(p) if !(p >= 1.0 && p.is_finite()) => Err(Error::InvalidArgument(format!(
                "minkowski order must be a finite value >= 1, got {p}"
            ))),
            _ => Ok(()),
        }
    }

    /// Distance between two points of equal dimension.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Metric::Euclidean => math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| math::abs(x - y)).sum(),
            Metric::Minkowski(p) => minkowski(a, b, p),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na = math::sqrt(a.iter().map(|x| x * x).sum());
                let nb = math::sqrt(b.iter().map(|x| x * x).sum());
                cosine_from_parts(dot, na, nb)
            }
        }
    }

    /// Whether 1-D distances reduce to `|a - b|`.
    fn is_absolute_difference(&self) -> bool {
        !matches!(self, Metric::Cosine)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => f.write_str("euclidean"),
            Metric::Manhattan => f.write_str("manhattan"),
            Metric::Minkowski(p) => write!(f, "minkowski:{p}"),
            Metric::Cosine => f.write_str("cosine"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let metric = match s {
            "euclidean" => Metric::Euclidean,
            "manhattan" => Metric::Manhattan,
            "cosine" => Metric::Cosine,
            other => {
                let order = other
                    .strip_prefix("minkowski:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{other}`")))?;
                Metric::Minkowski(order)
            }
        };
        metric.validate()?;
        Ok(metric)
    }
}

/// Minkowski distance, with exact fast paths for the common orders.
pub fn minkowski(a: &[f64], b: &[f64], order: f64) -> f64 {
    if order == 1.0 {
        return a.iter().zip(b).map(|(x, y)| math::abs(x - y)).sum();
    }
    if order == 2.0 {
        return math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum());
    }
    let s: f64 = a.iter().zip(b).map(|(x, y)| math::powf(math::abs(x - y), order)).sum();
    math::powf(s, 1.0 / order)
}

fn cosine_from_parts(dot: f64, na: f64, nb: f64) -> f64 {
    match (na > 0.0, nb > 0.0) {
        (true, true) => 1.0 - dot / (na * nb),
        (false, false) => 0.0,
        _ => 1.0,
    }
}

#[inline]
fn cosine_scalar(a: f64, b: f64) -> f64 {
    cosine_from_parts(a * b, math::abs(a), math::abs(b))
}

/// Symmetric `n × n` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    centered: bool,
}

impl DistanceMatrix {
    /// Wraps caller-provided values. Symmetry is checked exactly; a matrix
    /// flagged `centered` must have vanishing row means.
    pub fn from_values(n: usize, values: Vec<f64>, centered: bool) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let m = Self { n, values, centered };
        if centered && !m.row_means_vanish(CENTER_CHECK) {
            return Err(Error::NotCentered);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Largest absolute row mean (equal to the largest column mean by symmetry).
    pub fn max_abs_row_mean(&self) -> f64 {
        let n = self.n as f64;
        (0..self.n)
            .map(|i| math::abs(self.row(i).iter().sum::<f64>() / n))
            .fold(0.0, f64::max)
    }

    fn row_means_vanish(&self, tol: f64) -> bool {
        let scale = self.values.iter().fold(1.0f64, |m, v| m.max(math::abs(*v)));
        self.max_abs_row_mean() <= tol * scale
    }
}

/// Pairwise distances of a 1-D sample.
pub fn pairwise_distances(x: &[f64], metric: Metric) -> Result<DistanceMatrix> {
    pairwise_distances_rows(x, 1, metric)
}

/// Pairwise distances between the rows of an `n × dim` row-major matrix.
pub fn pairwise_distances_rows(data: &[f64], dim: usize, metric: Metric) -> Result<DistanceMatrix> {
    metric.validate()?;
    if dim == 0 || data.len() % dim != 0 {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: data.len(),
        });
    }
    let n = data.len() / dim;
    if n < 2 {
        return Err(Error::TooFewSamples { required: 2, found: n });
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        let a = &data[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            let d = metric.distance(a, &data[j * dim..(j + 1) * dim]);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix {
        n,
        values,
        centered: false,
    })
}

/// `out[i][j] = m[i][j] - rowmean_i - colmean_j + grandmean`.
pub fn double_center(m: &DistanceMatrix) -> DistanceMatrix {
    let n = m.n;
    let nf = n as f64;
    let means: Vec<f64> = (0..n).map(|i| m.row(i).iter().sum::<f64>() / nf).collect();
    let grand = means.iter().sum::<f64>() / nf;
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = m.values[i * n + j] - means[i] - means[j] + grand;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    DistanceMatrix {
        n,
        values,
        centered: true,
    }
}

/// `V²(X, Y) = Σ A_kl B_kl / n²` for doubly centered `A`, `B`.
pub fn distance_covariance_sq(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    if !a.centered || !b.centered {
        return Err(Error::NotCentered);
    }
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok(s / (a.n as f64 * a.n as f64))
}

fn correlation_from_parts(vxy: f64, vx: f64, vy: f64) -> f64 {
    if vx < DEGENERATE_VARIANCE || vy < DEGENERATE_VARIANCE {
        return 0.0;
    }
    (vxy / math::sqrt(vx * vy)).max(0.0)
}

/// Squared distance correlation of two 1-D samples; 0 when either sample
/// is (numerically) constant.
pub fn distance_correlation_sq(x: &[f64], y: &[f64], metric: Metric) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let a = double_center(&pairwise_distances(x, metric)?);
    let b = double_center(&pairwise_distances(y, metric)?);
    let vxy = distance_covariance_sq(&a, &b)?;
    let vx = distance_covariance_sq(&a, &a)?;
    let vy = distance_covariance_sq(&b, &b)?;
    Ok(correlation_from_parts(vxy, vx, vy))
}

/// Same value as [`distance_correlation_sq`] when `b_y` and `vy` were
/// computed once for a shared second variable.
pub fn distance_correlation_sq_precentered(ax: &DistanceMatrix, b_y: &DistanceMatrix, vy: f64) -> Result<f64> {
    let vxy = distance_covariance_sq(ax, b_y)?;
    let vx = distance_covariance_sq(ax, ax)?;
    Ok(correlation_from_parts(vxy, vx, vy))
}

/// Centered distance matrix of a fixed variable (the response), reused
/// against many 1-D predictors.
///
/// Because `B` has zero row and column sums, `Σ A_kl B_kl = Σ a_kl B_kl`
/// for the raw predictor distances `a`, and `Σ A_kl² = Σ a_kl² - 2n Σ r_k² +
/// n² g²` with row means `r` and grand mean `g`. One pass over the pairs
/// therefore gives both covariances without materializing `A`.
///
/// When the response takes only a few distinct values, `B_kl` depends only
/// on the pair of levels, so the pass reduces to per-row sums of `a_kl`
/// over each level block and never reads `B`. The pass stays quadratic.
#[derive(Debug, Clone)]
pub struct ResponseKernel {
    centered: DistanceMatrix,
    variance: f64,
    metric: Metric,
    levels: Option<Levels>,
}

/// Responses with at most this many distinct values use the block pass.
const MAX_LEVELS: usize = 4;

#[derive(Debug, Clone)]
struct Levels {
    /// Observations grouped by level, in order of first appearance.
    order: Vec<usize>,
    /// Block `u` is `order[bounds[u]..bounds[u + 1]]`.
    bounds: Vec<usize>,
    /// `B_kl` for `k` in block `u` and `l` in block `v`, row-major.
    beta: Vec<f64>,
}

impl Levels {
    fn new(y: &[f64], centered: &DistanceMatrix) -> Option<Self> {
        let mut values: Vec<f64> = Vec::new();
        let mut level = Vec::with_capacity(y.len());
        for &v in y {
            let u = match values.iter().position(|&w| w == v) {
                Some(u) => u,
                None if values.len() < MAX_LEVELS => {
                    values.push(v);
                    values.len() - 1
                }
                None => return None,
            };
            level.push(u);
        }
        let m = values.len();
        let mut order = Vec::with_capacity(y.len());
        let mut bounds = vec![0];
        let mut first = vec![0; m];
        for (u, f) in first.iter_mut().enumerate() {
            *f = order.len();
            order.extend((0..y.len()).filter(|&i| level[i] == u));
            bounds.push(order.len());
        }
        let mut beta = vec![0.0; m * m];
        for u in 0..m {
            for v in 0..m {
                beta[u * m + v] = centered.get(order[first[u]], order[first[v]]);
            }
        }
        Some(Self { order, bounds, beta })
    }
}

impl ResponseKernel {
    pub fn new(y: &[f64], metric: Metric) -> Result<Self> {
        let centered = double_center(&pairwise_distances(y, metric)?);
        let variance = distance_covariance_sq(&centered, &centered)?;
        let levels = Levels::new(y, &centered);
        Ok(Self {
            centered,
            variance,
            metric,
            levels,
        })
    }

    pub fn n(&self) -> usize {
        self.centered.n
    }

    /// `V²(y, y)`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn centered(&self) -> &DistanceMatrix {
        &self.centered
    }

    pub fn correlation_sq(&self, x: &[f64]) -> Result<f64> {
        let n = self.centered.n;
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let sums = match (&self.levels, self.metric.is_absolute_difference()) {
            (Some(levels), true) => block_sums(x, levels),
            (None, true) => triangle_sums(x, &self.centered.values, |a, b| math::abs(a - b)),
            (_, false) => triangle_sums(x, &self.centered.values, cosine_scalar),
        };
        let nf = n as f64;
        let grand = sums.row_totals.iter().sum::<f64>() / (nf * nf);
        let row_sq: f64 = sums.row_totals.iter().map(|t| (t / nf) * (t / nf)).sum();
        let saa = sums.aa - 2.0 * nf * row_sq + nf * nf * grand * grand;
        let n2 = nf * nf;
        Ok(correlation_from_parts(sums.ab / n2, saa / n2, self.variance))
    }
}

/// Full sums over ordered pairs: `Σ a_kl B_kl`, `Σ a_kl²` and the row sums
/// of `a`.

struct TriangleSums {
    ab: f64,
    aa: f64,
    row_totals: Vec<f64>,
}

const LANES: usize = 4;

fn triangle_sums<D: Fn(f64, f64) -> f64>(x: &[f64], b: &[f64], dist: D) -> TriangleSums {
    let n = x.len();
    let mut row_totals = vec![0.0; n];
    let mut ab = [0.0; LANES];
    let mut aa = [0.0; LANES];
    for k in 0..n {
        let xk = x[k];
        let xs = &x[k + 1..];
        let bs = &b[k * n + k + 1..(k + 1) * n];
        let (head, tail) = row_totals.split_at_mut(k + 1);
        let mut rk = [0.0; LANES];

        let mut xc = xs.chunks_exact(LANES);
        let mut bc = bs.chunks_exact(LANES);
        let mut tc = tail.chunks_exact_mut(LANES);
        for ((xv, bv), tv) in (&mut xc).zip(&mut bc).zip(&mut tc) {
            for l in 0..LANES {
                let d = dist(xk, xv[l]);
                ab[l] += d * bv[l];
                aa[l] += d * d;
                rk[l] += d;
                tv[l] += d;
            }
        }
        let mut rest = 0.0;
        for ((&xl, &bl), tl) in xc.remainder().iter().zip(bc.remainder()).zip(tc.into_remainder()) {
            let d = dist(xk, xl);
            ab[0] += d * bl;
            aa[0] += d * d;
            rest += d;
            *tl += d;
        }
        head[k] += rk.iter().sum::<f64>() + rest;
    }
    TriangleSums {
        ab: 2.0 * ab.iter().sum::<f64>(),
        aa: 2.0 * aa.iter().sum::<f64>(),
        row_totals,
    }
}

// Adds |xk - v| to `into` elementwise and returns the total, in fixed lane order.
fn abs_dev_scatter(xk: f64, block: &[f64], into: &mut [f64]) -> f64 {
    const W: usize = 8;
    let mut acc = [0.0; W];
    let mut chunks = block.chunks_exact(W);
    let mut out = into.chunks_exact_mut(W);
    for (c, o) in (&mut chunks).zip(&mut out) {
        for l in 0..W {
            let d = math::abs(xk - c[l]);
            acc[l] += d;
            o[l] += d;
        }
    }
    let mut rest = 0.0;
    for (&v, o) in chunks.remainder().iter().zip(out.into_remainder()) {
        let d = math::abs(xk - v);
        rest += d;
        *o += d;
    }
    let mut total = 0.0;
    for a in acc {
        total += a;
    }
    total + rest
}

fn block_sums(x: &[f64], levels: &Levels) -> TriangleSums {
    let n = x.len();
    let m = levels.bounds.len() - 1;
    let xs: Vec<f64> = levels.order.iter().map(|&i| x[i]).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for &v in &xs {
        let d = v - mean;
        s1 += d;
        s2 += d * d;
    }
    // Σ_kl (x_k - x_l)² = 2n Σ x² - 2 (Σ x)², taken about the mean.
    let aa = 2.0 * n as f64 * s2 - 2.0 * s1 * s1;

    // per_level[u * n + pos]: Σ |x_pos - x_l| over l in block u. Each pair
    // pos < l is visited once and credited to both rows.
    let mut per_level = vec![0.0; m * n];
    for u in 0..m {
        for pos in levels.bounds[u]..levels.bounds[u + 1] {
            let xk = xs[pos];
            let mut own = [0.0; MAX_LEVELS];
            let into = &mut per_level[u * n..(u + 1) * n];
            for v in u..m {
                let lo = levels.bounds[v].max(pos + 1);
                let hi = levels.bounds[v + 1];
                if lo < hi {
                    own[v] = abs_dev_scatter(xk, &xs[lo..hi], &mut into[lo..hi]);
                }
            }
            for v in u..m {
                per_level[v * n + pos] += own[v];
            }
        }
    }

    let mut row_totals = vec![0.0; n];
    let mut ab = 0.0;
    for u in 0..m {
        for pos in levels.bounds[u]..levels.bounds[u + 1] {
            let mut total = 0.0;
            for v in 0..m {
                let s = per_level[v * n + pos];
                ab += levels.beta[u * m + v] * s;
                total += s;
            }
            row_totals[levels.order[pos]] = total;
        }
    }
    TriangleSums { ab, aa, row_totals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use alloc::string::ToString;
    use rand_chacha::ChaCha8Rng;

    // Székely's V-statistic from raw distances, no centering.
    fn brute_v2(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let nf = n as f64;
        let a = |i: usize, j: usize| (x[i] - x[j]).abs();
        let b = |i: usize, j: usize| (y[i] - y[j]).abs();
        let mut s1 = 0.0;
        let mut sa = 0.0;
        let mut sb = 0.0;
        let mut s3 = 0.0;
        for k in 0..n {
            for l in 0..n {
                s1 += a(k, l) * b(k, l);
                sa += a(k, l);
                sb += b(k, l);
                for m in 0..n {
                    s3 += a(k, l) * b(k, m);
                }
            }
        }
        s1 / (nf * nf) + (sa / (nf * nf)) * (sb / (nf * nf)) - 2.0 * s3 / (nf * nf * nf)
    }

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect()
    }

    #[test]
    fn pairwise_examples() {
        let m = pairwise_distances(&[0.0, 3.0], Metric::Euclidean).unwrap();
        assert_eq!(m.values(), &[0.0, 3.0, 3.0, 0.0]);
        let z = pairwise_distances(&[1.0, 1.0, 1.0], Metric::Euclidean).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let t = pairwise_distances(&[0.0, 1.0, 4.0], Metric::Euclidean).unwrap();
        assert_eq!(t.values(), &[0.0, 1.0, 4.0, 1.0, 0.0, 3.0, 4.0, 3.0, 0.0]);
        assert_eq!(
            pairwise_distances(&[1.0], Metric::Euclidean),
            Err(Error::TooFewSamples { required: 2, found: 1 })
        );
    }

    #[test]
    fn multi_dimensional_metrics() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(Metric::Euclidean.distance(&a, &b), 5.0);
        assert_eq!(Metric::Manhattan.distance(&a, &b), 7.0);
        assert!((Metric::Minkowski(3.0).distance(&a, &b) - 91f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((Metric::Cosine.distance(&[1.0, 0.0], &[0.0, 2.0]) - 1.0).abs() < 1e-15);
        assert_eq!(Metric::Cosine.distance(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert!(Metric::Minkowski(0.5).validate().is_err());
    }

    #[test]
    fn metric_parse_round_trip() {
        for m in [Metric::Euclidean, Metric::Manhattan, Metric::Minkowski(3.0), Metric::Cosine] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert!("minkowski:0.2".parse::<Metric>().is_err());
        assert!("chebyshev".parse::<Metric>().is_err());
    }

    #[test]
    fn double_center_examples() {
        let zero = DistanceMatrix::from_values(3, vec![0.0; 9], false).unwrap();
        assert!(double_center(&zero).values().iter().all(|&v| v == 0.0));

        let m = pairwise_distances(&[0.0, 3.0], Metric::Euclidean).unwrap();
        let c = double_center(&m);
        assert!(c.is_centered());
        assert_eq!(c.values(), &[-1.5, 1.5, 1.5, -1.5]);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = double_center(&pairwise_distances(&random(5, &mut rng), Metric::Euclidean).unwrap());
        for i in 0..5 {
            assert!(r.row(i).iter().sum::<f64>().abs() < 1e-10);
            assert!((0..5).map(|j| r.get(j, i)).sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn covariance_examples() {
        let zero = double_center(&pairwise_distances(&[2.0, 2.0], Metric::Euclidean).unwrap());
        assert_eq!(distance_covariance_sq(&zero, &zero).unwrap(), 0.0);

        let c = double_center(&pairwise_distances(&[0.0, 3.0], Metric::Euclidean).unwrap());
        assert_eq!(distance_covariance_sq(&c, &c).unwrap(), 2.25);

        let raw = pairwise_distances(&[0.0, 3.0], Metric::Euclidean).unwrap();
        assert_eq!(distance_covariance_sq(&raw, &c), Err(Error::NotCentered));
        let other = double_center(&pairwise_distances(&[0.0, 3.0, 4.0], Metric::Euclidean).unwrap());
        assert!(matches!(
            distance_covariance_sq(&c, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn covariance_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 3, 7, 20, 41] {
            let x = random(n, &mut rng);
            let y = random(n, &mut rng);
            let a = double_center(&pairwise_distances(&x, Metric::Euclidean).unwrap());
            let b = double_center(&pairwise_distances(&y, Metric::Euclidean).unwrap());
            let v = distance_covariance_sq(&a, &b).unwrap();
            assert!((v - brute_v2(&x, &y)).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn correlation_identities() {
        let x = [0.3, -1.2, 2.5, 0.0, 0.7, 1.1];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 7.0).collect();
        assert!((distance_correlation_sq(&x, &x, Metric::Euclidean).unwrap() - 1.0).abs() < 1e-12);
        assert!((distance_correlation_sq(&x, &y, Metric::Euclidean).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(distance_correlation_sq(&[4.0; 6], &x, Metric::Euclidean).unwrap(), 0.0);
        assert!(distance_correlation_sq(&x, &x[..5], Metric::Euclidean).is_err());
    }

    #[test]
    fn independent_uniforms_have_small_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        let x: Vec<f64> = (0..500).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..500).map(|_| rng.random()).collect();
        assert!(distance_correlation_sq(&x, &y, Metric::Euclidean).unwrap() < 0.05);
    }

    #[test]
    fn precentered_matches_from_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let x = random(100, &mut rng);
        let y: Vec<f64> = x.iter().map(|v| v * v + 0.3 * rng.random::<f64>()).collect();
        let direct = distance_correlation_sq(&x, &y, Metric::Euclidean).unwrap();
        let a = double_center(&pairwise_distances(&x, Metric::Euclidean).unwrap());
        let b = double_center(&pairwise_distances(&y, Metric::Euclidean).unwrap());
        let vy = distance_covariance_sq(&b, &b).unwrap();
        let shared = distance_correlation_sq_precentered(&a, &b, vy).unwrap();
        assert!((direct - shared).abs() < 1e-12);
        assert_eq!(distance_correlation_sq_precentered(&a, &b, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn response_kernel_matches_from_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y: Vec<f64> = (0..67).map(|i| f64::from(u8::from(i % 3 == 0))).collect();
        for metric in [Metric::Euclidean, Metric::Manhattan, Metric::Minkowski(3.0), Metric::Cosine] {
            let kernel = ResponseKernel::new(&y, metric).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = y.iter().map(|c| c + 1.5 * (rng.random::<f64>() - 0.5)).collect();
                let fast = kernel.correlation_sq(&x).unwrap();
                let slow = distance_correlation_sq(&x, &y, metric).unwrap();
                assert!((fast - slow).abs() < 1e-12, "{metric}: {fast} vs {slow}");
            }
        }
        let kernel = ResponseKernel::new(&y, Metric::Euclidean).unwrap();
        assert_eq!(kernel.correlation_sq(&[1.0; 67]).unwrap(), 0.0);
        assert!(kernel.correlation_sq(&[1.0; 3]).is_err());
    }

    #[test]
    fn block_and_triangle_passes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let three: Vec<f64> = (0..53).map(|i| f64::from((i * 7 % 3) as u8) * 2.5).collect();
        let continuous = random(53, &mut rng);
        for y in [three, continuous] {
            let kernel = ResponseKernel::new(&y, Metric::Euclidean).unwrap();
            for offset in [0.0, 1e3] {
                let x: Vec<f64> = y.iter().map(|c| offset + c + rng.random::<f64>()).collect();
                let fast = kernel.correlation_sq(&x).unwrap();
                let slow = distance_correlation_sq(&x, &y, Metric::Euclidean).unwrap();
                assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
            }
        }
    }
}
