//! k-nearest-neighbor classification under a Mahalanobis metric.
//!
//! Ties are resolved deterministically: equal distances go to the lower
//! training index; equal vote counts go to the label whose voters have the
//! smaller distance sum, then to the smaller label id.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::model::{DataPoint, Metric};
use crate::pipeline::LabeledDataset;

/// Neighborhood size used throughout the experiments.
pub const DEFAULT_K: usize = 5;

/// Test error of one run, or the aggregate over several seeded runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub error_rate: f64,
    pub n_test: usize,
    pub per_seed_errors: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator); zero for one run.
    pub stddev: f64,
}

impl EvalReport {
    pub fn single(misclassified: usize, n_test: usize) -> Self {
        let e = misclassified as f64 / n_test as f64;
        Self {
            error_rate: e,
            n_test,
            per_seed_errors: vec![e],
            mean: e,
            stddev: 0.0,
        }
    }

    /// Combines per-seed reports. `error_rate` is the pooled rate over all
    /// test points, `mean`/`stddev` are over the per-seed rates.
    pub fn aggregate(runs: &[EvalReport]) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::InvalidInput("no runs to aggregate"));
        }
        let per_seed_errors: Vec<f64> = runs
            .iter()
            .flat_map(|r| r.per_seed_errors.iter().copied())
            .collect();
        let n_test = runs.iter().map(|r| r.n_test).sum();
        let misclassified: f64 = runs.iter().map(|r| r.error_rate * r.n_test as f64).sum();
        let (mean, stddev) = mean_and_stddev(&per_seed_errors);
        Ok(Self {
            error_rate: misclassified / n_test as f64,
            n_test,
            per_seed_errors,
            mean,
            stddev,
        })
    }
}

pub fn mean_and_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

fn vote(
    train: &LabeledDataset,
    metric: &Metric,
    query: &[f64],
    k: usize,
    skip: Option<usize>,
) -> usize {
    let mut scratch = Vec::with_capacity(query.len());
    let mut dists: Vec<(f64, usize)> = train
        .points()
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(i, p)| {
            (
                metric.distance_unchecked(query, p.features(), &mut scratch),
                i,
            )
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut counts = vec![0usize; train.n_classes()];
    let mut sums = vec![0.0f64; train.n_classes()];
    for &(d, i) in dists.iter().take(k) {
        let l = train.label(i);
        counts[l] += 1;
        sums[l] += d;
    }
    (0..train.n_classes())
        .filter(|&l| counts[l] > 0)
        .min_by(|&a, &b| {
            counts[b]
                .cmp(&counts[a])
                .then(sums[a].total_cmp(&sums[b]))
                .then(a.cmp(&b))
        })
        .expect("k >= 1 neighbors vote")
}

fn check_k(train: &LabeledDataset, k: usize) -> Result<()> {
    if k == 0 || k > train.len() {
        return Err(Error::InvalidInput("k must lie in [1, |train|]"));
    }
    Ok(())
}

/// Majority label among the `k` training points closest to `query` under `d_A`.
pub fn knn_classify(
    train: &LabeledDataset,
    metric: &Metric,
    query: &DataPoint,
    k: usize,
) -> Result<usize> {
    check_dim(train.dim(), query.dim())?;
    check_dim(train.dim(), metric.dim())?;
    check_k(train, k)?;
    Ok(vote(train, metric, query.features(), k, None))
}

/// Test-set error of kNN under `metric`.
pub fn evaluate(
    train: &LabeledDataset,
    test: &LabeledDataset,
    metric: &Metric,
    k: usize,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::InvalidInput("test set is empty"));
    }
    check_dim(train.dim(), test.dim())?;
    check_dim(train.dim(), metric.dim())?;
    check_k(train, k)?;
    let wrong = (0..test.len())
        .filter(|&i| vote(train, metric, test.points()[i].features(), k, None) != test.label(i))
        .count();
    Ok(EvalReport::single(wrong, test.len()))
}

/// Leave-one-out kNN error on the training set itself: each point is
/// classified by the others.
pub fn leave_one_out_error(train: &LabeledDataset, metric: &Metric, k: usize) -> Result<f64> {
    check_dim(train.dim(), metric.dim())?;
    if k == 0 || k >= train.len() {
        return Err(Error::InvalidInput("k must lie in [1, |train|)"));
    }
    let wrong = (0..train.len())
        .filter(|&i| {
            vote(train, metric, train.points()[i].features(), k, Some(i)) != train.label(i)
        })
        .count();
    Ok(wrong as f64 / train.len() as f64)
}
