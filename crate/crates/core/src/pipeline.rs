//! Labeled data, seeded train/test splits, triplet generation from
//! nearest-neighbor structure, and controlled label noise on triplets.
//!
//! Every random stage draws from ChaCha8 seeded with `seed_from_u64`, so
//! outputs are a pure function of `(input, seed)` on every platform.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::model::{DataPoint, Triplet, TripletDataset};

/// Default number of triplets kept per anchor.
pub const DEFAULT_CAP_PER_ANCHOR: usize = 20;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: Vec<DataPoint>,
    labels: Vec<usize>,
    dim: usize,
    n_classes: usize,
}

impl LabeledDataset {
    /// Labels must already be contiguous class ids; `n_classes` is one past
    /// the largest.
    pub fn new(points: Vec<DataPoint>, labels: Vec<usize>) -> Result<Self> {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        Self::with_classes(points, labels, n_classes)
    }

    pub fn with_classes(
        points: Vec<DataPoint>,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        check_dim(points.len(), labels.len())?;
        let dim = points
            .first()
            .map(DataPoint::dim)
            .ok_or(Error::InvalidInput("dataset is empty"))?;
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        if labels.iter().any(|&l| l >= n_classes) {
            return Err(Error::InvalidInput("label outside [0, n_classes)"));
        }
        Ok(Self {
            points,
            labels,
            dim,
            n_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            dim: self.dim,
            n_classes: self.n_classes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        Self {
            train_fraction,
            seed,
        }
    }
}

/// Seeded random partition with `round(train_fraction · n)` training points.
/// Both parts keep the original row order.
pub fn split(ds: &LabeledDataset, spec: SplitSpec) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidInput("train fraction must lie in (0, 1)"));
    }
    let n = ds.len();
    let n_train = libm::round(spec.train_fraction * n as f64) as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::Split { n, train: n_train });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(spec.seed));
    let (train, test) = order.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(train), ds.subset(test)))
}

/// Per-feature z-scoring with statistics from a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Population mean and standard deviation; constant features keep scale 1.
    pub fn fit(ds: &LabeledDataset) -> Self {
        let n = ds.len() as f64;
        let d = ds.dim();
        let mut mean = alloc::vec![0.0; d];
        for p in ds.points() {
            for (m, x) in mean.iter_mut().zip(p.features()) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; d];
        for p in ds.points() {
            for ((v, x), m) in var.iter_mut().zip(p.features()).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = var
            .iter()
            .map(|v| {
                let s = libm::sqrt(v / n);
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, scale }
    }

    pub fn apply(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        check_dim(self.mean.len(), ds.dim())?;
        let points = ds
            .points()
            .iter()
            .map(|p| {
                DataPoint::new(
                    p.features()
                        .iter()
                        .zip(&self.mean)
                        .zip(&self.scale)
                        .map(|((x, m), s)| (x - m) / s)
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::with_classes(points, ds.labels().to_vec(), ds.n_classes())
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` nearest other points of `anchor` with their squared distances,
/// nearest first; equal distances go to the lower index.
pub fn nearest_neighbors(ds: &LabeledDataset, anchor: usize, k: usize) -> Vec<(usize, f64)> {
    let x = ds.points()[anchor].features();
    let mut all: Vec<(usize, f64)> = (0..ds.len())
        .filter(|&j| j != anchor)
        .map(|j| (j, squared_euclidean(x, ds.points()[j].features())))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Triplets `(x, y, z)` where `y` and `z` are among the `k` Euclidean nearest
/// neighbors of `x`, `y` shares the label of `x` and `z` does not.
///
/// Per anchor the cross product of same-class and other-class neighbors is
/// emitted with `y` in the outer loop (both in nearest-first order) and cut
/// at `cap_per_anchor`.
pub fn generate_triplets(
    train: &LabeledDataset,
    k: usize,
    cap_per_anchor: usize,
) -> Result<TripletDataset> {
    if k == 0 || k >= train.len() {
        return Err(Error::InvalidInput("k must lie in [1, n)"));
    }
    if cap_per_anchor == 0 {
        return Err(Error::InvalidInput("cap per anchor must be positive"));
    }
    let mut triplets = Vec::new();
    for anchor in 0..train.len() {
        let label = train.label(anchor);
        let (same, other): (Vec<_>, Vec<_>) = nearest_neighbors(train, anchor, k)
            .into_iter()
            .map(|(j, _)| j)
            .partition(|&j| train.label(j) == label);
        triplets.extend(
            same.iter()
                .flat_map(|&y| other.iter().map(move |&z| Triplet::new(anchor, y, z)))
                .take(cap_per_anchor),
        );
    }
    if triplets.is_empty() {
        return Err(Error::EmptyTriplets);
    }
    let points: Arc<[DataPoint]> = train.points().to_vec().into();
    TripletDataset::new(points, triplets)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Probability that a triplet is kept as is.
    pub eta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(eta: f64, seed: u64) -> Self {
        Self { eta, seed }
    }
}

/// Swaps `similar` and `dissimilar` of each triplet independently with
/// probability `1 − η`. Returns the noisy dataset and the flip mask.
pub fn inject_noise(td: &TripletDataset, spec: NoiseSpec) -> Result<(TripletDataset, Vec<bool>)> {
    if !(0.0..=1.0).contains(&spec.eta) {
        return Err(Error::InvalidInput("eta must lie in [0, 1]"));
    }
    let flip_probability = 1.0 - spec.eta;
    let mut rng = seeded_rng(spec.seed);
    let mask: Vec<bool> = (0..td.len())
        .map(|_| rng.gen::<f64>() < flip_probability)
        .collect();
    Ok((apply_flips(td, &mask)?, mask))
}

/// Swaps every triplet whose mask entry is set. Applying the same mask twice
/// restores the input exactly.
pub fn apply_flips(td: &TripletDataset, mask: &[bool]) -> Result<TripletDataset> {
    check_dim(td.len(), mask.len())?;
    let mut out = td.clone();
    for (i, _) in mask.iter().enumerate().filter(|(_, &f)| f) {
        out.swap_in_place(i);
    }
    Ok(out)
}
