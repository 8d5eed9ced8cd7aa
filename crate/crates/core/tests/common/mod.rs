#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rml_core::{DataPoint, SymmetricMatrix, Triplet, TripletDataset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<DataPoint> {
    (0..n)
        .map(|_| DataPoint::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap())
        .collect()
}

/// `n` triplets over a table of random points, oriented so the similar point is
/// closer, then flipped with probability `noise`.
pub fn random_instance(seed: u64, n: usize, dim: usize, noise: f64) -> TripletDataset {
    let mut rng = rng(seed);
    let n_points = (n / 2).max(3);
    let points = random_points(&mut rng, n_points, dim);
    let sq = |a: &DataPoint, b: &DataPoint| -> f64 {
        a.features()
            .iter()
            .zip(b.features())
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };
    let triplets = (0..n)
        .map(|_| {
            let a = rng.gen_range(0..n_points);
            let mut b = rng.gen_range(0..n_points);
            while b == a {
                b = rng.gen_range(0..n_points);
            }
            let mut c = rng.gen_range(0..n_points);
            while c == a || c == b {
                c = rng.gen_range(0..n_points);
            }
            let (y, z) = if sq(&points[a], &points[b]) <= sq(&points[a], &points[c]) {
                (b, c)
            } else {
                (c, b)
            };
            if rng.gen::<f64>() < noise {
                Triplet::new(a, z, y)
            } else {
                Triplet::new(a, y, z)
            }
        })
        .collect();
    TripletDataset::new(points, triplets).unwrap()
}

/// Minimum of the projection objective over a uniform grid on the feasible
/// part of `[0,1]^N`, with `steps` points per axis.
pub fn grid_min(p: &rml_core::ProjectionProblem<'_>, n: usize, steps: usize) -> f64 {
    let mut idx = vec![0usize; n];
    let mut q = vec![0.0; n];
    let mut best = f64::INFINITY;
    let h = 1.0 / (steps - 1) as f64;
    loop {
        for (qi, &k) in q.iter_mut().zip(&idx) {
            *qi = k as f64 * h;
        }
        if q.iter().sum::<f64>() <= p.budget {
            best = best.min(p.objective(&q));
        }
        let mut axis = 0;
        loop {
            if axis == n {
                return best;
            }
            idx[axis] += 1;
            if idx[axis] < steps {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Grid resolution giving about a million points in `n` dimensions.
pub fn million_point_steps(n: usize) -> usize {
    (1e6f64.powf(1.0 / n as f64)).round() as usize
}

/// A random PSD matrix `B Bᵀ` of random rank.
pub fn random_psd(rng: &mut ChaCha8Rng, dim: usize, spread: f64) -> SymmetricMatrix {
    let rank = rng.gen_range(0..=dim);
    let mut m = SymmetricMatrix::zeros(dim);
    for _ in 0..rank {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-spread..spread)).collect();
        m.add_outer(1.0, &v).unwrap();
    }
    m
}

/// PSD candidates near `center` (itself PSD): `center + ε vvᵀ`, plus shrunk copies.
pub fn perturbed_psd(
    rng: &mut ChaCha8Rng,
    center: &SymmetricMatrix,
    scale: f64,
) -> SymmetricMatrix {
    let d = center.dim();
    let mut m = center.scaled(rng.gen_range(1.0 - scale..=1.0));
    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    m.add_outer(scale * rng.gen::<f64>(), &v).unwrap();
    m
}

/// `max Σ q_i c_i` over 0/1 vectors with at most `budget` ones.
pub fn vertex_max(c: &[f64], budget: usize) -> f64 {
    let n = c.len();
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize <= budget)
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| c[i])
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// A random point of `{q ∈ [0,1]^N : Σq ≤ budget}`, scaled down if needed.
pub fn random_feasible(rng: &mut ChaCha8Rng, n: usize, budget: f64) -> Vec<f64> {
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = q.iter().sum();
    if s > budget {
        q.iter_mut().for_each(|x| *x *= budget / s);
    }
    q
}

/// Squared Euclidean distance.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian-ish class blobs: class `c` is centered at `c` on every axis.
pub fn random_labeled(
    rng: &mut ChaCha8Rng,
    n: usize,
    dim: usize,
    classes: usize,
) -> rml_core::LabeledDataset {
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let points = labels
        .iter()
        .map(|&c| {
            DataPoint::new(
                (0..dim)
                    .map(|_| c as f64 + rng.gen_range(-0.8..0.8))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    rml_core::LabeledDataset::with_classes(points, labels, classes).unwrap()
}
