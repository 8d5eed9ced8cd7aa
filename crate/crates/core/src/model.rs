//! Triplet constraints, their gap matrices `K_i`, and the learned metric.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{eigendecompose, frobenius_inner, SymmetricMatrix};

/// Eigenvalue floor below which a matrix is not accepted as a metric.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// A feature vector in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint(Vec<f64>);

impl DataPoint {
    pub fn new(features: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidInput("data point has no features"));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("data point has non-finite features"));
        }
        Ok(Self(features))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn features(&self) -> &[f64] {
        &self.0
    }

    pub fn into_features(self) -> Vec<f64> {
        self.0
    }

    fn diff(&self, other: &DataPoint) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }
}

/// Indices into a shared point table: `anchor` should be closer to
/// `similar` than to `dissimilar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triplet {
    pub anchor: usize,
    pub similar: usize,
    pub dissimilar: usize,
}

impl Triplet {
    pub fn new(anchor: usize, similar: usize, dissimilar: usize) -> Self {
        Self {
            anchor,
            similar,
            dissimilar,
        }
    }

    /// The same triplet with the roles of `similar` and `dissimilar` exchanged.
    pub fn swapped(self) -> Self {
        Self {
            anchor: self.anchor,
            similar: self.dissimilar,
            dissimilar: self.similar,
        }
    }
}

/// `K = (x − z)(x − z)ᵀ − (x − y)(x − y)ᵀ` for anchor `x`, similar `y` and
/// dissimilar `z`.
///
/// Every entry is a single difference of two products, so exchanging `y` and
/// `z` yields exactly `−K`.
pub fn build_gap_matrix(
    anchor: &DataPoint,
    similar: &DataPoint,
    dissimilar: &DataPoint,
) -> Result<SymmetricMatrix> {
    check_dim(anchor.dim(), similar.dim())?;
    check_dim(anchor.dim(), dissimilar.dim())?;
    let dz = anchor.diff(dissimilar);
    let dy = anchor.diff(similar);
    Ok(SymmetricMatrix::from_fn(anchor.dim(), |i, j| {
        dz[i] * dz[j] - dy[i] * dy[j]
    }))
}

/// Triplets over a shared point table, with every gap matrix cached.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletDataset {
    points: Arc<[DataPoint]>,
    triplets: Vec<Triplet>,
    gaps: Vec<SymmetricMatrix>,
    dim: usize,
}

impl TripletDataset {
    pub fn new(points: impl Into<Arc<[DataPoint]>>, triplets: Vec<Triplet>) -> Result<Self> {
        let points = points.into();
        if triplets.is_empty() {
            return Err(Error::EmptyTriplets);
        }
        let dim = points
            .first()
            .map(DataPoint::dim)
            .ok_or(Error::InvalidInput("empty point table"))?;
        for p in points.iter() {
            check_dim(dim, p.dim())?;
        }
        let gaps = triplets
            .iter()
            .map(|t| {
                let get = |i: usize| {
                    points
                        .get(i)
                        .ok_or(Error::InvalidInput("triplet index out of range"))
                };
                build_gap_matrix(get(t.anchor)?, get(t.similar)?, get(t.dissimilar)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            triplets,
            gaps,
            dim,
        })
    }

    /// Replaces triplet `i` by its swapped form and negates its cached gap matrix.
    pub(crate) fn swap_in_place(&mut self, i: usize) {
        self.triplets[i] = self.triplets[i].swapped();
        self.gaps[i] = self.gaps[i].neg();
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &DataPoint {
        &self.points[i]
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn gap_matrices(&self) -> &[SymmetricMatrix] {
        &self.gaps
    }

    pub fn gap_matrix(&self, i: usize) -> &SymmetricMatrix {
        &self.gaps[i]
    }

    /// `x_i − z_i` for triplet `i`.
    pub fn dissimilar_offset(&self, i: usize) -> Vec<f64> {
        let t = self.triplets[i];
        self.points[t.anchor].diff(&self.points[t.dissimilar])
    }
}

/// A Mahalanobis metric `d_A(x, y) = (x − y)ᵀ A (x − y)` with PSD `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    matrix: SymmetricMatrix,
}

impl Metric {
    /// Accepts `matrix` when its smallest eigenvalue is at least `−1e-8`.
    pub fn new(matrix: SymmetricMatrix) -> Result<Self> {
        let eig = eigendecompose(&matrix)?;
        if eig.eigenvalues[0] < -PSD_TOLERANCE {
            return Err(Error::InvalidInput(
                "metric matrix is not positive semidefinite",
            ));
        }
        Ok(Self { matrix })
    }

    /// For matrices that are PSD by construction (projections and their
    /// nonnegative combinations).
    pub(crate) fn from_psd(matrix: SymmetricMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: SymmetricMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: SymmetricMatrix::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymmetricMatrix {
        self.matrix
    }

    /// The metric scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0, "metric scale must be positive");
        Self {
            matrix: self.matrix.scaled(c),
        }
    }

    pub(crate) fn distance_unchecked(&self, a: &[f64], b: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend(a.iter().zip(b).map(|(x, y)| x - y));
        self.matrix.quadratic_form(scratch).unwrap_or(f64::NAN)
    }
}

/// Squared-form Mahalanobis distance `(a − b)ᵀ A (a − b)`.
pub fn mahalanobis_distance(m: &Metric, a: &DataPoint, b: &DataPoint) -> Result<f64> {
    check_dim(m.dim(), a.dim())?;
    check_dim(m.dim(), b.dim())?;
    m.matrix.quadratic_form(&a.diff(b))
}

/// `d_A(x, z) − d_A(x, y)`, which equals `tr(A·K)`.
pub fn triplet_margin(
    m: &Metric,
    anchor: &DataPoint,
    similar: &DataPoint,
    dissimilar: &DataPoint,
) -> Result<f64> {
    Ok(mahalanobis_distance(m, anchor, dissimilar)? - mahalanobis_distance(m, anchor, similar)?)
}

impl TripletDataset {
    /// Margin of triplet `i` computed from distances.
    pub fn margin(&self, m: &Metric, i: usize) -> Result<f64> {
        let t = self.triplets[i];
        triplet_margin(
            m,
            &self.points[t.anchor],
            &self.points[t.similar],
            &self.points[t.dissimilar],
        )
    }

    /// Margin of triplet `i` as `⟨A, K_i⟩_F`.
    pub fn margin_from_gap(&self, m: &Metric, i: usize) -> Result<f64> {
        frobenius_inner(m.matrix(), &self.gaps[i])
    }
}
