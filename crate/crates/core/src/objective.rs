//! The robust dual objective over adversarial triplet weights.
//!
//! With `P(q) = π_{S+}(Σ q_i K_i)`:
//!
//! ```text
//! L(q)  = −Σ q_i + ‖P(q)‖²_F / (2λ)                    (minimized over Q̂)
//! ∇L(q) = −1 + h/λ,   h_i = ⟨K_i, P(q)⟩
//! A(q)  = P(q) / λ
//! H(A)  = −(λ/2)‖A‖²_F − max_{q ∈ Q̂} Σ q_i (1 − ⟨A, K_i⟩)
//! ```
//!
//! where `Q̂ = {q ∈ [0,1]^N : Σ q_i ≤ N·η}`. Weak duality gives
//! `L(q) − H(A) ≥ 0` for every feasible `q` and PSD `A`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    frobenius_inner, frobenius_inner_many, psd_norm_squared, psd_project, SymmetricMatrix,
};
use crate::model::{Metric, TripletDataset};

/// Box tolerance for a feasible weight vector.
pub const BOX_TOLERANCE: f64 = 1e-10;
/// Budget tolerance for a feasible weight vector.
pub const BUDGET_TOLERANCE: f64 = 1e-8;

/// Adversarial triplet weights `q ∈ [0,1]^N` with `Σ q_i ≤ capacity`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    capacity: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, capacity: f64) -> Result<Self> {
        let w = Self { weights, capacity };
        if !w.weights.iter().all(|v| v.is_finite()) || !capacity.is_finite() {
            return Err(Error::InvalidInput("weights must be finite"));
        }
        if !w.is_feasible() {
            return Err(Error::InvalidInput("weights lie outside the capped box"));
        }
        Ok(w)
    }

    pub fn zeros(len: usize, capacity: f64) -> Self {
        Self {
            weights: vec![0.0; len],
            capacity,
        }
    }

    pub(crate) fn from_parts(weights: Vec<f64>, capacity: f64) -> Self {
        Self { weights, capacity }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Box within `1e-10`, budget within `1e-8`.
    pub fn is_feasible(&self) -> bool {
        self.weights
            .iter()
            .all(|&v| (-BOX_TOLERANCE..=1.0 + BOX_TOLERANCE).contains(&v))
            && self.sum() <= self.capacity + BUDGET_TOLERANCE
    }
}

impl AsRef<[f64]> for WeightVector {
    fn as_ref(&self) -> &[f64] {
        &self.weights
    }
}

/// `max Σ q_i c_i` over `q ∈ [0,1]^N, Σ q_i ≤ budget`.
///
/// Greedy on the positive coefficients in descending order; the last
/// coordinate may receive a fractional weight. Ties go to the lower index.
pub fn max_linear_over_capped_box(coefficients: &[f64], budget: f64) -> f64 {
    let mut positive: Vec<usize> = (0..coefficients.len())
        .filter(|&i| coefficients[i] > 0.0)
        .collect();
    positive.sort_by(|&i, &j| coefficients[j].total_cmp(&coefficients[i]).then(i.cmp(&j)));
    let mut remaining = budget.max(0.0);
    let mut total = 0.0;
    for i in positive {
        if remaining <= 0.0 {
            break;
        }
        let w = remaining.min(1.0);
        total += w * coefficients[i];
        remaining -= w;
    }
    total
}

/// Evaluation of `L` at a point, sharing one PSD projection between the
/// value and the gradient.
#[derive(Debug, Clone)]
pub struct ObjectiveEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// `π_{S+}(Σ q_i K_i)`; the recovered metric is this divided by `λ`.
    pub projected: SymmetricMatrix,
}

/// Regularization weight, trusted fraction and the triplets they apply to.
#[derive(Debug, Clone, Copy)]
pub struct ObjectiveConfig<'a> {
    reg_lambda: f64,
    eta: f64,
    dataset: &'a TripletDataset,
}

impl<'a> ObjectiveConfig<'a> {
    pub fn new(reg_lambda: f64, eta: f64, dataset: &'a TripletDataset) -> Result<Self> {
        if !(reg_lambda > 0.0 && reg_lambda.is_finite()) {
            return Err(Error::InvalidInput(
                "regularization weight must be positive",
            ));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidInput("trusted fraction must lie in (0, 1]"));
        }
        Ok(Self {
            reg_lambda,
            eta,
            dataset,
        })
    }

    pub fn reg_lambda(&self) -> f64 {
        self.reg_lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dataset(&self) -> &'a TripletDataset {
        self.dataset
    }

    pub fn len(&self) -> usize {
        self.dataset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dataset.is_empty()
    }

    /// `N·η`.
    pub fn budget(&self) -> f64 {
        self.dataset.len() as f64 * self.eta
    }

    /// The all-zero starting point.
    pub fn zero_weights(&self) -> WeightVector {
        WeightVector::zeros(self.len(), self.budget())
    }

    /// `Σ q_i K_i`.
    pub fn weighted_gap_sum(&self, q: &[f64]) -> Result<SymmetricMatrix> {
        check_dim(self.len(), q.len())?;
        let mut acc = SymmetricMatrix::zeros(self.dataset.dim());
        for (&qi, k) in q.iter().zip(self.dataset.gap_matrices()) {
            if qi != 0.0 {
                acc.add_scaled(qi, k)?;
            }
        }
        Ok(acc)
    }

    fn projected(&self, q: &[f64]) -> Result<SymmetricMatrix> {
        psd_project(&self.weighted_gap_sum(q)?)
    }

    fn value_from_projection(&self, q: &[f64], projected: &SymmetricMatrix) -> f64 {
        -q.iter().sum::<f64>() + projected.frobenius_norm_squared() / (2.0 * self.reg_lambda)
    }

    /// `L(q) = −Σ q_i + ‖π_{S+}(Σ q_i K_i)‖²_F / (2λ)`.
    pub fn eval_objective(&self, q: impl AsRef<[f64]>) -> Result<f64> {
        let q = q.as_ref();
        let norm_sq = psd_norm_squared(&self.weighted_gap_sum(q)?)?;
        Ok(-q.iter().sum::<f64>() + norm_sq / (2.0 * self.reg_lambda))
    }

    /// `∇L(q)_i = −1 + ⟨K_i, π_{S+}(Σ q_j K_j)⟩ / λ`.
    pub fn eval_gradient(&self, q: impl AsRef<[f64]>) -> Result<Vec<f64>> {
        Ok(self.evaluate(q)?.gradient)
    }

    /// Value, gradient and projection from a single eigendecomposition.
    pub fn evaluate(&self, q: impl AsRef<[f64]>) -> Result<ObjectiveEval> {
        let q = q.as_ref();
        let projected = self.projected(q)?;
        let value = self.value_from_projection(q, &projected);
        let inv = 1.0 / self.reg_lambda;
        let mut gradient = frobenius_inner_many(&projected, self.dataset.gap_matrices())?;
        for g in &mut gradient {
            *g = -1.0 + inv * *g;
        }
        Ok(ObjectiveEval {
            value,
            gradient,
            projected,
        })
    }

    /// `A(q) = π_{S+}(Σ q_i K_i) / λ`.
    pub fn recover_metric(&self, q: impl AsRef<[f64]>) -> Result<Metric> {
        Ok(Metric::from_psd(
            self.projected(q.as_ref())?.scaled(1.0 / self.reg_lambda),
        ))
    }

    /// `sqrt(Σ_i (1 + |⟨K_i, Z⟩|/λ)²)` with `Z = Σ_i (x_i − z_i)(x_i − z_i)ᵀ`.
    ///
    /// The absolute value keeps every term at least one, so the bound stays
    /// valid when `⟨K_i, Z⟩` is negative.
    pub fn lipschitz_bound(&self) -> f64 {
        let mut z = SymmetricMatrix::zeros(self.dataset.dim());
        for i in 0..self.len() {
            let v = self.dataset.dissimilar_offset(i);
            z.add_outer(1.0, &v)
                .expect("offsets share the dataset dimension");
        }
        let inv = 1.0 / self.reg_lambda;
        let sum: f64 = self
            .dataset
            .gap_matrices()
            .iter()
            .map(|k| {
                let t = 1.0
                    + inv
                        * frobenius_inner(k, &z)
                            .expect("gap matrices share the dataset dimension")
                            .abs();
                t * t
            })
            .sum();
        libm::sqrt(sum)
    }

    /// `H(A) = −(λ/2)‖A‖²_F − max_{q ∈ Q̂} Σ q_i (1 − ⟨A, K_i⟩)`.
    pub fn eval_dual(&self, a: &Metric) -> Result<f64> {
        check_dim(self.dataset.dim(), a.dim())?;
        let mut coefficients = frobenius_inner_many(a.matrix(), self.dataset.gap_matrices())?;
        for c in &mut coefficients {
            *c = 1.0 - *c;
        }
        let inner = max_linear_over_capped_box(&coefficients, self.budget());
        Ok(-0.5 * self.reg_lambda * a.matrix().frobenius_norm_squared() - inner)
    }

    /// `L(q) − H(A)`.
    pub fn duality_gap(&self, q: impl AsRef<[f64]>, a: &Metric) -> Result<f64> {
        Ok(self.eval_objective(q)? - self.eval_dual(a)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataPoint, Triplet};

    fn pts(v: &[&[f64]]) -> Vec<DataPoint> {
        v.iter()
            .map(|x| DataPoint::new(x.to_vec()).unwrap())
            .collect()
    }

    /// One triplet with `K = diag(1, −1)`.
    fn diag_instance() -> TripletDataset {
        // x = 0, y = (0,1), z = (1,0)
        TripletDataset::new(
            pts(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]),
            vec![Triplet::new(0, 1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn zero_weights() {
        let td = diag_instance();
        let cfg = ObjectiveConfig::new(1.0, 1.0, &td).unwrap();
        assert_eq!(cfg.eval_objective(cfg.zero_weights()).unwrap(), 0.0);
        assert_eq!(cfg.eval_gradient(cfg.zero_weights()).unwrap(), vec![-1.0]);
        assert_eq!(
            cfg.recover_metric(cfg.zero_weights()).unwrap(),
            Metric::zeros(2)
        );
    }

    #[test]
    fn negative_semidefinite_gap_gives_minus_one() {
        // x = 0, y = 2, z = 1  →  K = 1 − 4 = −3
        let td = TripletDataset::new(pts(&[&[0.0], &[2.0], &[1.0]]), vec![Triplet::new(0, 1, 2)])
            .unwrap();
        let cfg = ObjectiveConfig::new(1.0, 1.0, &td).unwrap();
        assert_eq!(cfg.eval_objective([1.0]).unwrap(), -1.0);
    }

    #[test]
    fn recover_metric_clips_and_scales() {
        let td = diag_instance();
        assert_eq!(
            td.gap_matrix(0),
            &SymmetricMatrix::from_diagonal(&[1.0, -1.0])
        );
        let cfg = ObjectiveConfig::new(2.0, 1.0, &td).unwrap();
        let a = cfg.recover_metric([1.0]).unwrap();
        assert_eq!(a.matrix(), &SymmetricMatrix::from_diagonal(&[0.5, 0.0]));
    }

    #[test]
    fn psd_gap_gradient() {
        // x = 0, y = 0, z = (1, 2): K = z zᵀ is PSD, ‖K‖²_F = 25.
        let td = TripletDataset::new(
            pts(&[&[0.0, 0.0], &[1.0, 2.0]]),
            vec![Triplet::new(0, 0, 1)],
        )
        .unwrap();
        let cfg = ObjectiveConfig::new(1.0, 1.0, &td).unwrap();
        let g = cfg.eval_gradient([1.0]).unwrap();
        assert!((g[0] - 24.0).abs() < 1e-10);
    }

    #[test]
    fn lipschitz_scalar_cases() {
        let td = TripletDataset::new(pts(&[&[0.0], &[1.0]]), vec![Triplet::new(0, 0, 1)]).unwrap();
        let cfg = ObjectiveConfig::new(1.0, 1.0, &td).unwrap();
        assert_eq!(cfg.lipschitz_bound(), 2.0);

        // x == z everywhere: Z = 0, each term is one.
        let td = TripletDataset::new(
            pts(&[&[0.0, 1.0], &[2.0, 2.0], &[-1.0, 0.5]]),
            vec![
                Triplet::new(0, 1, 0),
                Triplet::new(1, 2, 1),
                Triplet::new(2, 0, 2),
            ],
        )
        .unwrap();
        let cfg = ObjectiveConfig::new(0.3, 0.5, &td).unwrap();
        assert!((cfg.lipschitz_bound() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dual_at_zero_metric() {
        let points = pts(&[&[0.0], &[1.0], &[3.0]]);
        let triplets = (0..10)
            .map(|i| Triplet::new(i % 3, (i + 1) % 3, (i + 2) % 3))
            .collect();
        let td = TripletDataset::new(points, triplets).unwrap();
        let cfg = ObjectiveConfig::new(1.0, 0.8, &td).unwrap();
        assert!((cfg.eval_dual(&Metric::zeros(1)).unwrap() + 8.0).abs() < 1e-12);
        assert!(
            (cfg.duality_gap(cfg.zero_weights(), &Metric::zeros(1))
                .unwrap()
                - 8.0)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn dual_with_all_margins_satisfied() {
        let td = diag_instance();
        let cfg = ObjectiveConfig::new(1.5, 1.0, &td).unwrap();
        let a = Metric::new(SymmetricMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
        // ⟨A, K⟩ = 2 ≥ 1
        let h = cfg.eval_dual(&a).unwrap();
        assert_eq!(h, -0.75 * 10.0);
    }

    #[test]
    fn greedy_fractional_budget() {
        assert_eq!(
            max_linear_over_capped_box(&[0.5, -1.0, 2.0, 1.0], 2.5),
            2.0 + 1.0 + 0.25
        );
        assert_eq!(max_linear_over_capped_box(&[-0.5, -1.0], 2.0), 0.0);
        assert_eq!(max_linear_over_capped_box(&[1.0, 1.0, 1.0], 10.0), 3.0);
    }

    #[test]
    fn config_validation() {
        let td = diag_instance();
        assert!(ObjectiveConfig::new(0.0, 0.5, &td).is_err());
        assert!(ObjectiveConfig::new(1.0, 0.0, &td).is_err());
        assert!(ObjectiveConfig::new(1.0, 1.1, &td).is_err());
        let cfg = ObjectiveConfig::new(1.0, 1.0, &td).unwrap();
        assert_eq!(
            cfg.eval_objective([0.5, 0.5]),
            Err(Error::Dimension {
                expected: 1,
                found: 2
            })
        );
        assert!(cfg.eval_dual(&Metric::zeros(3)).is_err());
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![0.5, 1.0], 1.5).is_ok());
        assert!(WeightVector::new(vec![0.5, 1.0], 1.4).is_err());
        assert!(WeightVector::new(vec![-0.1, 0.0], 1.0).is_err());
        assert!(WeightVector::new(vec![1.1], 2.0).is_err());
        assert!(WeightVector::new(vec![f64::NAN], 2.0).is_err());
    }
}
