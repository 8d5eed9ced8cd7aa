//! Exact solver for
//!
//! ```text
//! min_q  (scale/2)·‖q − center‖² + (q − offset)ᵀ slope
//! s.t.   q ∈ [0,1]^N,  Σ q_i ≤ budget
//! ```
//!
//! The minimizer is `q_i = clip[0,1](center_i − slope_i/scale − μ)` with a
//! KKT multiplier `μ ≥ 0`: zero when the unconstrained clip already fits the
//! budget, otherwise the root of the nonincreasing map `μ ↦ Σ q_i(μ) − budget`.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::objective::WeightVector;

const BISECTION_MAX_ITERS: usize = 200;
const BISECTION_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct ProjectionProblem<'a> {
    pub scale: f64,
    pub center: &'a [f64],
    /// Only shifts the objective by a constant. An empty slice means zero.
    pub offset: &'a [f64],
    pub slope: &'a [f64],
    pub budget: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSolution {
    pub weights: WeightVector,
    /// The budget multiplier `μ`.
    pub multiplier: f64,
}

impl ProjectionSolution {
    /// `μ·(Σq − budget)`, zero at a KKT point.
    pub fn complementary_slackness(&self) -> f64 {
        self.multiplier * (self.weights.sum() - self.weights.capacity())
    }
}

impl<'a> ProjectionProblem<'a> {
    pub fn new(scale: f64, center: &'a [f64], slope: &'a [f64], budget: f64) -> Self {
        Self {
            scale,
            center,
            offset: &[],
            slope,
            budget,
        }
    }

    pub fn with_offset(mut self, offset: &'a [f64]) -> Self {
        self.offset = offset;
        self
    }

    pub fn len(&self) -> usize {
        self.center.len()
    }

    pub fn is_empty(&self) -> bool {
        self.center.is_empty()
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.center.len(), self.slope.len())?;
        if !self.offset.is_empty() {
            check_dim(self.center.len(), self.offset.len())?;
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !(self.scale.is_finite() && self.budget.is_finite())
            || !finite(self.center)
            || !finite(self.slope)
            || !finite(self.offset)
        {
            return Err(Error::InvalidInput(
                "projection problem has non-finite data",
            ));
        }
        if self.scale <= 0.0 {
            return Err(Error::InvalidInput("projection scale must be positive"));
        }
        if self.budget <= 0.0 {
            return Err(Error::InvalidInput("projection budget must be positive"));
        }
        Ok(())
    }

    /// Objective value at `q` (including the offset term).
    pub fn objective(&self, q: &[f64]) -> f64 {
        let offset = |i: usize| self.offset.get(i).copied().unwrap_or(0.0);
        q.iter()
            .enumerate()
            .map(|(i, &qi)| {
                let d = qi - self.center[i];
                0.5 * self.scale * d * d + (qi - offset(i)) * self.slope[i]
            })
            .sum()
    }
}

fn clipped_sum(targets: &[f64], mu: f64) -> f64 {
    targets.iter().map(|&u| (u - mu).clamp(0.0, 1.0)).sum()
}

/// Solves the capped-box projection problem exactly (up to the bisection
/// tolerance, followed by a closed-form polish on the final linear piece).
pub fn solve_projection(p: &ProjectionProblem<'_>) -> Result<ProjectionSolution> {
    p.validate()?;
    let targets: Vec<f64> = p
        .center
        .iter()
        .zip(p.slope)
        .map(|(a, s)| a - s / p.scale)
        .collect();
    let n = targets.len();

    let finish = |mu: f64| {
        let q = targets.iter().map(|&u| (u - mu).clamp(0.0, 1.0)).collect();
        ProjectionSolution {
            weights: WeightVector::from_parts(q, p.budget),
            multiplier: mu,
        }
    };

    if p.budget >= n as f64 || clipped_sum(&targets, 0.0) <= p.budget {
        return Ok(finish(0.0));
    }

    // Σq(lo) > budget ≥ Σq(hi); at hi every coordinate clips to zero.
    let mut lo = 0.0;
    let mut hi = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = BISECTION_REL_TOL * p.budget.max(1.0);
    let mut hi_sum = clipped_sum(&targets, hi);
    for _ in 0..BISECTION_MAX_ITERS {
        if (hi_sum - p.budget).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = clipped_sum(&targets, mid);
        if s > p.budget {
            lo = mid;
        } else {
            hi = mid;
            hi_sum = s;
        }
    }

    // The residual is linear in μ between breakpoints; solve it exactly on
    // the piece containing the bracket midpoint.
    let probe = 0.5 * (lo + hi);
    let (mut free_sum, mut free, mut ones) = (0.0, 0usize, 0usize);
    for &u in &targets {
        let v = u - probe;
        if v >= 1.0 {
            ones += 1;
        } else if v > 0.0 {
            free += 1;
            free_sum += u;
        }
    }
    let mut mu = hi;
    if free > 0 {
        let exact = (free_sum + ones as f64 - p.budget) / free as f64;
        if exact >= lo && exact <= hi {
            let s = clipped_sum(&targets, exact);
            if s <= p.budget + 1e-12 * p.budget.max(1.0)
                && (s - p.budget).abs() <= (hi_sum - p.budget).abs()
            {
                mu = exact;
            }
        }
    }
    Ok(finish(mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_data_gives_zero() {
        let z = vec![0.0; 4];
        for budget in [0.5, 2.0, 10.0] {
            let s = solve_projection(&ProjectionProblem::new(3.0, &z, &z, budget)).unwrap();
            assert_eq!(s.weights.as_slice(), &z[..]);
            assert_eq!(s.multiplier, 0.0);
        }
    }

    #[test]
    fn symmetric_split() {
        let a = [1.0, 1.0];
        let s = [0.0, 0.0];
        let sol = solve_projection(&ProjectionProblem::new(1.0, &a, &s, 1.0)).unwrap();
        assert!((sol.weights.as_slice()[0] - 0.5).abs() < 1e-12);
        assert!((sol.weights.as_slice()[1] - 0.5).abs() < 1e-12);
        assert!((sol.multiplier - 0.5).abs() < 1e-12);
        assert!(sol.complementary_slackness().abs() <= 1e-8);
    }

    #[test]
    fn large_positive_slope_clips_to_zero() {
        let scale = 2.5;
        let a = [0.1, 0.9, 0.5];
        let s = [10.0 * scale; 3];
        let sol = solve_projection(&ProjectionProblem::new(scale, &a, &s, 1.2)).unwrap();
        assert_eq!(sol.weights.as_slice(), &[0.0; 3]);
    }

    #[test]
    fn vacuous_budget() {
        let a = [2.0, 0.7, -1.0];
        let s = [0.0; 3];
        let sol = solve_projection(&ProjectionProblem::new(1.0, &a, &s, 3.0)).unwrap();
        assert_eq!(sol.weights.as_slice(), &[1.0, 0.7, 0.0]);
        assert_eq!(sol.multiplier, 0.0);
    }

    #[test]
    fn offset_does_not_move_minimizer() {
        let a = [0.8, 0.3, 1.4];
        let s = [-0.2, 0.5, 0.1];
        let b = [7.0, -3.0, 0.25];
        let p = ProjectionProblem::new(1.7, &a, &s, 1.1);
        let x = solve_projection(&p).unwrap();
        let y = solve_projection(&p.with_offset(&b)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn rejects_bad_input() {
        let a = [1.0, f64::NAN];
        let s = [0.0, 0.0];
        assert!(matches!(
            solve_projection(&ProjectionProblem::new(1.0, &a, &s, 1.0)),
            Err(Error::InvalidInput(_))
        ));
        let a = [1.0, 1.0];
        assert!(solve_projection(&ProjectionProblem::new(0.0, &a, &s, 1.0)).is_err());
        assert!(solve_projection(&ProjectionProblem::new(1.0, &a, &s, 0.0)).is_err());
        assert!(solve_projection(&ProjectionProblem::new(1.0, &a, &s[..1], 1.0)).is_err());
    }
}
