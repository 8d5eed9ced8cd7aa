//! Nesterov's smooth minimization of `L(q)` over the capped box, stopped by
//! the duality gap between the best primal iterate and the averaged metric.
//!
//! Iteration `t`:
//!
//! 1. `Â_t = π_{S+}(Σ z_{t,i} K_i)/λ`, `∇L(z_t)` and `L(z_t)` from one projection.
//! 2. `q̂ = argmin_{q ∈ Q̂} (L/2)‖q − z_t‖² + (q − z_t)ᵀ∇L(z_t)`.
//! 3. `q_t` is the best of `{q_{t−1}, q̂, z_t}` under `L`.
//! 4. `w_t = argmin_{q ∈ Q̂} (L/2)‖q‖² + qᵀ Σ_{j≤t} ((j+1)/2) ∇L(z_j)`.
//! 5. `z_{t+1} = 2/(t+3)·w_t + (t+1)/(t+3)·q_t`.
//! 6. `A_t = 4/((t+1)(t+2)) · Σ_{j≤t} ((j+1)/2) Â_j`, `Δ_t = L(q_t) − H(A_t)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::capped_simplex::{solve_projection, ProjectionProblem};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::model::Metric;
use crate::objective::{ObjectiveConfig, WeightVector};
use crate::trace::{
    gap_reached, Clock, NoClock, SolveResult, SolveStatus, SolverTrace, TraceRecord,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NesterovConfig {
    /// Target duality gap.
    pub epsilon: f64,
    /// Iteration cap; `None` uses [`default_max_iters`].
    pub max_iters: Option<usize>,
    /// Evaluate the gap (and record a trace line) every this many iterations.
    pub trace_every: usize,
}

impl Default for NesterovConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            max_iters: None,
            trace_every: 1,
        }
    }
}

impl NesterovConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput("epsilon must be positive"));
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidInput("max_iters must be at least 1"));
        }
        if self.trace_every == 0 {
            return Err(Error::InvalidInput("trace_every must be at least 1"));
        }
        Ok(())
    }
}

/// `sqrt(2·L·N·η/ε)`, the iteration bound at which a run must have stopped.
pub fn iteration_bound(lipschitz: f64, budget: f64, epsilon: f64) -> f64 {
    libm::sqrt(2.0 * lipschitz * budget / epsilon)
}

/// `2·L·N·η/((T+1)(T+2))`, the suboptimality bound after iteration `T`.
pub fn suboptimality_bound(lipschitz: f64, budget: f64, t: usize) -> f64 {
    2.0 * lipschitz * budget / ((t as f64 + 1.0) * (t as f64 + 2.0))
}

/// Ten times the iteration bound.
pub fn default_max_iters(lipschitz: f64, budget: f64, epsilon: f64) -> usize {
    let bound = libm::ceil(iteration_bound(lipschitz, budget, epsilon));
    if bound.is_finite() && bound < (usize::MAX / 20) as f64 {
        10 * (bound as usize).max(1)
    } else {
        usize::MAX / 2
    }
}

/// Iterates visible to an observer after each iteration.
#[derive(Debug)]
pub struct SolverState<'s> {
    pub t: usize,
    pub z: &'s [f64],
    pub q: &'s WeightVector,
    pub w: &'s WeightVector,
    /// `L(q_t)`
    pub best_objective: f64,
}

pub fn solve(cfg: &ObjectiveConfig<'_>, ncfg: &NesterovConfig) -> Result<SolveResult> {
    solve_with(cfg, ncfg, &NoClock, |_| {})
}

pub fn solve_with(
    cfg: &ObjectiveConfig<'_>,
    ncfg: &NesterovConfig,
    clock: &dyn Clock,
    mut observer: impl FnMut(&SolverState<'_>),
) -> Result<SolveResult> {
    ncfg.validate()?;
    let n = cfg.len();
    let budget = cfg.budget();
    let lambda = cfg.reg_lambda();
    let lipschitz = cfg.lipschitz_bound();
    let max_iters = ncfg
        .max_iters
        .unwrap_or_else(|| default_max_iters(lipschitz, budget, ncfg.epsilon));

    let zeros = vec![0.0; n];
    let mut z: Vec<f64> = zeros.clone();
    let mut best: Option<(WeightVector, f64)> = None;
    let mut grad_sum = vec![0.0; n];
    let mut metric_sum = SymmetricMatrix::zeros(cfg.dataset().dim());
    let mut trace = SolverTrace::default();
    let mut last_gap = f64::INFINITY;
    let mut averaged = Metric::zeros(cfg.dataset().dim());

    let mut t = 0;
    let status = loop {
        let fail = Error::NumericalFailure { iteration: t };
        let at_z = cfg.evaluate(&z)?;
        if !at_z.value.is_finite() || at_z.gradient.iter().any(|g| !g.is_finite()) {
            return Err(fail);
        }

        let q_hat = solve_projection(&ProjectionProblem::new(
            lipschitz,
            &z,
            &at_z.gradient,
            budget,
        ))
        .map_err(|_| fail.clone())?
        .weights;
        let q_hat_value = cfg.eval_objective(&q_hat)?;

        // Candidates in order of preference on ties.
        let z_weights = WeightVector::from_parts(z.clone(), budget);
        let mut candidates: Vec<(WeightVector, f64)> = Vec::with_capacity(3);
        if let Some(prev) = best.take() {
            candidates.push(prev);
        }
        candidates.push((q_hat, q_hat_value));
        candidates.push((z_weights, at_z.value));
        let mut chosen = 0;
        for (i, c) in candidates.iter().enumerate() {
            if c.1 < candidates[chosen].1 {
                chosen = i;
            }
        }
        let (q_t, q_value) = candidates.swap_remove(chosen);
        if !q_value.is_finite() {
            return Err(fail);
        }

        let weight = (t as f64 + 1.0) / 2.0;
        for (acc, g) in grad_sum.iter_mut().zip(&at_z.gradient) {
            *acc += weight * g;
        }
        let w_t = solve_projection(&ProjectionProblem::new(
            lipschitz, &zeros, &grad_sum, budget,
        ))
        .map_err(|_| fail.clone())?
        .weights;

        metric_sum.add_scaled(weight / lambda, &at_z.projected)?;

        let last = t + 1 >= max_iters;
        let mut converged = false;
        if t % ncfg.trace_every == 0 || last {
            let norm = 4.0 / ((t as f64 + 1.0) * (t as f64 + 2.0));
            averaged = Metric::from_psd(metric_sum.scaled(norm));
            let dual = cfg.eval_dual(&averaged)?;
            let gap = q_value - dual;
            if !gap.is_finite() {
                return Err(fail);
            }
            trace.push(TraceRecord {
                iter: t,
                objective: q_value,
                dual,
                gap,
                seconds: clock.elapsed_seconds(),
            });
            last_gap = gap;
            converged = gap_reached(gap, ncfg.epsilon);
        }

        observer(&SolverState {
            t,
            z: &z,
            q: &q_t,
            w: &w_t,
            best_objective: q_value,
        });

        if converged || last {
            best = Some((q_t, q_value));
            break if converged {
                SolveStatus::Converged
            } else {
                SolveStatus::CapHit
            };
        }

        let a = 2.0 / (t as f64 + 3.0);
        let b = (t as f64 + 1.0) / (t as f64 + 3.0);
        for ((zi, wi), qi) in z.iter_mut().zip(w_t.as_slice()).zip(q_t.as_slice()) {
            *zi = a * wi + b * qi;
        }
        best = Some((q_t, q_value));
        t += 1;
    };

    let (weights, objective) = best.expect("at least one iteration ran");
    Ok(SolveResult {
        metric: averaged,
        weights,
        final_iter: t,
        final_gap: last_gap,
        objective,
        status,
        lipschitz,
        trace,
    })
}
