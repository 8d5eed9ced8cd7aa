//! Projected (Rosen) gradient baseline with Armijo backtracking.

use crate::capped_simplex::{solve_projection, ProjectionProblem};
use crate::error::{Error, Result};
use crate::objective::{ObjectiveConfig, WeightVector};
use crate::trace::{
    gap_reached, Clock, NoClock, SolveResult, SolveStatus, SolverTrace, TraceRecord,
};

use alloc::vec;
use alloc::vec::Vec;

const MAX_BACKTRACKS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradientConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    /// First trial step of every line search; `None` means `1/L`.
    pub initial_step: Option<f64>,
    pub trace_every: usize,
    pub armijo: ArmijoRule,
}

/// Sufficient-decrease test used by the line search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArmijoRule {
    /// `L(q⁺) ≤ L(q) + c·∇L(q)ᵀ(q⁺ − q)`, along the projection arc.
    #[default]
    ProjectionArc,
    /// `L(q⁺) ≤ L(q) − c·step·‖∇L(q)‖²`, the unconstrained test.
    GradientNorm,
}

impl Default for SubgradientConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            max_iters: 100_000,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            initial_step: None,
            trace_every: 1,
            armijo: ArmijoRule::default(),
        }
    }
}

impl SubgradientConfig {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput("epsilon must be positive"));
        }
        if self.max_iters == 0 || self.trace_every == 0 {
            return Err(Error::InvalidInput("iteration counts must be at least 1"));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::InvalidInput("armijo constant must lie in (0, 1)"));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidInput("backtrack factor must lie in (0, 1)"));
        }
        if matches!(self.initial_step, Some(s) if !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidInput("initial step must be positive"));
        }
        Ok(())
    }
}

pub fn solve_subgradient(
    cfg: &ObjectiveConfig<'_>,
    scfg: &SubgradientConfig,
) -> Result<SolveResult> {
    solve_subgradient_with(cfg, scfg, &NoClock)
}

pub fn solve_subgradient_with(
    cfg: &ObjectiveConfig<'_>,
    scfg: &SubgradientConfig,
    clock: &dyn Clock,
) -> Result<SolveResult> {
    scfg.validate()?;
    let budget = cfg.budget();
    let lambda = cfg.reg_lambda();
    let lipschitz = cfg.lipschitz_bound();
    let initial_step = scfg.initial_step.unwrap_or(1.0 / lipschitz);
    if !(initial_step.is_finite() && initial_step > 0.0) {
        return Err(Error::NumericalFailure { iteration: 0 });
    }
    let zero_slope = vec![0.0; cfg.len()];

    let mut q = cfg.zero_weights();
    let mut trace = SolverTrace::default();
    let mut t = 0;
    // L(q) as computed when q was accepted, so recorded values never rise by rounding.
    let mut accepted_value = None;
    loop {
        let fail = Error::NumericalFailure { iteration: t };
        let here = cfg.evaluate(&q)?;
        if !here.value.is_finite() || here.gradient.iter().any(|g| !g.is_finite()) {
            return Err(fail);
        }
        let current = accepted_value.unwrap_or(here.value);

        let last = t + 1 >= scfg.max_iters;
        if t % scfg.trace_every == 0 || last {
            let metric = crate::model::Metric::from_psd(here.projected.scaled(1.0 / lambda));
            let dual = cfg.eval_dual(&metric)?;
            let gap = current - dual;
            if !gap.is_finite() {
                return Err(fail);
            }
            trace.push(TraceRecord {
                iter: t,
                objective: current,
                dual,
                gap,
                seconds: clock.elapsed_seconds(),
            });
            if gap_reached(gap, scfg.epsilon) || last {
                let status = if gap_reached(gap, scfg.epsilon) {
                    SolveStatus::Converged
                } else {
                    SolveStatus::CapHit
                };
                return Ok(SolveResult {
                    metric,
                    weights: q,
                    final_iter: t,
                    final_gap: gap,
                    objective: current,
                    status,
                    lipschitz,
                    trace,
                });
            }
        }

        let grad_norm_sq: f64 = here.gradient.iter().map(|g| g * g).sum();
        let mut step = initial_step;
        let mut best: Option<(WeightVector, f64)> = None;
        let mut trial: Vec<f64> = Vec::with_capacity(q.len());
        for _ in 0..=MAX_BACKTRACKS {
            trial.clear();
            trial.extend(
                q.as_slice()
                    .iter()
                    .zip(&here.gradient)
                    .map(|(qi, g)| qi - step * g),
            );
            let cand = solve_projection(&ProjectionProblem::new(1.0, &trial, &zero_slope, budget))
                .map_err(|_| fail.clone())?
                .weights;
            let value = cfg.eval_objective(&cand)?;
            let descent: f64 = match scfg.armijo {
                ArmijoRule::ProjectionArc => cand
                    .as_slice()
                    .iter()
                    .zip(q.as_slice())
                    .zip(&here.gradient)
                    .map(|((c, qi), g)| g * (c - qi))
                    .sum(),
                ArmijoRule::GradientNorm => -step * grad_norm_sq,
            };
            if value <= current + scfg.armijo_c * descent && value <= current {
                best = Some((cand, value));
                break;
            }
            if best.as_ref().is_none_or(|b| value < b.1) {
                best = Some((cand, value));
            }
            step *= scfg.backtrack_factor;
        }
        // Without an Armijo step, fall back to the best point seen, or stay put.
        let (cand, value) = best.expect("line search evaluates at least one step");
        if value <= current {
            q = cand;
            accepted_value = Some(value);
        }
        t += 1;
    }
}
