//! Per-iteration diagnostics and the result shape shared by both solvers.

use alloc::vec::Vec;

use crate::model::Metric;
use crate::objective::WeightVector;

/// Gap values in `[−GAP_FLOOR, 0)` are rounding noise and count as zero.
pub const GAP_FLOOR: f64 = 1e-8;

/// Source of elapsed wall-clock time for trace records.
pub trait Clock {
    fn elapsed_seconds(&self) -> f64;
}

/// A clock that always reads zero; traces stay bitwise reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    /// `L(q_t)`
    pub objective: f64,
    /// `H(A_t)`
    pub dual: f64,
    pub gap: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<TraceRecord>,
}

impl SolverTrace {
    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter()
    }

    /// First recorded iteration whose gap is at most `epsilon`.
    pub fn first_iter_with_gap(&self, epsilon: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| gap_reached(r.gap, epsilon))
            .map(|r| r.iter)
    }
}

pub(crate) fn gap_reached(gap: f64, epsilon: f64) -> bool {
    let floored = if (-GAP_FLOOR..0.0).contains(&gap) {
        0.0
    } else {
        gap
    };
    floored <= epsilon
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// The iteration cap was reached before the gap fell below epsilon.
    CapHit,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub metric: Metric,
    pub weights: WeightVector,
    /// Index `T` of the last iteration run (zero-based).
    pub final_iter: usize,
    pub final_gap: f64,
    /// `L(q_T)`
    pub objective: f64,
    pub status: SolveStatus,
    pub lipschitz: f64,
    pub trace: SolverTrace,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Number of iterations run, `T + 1`.
    pub fn iterations(&self) -> usize {
        self.final_iter + 1
    }
}
