//! Robust Mahalanobis metric learning from noisy triplet constraints.
//!
//! The learning problem picks a PSD matrix `A` that minimizes the worst-case
//! hinge loss over any subset of at most `N·η` triplets, plus `λ/2·‖A‖²_F`.
//! Eliminating `A` leaves a smooth convex problem over adversarial weights
//! `q ∈ [0,1]^N, Σq ≤ N·η`, which [`nesterov::solve`] minimizes with a
//! duality-gap stopping rule. [`subgradient::solve_subgradient`] is the
//! projected-gradient baseline.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, CSV loading and
//! the command line live in the companion `rml` crate.

#![no_std]

extern crate alloc;

pub mod capped_simplex;
pub mod error;
pub mod knn;
pub mod linalg;
pub mod model;
pub mod nesterov;
pub mod objective;
pub mod pipeline;
pub mod subgradient;
pub mod trace;

pub use error::{Error, Result};

pub use linalg::{
    eigendecompose, eigendecompose_jacobi, eigenvalues, frobenius_inner, frobenius_inner_many,
    psd_norm_squared, psd_project, EigenDecomposition, SymmetricMatrix,
};
pub use model::{
    build_gap_matrix, mahalanobis_distance, triplet_margin, DataPoint, Metric, Triplet,
    TripletDataset,
};

pub use capped_simplex::{solve_projection, ProjectionProblem, ProjectionSolution};
pub use knn::{evaluate, knn_classify, leave_one_out_error, EvalReport};
pub use nesterov::{solve, NesterovConfig};
pub use objective::{ObjectiveConfig, WeightVector};
pub use pipeline::{
    apply_flips, generate_triplets, inject_noise, split, LabeledDataset, NoiseSpec, SplitSpec,
    Standardizer,
};
pub use subgradient::{solve_subgradient, SubgradientConfig};
pub use trace::{Clock, NoClock, SolveResult, SolveStatus, SolverTrace, TraceRecord};
