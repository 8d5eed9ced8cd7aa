//! Experiment configuration: a JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::LabelColumn;
use crate::error::{Result, RmlError};

/// `{2⁻³, …, 2⁶, 100}`.
pub const DEFAULT_LAMBDA_GRID: [f64; 11] = [
    0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0,
];

/// Fixed regularization for the η sweep.
pub const SWEEP_LAMBDA: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Nesterov,
    Subgradient,
    Both,
}

impl SolverChoice {
    pub fn methods(self) -> &'static [Method] {
        match self {
            SolverChoice::Nesterov => &[Method::Nesterov],
            SolverChoice::Subgradient => &[Method::Subgradient],
            SolverChoice::Both => &[Method::Nesterov, Method::Subgradient],
        }
    }
}

/// A row of the benchmark table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Nesterov,
    Subgradient,
    Euclidean,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Nesterov => "RML-nesterov",
            Method::Subgradient => "RML-subgradient",
            Method::Euclidean => "EUCL",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Method::Nesterov, Method::Subgradient, Method::Euclidean]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: Option<PathBuf>,
    /// Column index, header name, or `last`.
    pub label_col: String,
    pub has_header: bool,
    pub train_fraction: f64,
    pub k: usize,
    pub eta: f64,
    pub lambda: f64,
    pub lambda_grid: Vec<f64>,
    pub epsilon: f64,
    pub solver: SolverChoice,
    pub base_seed: u64,
    pub seeds: usize,
    pub cap_per_anchor: usize,
    pub standardize: bool,
    /// Iteration cap for the subgradient baseline.
    pub subgradient_max_iters: usize,
    /// Write wall-clock seconds into traces. Off by default so reruns give
    /// byte-identical trace files.
    pub timing: bool,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data: None,
            label_col: "last".into(),
            has_header: true,
            train_fraction: 0.85,
            k: rml_core::knn::DEFAULT_K,
            eta: 0.8,
            lambda: 1.0,
            lambda_grid: DEFAULT_LAMBDA_GRID.to_vec(),
            epsilon: 1e-3,
            solver: SolverChoice::Both,
            base_seed: 0,
            seeds: 10,
            cap_per_anchor: rml_core::pipeline::DEFAULT_CAP_PER_ANCHOR,
            standardize: true,
            subgradient_max_iters: 100_000,
            timing: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RmlError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| RmlError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn label_column(&self) -> LabelColumn {
        self.label_col.parse().expect("infallible")
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64)
            .map(|i| self.base_seed.wrapping_add(i))
            .collect()
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| RmlError::Usage("no dataset given (--data or config \"data\")".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RmlError::Usage(m.to_string()));
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must lie in (0, 1)");
        }
        if self.k == 0 {
            return bad("k must be positive");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta must lie in (0, 1]");
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0)
            || self.lambda_grid.is_empty()
            || self
                .lambda_grid
                .iter()
                .any(|l| !(l.is_finite() && *l > 0.0))
        {
            return bad("lambda values must be positive and the grid nonempty");
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.seeds == 0 || self.cap_per_anchor == 0 || self.subgradient_max_iters == 0 {
            return bad("seeds, cap_per_anchor and subgradient_max_iters must be positive");
        }
        Ok(())
    }
}
