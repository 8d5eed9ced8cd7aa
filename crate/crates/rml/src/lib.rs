//! IO, experiment orchestration and command-line support for robust metric
//! learning on top of [`rml_core`].

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod formats;

pub use config::{ExperimentConfig, Method, SolverChoice};
pub use data::{load_csv, LabelColumn, LoadedDataset};
pub use error::{RmlError, Stage};
