//! Experiment harness for the Soft-Bayes learners: stream files, experiment
//! configuration, concurrent learner execution, and CSV/JSON reports.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod report;

pub use config::{ComparatorSpec, DivergenceMode, ExperimentConfig, GeneratorConfig, LearnerConfig};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_on_stream, RunArtifact};
