//! Configuration-driven Monte Carlo experiment driver.
//!
//! A run walks the full parameter grid: for each cell it generates graphs,
//! clusters them, draws assignments under every configured design,
//! simulates the outcome process on shared noise streams, evaluates every
//! estimator, and aggregates bias/RMSE summaries against paired
//! ground-truth runs.

pub mod config;
pub mod io;
pub mod runner;
pub mod summary;

pub use config::{
    Cell, ClusteringConfig, DesignConfig, DesignKind, EstimatorInstance, EstimatorKind,
    ExperimentConfig, GraphConfig, GraphMode, LinkKind, ResponseConfig, UndefinedPolicy,
};
pub use io::{report_from_dir, write_run_output};
pub use runner::{
    compute_truth, run_experiment, run_experiment_with_workers, workers_from_env, ReplicationRow,
    RunOutput, TruthRow, WORKERS_ENV,
};
pub use summary::{summarize, SummaryRow};
