//! Benchmark protocols and file output for the `walkscan` command.

pub mod config;
pub mod experiments;
pub mod export;
pub mod output;

pub use config::{Algorithm, ExperimentConfig, ExperimentKind, ThresholdSource};
pub use experiments::{
    run_calibration, run_d_sweep, run_experiment, run_local_seed_bench, run_random_seed_bench, run_single_recovery,
    Dataset, Outcome,
};
pub use export::{export_embedding, toy_report};
pub use output::{write_outcome, write_rows, ResultRow};
