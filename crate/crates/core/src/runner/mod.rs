//! Config files, experiment drivers and report files.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{CrossSectionConfig, ExperimentConfig, MeshConfig, SolverConfig, SweepConfig, TauSpec};
pub use experiments::{
    classify_sequence, run_decay_fit, run_inequality_suite, run_lambda_sweep, run_mu_solve, Dichotomy,
};
pub use report::{write_report, Check, Report, Series};
