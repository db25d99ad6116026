//! Seeded experiment harness: random inputs, probes, JSON I/O and reports.

pub mod experiment;
pub mod generators;
pub mod io;
pub mod probes;
pub mod rng;

pub use experiment::{
    run_experiment, run_experiment_with, Execution, ExperimentConfig, ExperimentKind, ExperimentRecord, SolverChoice,
};
pub use generators::{perturb_frame, random_parseval_frame};
pub use probes::{bt_certificate, bt_search, jl_trial, BtSearch, JlTrial};
