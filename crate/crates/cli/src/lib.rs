//! Experiment runner and solution auditor built on `vrpsd-core`.

pub mod audit;
pub mod experiment;
pub mod instance;
pub mod solution_file;

pub use audit::{audit_solution, AuditReport};
pub use experiment::{run_experiment, ExperimentSpec, ExperimentSummary, Limit};
pub use solution_file::SolutionFile;
