//! Shift-based routing for security dispatch: hybrid ALNS with threshold
//! accepting and tabu search, plus a steady-state GA baseline.

pub mod acceptance;
pub mod baseline;
pub mod config;
pub mod construct;
pub mod ingest;
pub mod model;
pub mod objective;
pub mod operators;
pub mod orchestrate;
pub mod rng;
pub mod selection;
pub mod synthetic;
pub mod tabu;
pub mod toy;

pub use acceptance::{ThresholdAcceptance, ThresholdSchedule};
pub use config::SolverConfig;
pub use construct::build_initial;
pub use model::{
    CostMatrix, Instance, InstanceConfig, ModelError, Request, RequestSet, Seconds, Shift,
    ShiftRules, ShiftSummary, Solution, StopId, Violations,
};
pub use objective::{Evaluator, ObjectiveBreakdown, ObjectiveWeights};
pub use operators::{DestroyResult, OperatorId, OperatorKind};
pub use rng::RngStream;
pub use selection::{OperatorBank, Outcome};
