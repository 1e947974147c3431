//! Tunable solver parameters. Every field has a default and can be set from
//! the `[weights]`, `[operators]`, `[selection]`, `[acceptance]`, `[tabu]`,
//! `[schedule]` and `[ga]` sections of the config file.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, ModelError, Seconds};
use crate::objective::ObjectiveWeights;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub weights: ObjectiveWeights,
    pub operators: OperatorParams,
    pub selection: SelectionParams,
    pub acceptance: AcceptanceParams,
    pub tabu: TabuParams,
    pub schedule: ScheduleParams,
    pub ga: GaParams,
}

impl SolverConfig {
    pub fn validate(&self, inst: &Instance) -> Result<(), ModelError> {
        self.weights.validate(inst)?;
        self.operators.validate()?;
        self.selection.validate()?;
        self.acceptance.validate()?;
        self.tabu.validate()?;
        self.schedule.validate()?;
        self.ga.validate()
    }
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidConfig(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorParams {
    /// `n` for the multi-removal destroy operators. `None` means
    /// `max(2, ceil(5% of requests))`.
    pub removal_count: Option<usize>,
    /// `k` of the regret-k insertion order.
    pub regret_k: usize,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self {
            removal_count: None,
            regret_k: 2,
        }
    }
}

impl OperatorParams {
    pub fn removal_count_for(&self, request_count: usize) -> usize {
        self.removal_count
            .unwrap_or_else(|| 2.max((request_count * 5).div_ceil(100)))
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.removal_count == Some(0) {
            return Err(invalid("operators.removal_count must be >= 1"));
        }
        if self.regret_k < 2 {
            return Err(invalid("operators.regret_k must be >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionParams {
    pub initial_weight: f64,
    pub decay: f64,
    /// Scores for [new global best, better than current, accepted, rejected].
    pub scores: [f64; 4],
    /// Lower clamp applied after each update.
    pub weight_floor: f64,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            initial_weight: 1.0,
            decay: 0.9,
            scores: [6.0, 5.0, 1.0, 0.0],
            weight_floor: 1e-6,
        }
    }
}

impl SelectionParams {
    fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.decay) {
            return Err(invalid("selection.decay must lie in [0, 1]"));
        }
        if !(self.initial_weight > 0.0 && self.initial_weight.is_finite()) {
            return Err(invalid("selection.initial_weight must be positive"));
        }
        if self.scores.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(invalid("selection.scores must be finite and >= 0"));
        }
        if !(self.weight_floor >= 0.0 && self.weight_floor.is_finite()) {
            return Err(invalid("selection.weight_floor must be >= 0"));
        }
        Ok(())
    }
}

/// What the threshold gap is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptanceBaseline {
    /// Record-to-record travel: gap to the best solution found.
    #[default]
    Best,
    /// Plain threshold accepting: gap to the current solution.
    Current,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceParams {
    /// End threshold as a fraction of the start threshold.
    pub end_fraction: f64,
    /// Iterations over which the threshold falls linearly.
    pub iterations: u64,
    pub baseline: AcceptanceBaseline,
}

impl Default for AcceptanceParams {
    fn default() -> Self {
        Self {
            end_fraction: 0.02,
            iterations: 9000,
            baseline: AcceptanceBaseline::Best,
        }
    }
}

impl AcceptanceParams {
    fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.end_fraction) {
            return Err(invalid("acceptance.end_fraction must lie in [0, 1]"));
        }
        if self.iterations == 0 {
            return Err(invalid("acceptance.iterations must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TabuParams {
    pub capacity: usize,
    /// Travel strictly above this is a long arc.
    pub long_arc_threshold: Seconds,
    /// Travel strictly below this is a short arc.
    pub short_arc_threshold: Seconds,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            capacity: 10,
            long_arc_threshold: 570,
            short_arc_threshold: 510,
        }
    }
}

impl TabuParams {
    fn validate(&self) -> Result<(), ModelError> {
        if self.capacity == 0 {
            return Err(invalid("tabu.capacity must be >= 1"));
        }
        if self.short_arc_threshold > self.long_arc_threshold {
            return Err(invalid(
                "tabu.short_arc_threshold must not exceed long_arc_threshold",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleParams {
    /// Budget split over the ALNS phases of the multiphase algorithm.
    pub multiphase_split: Vec<f64>,
    /// Per-round split [ALNS, ALNS, tabu] of the hybrid algorithm.
    pub hybrid_split: Vec<f64>,
    /// Round length of the hybrid algorithm under a wall-clock budget.
    pub round_seconds: f64,
    /// Round length under an iteration budget; `None` runs a single round.
    /// The default lets each ALNS phase of a round run one full threshold
    /// schedule (0.45 × 20000 = 9000 iterations).
    pub round_iterations: Option<u64>,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            multiphase_split: vec![0.5, 0.5],
            hybrid_split: vec![0.45, 0.45, 0.10],
            round_seconds: 1800.0,
            round_iterations: Some(20_000),
        }
    }
}

impl ScheduleParams {
    fn validate(&self) -> Result<(), ModelError> {
        check_split("schedule.multiphase_split", &self.multiphase_split)?;
        check_split("schedule.hybrid_split", &self.hybrid_split)?;
        if self.hybrid_split.len() != 3 {
            return Err(invalid("schedule.hybrid_split needs exactly 3 fractions"));
        }
        if self.round_seconds.is_nan() || self.round_seconds <= 0.0 {
            return Err(invalid("schedule.round_seconds must be positive"));
        }
        if self.round_iterations == Some(0) {
            return Err(invalid("schedule.round_iterations must be >= 1"));
        }
        Ok(())
    }
}

fn check_split(name: &str, split: &[f64]) -> Result<(), ModelError> {
    if split.is_empty() || split.iter().any(|f| f.is_nan() || *f < 0.0) {
        return Err(invalid(format!(
            "{name} must be a nonempty list of fractions >= 0"
        )));
    }
    let sum: f64 = split.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("{name} must sum to 1, got {sum}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub mutation_probability: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 50,
            mutation_probability: 0.1,
        }
    }
}

impl GaParams {
    fn validate(&self) -> Result<(), ModelError> {
        if self.population_size < 2 {
            return Err(invalid("ga.population_size must be >= 2"));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(invalid("ga.mutation_probability must lie in [0, 1]"));
        }
        Ok(())
    }
}
