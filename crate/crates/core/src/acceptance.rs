//! Threshold accepting with a linearly shrinking threshold.
//!
//! The threshold starts at a reference objective and falls in a straight
//! line to `end_fraction × reference` over a fixed number of iterations, then
//! stays there. A candidate is accepted when its gap to the baseline (the
//! best solution found, by default) is strictly below the threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{AcceptanceBaseline, AcceptanceParams};
use crate::selection::Outcome;

#[derive(Debug, Error, PartialEq)]
pub enum AcceptanceError {
    #[error("reference objective must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("end fraction must lie in [0, 1], got {0}")]
    BadFraction(f64),
    #[error("threshold schedule needs at least one iteration")]
    NoIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    pub start_threshold: f64,
    pub end_threshold: f64,
    pub num_iterations: u64,
    pub current_iteration: u64,
}

impl ThresholdSchedule {
    /// Schedule from `reference` down to `fraction × reference`.
    pub fn new(reference: f64, fraction: f64, iterations: u64) -> Result<Self, AcceptanceError> {
        if !(reference > 0.0 && reference.is_finite()) {
            return Err(AcceptanceError::NonPositiveReference(reference));
        }
        if !(0.0..=1.0).contains(&fraction) {
            return Err(AcceptanceError::BadFraction(fraction));
        }
        if iterations == 0 {
            return Err(AcceptanceError::NoIterations);
        }
        Ok(Self {
            start_threshold: reference,
            end_threshold: fraction * reference,
            num_iterations: iterations,
            current_iteration: 0,
        })
    }

    pub fn from_params(reference: f64, params: &AcceptanceParams) -> Result<Self, AcceptanceError> {
        Self::new(reference, params.end_fraction, params.iterations)
    }

    /// Threshold at iteration `it`, clamped at the end value afterwards.
    pub fn threshold_at(&self, it: u64) -> f64 {
        if it >= self.num_iterations {
            return self.end_threshold;
        }
        let step = (self.start_threshold - self.end_threshold) / self.num_iterations as f64;
        self.start_threshold - step * it as f64
    }

    pub fn threshold(&self) -> f64 {
        self.threshold_at(self.current_iteration)
    }
}

/// Threshold acceptance state for one ALNS phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdAcceptance {
    pub schedule: ThresholdSchedule,
    pub baseline: AcceptanceBaseline,
}

impl ThresholdAcceptance {
    pub fn new(schedule: ThresholdSchedule, baseline: AcceptanceBaseline) -> Self {
        Self { schedule, baseline }
    }

    /// Decides on a candidate and advances the schedule by one iteration.
    pub fn accept(&mut self, candidate: f64, current: f64, best: f64) -> (bool, Outcome) {
        let threshold = self.schedule.threshold();
        self.schedule.current_iteration += 1;
        let reference = match self.baseline {
            AcceptanceBaseline::Best => best,
            AcceptanceBaseline::Current => current,
        };
        let accepted = candidate < best || candidate < reference + threshold;
        let outcome = if !accepted {
            Outcome::Rejected
        } else if candidate < best {
            Outcome::NewGlobalBest
        } else if candidate < current {
            Outcome::Better
        } else {
            Outcome::Accepted
        };
        (accepted, outcome)
    }
}

/// Free-function form of [`ThresholdAcceptance::accept`].
pub fn accept(
    candidate_total: f64,
    current_total: f64,
    best_total: f64,
    schedule: &mut ThresholdSchedule,
) -> (bool, Outcome) {
    let mut ta = ThresholdAcceptance::new(*schedule, AcceptanceBaseline::Best);
    let r = ta.accept(candidate_total, current_total, best_total);
    *schedule = ta.schedule;
    r
}
