//! Adaptive roulette-wheel operator selection.
//!
//! After every iteration the chosen operator's weight moves toward the score
//! of the iteration's outcome: `w ← d·w + (1 − d)·s`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SelectionParams;
use crate::rng::RngStream;

/// How a candidate compared when it was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    NewGlobalBest,
    /// Better than the current solution but not the best.
    Better,
    Accepted,
    Rejected,
}

impl Outcome {
    /// Index into the four-entry score vector.
    pub fn class(self) -> usize {
        match self {
            Outcome::NewGlobalBest => 0,
            Outcome::Better => 1,
            Outcome::Accepted => 2,
            Outcome::Rejected => 3,
        }
    }

    pub fn from_class(class: usize) -> Option<Self> {
        Some(match class {
            0 => Outcome::NewGlobalBest,
            1 => Outcome::Better,
            2 => Outcome::Accepted,
            3 => Outcome::Rejected,
            _ => return None,
        })
    }

    pub fn is_accepted(self) -> bool {
        self != Outcome::Rejected
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SelectionError {
    #[error("operator bank is empty")]
    Empty,
    #[error("operator weights sum to zero")]
    ZeroWeight,
    #[error("operator {0} is not in the bank")]
    UnknownOperator(String),
}

/// Weighted operator registry for one roulette wheel.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBank<T> {
    entries: Vec<(T, f64)>,
    params: SelectionParams,
}

impl<T: Copy + PartialEq + std::fmt::Debug> OperatorBank<T> {
    /// Every operator starts at `params.initial_weight`.
    pub fn new(ops: impl IntoIterator<Item = T>, params: SelectionParams) -> Self {
        let entries = ops
            .into_iter()
            .map(|op| (op, params.initial_weight))
            .collect();
        Self { entries, params }
    }

    pub fn with_weights(entries: Vec<(T, f64)>, params: SelectionParams) -> Self {
        Self { entries, params }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(T, f64)] {
        &self.entries
    }

    pub fn weight(&self, op: T) -> Option<f64> {
        self.entries.iter().find(|(o, _)| *o == op).map(|(_, w)| *w)
    }

    /// Restores every weight to the initial value.
    pub fn reset(&mut self) {
        for e in &mut self.entries {
            e.1 = self.params.initial_weight;
        }
    }

    /// Picks entry `i` with probability `w_i / Σ w`.
    pub fn roulette_pick(&self, rng: &mut RngStream) -> Result<T, SelectionError> {
        if self.entries.is_empty() {
            return Err(SelectionError::Empty);
        }
        let total: f64 = self.entries.iter().map(|(_, w)| w).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(SelectionError::ZeroWeight);
        }
        let mut r = rng.unit() * total;
        for (op, w) in &self.entries {
            if r < *w {
                return Ok(*op);
            }
            r -= w;
        }
        // Rounding can leave r at the very top of the wheel; land on the
        // last entry with positive weight.
        Ok(self
            .entries
            .iter()
            .rev()
            .find(|(_, w)| *w > 0.0)
            .map(|(op, _)| *op)
            .expect("total weight is positive"))
    }

    /// Applies the decay update to `op` only.
    pub fn update_weight(&mut self, op: T, outcome: Outcome) -> Result<f64, SelectionError> {
        let d = self.params.decay;
        let s = self.params.scores[outcome.class()];
        let floor = self.params.weight_floor;
        let entry = self
            .entries
            .iter_mut()
            .find(|(o, _)| *o == op)
            .ok_or_else(|| SelectionError::UnknownOperator(format!("{op:?}")))?;
        entry.1 = (d * entry.1 + (1.0 - d) * s).max(floor);
        Ok(entry.1)
    }
}

/// One step of the weight update, without the floor.
pub fn decayed_weight(old: f64, decay: f64, score: f64) -> f64 {
    decay * old + (1.0 - decay) * score
}
