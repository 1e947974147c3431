//! Destroy and repair operator catalog.
//!
//! Seventeen destroy operators remove customers from a complete solution and
//! record the removal order; seventeen repair operators put every removed
//! customer back. Operators are stateless: all randomness comes through the
//! caller's [`RngStream`].

mod destroy;
mod insertion;
mod repair;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::OperatorParams;
use crate::model::{Seconds, Solution};
use crate::objective::Evaluator;
use crate::rng::RngStream;

pub use destroy::{apply_destroy, pair_distance};
pub use insertion::{
    best_insertion, best_insertion_in_shift, insertion_value, Insertion, InsertionMetric,
};
pub use repair::{apply_repair, regret_select};

pub const DESTROY_COUNT: u8 = 17;
pub const REPAIR_COUNT: u8 = 17;
pub const TABU_COUNT: u8 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("no {kind} operator with index {index}")]
    UnknownOperator { kind: OperatorKind, index: u8 },
    #[error("request {0} is not assigned to any shift")]
    Unassigned(usize),
    #[error("invalid operator name {0:?}")]
    BadName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Destroy,
    Repair,
    Tabu,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Destroy => "destroy",
            OperatorKind::Repair => "repair",
            OperatorKind::Tabu => "tabu",
        })
    }
}

/// Catalog entry: kind plus 1-based index. Displays as `D7`, `R16`, `T2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorId {
    kind: OperatorKind,
    index: u8,
}

impl OperatorId {
    pub fn new(kind: OperatorKind, index: u8) -> Result<Self, OperatorError> {
        let max = match kind {
            OperatorKind::Destroy => DESTROY_COUNT,
            OperatorKind::Repair => REPAIR_COUNT,
            OperatorKind::Tabu => TABU_COUNT,
        };
        if index == 0 || index > max {
            return Err(OperatorError::UnknownOperator { kind, index });
        }
        Ok(Self { kind, index })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn destroy(index: u8) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::Destroy, index)
    }

    pub fn repair(index: u8) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::Repair, index)
    }

    pub fn all(kind: OperatorKind) -> impl Iterator<Item = OperatorId> {
        let max = match kind {
            OperatorKind::Destroy => DESTROY_COUNT,
            OperatorKind::Repair => REPAIR_COUNT,
            OperatorKind::Tabu => TABU_COUNT,
        };
        (1..=max).map(move |index| OperatorId { kind, index })
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            OperatorKind::Destroy => 'D',
            OperatorKind::Repair => 'R',
            OperatorKind::Tabu => 'T',
        };
        write!(f, "{prefix}{}", self.index)
    }
}

impl FromStr for OperatorId {
    type Err = OperatorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OperatorError::BadName(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next().ok_or_else(bad)? {
            'D' => OperatorKind::Destroy,
            'R' => OperatorKind::Repair,
            'T' => OperatorKind::Tabu,
            _ => return Err(bad()),
        };
        let index: u8 = chars.as_str().parse().map_err(|_| bad())?;
        Self::new(kind, index)
    }
}

impl Serialize for OperatorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OperatorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A partial solution plus the customers taken out of it, in removal order.
#[derive(Debug, Clone, PartialEq)]
pub struct DestroyResult {
    pub partial: Solution,
    pub removed: Vec<usize>,
}

/// Everything an operator reads besides the solution itself.
#[derive(Debug, Clone, Copy)]
pub struct OperatorContext<'a> {
    pub ev: Evaluator<'a>,
    pub params: OperatorParams,
}

impl<'a> OperatorContext<'a> {
    pub fn new(ev: Evaluator<'a>, params: OperatorParams) -> Self {
        Self { ev, params }
    }

    pub(crate) fn removal_count(&self) -> usize {
        self.params
            .removal_count_for(self.ev.instance.request_count())
    }
}

/// Destroy by catalog id.
pub fn destroy_by_id(
    id: OperatorId,
    solution: &Solution,
    ctx: &OperatorContext<'_>,
    rng: &mut RngStream,
) -> Result<DestroyResult, OperatorError> {
    if id.kind() != OperatorKind::Destroy {
        return Err(OperatorError::UnknownOperator {
            kind: id.kind(),
            index: id.index(),
        });
    }
    Ok(apply_destroy(id.index(), solution, ctx, rng))
}

/// Repair by catalog id.
pub fn repair_by_id(
    id: OperatorId,
    destroyed: DestroyResult,
    ctx: &OperatorContext<'_>,
    rng: &mut RngStream,
) -> Result<Solution, OperatorError> {
    if id.kind() != OperatorKind::Repair {
        return Err(OperatorError::UnknownOperator {
            kind: id.kind(),
            index: id.index(),
        });
    }
    Ok(apply_repair(id.index(), destroyed, ctx, rng))
}

/// `max(0, completion − deadline)` for an assigned request.
pub fn lateness(
    ev: Evaluator<'_>,
    solution: &Solution,
    r: usize,
) -> Result<Seconds, OperatorError> {
    let (k, p) = solution.locate(r).ok_or(OperatorError::Unassigned(r))?;
    let shift = &solution.shifts[k];
    let sched = ev
        .instance
        .schedule(shift.id, shift.start_time, &shift.stops);
    Ok((sched.stops[p].completion - ev.instance.request(r).window_end).max(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectiveWeights;
    use crate::toy::line_instance;

    #[test]
    fn ids_round_trip_through_names() {
        for kind in [
            OperatorKind::Destroy,
            OperatorKind::Repair,
            OperatorKind::Tabu,
        ] {
            for id in OperatorId::all(kind) {
                assert_eq!(id.to_string().parse::<OperatorId>(), Ok(id));
            }
        }
        assert_eq!(OperatorId::all(OperatorKind::Destroy).count(), 17);
        assert_eq!(OperatorId::all(OperatorKind::Repair).count(), 17);
        assert!(OperatorId::destroy(0).is_err());
        assert!(OperatorId::destroy(18).is_err());
        assert!(OperatorId::new(OperatorKind::Tabu, 3).is_err());
        assert!("X3".parse::<OperatorId>().is_err());
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let inst = line_instance(&[(0, 90_000, 60)], &[0]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let ctx = OperatorContext::new(ev, OperatorParams::default());
        let sol = Solution::from_routes(ev, vec![vec![0]]);
        let r1 = OperatorId::repair(1).unwrap();
        assert!(destroy_by_id(r1, &sol, &ctx, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn lateness_cases() {
        // Stop at x=1: arrival 1000, service 300, completes 1300.
        let w = ObjectiveWeights::default();
        for (deadline, expected) in [(1300, 0), (1000, 300), (5000, 0)] {
            let inst = line_instance(&[(0, deadline, 300), (0, 90_000, 60)], &[0]);
            let ev = Evaluator::new(&inst, &w);
            let sol = Solution::from_routes(ev, vec![vec![0]]);
            assert_eq!(lateness(ev, &sol, 0), Ok(expected));
            assert_eq!(lateness(ev, &sol, 1), Err(OperatorError::Unassigned(1)));
        }
    }
}
