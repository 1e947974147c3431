//! Scalar objective and its four-part breakdown.
//!
//! The objective is additive over shifts except for the optional
//! dissimilarity term, so every caller evaluates through
//! [`Evaluator::aggregate`] over per-shift summaries. Empty shifts contribute
//! nothing: they are redundant and dropped from the reported output.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, ModelError, Seconds, ShiftSummary, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub shift_setup_cost: f64,
    /// Duration of used shifts plus the downtime surcharge.
    pub time_cost: f64,
    /// Deadline misses and back-to-back pairs.
    pub violation_cost: f64,
    /// Overlong, short and dissimilar shift durations.
    pub shift_shape_cost: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveWeights {
    pub setup_per_shift: f64,
    /// Extra cost per second of downtime on top of its share of duration.
    pub downtime_surcharge_factor: f64,
    pub penalty_per_deadline_miss: f64,
    pub penalty_per_back_to_back: f64,
    pub penalty_per_overlong_shift: f64,
    /// Applied per second a shift runs past the hard duration limit, on top
    /// of the flat overlong penalty.
    pub overlong_penalty_per_second: f64,
    /// Applied per second a used shift falls short of the preferred minimum.
    pub short_shift_penalty_per_second: f64,
    /// Weight on the summed absolute deviation of used-shift durations.
    pub dissimilarity_weight: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            setup_per_shift: 1800.0,
            downtime_surcharge_factor: 1.0,
            penalty_per_deadline_miss: 1e7,
            penalty_per_back_to_back: 1e7,
            penalty_per_overlong_shift: 1e7,
            overlong_penalty_per_second: 10.0,
            short_shift_penalty_per_second: 0.2,
            dissimilarity_weight: 0.0,
        }
    }
}

impl ObjectiveWeights {
    /// Nonnegative weights, and every penalty large enough that a single
    /// violation outweighs the objective of any violation-free solution.
    ///
    /// The bound is the larger of `horizon × shifts` and the worst
    /// violation-free cost: each used shift lasts at most the hard limit, so
    /// its time cost is at most `(1 + surcharge) × limit`.
    pub fn validate(&self, inst: &Instance) -> Result<(), ModelError> {
        let all = [
            ("setup_per_shift", self.setup_per_shift),
            ("downtime_surcharge_factor", self.downtime_surcharge_factor),
            ("penalty_per_deadline_miss", self.penalty_per_deadline_miss),
            ("penalty_per_back_to_back", self.penalty_per_back_to_back),
            (
                "penalty_per_overlong_shift",
                self.penalty_per_overlong_shift,
            ),
            (
                "overlong_penalty_per_second",
                self.overlong_penalty_per_second,
            ),
            (
                "short_shift_penalty_per_second",
                self.short_shift_penalty_per_second,
            ),
            ("dissimilarity_weight", self.dissimilarity_weight),
        ];
        for (name, w) in all {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be finite and >= 0, got {w}"
                )));
            }
        }
        let bound = self.feasible_cost_bound(inst);
        for (name, p) in [
            ("penalty_per_deadline_miss", self.penalty_per_deadline_miss),
            ("penalty_per_back_to_back", self.penalty_per_back_to_back),
            (
                "penalty_per_overlong_shift",
                self.penalty_per_overlong_shift,
            ),
        ] {
            if p <= bound {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} = {p} must exceed {bound} so one violation dominates any feasible cost"
                )));
            }
        }
        Ok(())
    }

    pub fn feasible_cost_bound(&self, inst: &Instance) -> f64 {
        let rules = inst.rules();
        let k = inst.shift_count() as f64;
        let limit = rules.max_duration as f64;
        let per_shift = self.setup_per_shift
            + (1.0 + self.downtime_surcharge_factor) * limit
            + self.short_shift_penalty_per_second * rules.preferred_min_duration as f64
            + self.dissimilarity_weight * limit;
        let horizon = inst.config().horizon as f64 * k;
        (per_shift * k).max(horizon)
    }
}

/// Borrowed instance + weights; everything needed to score a solution.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub instance: &'a Instance,
    pub weights: &'a ObjectiveWeights,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, weights: &'a ObjectiveWeights) -> Self {
        Self { instance, weights }
    }

    /// Breakdown over per-shift summaries, in shift order.
    pub fn aggregate<'s, I>(&self, summaries: I) -> ObjectiveBreakdown
    where
        I: IntoIterator<Item = &'s ShiftSummary>,
    {
        let w = self.weights;
        let min_pref = self.instance.rules().preferred_min_duration;
        let max_duration = self.instance.rules().max_duration;
        let mut b = ObjectiveBreakdown::default();
        let mut durations: Vec<Seconds> = Vec::new();
        for s in summaries {
            if s.is_empty() {
                continue;
            }
            b.shift_setup_cost += w.setup_per_shift;
            b.time_cost += s.duration as f64 + w.downtime_surcharge_factor * s.downtime as f64;
            b.violation_cost += w.penalty_per_deadline_miss * f64::from(s.deadline_misses)
                + w.penalty_per_back_to_back * f64::from(s.back_to_back_pairs);
            if s.overlong {
                b.shift_shape_cost += w.penalty_per_overlong_shift
                    + w.overlong_penalty_per_second * (s.duration - max_duration) as f64;
            }
            if s.duration < min_pref {
                b.shift_shape_cost +=
                    w.short_shift_penalty_per_second * (min_pref - s.duration) as f64;
            }
            if w.dissimilarity_weight > 0.0 {
                durations.push(s.duration);
            }
        }
        if durations.len() > 1 {
            b.shift_shape_cost += w.dissimilarity_weight * dissimilarity(&durations);
        }
        b.total = b.shift_setup_cost + b.time_cost + b.violation_cost + b.shift_shape_cost;
        b
    }

    pub fn evaluate(&self, solution: &Solution) -> ObjectiveBreakdown {
        self.aggregate(solution.shifts.iter().map(|s| &s.summary))
    }

    /// Objective after replacing shift `k`'s summary with `replacement`.
    pub fn total_with(&self, solution: &Solution, k: usize, replacement: &ShiftSummary) -> f64 {
        self.aggregate(solution.shifts.iter().enumerate().map(|(i, s)| {
            if i == k {
                replacement
            } else {
                &s.summary
            }
        }))
        .total
    }
}

/// Summed absolute deviation from the mean duration.
fn dissimilarity(durations: &[Seconds]) -> f64 {
    let mean = durations.iter().sum::<Seconds>() as f64 / durations.len() as f64;
    durations.iter().map(|&d| (d as f64 - mean).abs()).sum()
}

/// Full objective breakdown of `solution` from its cached shift summaries.
pub fn evaluate(
    solution: &Solution,
    inst: &Instance,
    weights: &ObjectiveWeights,
) -> ObjectiveBreakdown {
    Evaluator::new(inst, weights).evaluate(solution)
}

/// Sum of durations over used shifts; the reporting metric, distinct from the
/// search objective.
pub fn total_service_time(solution: &Solution) -> Seconds {
    solution
        .shifts
        .iter()
        .filter(|s| !s.stops.is_empty())
        .map(|s| s.summary.duration)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::{line_instance, toy_request};

    #[test]
    fn empty_solution_costs_nothing() {
        let inst = line_instance(&[(0, 90_000, 300), (0, 90_000, 300)], &[0, 3600]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let sol = Solution::empty(ev);
        assert_eq!(sol.objective.total, 0.0);
        assert_eq!(total_service_time(&sol), 0);
    }

    #[test]
    fn components_add_up_and_match_hand_computation() {
        // One stop at x=1 (100 s away), window opens at 2000.
        let inst = line_instance(&[(2000, 90_000, 300)], &[0]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let sol = Solution::from_routes(ev, vec![vec![0]]);
        let b = sol.objective;
        let downtime = 2000 - 1000;
        let duration = 2000 + 300 + 100 + 2700;
        assert_eq!(sol.shifts[0].summary.downtime, downtime);
        assert_eq!(sol.shifts[0].summary.duration, duration);
        assert_eq!(b.shift_setup_cost, 1800.0);
        assert_eq!(b.time_cost, (duration + downtime) as f64);
        assert_eq!(b.violation_cost, 0.0);
        assert!((b.shift_shape_cost - 0.2 * (28_800 - duration) as f64).abs() < 1e-9);
        assert_eq!(
            b.total,
            b.shift_setup_cost + b.time_cost + b.violation_cost + b.shift_shape_cost
        );
        assert_eq!(total_service_time(&sol), duration);
    }

    #[test]
    fn back_to_back_pair_costs_exactly_its_penalty() {
        let mut a = toy_request(1, 0, 90_000, 60);
        let mut b = toy_request(2, 0, 90_000, 60);
        a.back_to_back_group = 5;
        b.back_to_back_group = 5;
        let c = toy_request(3, 0, 90_000, 60);
        let mut reqs = vec![a, b, c];
        // Place request 2 and 3 at the same coordinate so both orders share timing.
        reqs[1].site_id = "S".into();
        reqs[2].site_id = "S".into();
        let inst = crate::toy::instance_with_points(reqs, &[0.0, 1.0, 1.0], &[0]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        // 0 then 1 (same group) vs 0 then 2: identical geometry and service.
        let with_pair = Solution::from_routes(ev, vec![vec![0, 1]]);
        let without = Solution::from_routes(ev, vec![vec![0, 2]]);
        assert_eq!(with_pair.violations().back_to_back_pairs, 1);
        assert_eq!(without.violations().back_to_back_pairs, 0);
        assert_eq!(
            with_pair.objective.total - without.objective.total,
            w.penalty_per_back_to_back
        );
    }

    #[test]
    fn shift_order_does_not_matter() {
        let inst = line_instance(
            &[(0, 90_000, 300), (5000, 90_000, 200), (0, 90_000, 100)],
            &[0, 0],
        );
        let w = ObjectiveWeights {
            dissimilarity_weight: 0.5,
            ..Default::default()
        };
        let ev = Evaluator::new(&inst, &w);
        let a = Solution::from_routes(ev, vec![vec![0, 1], vec![2]]);
        let b = Solution::from_routes(ev, vec![vec![2], vec![0, 1]]);
        assert_eq!(a.objective.total, b.objective.total);
    }

    #[test]
    fn overlong_shift_pays_flat_plus_per_second() {
        // Two long jobs push the shift past the 12 h limit.
        let inst = line_instance(&[(0, 90_000, 20_000), (0, 90_000, 20_000)], &[0]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let sol = Solution::from_routes(ev, vec![vec![0, 1]]);
        let s = &sol.shifts[0].summary;
        assert!(s.overlong);
        let over = (s.duration - inst.rules().max_duration) as f64;
        assert!(over > 0.0);
        let expected = w.penalty_per_overlong_shift + w.overlong_penalty_per_second * over;
        assert!((sol.objective.shift_shape_cost - expected).abs() < 1e-6);

        let flat = ObjectiveWeights {
            overlong_penalty_per_second: 0.0,
            ..Default::default()
        };
        let b = Evaluator::new(&inst, &flat).evaluate(&sol);
        assert_eq!(b.shift_shape_cost, flat.penalty_per_overlong_shift);
    }

    #[test]
    fn validation_rejects_small_penalties() {
        let inst = line_instance(&[(0, 90_000, 300)], &[0, 0]);
        assert!(ObjectiveWeights::default().validate(&inst).is_ok());
        let w = ObjectiveWeights {
            penalty_per_back_to_back: 1000.0,
            ..Default::default()
        };
        assert!(w.validate(&inst).is_err());
        let w = ObjectiveWeights {
            setup_per_shift: -1.0,
            ..Default::default()
        };
        assert!(w.validate(&inst).is_err());
    }
}
