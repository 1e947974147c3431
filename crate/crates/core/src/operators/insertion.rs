//! Cheapest-insertion search shared by the repair operators.

use crate::model::{Solution, Sweep};
use crate::objective::Evaluator;

/// What an insertion is scored by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionMetric {
    /// Full objective of the solution after the insertion.
    Objective,
    /// Travel plus service time of the receiving shift after the insertion.
    ActualTime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    pub shift: usize,
    pub pos: usize,
    /// Metric value after inserting; lower is better.
    pub value: f64,
}

/// Metric value after inserting `r` at `(k, pos)`, by full recomputation.
pub fn insertion_value(
    ev: Evaluator<'_>,
    solution: &Solution,
    k: usize,
    pos: usize,
    r: usize,
    metric: InsertionMetric,
) -> f64 {
    let shift = &solution.shifts[k];
    let stops = shift.stops[..pos]
        .iter()
        .copied()
        .chain(std::iter::once(r))
        .chain(shift.stops[pos..].iter().copied());
    let summary = ev.instance.summarize(shift.start_time, stops);
    match metric {
        InsertionMetric::Objective => ev.total_with(solution, k, &summary),
        InsertionMetric::ActualTime => summary.actual_time() as f64,
    }
}

/// Cheapest position for `r` within shift `k`; ties go to the earliest
/// position.
pub fn best_insertion_in_shift(
    ev: Evaluator<'_>,
    solution: &Solution,
    k: usize,
    r: usize,
    metric: InsertionMetric,
) -> Insertion {
    let inst = ev.instance;
    let shift = &solution.shifts[k];
    let mut prefix = Sweep::start(inst, shift.start_time);
    let mut best = Insertion {
        shift: k,
        pos: 0,
        value: f64::INFINITY,
    };
    for pos in 0..=shift.stops.len() {
        let mut probe = prefix;
        probe.visit(inst, r);
        for &s in &shift.stops[pos..] {
            probe.visit(inst, s);
        }
        let summary = probe.finish(inst);
        let value = match metric {
            InsertionMetric::Objective => ev.total_with(solution, k, &summary),
            InsertionMetric::ActualTime => summary.actual_time() as f64,
        };
        if value < best.value {
            best = Insertion {
                shift: k,
                pos,
                value,
            };
        }
        if pos < shift.stops.len() {
            prefix.visit(inst, shift.stops[pos]);
        }
    }
    best
}

/// Cheapest position for `r` over the given shifts; ties go to the lowest
/// (shift, position).
pub fn best_insertion(
    ev: Evaluator<'_>,
    solution: &Solution,
    r: usize,
    metric: InsertionMetric,
) -> Insertion {
    (0..solution.shifts.len())
        .map(|k| best_insertion_in_shift(ev, solution, k, r, metric))
        .fold(None::<Insertion>, |acc, c| match acc {
            Some(a) if a.value <= c.value => Some(a),
            _ => Some(c),
        })
        .expect("at least one shift")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectiveWeights;
    use crate::toy::line_instance;

    #[test]
    fn prefix_sweep_matches_full_recomputation() {
        let specs: Vec<_> = (0..9)
            .map(|i| (500 * i, 4000 + 700 * i, 120 + 10 * i))
            .collect();
        let inst = line_instance(&specs, &[0, 2000]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let sol = Solution::from_routes(ev, vec![vec![3, 0, 5, 1], vec![7, 2]]);
        for r in [4, 6, 8] {
            for metric in [InsertionMetric::Objective, InsertionMetric::ActualTime] {
                for k in 0..2 {
                    let got = best_insertion_in_shift(ev, &sol, k, r, metric);
                    let brute = (0..=sol.shifts[k].stops.len())
                        .map(|p| (p, insertion_value(ev, &sol, k, p, r, metric)))
                        .fold((0, f64::INFINITY), |a, c| if c.1 < a.1 { c } else { a });
                    assert_eq!((got.pos, got.value), brute);
                }
            }
        }
    }

    #[test]
    fn ties_take_lowest_shift() {
        let inst = line_instance(&[(0, 90_000, 60)], &[0, 0]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let sol = Solution::empty(ev);
        let ins = best_insertion(ev, &sol, 0, InsertionMetric::Objective);
        assert_eq!((ins.shift, ins.pos), (0, 0));
    }
}
