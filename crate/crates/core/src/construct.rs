//! Greedy initial solution.
//!
//! Requests are taken in order of deadline (ties by id). Each one is appended
//! to the end of the shift that can reach it earliest among the shifts that
//! can take it without a new violation; when no shift qualifies it goes to a
//! uniformly random shift. The result covers every request but is usually
//! infeasible on realistic instances.

use crate::model::{Instance, Solution, Sweep};
use crate::objective::Evaluator;
use crate::rng::RngStream;

pub fn build_initial(ev: Evaluator<'_>, rng: &mut RngStream) -> Solution {
    let inst = ev.instance;
    let mut order: Vec<usize> = (0..inst.request_count()).collect();
    order.sort_by_key(|&r| (inst.request(r).window_end, inst.request(r).id));

    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); inst.shift_count()];
    // End-of-route sweep state per shift, so appending is O(1).
    let mut tails: Vec<Sweep> = inst
        .config()
        .shift_start_times
        .iter()
        .map(|&t| Sweep::start(inst, t))
        .collect();

    for r in order {
        let mut chosen: Option<(usize, i64)> = None;
        for (k, tail) in tails.iter().enumerate() {
            if !can_append(inst, tail, r) {
                continue;
            }
            let arrival = tail.clock() + inst.travel(tail.last_node(), Instance::node(r));
            if chosen.is_none_or(|(_, best)| arrival < best) {
                chosen = Some((k, arrival));
            }
        }
        let k = match chosen {
            Some((k, _)) => k,
            None => rng.below(inst.shift_count()),
        };
        tails[k].visit(inst, r);
        routes[k].push(r);
    }
    Solution::from_routes(ev, routes)
}

/// Appending `r` keeps it on time, avoids a back-to-back pair with the last
/// stop and keeps the shift within the duration limit.
fn can_append(inst: &Instance, tail: &Sweep, r: usize) -> bool {
    let node = Instance::node(r);
    if tail.last_node() != crate::model::DEPOT && inst.is_back_to_back(tail.last_node(), node) {
        return false;
    }
    let mut probe = *tail;
    let timing = probe.visit(inst, r);
    if timing.completion > inst.request(r).window_end {
        return false;
    }
    !probe.finish(inst).overlong
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectiveWeights;
    use crate::toy::line_instance;

    #[test]
    fn no_requests_gives_empty_shifts() {
        let inst = line_instance(&[], &[0, 3600, 7200]);
        let w = ObjectiveWeights::default();
        let sol = build_initial(Evaluator::new(&inst, &w), &mut RngStream::new(1));
        assert_eq!(sol.shifts.len(), 3);
        assert!(sol.shifts.iter().all(|s| s.stops.is_empty()));
    }

    #[test]
    fn two_requests_go_to_earliest_arriving_shift() {
        // Shift 1 starts earlier, so it reaches the first request first; the
        // second request (later deadline) still fits after it.
        let inst = line_instance(&[(0, 5000, 300), (6000, 9000, 300)], &[3600, 0]);
        let w = ObjectiveWeights::default();
        let sol = build_initial(Evaluator::new(&inst, &w), &mut RngStream::new(1));
        assert!(sol.is_feasible());
        assert_eq!(sol.shifts[1].stops, vec![0, 1]);
        assert!(sol.shifts[0].stops.is_empty());
    }

    #[test]
    fn ties_go_to_the_first_listed_shift() {
        let inst = line_instance(&[(0, 90_000, 300)], &[0, 0, 0]);
        let w = ObjectiveWeights::default();
        let sol = build_initial(Evaluator::new(&inst, &w), &mut RngStream::new(9));
        assert_eq!(sol.shifts[0].stops, vec![0]);
    }

    #[test]
    fn impossible_request_still_gets_assigned() {
        // Window closes before any shift can arrive.
        let inst = line_instance(&[(0, 50, 300), (0, 90_000, 60)], &[0, 0]);
        let w = ObjectiveWeights::default();
        let sol = build_initial(Evaluator::new(&inst, &w), &mut RngStream::new(4));
        assert!(sol.is_complete(2));
        assert_eq!(sol.violations().deadline_misses, 1);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let specs: Vec<_> = (0..20).map(|i| (0, 1000 + 10 * i, 300)).collect();
        let inst = line_instance(&specs, &[0, 0, 0]);
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let a = build_initial(ev, &mut RngStream::new(5));
        let b = build_initial(ev, &mut RngStream::new(5));
        assert_eq!(a, b);
    }
}
