//! D1..D17. Each takes a complete solution and returns a partial one plus
//! the removed requests in removal order. An operator whose target does not
//! exist (no late stop, no overlong shift, ...) removes nothing.

use super::{DestroyResult, OperatorContext};
use crate::model::{Instance, Solution};
use crate::objective::total_service_time;
use crate::rng::RngStream;

/// Two-way travel between two requests; the "distance" used by the
/// farthest-pair operators.
pub fn pair_distance(inst: &Instance, a: usize, b: usize) -> i64 {
    let (na, nb) = (Instance::node(a), Instance::node(b));
    inst.travel(na, nb) + inst.travel(nb, na)
}

/// Applies destroy operator `index` (1..=17). Panics on an out-of-range
/// index; [`super::destroy_by_id`] is the checked entry point.
pub fn apply_destroy(
    index: u8,
    solution: &Solution,
    ctx: &OperatorContext<'_>,
    rng: &mut RngStream,
) -> DestroyResult {
    let mut d = Destroyer {
        ctx,
        partial: solution.clone(),
        removed: Vec::new(),
    };
    let n = ctx.removal_count();
    match index {
        1 => d.random_from_random_shifts(1, rng),
        2 => d.random_from_random_shifts(n, rng),
        3 => d.lowest_service(1),
        4 => d.lowest_service(n),
        5 => d.random_and_closest_neighbour(rng),
        6 => d.consecutive(3, rng),
        7 => d.consecutive(n, rng),
        8 => d.cheapest_removal(),
        9 => d.latest(),
        10 => d.farthest_pair_in_random_shift(rng),
        11 => {
            let k = d.argmax_shift(|s| s.summary.duration as f64);
            d.farthest_pair_in(k);
        }
        12 => d.random_from_lowest_downtime(rng),
        13 => d.trim_overlong(true),
        14 => d.trim_overlong(false),
        15 => d.shortest_service_time_removal(),
        16 => {
            let k = d.argmax_shift(|s| s.summary.actual_time() as f64 / s.stops.len() as f64);
            d.farthest_pair_in(k);
        }
        17 => d.farthest_pair_overall(),
        _ => panic!("destroy operator index {index} out of range"),
    }
    DestroyResult {
        partial: d.partial,
        removed: d.removed,
    }
}

struct Destroyer<'c, 'a> {
    ctx: &'c OperatorContext<'a>,
    partial: Solution,
    removed: Vec<usize>,
}

impl Destroyer<'_, '_> {
    fn inst(&self) -> &Instance {
        self.ctx.ev.instance
    }

    fn remove_at(&mut self, k: usize, p: usize) {
        let r = self.partial.remove(self.ctx.ev, k, p);
        self.removed.push(r);
    }

    fn remove_request(&mut self, r: usize) {
        let (k, p) = self.partial.locate(r).expect("request is assigned");
        self.remove_at(k, p);
    }

    fn non_empty_shifts(&self) -> Vec<usize> {
        (0..self.partial.shifts.len())
            .filter(|&k| !self.partial.shifts[k].stops.is_empty())
            .collect()
    }

    fn assigned(&self) -> Vec<(usize, usize)> {
        self.partial
            .shifts
            .iter()
            .enumerate()
            .flat_map(|(k, s)| (0..s.stops.len()).map(move |p| (k, p)))
            .collect()
    }

    /// Non-empty shift maximizing `score`, lowest index on ties.
    fn argmax_shift(&self, score: impl Fn(&crate::model::Shift) -> f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for k in self.non_empty_shifts() {
            let s = score(&self.partial.shifts[k]);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((k, s));
            }
        }
        best.map(|(k, _)| k)
    }

    // D1, D2
    fn random_from_random_shifts(&mut self, n: usize, rng: &mut RngStream) {
        for _ in 0..n {
            let shifts = self.non_empty_shifts();
            if shifts.is_empty() {
                return;
            }
            let k = shifts[rng.below(shifts.len())];
            let p = rng.below(self.partial.shifts[k].stops.len());
            self.remove_at(k, p);
        }
    }

    // D3, D4
    fn lowest_service(&mut self, n: usize) {
        let inst = self.inst();
        let mut stops: Vec<(i64, usize, usize, usize)> = self
            .assigned()
            .into_iter()
            .map(|(k, p)| {
                let r = self.partial.shifts[k].stops[p];
                (inst.request(r).service_duration, k, p, r)
            })
            .collect();
        stops.sort_unstable();
        let picked: Vec<usize> = stops.iter().take(n).map(|t| t.3).collect();
        for r in picked {
            self.remove_request(r);
        }
    }

    // D5
    fn random_and_closest_neighbour(&mut self, rng: &mut RngStream) {
        let all = self.assigned();
        if all.is_empty() {
            return;
        }
        let (k, p) = all[rng.below(all.len())];
        let chosen = self.partial.shifts[k].stops[p];
        let inst = self.inst();
        let from = Instance::node(chosen);
        let mut neighbour: Option<(i64, usize)> = None;
        for &(k2, p2) in &all {
            let r = self.partial.shifts[k2].stops[p2];
            if r == chosen || inst.is_back_to_back(from, Instance::node(r)) {
                continue;
            }
            let c = inst.cost(from, Instance::node(r));
            if neighbour.is_none_or(|(b, _)| c < b) {
                neighbour = Some((c, r));
            }
        }
        self.remove_at(k, p);
        if let Some((_, r)) = neighbour {
            self.remove_request(r);
        }
    }

    // D6, D7
    fn consecutive(&mut self, n: usize, rng: &mut RngStream) {
        let shifts = self.non_empty_shifts();
        if shifts.is_empty() {
            return;
        }
        let k = shifts[rng.below(shifts.len())];
        let len = self.partial.shifts[k].stops.len();
        let (start, count) = if len <= n {
            (0, len)
        } else {
            (rng.below(len - n + 1), n)
        };
        for _ in 0..count {
            self.remove_at(k, start);
        }
    }

    // D8
    fn cheapest_removal(&mut self) {
        let ev = self.ctx.ev;
        let mut best: Option<(f64, usize, usize)> = None;
        for (k, p) in self.assigned() {
            let value = ev.total_with(&self.partial, k, &self.summary_without(k, p));
            if best.is_none_or(|(b, _, _)| value < b) {
                best = Some((value, k, p));
            }
        }
        if let Some((_, k, p)) = best {
            self.remove_at(k, p);
        }
    }

    // D15
    fn shortest_service_time_removal(&mut self) {
        let base = total_service_time(&self.partial);
        let mut best: Option<(i64, usize, usize)> = None;
        for (k, p) in self.assigned() {
            let shift = &self.partial.shifts[k];
            let after = self.summary_without(k, p);
            let new_duration = if after.is_empty() { 0 } else { after.duration };
            let value = base - shift.summary.duration + new_duration;
            if best.is_none_or(|(b, _, _)| value < b) {
                best = Some((value, k, p));
            }
        }
        if let Some((_, k, p)) = best {
            self.remove_at(k, p);
        }
    }

    fn summary_without(&self, k: usize, p: usize) -> crate::model::ShiftSummary {
        let shift = &self.partial.shifts[k];
        let stops = shift
            .stops
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != p)
            .map(|(_, &r)| r);
        self.inst().summarize(shift.start_time, stops)
    }

    // D9
    fn latest(&mut self) {
        let inst = self.inst();
        let mut worst: Option<(i64, usize, usize)> = None;
        for (k, sched) in self.partial.schedules(inst).iter().enumerate() {
            for (p, t) in sched.stops.iter().enumerate() {
                let late = t.completion - inst.request(t.request).window_end;
                if late > 0 && worst.is_none_or(|(w, _, _)| late > w) {
                    worst = Some((late, k, p));
                }
            }
        }
        if let Some((_, k, p)) = worst {
            self.remove_at(k, p);
        }
    }

    /// Positions (i, j), i < j, of the farthest pair in shift `k`.
    fn farthest_pair(&self, k: usize) -> Option<(i64, usize, usize)> {
        let stops = &self.partial.shifts[k].stops;
        let inst = self.inst();
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..stops.len() {
            for j in i + 1..stops.len() {
                let d = pair_distance(inst, stops[i], stops[j]);
                if best.is_none_or(|(b, _, _)| d > b) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }

    /// Removes the farthest pair of shift `k`, or its only stop.
    fn farthest_pair_in(&mut self, k: Option<usize>) {
        let Some(k) = k else { return };
        match self.farthest_pair(k) {
            Some((_, i, j)) => {
                let (a, b) = (
                    self.partial.shifts[k].stops[i],
                    self.partial.shifts[k].stops[j],
                );
                self.remove_request(a);
                self.remove_request(b);
            }
            None => {
                if !self.partial.shifts[k].stops.is_empty() {
                    self.remove_at(k, 0);
                }
            }
        }
    }

    // D10
    fn farthest_pair_in_random_shift(&mut self, rng: &mut RngStream) {
        let shifts: Vec<usize> = (0..self.partial.shifts.len())
            .filter(|&k| self.partial.shifts[k].stops.len() >= 2)
            .collect();
        if shifts.is_empty() {
            return;
        }
        let k = shifts[rng.below(shifts.len())];
        self.farthest_pair_in(Some(k));
    }

    // D12
    fn random_from_lowest_downtime(&mut self, rng: &mut RngStream) {
        let Some(k) = self.argmax_shift(|s| -(s.summary.downtime as f64)) else {
            return;
        };
        let p = rng.below(self.partial.shifts[k].stops.len());
        self.remove_at(k, p);
    }

    // D13, D14
    fn trim_overlong(&mut self, last: bool) {
        for k in 0..self.partial.shifts.len() {
            let shift = &self.partial.shifts[k];
            if shift.summary.overlong && !shift.stops.is_empty() {
                let p = if last { shift.stops.len() - 1 } else { 0 };
                self.remove_at(k, p);
            }
        }
    }

    // D17
    fn farthest_pair_overall(&mut self) {
        let mut best: Option<(i64, usize)> = None;
        for k in 0..self.partial.shifts.len() {
            if let Some((d, _, _)) = self.farthest_pair(k) {
                if best.is_none_or(|(b, _)| d > b) {
                    best = Some((d, k));
                }
            }
        }
        if let Some((_, k)) = best {
            self.farthest_pair_in(Some(k));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::OperatorParams;
    use crate::objective::{Evaluator, ObjectiveWeights};
    use crate::toy::line_instance;

    fn run(index: u8, inst: &Instance, routes: Vec<Vec<usize>>, seed: u64) -> DestroyResult {
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(inst, &w);
        let ctx = OperatorContext::new(ev, OperatorParams::default());
        let sol = Solution::from_routes(ev, routes);
        apply_destroy(index, &sol, &ctx, &mut RngStream::new(seed))
    }

    fn wide(n: usize) -> Vec<(i64, i64, i64)> {
        (0..n).map(|i| (0, 90_000, 100 + 10 * i as i64)).collect()
    }

    #[test]
    fn single_stop_is_removed_by_d1() {
        let inst = line_instance(&wide(1), &[0]);
        let d = run(1, &inst, vec![vec![0]], 3);
        assert_eq!(d.removed, vec![0]);
        assert_eq!(d.partial.assigned_count(), 0);
    }

    #[test]
    fn d3_takes_shortest_service() {
        let inst = line_instance(
            &[(0, 90_000, 500), (0, 90_000, 200), (0, 90_000, 900)],
            &[0, 0],
        );
        let d = run(3, &inst, vec![vec![0, 2], vec![1]], 0);
        assert_eq!(d.removed, vec![1]);
        let d = run(4, &inst, vec![vec![0, 2], vec![1]], 0);
        assert_eq!(d.removed, vec![1, 0]);
    }

    #[test]
    fn d6_on_short_shift_empties_it() {
        let inst = line_instance(&wide(2), &[0]);
        let d = run(6, &inst, vec![vec![1, 0]], 8);
        assert_eq!(d.removed, vec![1, 0]);
    }

    #[test]
    fn d6_removes_a_consecutive_block() {
        let inst = line_instance(&wide(6), &[0]);
        for seed in 0..20 {
            let d = run(6, &inst, vec![vec![0, 1, 2, 3, 4, 5]], seed);
            assert_eq!(d.removed.len(), 3);
            assert_eq!(d.removed[1], d.removed[0] + 1);
            assert_eq!(d.removed[2], d.removed[0] + 2);
        }
    }

    #[test]
    fn d9_removes_the_only_late_stop() {
        // Second stop (x=2) finishes at 1000+100+100+100 = 1300 > 1250.
        let inst = line_instance(&[(0, 90_000, 100), (0, 1250, 100), (0, 90_000, 100)], &[0]);
        let d = run(9, &inst, vec![vec![0, 1, 2]], 0);
        assert_eq!(d.removed, vec![1]);
        let inst = line_instance(&wide(2), &[0]);
        assert!(run(9, &inst, vec![vec![0, 1]], 0).removed.is_empty());
    }

    #[test]
    fn d10_and_d17_take_the_farthest_pair() {
        // Points at x = 1..5; in shift 0 the farthest pair is (x=1, x=5).
        let inst = line_instance(&wide(5), &[0, 0]);
        let d = run(10, &inst, vec![vec![2, 0, 4], vec![1, 3]], 1);
        // Either shift may be picked; each yields its own extremes.
        assert!(
            d.removed == vec![0, 4] || d.removed == vec![1, 3],
            "{:?}",
            d.removed
        );
        let d = run(17, &inst, vec![vec![2, 0, 4], vec![1, 3]], 1);
        assert_eq!(d.removed, vec![0, 4]);
    }

    #[test]
    fn d13_d14_ignore_shifts_within_the_limit() {
        let inst = line_instance(&wide(3), &[0, 0]);
        assert!(run(13, &inst, vec![vec![0, 1], vec![2]], 0)
            .removed
            .is_empty());
        assert!(run(14, &inst, vec![vec![0, 1], vec![2]], 0)
            .removed
            .is_empty());
    }

    #[test]
    fn d13_d14_trim_overlong_shifts() {
        // 40000 s of service makes shift 0 exceed 12 h.
        let inst = line_instance(
            &[(0, 200_000, 20_000), (0, 200_000, 20_000), (0, 200_000, 60)],
            &[0, 0],
        );
        assert_eq!(
            run(13, &inst, vec![vec![0, 1], vec![2]], 0).removed,
            vec![1]
        );
        assert_eq!(
            run(14, &inst, vec![vec![0, 1], vec![2]], 0).removed,
            vec![0]
        );
    }

    #[test]
    fn d5_skips_back_to_back_partners() {
        use crate::toy::{instance_with_points, toy_request};
        let mut reqs: Vec<_> = (1..=3).map(|i| toy_request(i, 0, 90_000, 60)).collect();
        reqs[1].back_to_back_group = reqs[0].back_to_back_group;
        // 0 and 1 share a site group and are adjacent on the line.
        let inst = instance_with_points(reqs, &[1.0, 1.0, 4.0], &[0]);
        for seed in 0..30 {
            let d = run(5, &inst, vec![vec![0, 1, 2]], seed);
            assert_eq!(d.removed.len(), 2);
            let pair = (d.removed[0], d.removed[1]);
            assert!(pair != (0, 1) && pair != (1, 0), "{pair:?}");
        }
    }
}
