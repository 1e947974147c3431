//! R1..R17. Each reinserts every removed request; they differ in the order
//! requests are taken and in where each one goes.

use super::insertion::{best_insertion, best_insertion_in_shift, InsertionMetric};
use super::{DestroyResult, OperatorContext};
use crate::model::{Instance, Solution, DEPOT};
use crate::objective::Evaluator;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Random,
    Removed,
    LongestService,
    ShortestWindow,
    EarliestDeadline,
    ClosestToDepot,
    FarthestFromDepot,
    Regret,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Random,
    Cheapest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    AnyShift(Position),
    Best(InsertionMetric),
    HighestDowntime(Position),
    Shortest(Position),
}

fn catalog(index: u8) -> (Order, Target) {
    use InsertionMetric::{ActualTime, Objective};
    match index {
        1 => (Order::Random, Target::AnyShift(Position::Random)),
        2 => (Order::Removed, Target::AnyShift(Position::Random)),
        3 => (Order::Random, Target::Best(Objective)),
        4 => (Order::Removed, Target::Best(Objective)),
        5 => (Order::Random, Target::Best(ActualTime)),
        6 => (Order::Removed, Target::Best(ActualTime)),
        7 => (Order::LongestService, Target::Best(Objective)),
        8 => (Order::ShortestWindow, Target::Best(Objective)),
        9 => (Order::EarliestDeadline, Target::Best(Objective)),
        10 => (Order::ClosestToDepot, Target::Best(Objective)),
        11 => (Order::FarthestFromDepot, Target::Best(Objective)),
        12 => (Order::Removed, Target::HighestDowntime(Position::Random)),
        13 => (Order::Removed, Target::HighestDowntime(Position::Cheapest)),
        14 => (Order::Removed, Target::Shortest(Position::Random)),
        15 => (Order::Removed, Target::Shortest(Position::Cheapest)),
        16 => (Order::Regret, Target::Best(Objective)),
        17 => (Order::Regret, Target::Best(ActualTime)),
        _ => panic!("repair operator index {index} out of range"),
    }
}

/// Applies repair operator `index` (1..=17). Panics on an out-of-range
/// index; [`super::repair_by_id`] is the checked entry point.
pub fn apply_repair(
    index: u8,
    destroyed: DestroyResult,
    ctx: &OperatorContext<'_>,
    rng: &mut RngStream,
) -> Solution {
    let (order, target) = catalog(index);
    let ev = ctx.ev;
    let inst = ev.instance;
    let DestroyResult {
        partial: mut sol,
        removed: mut pending,
    } = destroyed;

    if order == Order::Regret {
        let Target::Best(metric) = target else {
            unreachable!("regret operators insert at the cheapest position")
        };
        while !pending.is_empty() {
            let i = regret_index(ev, &sol, &pending, ctx.params.regret_k, metric);
            let r = pending.remove(i);
            place(ev, &mut sol, r, target, rng);
        }
        return sol;
    }

    sort_pending(order, inst, &mut pending, rng);
    for r in pending {
        place(ev, &mut sol, r, target, rng);
    }
    sol
}

/// Reorders `pending` by a fixed insertion rule. Stable sorts keep removed
/// order among equal keys.
fn sort_pending(order: Order, inst: &Instance, pending: &mut [usize], rng: &mut RngStream) {
    use std::cmp::Reverse;
    let depot_cost = |r: usize| inst.travel(DEPOT, Instance::node(r));
    match order {
        Order::Random => rng.shuffle(pending),
        Order::Removed | Order::Regret => {}
        Order::LongestService => {
            pending.sort_by_key(|&r| Reverse(inst.request(r).service_duration))
        }
        Order::ShortestWindow => pending.sort_by_key(|&r| inst.request(r).window_length()),
        Order::EarliestDeadline => pending.sort_by_key(|&r| inst.request(r).window_end),
        Order::ClosestToDepot => pending.sort_by_key(|&r| depot_cost(r)),
        Order::FarthestFromDepot => pending.sort_by_key(|&r| Reverse(depot_cost(r))),
    }
}

fn place(ev: Evaluator<'_>, sol: &mut Solution, r: usize, target: Target, rng: &mut RngStream) {
    let (k, position) = match target {
        Target::Best(metric) => {
            let ins = best_insertion(ev, sol, r, metric);
            sol.insert(ev, ins.shift, ins.pos, r);
            return;
        }
        Target::AnyShift(position) => (rng.below(sol.shifts.len()), position),
        Target::HighestDowntime(position) => (argmax_shift(sol, |s| s.summary.downtime), position),
        Target::Shortest(position) => (argmax_shift(sol, |s| -s.summary.duration), position),
    };
    let pos = match position {
        Position::Random => rng.below(sol.shifts[k].stops.len() + 1),
        Position::Cheapest => {
            best_insertion_in_shift(ev, sol, k, r, InsertionMetric::Objective).pos
        }
    };
    sol.insert(ev, k, pos, r);
}

/// Shift maximizing `score` over all shifts, lowest index on ties.
fn argmax_shift(sol: &Solution, score: impl Fn(&crate::model::Shift) -> i64) -> usize {
    let mut best = (0, i64::MIN);
    for (k, s) in sol.shifts.iter().enumerate() {
        let v = score(s);
        if v > best.1 {
            best = (k, v);
        }
    }
    best.0
}

/// Regret of inserting `r`: gap between its k-th best and best per-shift
/// insertion values. With fewer than k shifts the worst shift stands in for
/// the k-th.
fn regret_of(
    ev: Evaluator<'_>,
    sol: &Solution,
    r: usize,
    k: usize,
    metric: InsertionMetric,
) -> f64 {
    let mut per_shift: Vec<f64> = (0..sol.shifts.len())
        .map(|s| best_insertion_in_shift(ev, sol, s, r, metric).value)
        .collect();
    per_shift.sort_by(f64::total_cmp);
    let kth = k.clamp(1, per_shift.len()) - 1;
    per_shift[kth] - per_shift[0]
}

fn regret_index(
    ev: Evaluator<'_>,
    sol: &Solution,
    pending: &[usize],
    k: usize,
    metric: InsertionMetric,
) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &r) in pending.iter().enumerate() {
        let regret = regret_of(ev, sol, r, k, metric);
        if regret > best.1 {
            best = (i, regret);
        }
    }
    best.0
}

/// The pending request with the largest regret; ties go to the earliest in
/// `removed`. Returns `None` only when `removed` is empty.
pub fn regret_select(
    ev: Evaluator<'_>,
    partial: &Solution,
    removed: &[usize],
    k: usize,
    metric: InsertionMetric,
) -> Option<usize> {
    if removed.is_empty() {
        return None;
    }
    Some(removed[regret_index(ev, partial, removed, k, metric)])
}
