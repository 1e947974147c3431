//! Tabu search moves: random swap and long-arc swap, with a bounded FIFO
//! list of recently swapped stop pairs.

use std::collections::VecDeque;

use crate::config::TabuParams;
use crate::model::{Instance, Solution, StopId, DEPOT};
use crate::objective::Evaluator;
use crate::operators::{OperatorId, OperatorKind};
use crate::orchestrate::{PhaseBudget, PhaseKind, Search};
use crate::rng::RngStream;
use crate::selection::{OperatorBank, Outcome};

/// Unordered pair of stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TabuKey(StopId, StopId);

impl TabuKey {
    pub fn new(a: StopId, b: StopId) -> Self {
        if a <= b {
            Self(a, b)
        } else {
            Self(b, a)
        }
    }

    pub fn stops(&self) -> (StopId, StopId) {
        (self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuList {
    queue: VecDeque<TabuKey>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "tabu list needs room for at least one entry");
        Self {
            queue: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn contains(&self, key: TabuKey) -> bool {
        self.queue.contains(&key)
    }

    /// Appends `key`, evicting the oldest entry when full.
    pub fn push(&mut self, key: TabuKey) {
        if self.queue.len() == self.capacity {
            self.queue.pop_front();
        }
        self.queue.push_back(key);
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &TabuKey> {
        self.queue.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcClass {
    Long,
    Short,
    Neither,
}

/// Classifies the arc between two nodes by travel time alone. Arcs touching
/// the depot are never long or short.
pub fn classify_arc(inst: &Instance, from: usize, to: usize, params: &TabuParams) -> ArcClass {
    if from == DEPOT || to == DEPOT {
        return ArcClass::Neither;
    }
    let t = inst.travel(from, to);
    if t > params.long_arc_threshold {
        ArcClass::Long
    } else if t < params.short_arc_threshold {
        ArcClass::Short
    } else {
        ArcClass::Neither
    }
}

fn key_of(inst: &Instance, a: usize, b: usize) -> TabuKey {
    TabuKey::new(inst.request(a).id, inst.request(b).id)
}

/// Swaps two distinct random stops unless the pair is tabu. Returns whether
/// a swap happened.
pub fn random_swap(
    ev: Evaluator<'_>,
    sol: &mut Solution,
    tabu: &mut TabuList,
    rng: &mut RngStream,
) -> bool {
    let slots: Vec<(usize, usize)> = sol
        .shifts
        .iter()
        .enumerate()
        .flat_map(|(k, s)| (0..s.stops.len()).map(move |p| (k, p)))
        .collect();
    if slots.len() < 2 {
        return false;
    }
    let i = rng.below(slots.len());
    let mut j = rng.below(slots.len() - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (slots[i], slots[j]);
    let key = key_of(
        ev.instance,
        sol.shifts[a.0].stops[a.1],
        sol.shifts[b.0].stops[b.1],
    );
    if tabu.contains(key) {
        return false;
    }
    sol.swap_stops(ev, a, b);
    tabu.push(key);
    true
}

/// Position `i` of a long arc `stops[i] → stops[i + 1]`, scanning from a
/// random offset and wrapping around.
fn find_long_arc(
    inst: &Instance,
    stops: &[usize],
    params: &TabuParams,
    rng: &mut RngStream,
) -> Option<usize> {
    if stops.len() < 2 {
        return None;
    }
    let arcs = stops.len() - 1;
    let offset = rng.below(arcs);
    (0..arcs).map(|t| (offset + t) % arcs).find(|&i| {
        classify_arc(
            inst,
            Instance::node(stops[i]),
            Instance::node(stops[i + 1]),
            params,
        ) == ArcClass::Long
    })
}

/// Long-arc swap. With long arcs A→B in one random route and C→D in
/// another (possibly the same), swaps B with D when the resulting arcs A→D
/// and C→B are short, otherwise B with C when A→C and B→D are short. Any
/// missing arc, shared stop or tabu pair leaves the solution unchanged.
pub fn long_arc_swap(
    ev: Evaluator<'_>,
    sol: &mut Solution,
    params: &TabuParams,
    tabu: &mut TabuList,
    rng: &mut RngStream,
) -> bool {
    let inst = ev.instance;
    let k1 = rng.below(sol.shifts.len());
    let k2 = rng.below(sol.shifts.len());
    let Some(i) = find_long_arc(inst, &sol.shifts[k1].stops, params, rng) else {
        return false;
    };
    let Some(j) = find_long_arc(inst, &sol.shifts[k2].stops, params, rng) else {
        return false;
    };
    let (a, b) = (sol.shifts[k1].stops[i], sol.shifts[k1].stops[i + 1]);
    let (c, d) = (sol.shifts[k2].stops[j], sol.shifts[k2].stops[j + 1]);
    if a == c || b == c || a == d || b == d {
        return false;
    }
    let short = |x: usize, y: usize| {
        classify_arc(inst, Instance::node(x), Instance::node(y), params) == ArcClass::Short
    };
    let (pos_b, pos_c, pos_d) = ((k1, i + 1), (k2, j), (k2, j + 1));
    let (other, key) = if short(a, d) && short(c, b) {
        (pos_d, key_of(inst, b, d))
    } else if short(a, c) && short(b, d) {
        (pos_c, key_of(inst, b, c))
    } else {
        return false;
    };
    if tabu.contains(key) {
        return false;
    }
    sol.swap_stops(ev, pos_b, other);
    tabu.push(key);
    true
}

/// Applies tabu operator T1 (random swap) or T2 (long-arc swap) to `sol`.
pub fn apply_tabu_move(
    op: OperatorId,
    ev: Evaluator<'_>,
    sol: &mut Solution,
    params: &TabuParams,
    tabu: &mut TabuList,
    rng: &mut RngStream,
) -> bool {
    debug_assert_eq!(op.kind(), OperatorKind::Tabu);
    match op.index() {
        1 => random_swap(ev, sol, tabu, rng),
        _ => long_arc_swap(ev, sol, params, tabu, rng),
    }
}

/// One tabu phase: every move result becomes the current solution; the
/// global best only moves on strict improvement. The operator bank is fresh
/// each phase while the tabu list lives in `search` across phases.
pub fn run_tabu_phase(search: &mut Search<'_>, budget: PhaseBudget, round: u32) {
    let mut rng = search.open_phase(PhaseKind::Tabu, round, budget);
    let mut bank = OperatorBank::new(OperatorId::all(OperatorKind::Tabu), search.config.selection);
    let params = search.config.tabu;
    let ev = search.ev;
    while !search.phase_exhausted(budget) {
        let op = bank
            .roulette_pick(&mut rng)
            .expect("tabu bank has two operators");
        let mut candidate = search.current.clone();
        apply_tabu_move(op, ev, &mut candidate, &params, &mut search.tabu, &mut rng);
        let total = candidate.total();
        let outcome = if total < search.best.total() {
            Outcome::NewGlobalBest
        } else if total < search.current.total() {
            Outcome::Better
        } else {
            Outcome::Accepted
        };
        bank.update_weight(op, outcome)
            .expect("operator is in the bank");
        search.conclude(candidate, outcome, vec![op]);
    }
    search.close_phase();
}
