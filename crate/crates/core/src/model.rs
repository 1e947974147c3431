//! Domain types and the timing/feasibility semantics every other module
//! relies on.
//!
//! Time is measured in integer seconds from midnight. Windows may extend past
//! 86 400 s when a service spans into the next day.
//!
//! Internally a request is addressed by its index in the [`RequestSet`]; the
//! [`Instance`] maps those indices onto "nodes" where node 0 is the depot and
//! node `r + 1` is request `r`, and caches dense cost/travel/back-to-back
//! tables over nodes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objective::{Evaluator, ObjectiveBreakdown};

pub type Seconds = i64;

/// Node index of the depot in [`Instance`] tables.
pub const DEPOT: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StopId(pub u64);

impl fmt::Display for StopId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown stop id {0}")]
    UnknownStop(StopId),
    #[error("duplicate request id {0}")]
    DuplicateRequest(StopId),
    #[error("request {id}: {reason}")]
    InvalidRequest { id: StopId, reason: String },
    #[error("depot id {0} is not present in the cost matrix")]
    MissingDepot(StopId),
    #[error("request ids missing from the cost matrix: {}", join_ids(.0))]
    MissingFromMatrix(Vec<StopId>),
    #[error("instance needs at least one shift")]
    NoShifts,
    #[error("depot id {0} is also used as a request id")]
    DepotIsRequest(StopId),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn join_ids(ids: &[StopId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Fixed per-shift rules. Defaults are 15 min check-in, 15 min check-out,
/// one 30 min break, 12 h hard limit and an 8 h preferred minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftRules {
    pub check_in: Seconds,
    pub check_out: Seconds,
    pub break_time: Seconds,
    pub max_duration: Seconds,
    pub preferred_min_duration: Seconds,
}

impl Default for ShiftRules {
    fn default() -> Self {
        Self {
            check_in: 900,
            check_out: 900,
            break_time: 1800,
            max_duration: 43_200,
            preferred_min_duration: 28_800,
        }
    }
}

impl ShiftRules {
    /// Duration of a shift that never leaves the depot.
    pub fn fixed_overhead(&self) -> Seconds {
        self.check_in + self.check_out + self.break_time
    }
}

/// One visit: the atomic unit that gets routed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: StopId,
    pub site_id: String,
    pub service_type: String,
    pub service_duration: Seconds,
    pub window_start: Seconds,
    pub window_end: Seconds,
    /// Requests sharing a group may not be serviced consecutively.
    pub back_to_back_group: usize,
}

impl Request {
    pub fn window_length(&self) -> Seconds {
        self.window_end - self.window_start
    }
}

/// One visit before group assignment, as read from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visit {
    pub id: StopId,
    pub window_start: Seconds,
    pub window_end: Seconds,
}

/// A site's request for one service type, possibly with several visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRequest {
    pub site_id: String,
    pub service_type: String,
    pub service_duration: Seconds,
    pub visits: Vec<Visit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequestSet {
    requests: Vec<Request>,
    index: BTreeMap<StopId, usize>,
}

impl RequestSet {
    /// Validates ids and windows. Groups are taken as given.
    pub fn new(requests: Vec<Request>) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, r) in requests.iter().enumerate() {
            if r.service_duration <= 0 {
                return Err(ModelError::InvalidRequest {
                    id: r.id,
                    reason: format!(
                        "service duration must be positive, got {}",
                        r.service_duration
                    ),
                });
            }
            if r.window_end <= r.window_start {
                return Err(ModelError::InvalidRequest {
                    id: r.id,
                    reason: format!("empty window [{}, {}]", r.window_start, r.window_end),
                });
            }
            if index.insert(r.id, i).is_some() {
                return Err(ModelError::DuplicateRequest(r.id));
            }
        }
        Ok(Self { requests, index })
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn get(&self, idx: usize) -> &Request {
        &self.requests[idx]
    }

    pub fn position(&self, id: StopId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn by_id(&self, id: StopId) -> Option<&Request> {
        self.position(id).map(|i| &self.requests[i])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Request> {
        self.requests.iter()
    }

    pub fn as_slice(&self) -> &[Request] {
        &self.requests
    }
}

impl std::ops::Index<usize> for RequestSet {
    type Output = Request;
    fn index(&self, idx: usize) -> &Request {
        &self.requests[idx]
    }
}

/// One request per visit; visits of the same (site, service type) share a
/// back-to-back group. Groups are numbered in order of first appearance.
pub fn expand_multi_visits(raw: &[RawRequest]) -> Result<RequestSet, ModelError> {
    let mut groups: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    let mut out = Vec::new();
    for rr in raw {
        let next = groups.len();
        let group = *groups
            .entry((rr.site_id.as_str(), rr.service_type.as_str()))
            .or_insert(next);
        for v in &rr.visits {
            out.push(Request {
                id: v.id,
                site_id: rr.site_id.clone(),
                service_type: rr.service_type.clone(),
                service_duration: rr.service_duration,
                window_start: v.window_start,
                window_end: v.window_end,
                back_to_back_group: group,
            });
        }
    }
    RequestSet::new(out)
}

/// Dense travel+service matrix keyed by stop id.
///
/// `cost[i][j]` is the travel time from `i` to `j` plus the service duration
/// at `j`. Back-to-back pairs are kept in a separate symmetric relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    stop_ids: Vec<StopId>,
    index: BTreeMap<StopId, usize>,
    cost: Vec<Seconds>,
    back_to_back: Vec<bool>,
}

impl CostMatrix {
    /// `cost` is row-major `n × n`. The back-to-back relation is symmetrized
    /// and cleared on the diagonal.
    pub fn new(
        stop_ids: Vec<StopId>,
        cost: Vec<Seconds>,
        mut back_to_back: Vec<bool>,
    ) -> Result<Self, ModelError> {
        let n = stop_ids.len();
        if cost.len() != n * n || back_to_back.len() != n * n {
            return Err(ModelError::InvalidConfig(format!(
                "matrix of {n} stops needs {} entries",
                n * n
            )));
        }
        let mut index = BTreeMap::new();
        for (i, id) in stop_ids.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(ModelError::DuplicateRequest(*id));
            }
        }
        for i in 0..n {
            back_to_back[i * n + i] = false;
            for j in (i + 1)..n {
                let b = back_to_back[i * n + j] || back_to_back[j * n + i];
                back_to_back[i * n + j] = b;
                back_to_back[j * n + i] = b;
            }
        }
        Ok(Self {
            stop_ids,
            index,
            cost,
            back_to_back,
        })
    }

    pub fn len(&self) -> usize {
        self.stop_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stop_ids.is_empty()
    }

    pub fn stop_ids(&self) -> &[StopId] {
        &self.stop_ids
    }

    pub fn position(&self, id: StopId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn cost_at(&self, i: usize, j: usize) -> Seconds {
        self.cost[i * self.len() + j]
    }

    pub fn back_to_back_at(&self, i: usize, j: usize) -> bool {
        self.back_to_back[i * self.len() + j]
    }

    pub fn cost(&self, from: StopId, to: StopId) -> Option<Seconds> {
        Some(self.cost_at(self.position(from)?, self.position(to)?))
    }

    pub fn is_back_to_back(&self, a: StopId, b: StopId) -> Option<bool> {
        Some(self.back_to_back_at(self.position(a)?, self.position(b)?))
    }

    /// Clears back-to-back markers on every row/column of `depot`.
    pub fn clear_back_to_back_for(&mut self, depot: StopId) {
        if let Some(d) = self.position(depot) {
            let n = self.len();
            for k in 0..n {
                self.back_to_back[d * n + k] = false;
                self.back_to_back[k * n + d] = false;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub depot_id: StopId,
    pub shift_start_times: Vec<Seconds>,
    pub horizon: Seconds,
    pub rules: ShiftRules,
}

impl InstanceConfig {
    pub fn shift_count(&self) -> usize {
        self.shift_start_times.len()
    }
}

/// A validated problem instance with node-indexed lookup tables.
#[derive(Debug, Clone)]
pub struct Instance {
    matrix: CostMatrix,
    requests: RequestSet,
    config: InstanceConfig,
    nodes: usize,
    cost: Vec<Seconds>,
    travel: Vec<Seconds>,
    back_to_back: Vec<bool>,
    service: Vec<Seconds>,
}

impl Instance {
    /// Cross-validates the three parts. Every missing request id is reported
    /// in a single error.
    ///
    /// Two requests are back-to-back if the matrix marks the pair or if they
    /// share a back-to-back group.
    pub fn new(
        matrix: CostMatrix,
        requests: RequestSet,
        config: InstanceConfig,
    ) -> Result<Self, ModelError> {
        if config.shift_start_times.is_empty() {
            return Err(ModelError::NoShifts);
        }
        let depot_pos = matrix
            .position(config.depot_id)
            .ok_or(ModelError::MissingDepot(config.depot_id))?;
        if requests.position(config.depot_id).is_some() {
            return Err(ModelError::DepotIsRequest(config.depot_id));
        }
        let missing: Vec<StopId> = requests
            .iter()
            .filter(|r| matrix.position(r.id).is_none())
            .map(|r| r.id)
            .collect();
        if !missing.is_empty() {
            return Err(ModelError::MissingFromMatrix(missing));
        }

        let mut positions = Vec::with_capacity(requests.len() + 1);
        positions.push(depot_pos);
        positions.extend(requests.iter().map(|r| matrix.position(r.id).unwrap()));
        let nodes = positions.len();

        let mut service = vec![0; nodes];
        for (r, req) in requests.iter().enumerate() {
            service[r + 1] = req.service_duration;
        }

        let mut cost = vec![0; nodes * nodes];
        let mut travel = vec![0; nodes * nodes];
        let mut back_to_back = vec![false; nodes * nodes];
        for a in 0..nodes {
            for b in 0..nodes {
                let c = if a == b {
                    0
                } else {
                    matrix.cost_at(positions[a], positions[b])
                };
                cost[a * nodes + b] = c;
                // A marker entry carries no usable travel time; same-group
                // visits are at the same site, so zero travel is used.
                travel[a * nodes + b] = (c - service[b]).max(0);
                if a != DEPOT && b != DEPOT && a != b {
                    let ra = requests.get(a - 1);
                    let rb = requests.get(b - 1);
                    back_to_back[a * nodes + b] = matrix
                        .back_to_back_at(positions[a], positions[b])
                        || ra.back_to_back_group == rb.back_to_back_group;
                }
            }
        }

        Ok(Self {
            matrix,
            requests,
            config,
            nodes,
            cost,
            travel,
            back_to_back,
            service,
        })
    }

    pub fn matrix(&self) -> &CostMatrix {
        &self.matrix
    }

    pub fn requests(&self) -> &RequestSet {
        &self.requests
    }

    pub fn config(&self) -> &InstanceConfig {
        &self.config
    }

    pub fn rules(&self) -> &ShiftRules {
        &self.config.rules
    }

    pub fn request_count(&self) -> usize {
        self.requests.len()
    }

    pub fn shift_count(&self) -> usize {
        self.config.shift_count()
    }

    pub fn request(&self, r: usize) -> &Request {
        self.requests.get(r)
    }

    /// Node of request `r`.
    #[inline]
    pub fn node(r: usize) -> usize {
        r + 1
    }

    /// Matrix cost between nodes (travel plus service at `to`).
    #[inline]
    pub fn cost(&self, from: usize, to: usize) -> Seconds {
        self.cost[from * self.nodes + to]
    }

    /// Travel-only time between nodes.
    #[inline]
    pub fn travel(&self, from: usize, to: usize) -> Seconds {
        self.travel[from * self.nodes + to]
    }

    #[inline]
    pub fn is_back_to_back(&self, a: usize, b: usize) -> bool {
        self.back_to_back[a * self.nodes + b]
    }

    #[inline]
    pub fn service(&self, node: usize) -> Seconds {
        self.service[node]
    }

    /// Forward sweep over `stops` (request indices) starting at `start_time`.
    pub fn summarize<I>(&self, start_time: Seconds, stops: I) -> ShiftSummary
    where
        I: IntoIterator<Item = usize>,
    {
        let mut sweep = Sweep::start(self, start_time);
        for r in stops {
            sweep.visit(self, r);
        }
        sweep.finish(self)
    }

    /// Full per-stop timing of a stop sequence given by id.
    pub fn evaluate_shift_timing(
        &self,
        shift_id: usize,
        start_time: Seconds,
        stop_ids: &[StopId],
    ) -> Result<ShiftSchedule, ModelError> {
        let stops = stop_ids
            .iter()
            .map(|id| {
                self.requests
                    .position(*id)
                    .ok_or(ModelError::UnknownStop(*id))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.schedule(shift_id, start_time, &stops))
    }

    /// Full per-stop timing of a stop sequence given by request index.
    pub fn schedule(&self, shift_id: usize, start_time: Seconds, stops: &[usize]) -> ShiftSchedule {
        let mut sweep = Sweep::start(self, start_time);
        let mut timings = Vec::with_capacity(stops.len());
        for &r in stops {
            let t = sweep.visit(self, r);
            timings.push(t);
        }
        ShiftSchedule {
            shift_id,
            start_time,
            stops: timings,
            summary: sweep.finish(self),
        }
    }
}

/// Incremental forward sweep; the single place timing rules live.
#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    start_time: Seconds,
    clock: Seconds,
    last: usize,
    summary: ShiftSummary,
}

impl Sweep {
    pub fn start(inst: &Instance, start_time: Seconds) -> Self {
        Self {
            start_time,
            clock: start_time + inst.rules().check_in,
            last: DEPOT,
            summary: ShiftSummary::default(),
        }
    }

    /// Time at which the vehicle is free to leave its last stop.
    pub fn clock(&self) -> Seconds {
        self.clock
    }

    pub fn last_node(&self) -> usize {
        self.last
    }

    pub fn visit(&mut self, inst: &Instance, r: usize) -> StopTiming {
        let node = Instance::node(r);
        let req = inst.request(r);
        let leg = inst.travel(self.last, node);
        let arrival = self.clock + leg;
        let service_start = arrival.max(req.window_start);
        let completion = service_start + req.service_duration;
        let s = &mut self.summary;
        s.stops += 1;
        s.travel += leg;
        s.service += req.service_duration;
        s.downtime += service_start - arrival;
        if completion > req.window_end {
            s.deadline_misses += 1;
        }
        if self.last != DEPOT && inst.is_back_to_back(self.last, node) {
            s.back_to_back_pairs += 1;
        }
        self.clock = completion;
        self.last = node;
        StopTiming {
            request: r,
            arrival,
            service_start,
            completion,
        }
    }

    pub fn finish(mut self, inst: &Instance) -> ShiftSummary {
        let rules = inst.rules();
        let back = inst.travel(self.last, DEPOT);
        self.summary.travel += back;
        self.summary.completion_time = self.clock + back + rules.check_out + rules.break_time;
        self.summary.duration = self.summary.completion_time - self.start_time;
        self.summary.overlong = self.summary.duration > rules.max_duration;
        self.summary
    }
}

/// Aggregate timing of one shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ShiftSummary {
    pub stops: usize,
    /// Travel including both depot legs.
    pub travel: Seconds,
    pub service: Seconds,
    pub downtime: Seconds,
    /// Return to depot plus check-out and break.
    pub completion_time: Seconds,
    pub duration: Seconds,
    pub deadline_misses: u32,
    pub back_to_back_pairs: u32,
    pub overlong: bool,
}

impl ShiftSummary {
    pub fn is_empty(&self) -> bool {
        self.stops == 0
    }

    /// Travel plus service, without downtime or fixed overheads.
    pub fn actual_time(&self) -> Seconds {
        self.travel + self.service
    }

    pub fn violation_count(&self) -> u32 {
        self.deadline_misses + self.back_to_back_pairs + u32::from(self.overlong)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopTiming {
    pub request: usize,
    pub arrival: Seconds,
    pub service_start: Seconds,
    pub completion: Seconds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSchedule {
    pub shift_id: usize,
    pub start_time: Seconds,
    pub stops: Vec<StopTiming>,
    pub summary: ShiftSummary,
}

impl ShiftSchedule {
    pub fn is_redundant(&self) -> bool {
        self.stops.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Violations {
    pub deadline_misses: u32,
    pub back_to_back_pairs: u32,
    pub overlong_shifts: u32,
}

impl Violations {
    pub fn total(&self) -> u32 {
        self.deadline_misses + self.back_to_back_pairs + self.overlong_shifts
    }

    pub fn is_clear(&self) -> bool {
        self.total() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    pub id: usize,
    pub start_time: Seconds,
    pub stops: Vec<usize>,
    pub summary: ShiftSummary,
}

/// A (possibly partial) assignment of requests to the fixed shifts, with
/// cached per-shift summaries and objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub shifts: Vec<Shift>,
    pub objective: ObjectiveBreakdown,
}

impl Solution {
    pub fn empty(ev: Evaluator<'_>) -> Self {
        let routes = vec![Vec::new(); ev.instance.shift_count()];
        Self::from_routes(ev, routes)
    }

    /// `routes[k]` holds the request indices of shift `k`, in visiting order.
    pub fn from_routes(ev: Evaluator<'_>, routes: Vec<Vec<usize>>) -> Self {
        let inst = ev.instance;
        assert_eq!(routes.len(), inst.shift_count(), "one route per shift");
        let shifts: Vec<Shift> = routes
            .into_iter()
            .enumerate()
            .map(|(k, stops)| {
                let start_time = inst.config().shift_start_times[k];
                let summary = inst.summarize(start_time, stops.iter().copied());
                Shift {
                    id: k,
                    start_time,
                    stops,
                    summary,
                }
            })
            .collect();
        let objective = ev.aggregate(shifts.iter().map(|s| &s.summary));
        Self { shifts, objective }
    }

    pub fn total(&self) -> f64 {
        self.objective.total
    }

    pub fn routes(&self) -> Vec<Vec<usize>> {
        self.shifts.iter().map(|s| s.stops.clone()).collect()
    }

    pub fn summaries(&self) -> Vec<ShiftSummary> {
        self.shifts.iter().map(|s| s.summary).collect()
    }

    pub fn assigned_count(&self) -> usize {
        self.shifts.iter().map(|s| s.stops.len()).sum()
    }

    pub fn violations(&self) -> Violations {
        let mut v = Violations::default();
        for s in &self.shifts {
            v.deadline_misses += s.summary.deadline_misses;
            v.back_to_back_pairs += s.summary.back_to_back_pairs;
            v.overlong_shifts += u32::from(s.summary.overlong);
        }
        v
    }

    pub fn violation_count(&self) -> u32 {
        self.violations().total()
    }

    pub fn is_feasible(&self) -> bool {
        self.violations().is_clear()
    }

    /// (shift, position) of request `r`.
    pub fn locate(&self, r: usize) -> Option<(usize, usize)> {
        self.shifts
            .iter()
            .enumerate()
            .find_map(|(k, s)| s.stops.iter().position(|&x| x == r).map(|p| (k, p)))
    }

    /// Every request appears exactly once.
    pub fn is_complete(&self, request_count: usize) -> bool {
        let mut seen = vec![false; request_count];
        for s in &self.shifts {
            for &r in &s.stops {
                if r >= request_count || seen[r] {
                    return false;
                }
                seen[r] = true;
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn insert(&mut self, ev: Evaluator<'_>, shift: usize, pos: usize, r: usize) {
        self.shifts[shift].stops.insert(pos, r);
        self.retime(ev, shift);
    }

    pub fn remove(&mut self, ev: Evaluator<'_>, shift: usize, pos: usize) -> usize {
        let r = self.shifts[shift].stops.remove(pos);
        self.retime(ev, shift);
        r
    }

    pub fn set_stops(&mut self, ev: Evaluator<'_>, shift: usize, stops: Vec<usize>) {
        self.shifts[shift].stops = stops;
        self.retime(ev, shift);
    }

    /// Swaps two stops given as (shift, position); the shifts may coincide.
    pub fn swap_stops(&mut self, ev: Evaluator<'_>, a: (usize, usize), b: (usize, usize)) {
        if a.0 == b.0 {
            self.shifts[a.0].stops.swap(a.1, b.1);
            self.retime(ev, a.0);
        } else {
            let x = self.shifts[a.0].stops[a.1];
            let y = self.shifts[b.0].stops[b.1];
            self.shifts[a.0].stops[a.1] = y;
            self.shifts[b.0].stops[b.1] = x;
            self.retime(ev, a.0);
            self.retime(ev, b.0);
        }
    }

    fn retime(&mut self, ev: Evaluator<'_>, shift: usize) {
        let s = &mut self.shifts[shift];
        s.summary = ev.instance.summarize(s.start_time, s.stops.iter().copied());
        self.objective = ev.aggregate(self.shifts.iter().map(|s| &s.summary));
    }

    pub fn schedules(&self, inst: &Instance) -> Vec<ShiftSchedule> {
        self.shifts
            .iter()
            .map(|s| inst.schedule(s.id, s.start_time, &s.stops))
            .collect()
    }
}

/// Counts the three kinds of violation on a timed solution.
pub fn count_violations(solution: &Solution) -> Violations {
    solution.violations()
}

/// Drops shifts that never leave the depot. Search keeps every shift; this is
/// applied to reported output only.
pub fn strip_redundant_shifts(solution: &Solution) -> Solution {
    Solution {
        shifts: solution
            .shifts
            .iter()
            .filter(|s| !s.stops.is_empty())
            .cloned()
            .collect(),
        objective: solution.objective,
    }
}
