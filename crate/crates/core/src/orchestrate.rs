//! Search drivers: single-phase ALNS with threshold accepting, the
//! multiphase variant that restarts parameters between phases, and the
//! hybrid that closes every round with a tabu phase.
//!
//! A run is budgeted either by wall-clock time or by a total iteration
//! count. Iteration budgets make runs bit-for-bit reproducible; wall-clock
//! budgets are what long experiments use.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::acceptance::{ThresholdAcceptance, ThresholdSchedule};
use crate::config::SolverConfig;
use crate::construct::build_initial;
use crate::model::{strip_redundant_shifts, Seconds, Solution};
use crate::objective::{total_service_time, Evaluator};
use crate::operators::{apply_destroy, apply_repair, OperatorContext, OperatorId, OperatorKind};
use crate::rng::{RngStream, CONSTRUCTION_STREAM};
use crate::selection::{OperatorBank, Outcome};
use crate::tabu::{run_tabu_phase, TabuList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Steady-state GA baseline.
    Genetic,
    /// One ALNS phase with threshold accepting.
    Alns,
    /// ALNS phases with parameters restarted between them.
    Multiphase,
    /// Rounds of two ALNS phases followed by a tabu phase.
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Genetic,
        Algorithm::Alns,
        Algorithm::Multiphase,
        Algorithm::Hybrid,
    ];

    /// Number used in result tables (0 for the baseline).
    pub fn number(self) -> u8 {
        match self {
            Algorithm::Genetic => 0,
            Algorithm::Alns => 1,
            Algorithm::Multiphase => 2,
            Algorithm::Hybrid => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.number() == n)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Genetic => "genetic",
            Algorithm::Alns => "alns",
            Algorithm::Multiphase => "multiphase",
            Algorithm::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(n) = s.parse::<u8>() {
            return Self::from_number(n).ok_or_else(|| format!("no algorithm numbered {n}"));
        }
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                format!("unknown algorithm {s:?}; expected 0-3 or genetic/alns/multiphase/hybrid")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Total candidate evaluations.
    Iterations(u64),
    WallClock(Duration),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunBudget {
    pub budget: Budget,
    pub seed: u64,
}

impl RunBudget {
    pub fn iterations(n: u64, seed: u64) -> Self {
        Self {
            budget: Budget::Iterations(n),
            seed,
        }
    }

    pub fn wall_clock(d: Duration, seed: u64) -> Self {
        Self {
            budget: Budget::WallClock(d),
            seed,
        }
    }
}

/// Stopping rule of one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseBudget {
    Iterations(u64),
    Until(Instant),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseKind {
    Alns,
    Tabu,
    Genetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub kind: PhaseKind,
    pub round: u32,
    /// Global iteration number of the phase's first candidate minus one.
    pub start_iteration: u64,
    pub iterations: u64,
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    pub phase: PhaseKind,
    pub round: u32,
    pub candidate: f64,
    pub best: f64,
    pub candidate_feasible: bool,
    pub best_feasible: bool,
    pub operators: Vec<OperatorId>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line).map_err(io::Error::other)?);
        }
        Ok(Self { records })
    }
}

/// Appends a record numbered one past the last.
#[allow(clippy::too_many_arguments)]
pub fn record_iteration(
    trace: &mut ConvergenceTrace,
    elapsed: Option<Duration>,
    phase: PhaseKind,
    round: u32,
    candidate: &Solution,
    best: &Solution,
    operators: Vec<OperatorId>,
    outcome: Outcome,
) {
    let iteration = trace.records.last().map_or(1, |r| r.iteration + 1);
    trace.records.push(TraceRecord {
        iteration,
        elapsed_ms: elapsed.map(|d| d.as_millis() as u64),
        phase,
        round,
        candidate: candidate.total(),
        best: best.total(),
        candidate_feasible: candidate.is_feasible(),
        best_feasible: best.is_feasible(),
        operators,
        outcome,
    });
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Best solution found, with unused shifts dropped.
    pub best: Solution,
    pub initial_objective: f64,
    pub initial_service_time: Seconds,
    pub trace: ConvergenceTrace,
    pub phases: Vec<PhaseRecord>,
    pub iterations: u64,
    pub elapsed: Duration,
    /// Improving candidates kept out of a feasible best because they were
    /// infeasible. Stays zero whenever the penalties dominate.
    pub latch_blocks: u64,
}

/// Mutable state of one run, shared by all phase drivers.
pub struct Search<'a> {
    pub ev: Evaluator<'a>,
    pub config: &'a SolverConfig,
    pub current: Solution,
    pub best: Solution,
    pub tabu: TabuList,
    trace: ConvergenceTrace,
    phases: Vec<PhaseRecord>,
    seed: u64,
    iteration: u64,
    started: Instant,
    timed: bool,
    phase_counter: u64,
    initial_objective: f64,
    initial_service_time: Seconds,
    latch_blocks: u64,
    active: Option<(PhaseKind, u32)>,
}

impl<'a> Search<'a> {
    /// Builds the initial solution and starts the clock.
    pub fn new(ev: Evaluator<'a>, config: &'a SolverConfig, budget: &RunBudget) -> Self {
        let started = Instant::now();
        let initial = build_initial(ev, &mut RngStream::derive(budget.seed, CONSTRUCTION_STREAM));
        Self {
            ev,
            config,
            initial_objective: initial.total(),
            initial_service_time: total_service_time(&initial),
            best: initial.clone(),
            current: initial,
            tabu: TabuList::new(config.tabu.capacity),
            trace: ConvergenceTrace::default(),
            phases: Vec::new(),
            seed: budget.seed,
            iteration: 0,
            started,
            timed: matches!(budget.budget, Budget::WallClock(_)),
            phase_counter: 0,
            latch_blocks: 0,
            active: None,
        }
    }

    pub fn started(&self) -> Instant {
        self.started
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Starts a phase and returns its own random stream, derived from the
    /// master seed and the phase's ordinal.
    pub fn open_phase(&mut self, kind: PhaseKind, round: u32, _budget: PhaseBudget) -> RngStream {
        let rng = RngStream::derive(self.seed, self.phase_counter);
        self.phase_counter += 1;
        self.phases.push(PhaseRecord {
            kind,
            round,
            start_iteration: self.iteration,
            iterations: 0,
        });
        self.active = Some((kind, round));
        rng
    }

    pub fn close_phase(&mut self) {
        if let Some(p) = self.phases.last_mut() {
            p.iterations = self.iteration - p.start_iteration;
        }
        self.active = None;
    }

    pub fn phase_exhausted(&self, budget: PhaseBudget) -> bool {
        match budget {
            PhaseBudget::Iterations(n) => {
                let start = self.phases.last().map_or(0, |p| p.start_iteration);
                self.iteration - start >= n
            }
            PhaseBudget::Until(t) => Instant::now() >= t,
        }
    }

    /// Records an evaluated candidate. Accepted candidates become current;
    /// a new global best replaces the best unless that would swap a
    /// feasible best for an infeasible one.
    pub fn conclude(&mut self, candidate: Solution, outcome: Outcome, operators: Vec<OperatorId>) {
        self.iteration += 1;
        if outcome == Outcome::NewGlobalBest {
            debug_assert!(candidate.total() < self.best.total());
            if self.best.is_feasible() && !candidate.is_feasible() {
                self.latch_blocks += 1;
            } else {
                self.best = candidate.clone();
            }
        }
        let (phase, round) = self.active.expect("candidate evaluated inside a phase");
        let elapsed = self.timed.then(|| self.started.elapsed());
        record_iteration(
            &mut self.trace,
            elapsed,
            phase,
            round,
            &candidate,
            &self.best,
            operators,
            outcome,
        );
        if outcome.is_accepted() {
            self.current = candidate;
        }
    }

    pub fn finish(self, algorithm: Algorithm) -> RunOutput {
        RunOutput {
            algorithm,
            seed: self.seed,
            best: strip_redundant_shifts(&self.best),
            initial_objective: self.initial_objective,
            initial_service_time: self.initial_service_time,
            trace: self.trace,
            phases: self.phases,
            iterations: self.iteration,
            elapsed: self.started.elapsed(),
            latch_blocks: self.latch_blocks,
        }
    }
}

/// One ALNS phase with a fresh operator bank and a threshold schedule that
/// starts at the current global best.
///
/// The phase also restarts from the best solution. Acceptance is measured
/// against the best, so a current solution left far behind by an earlier
/// phase would otherwise have nothing acceptable once the threshold shrinks.
pub fn run_alns_phase(search: &mut Search<'_>, budget: PhaseBudget, round: u32) {
    let mut rng = search.open_phase(PhaseKind::Alns, round, budget);
    search.current = search.best.clone();
    let cfg = search.config;
    let ev = search.ev;
    let ctx = OperatorContext::new(ev, cfg.operators);
    let mut destroy = OperatorBank::new(OperatorId::all(OperatorKind::Destroy), cfg.selection);
    let mut repair = OperatorBank::new(OperatorId::all(OperatorKind::Repair), cfg.selection);
    // An instance without requests has a zero objective; any positive
    // reference then gives the same behaviour.
    let reference = if search.best.total() > 0.0 {
        search.best.total()
    } else {
        1.0
    };
    let schedule = ThresholdSchedule::from_params(reference, &cfg.acceptance)
        .expect("validated acceptance params");
    let mut ta = ThresholdAcceptance::new(schedule, cfg.acceptance.baseline);
    let n = ev.instance.request_count();
    while !search.phase_exhausted(budget) {
        let d = destroy
            .roulette_pick(&mut rng)
            .expect("destroy bank is populated");
        let r = repair
            .roulette_pick(&mut rng)
            .expect("repair bank is populated");
        let destroyed = apply_destroy(d.index(), &search.current, &ctx, &mut rng);
        let candidate = apply_repair(r.index(), destroyed, &ctx, &mut rng);
        debug_assert!(candidate.is_complete(n));
        let (_, outcome) = ta.accept(
            candidate.total(),
            search.current.total(),
            search.best.total(),
        );
        destroy
            .update_weight(d, outcome)
            .expect("picked from this bank");
        repair
            .update_weight(r, outcome)
            .expect("picked from this bank");
        search.conclude(candidate, outcome, vec![d, r]);
    }
    search.close_phase();
}

/// Splits `total` by `fractions`, flooring each share and giving the
/// remainder to the last.
pub fn split_iterations(total: u64, fractions: &[f64]) -> Vec<u64> {
    let mut parts: Vec<u64> = fractions
        .iter()
        .map(|f| (total as f64 * f).floor() as u64)
        .collect();
    let used: u64 = parts.iter().sum();
    if let Some(last) = parts.last_mut() {
        *last += total.saturating_sub(used);
    }
    parts
}

/// Phase budgets for consecutive phases sharing a span that starts at
/// `start`.
fn phase_budgets(span: SpanBudget, fractions: &[f64]) -> Vec<PhaseBudget> {
    match span {
        SpanBudget::Iterations(n) => split_iterations(n, fractions)
            .into_iter()
            .map(PhaseBudget::Iterations)
            .collect(),
        SpanBudget::Time { start, length } => {
            let mut acc = 0.0;
            fractions
                .iter()
                .map(|f| {
                    acc += f;
                    PhaseBudget::Until(start + length.mul_f64(acc.min(1.0)))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum SpanBudget {
    Iterations(u64),
    Time { start: Instant, length: Duration },
}

fn whole_run(search: &Search<'_>, budget: &RunBudget) -> SpanBudget {
    match budget.budget {
        Budget::Iterations(n) => SpanBudget::Iterations(n),
        Budget::WallClock(d) => SpanBudget::Time {
            start: search.started(),
            length: d,
        },
    }
}

pub fn run_algorithm1(ev: Evaluator<'_>, config: &SolverConfig, budget: &RunBudget) -> RunOutput {
    let mut search = Search::new(ev, config, budget);
    let span = whole_run(&search, budget);
    let phase = phase_budgets(span, &[1.0])[0];
    run_alns_phase(&mut search, phase, 0);
    search.finish(Algorithm::Alns)
}

pub fn run_algorithm2(ev: Evaluator<'_>, config: &SolverConfig, budget: &RunBudget) -> RunOutput {
    let mut search = Search::new(ev, config, budget);
    let span = whole_run(&search, budget);
    for phase in phase_budgets(span, &config.schedule.multiphase_split) {
        run_alns_phase(&mut search, phase, 0);
    }
    search.finish(Algorithm::Multiphase)
}

/// Round spans of the hybrid algorithm.
fn rounds(search: &Search<'_>, config: &SolverConfig, budget: &RunBudget) -> Vec<SpanBudget> {
    match budget.budget {
        Budget::Iterations(n) => match config.schedule.round_iterations {
            Some(len) if n > len => {
                let mut out = Vec::new();
                let mut left = n;
                while left > 0 {
                    let take = left.min(len);
                    out.push(SpanBudget::Iterations(take));
                    left -= take;
                }
                out
            }
            _ => vec![SpanBudget::Iterations(n)],
        },
        Budget::WallClock(d) => {
            let count = (d.as_secs_f64() / config.schedule.round_seconds)
                .ceil()
                .max(1.0) as u32;
            let length = d / count;
            (0..count)
                .map(|i| SpanBudget::Time {
                    start: search.started() + length * i,
                    length,
                })
                .collect()
        }
    }
}

pub fn run_algorithm3(ev: Evaluator<'_>, config: &SolverConfig, budget: &RunBudget) -> RunOutput {
    let mut search = Search::new(ev, config, budget);
    for (round, span) in rounds(&search, config, budget).into_iter().enumerate() {
        let phases = phase_budgets(span, &config.schedule.hybrid_split);
        let round = round as u32;
        run_alns_phase(&mut search, phases[0], round);
        run_alns_phase(&mut search, phases[1], round);
        run_tabu_phase(&mut search, phases[2], round);
    }
    search.finish(Algorithm::Hybrid)
}

/// Runs `algorithm` under `budget`.
pub fn run(
    algorithm: Algorithm,
    ev: Evaluator<'_>,
    config: &SolverConfig,
    budget: &RunBudget,
) -> RunOutput {
    match algorithm {
        Algorithm::Genetic => crate::baseline::run_ssga(ev, config, budget),
        Algorithm::Alns => run_algorithm1(ev, config, budget),
        Algorithm::Multiphase => run_algorithm2(ev, config, budget),
        Algorithm::Hybrid => run_algorithm3(ev, config, budget),
    }
}

/// Phase budget covering a whole run; used by single-phase drivers.
pub(crate) fn single_phase(search: &Search<'_>, budget: &RunBudget) -> PhaseBudget {
    phase_budgets(whole_run(search, budget), &[1.0])[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectiveWeights;
    use crate::toy::line_instance;

    #[test]
    fn iteration_split_floors_and_gives_remainder_to_last() {
        assert_eq!(split_iterations(10, &[0.5, 0.5]), vec![5, 5]);
        assert_eq!(split_iterations(11, &[0.5, 0.5]), vec![5, 6]);
        assert_eq!(split_iterations(100, &[0.45, 0.45, 0.10]), vec![45, 45, 10]);
        assert_eq!(split_iterations(7, &[0.45, 0.45, 0.10]), vec![3, 3, 1]);
        assert_eq!(split_iterations(0, &[0.45, 0.45, 0.10]), vec![0, 0, 0]);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>(), Ok(a));
            assert_eq!(a.number().to_string().parse::<Algorithm>(), Ok(a));
        }
        assert!("4".parse::<Algorithm>().is_err());
    }

    fn toy() -> crate::model::Instance {
        let specs: Vec<_> = (0..6).map(|i| (600 * i, 6000 + 900 * i, 300)).collect();
        line_instance(&specs, &[0, 3600])
    }

    #[test]
    fn zero_budget_returns_the_initial_solution() {
        let inst = toy();
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let cfg = SolverConfig::default();
        let out = run_algorithm1(ev, &cfg, &RunBudget::iterations(0, 3));
        assert!(out.trace.is_empty());
        assert_eq!(out.best.total(), out.initial_objective);
    }

    #[test]
    fn trace_counts_every_candidate() {
        let inst = toy();
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let cfg = SolverConfig::default();
        for alg in Algorithm::ALL {
            let out = run(alg, ev, &cfg, &RunBudget::iterations(60, 1));
            assert_eq!(out.iterations, 60, "{alg}");
            assert_eq!(out.trace.len(), 60);
            let its: Vec<u64> = out.trace.records.iter().map(|r| r.iteration).collect();
            assert_eq!(its, (1..=60).collect::<Vec<_>>());
            assert!(out.trace.records.windows(2).all(|w| w[1].best <= w[0].best));
            assert!(out.trace.records.iter().all(|r| r.elapsed_ms.is_none()));
        }
    }

    #[test]
    fn trace_jsonl_round_trip() {
        let inst = toy();
        let w = ObjectiveWeights::default();
        let ev = Evaluator::new(&inst, &w);
        let cfg = SolverConfig::default();
        let out = run_algorithm3(ev, &cfg, &RunBudget::iterations(40, 5));
        let text = out.trace.to_jsonl();
        assert_eq!(text.lines().count(), 40);
        let back = ConvergenceTrace::read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(back, out.trace);
    }
}
