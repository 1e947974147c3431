//! Acceptance suite. Each check prints one `[n] ... PASS|FAIL` line and then
//! asserts, so a failing check is visible in the log and in the exit code.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use vrpsd_cli::experiment::{run_experiment, AttemptStatus, ExperimentSpec, Limit};
use vrpsd_cli::{audit_solution, SolutionFile};
use vrpsd_core::config::OperatorParams;
use vrpsd_core::ingest::{load_cost_matrix, InstancePaths, LoadedInstance};
use vrpsd_core::model::{Instance, StopId};
use vrpsd_core::objective::total_service_time;
use vrpsd_core::operators::{
    apply_destroy, apply_repair, OperatorContext, DESTROY_COUNT, REPAIR_COUNT,
};
use vrpsd_core::orchestrate::{run, Algorithm, RunBudget, RunOutput};
use vrpsd_core::selection::decayed_weight;
use vrpsd_core::synthetic::{generate, random_toy, SyntheticSpec};
use vrpsd_core::tabu::{long_arc_swap, random_swap, TabuKey, TabuList};
use vrpsd_core::toy::{instance_at, line_instance, toy_request};
use vrpsd_core::{
    Evaluator, ObjectiveWeights, OperatorBank, RngStream, Solution, SolverConfig, ThresholdSchedule,
};

/// Writes to the raw stderr handle, which the test harness does not
/// capture, so the verdict shows up in a plain `cargo test` log.
fn report(n: u8, name: &str, ok: bool, detail: impl AsRef<str>) {
    let line = format!(
        "\n[{n}] {name}: {} ({})\n",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "[{n}] {name} failed: {}", detail.as_ref());
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

// [1]

#[test]
fn weight_update_rule() {
    let a = decayed_weight(1.0, 0.9, 6.0);
    let b = decayed_weight(1.0, 0.9, 0.0);
    let mut w = 1.0;
    for _ in 0..400 {
        w = decayed_weight(w, 0.9, 6.0);
    }
    let eps = f64::EPSILON * 8.0;
    let ok = (a - 1.5).abs() <= eps && (b - 0.9).abs() <= eps && (w - 6.0).abs() < 1e-9;
    report(
        1,
        "weight update",
        ok,
        format!("w(1,0.9,6)={a}, w(1,0.9,0)={b}, 400 updates -> {w}"),
    );
}

// [2]

#[test]
fn matrix_fragment_ingestion() {
    let m = load_cost_matrix(&data_dir().join("matrix_fragment.csv"), StopId(50006)).unwrap();
    let c1 = m.cost(StopId(50006), StopId(43440));
    let c2 = m.cost(StopId(67933), StopId(43440));
    let b2b = m.is_back_to_back(StopId(43440), StopId(43448));
    let ok = c1 == Some(1439) && c2 == Some(480) && b2b == Some(true);
    report(
        2,
        "matrix ingestion",
        ok,
        format!("cost 50006->43440 {c1:?}, 67933->43440 {c2:?}, b2b {b2b:?}"),
    );
}

// [3]

#[test]
fn every_destroy_repair_pair_keeps_solutions_complete() {
    let w = ObjectiveWeights::default();
    let mut checked = 0;
    let mut broken = Vec::new();
    for seed in 0..20 {
        let syn = generate(&SyntheticSpec::new(12, vec![21_600, 28_800, 50_400]), seed);
        let inst = &syn.instance;
        let ev = Evaluator::new(inst, &w);
        let ctx = OperatorContext::new(ev, OperatorParams::default());
        let mut rng = RngStream::new(seed);
        let start = if seed % 2 == 0 {
            vrpsd_core::build_initial(ev, &mut rng)
        } else {
            Solution::from_routes(ev, syn.planted.clone())
        };
        for d in 1..=DESTROY_COUNT {
            for r in 1..=REPAIR_COUNT {
                let out = apply_repair(r, apply_destroy(d, &start, &ctx, &mut rng), &ctx, &mut rng);
                checked += 1;
                if !out.is_complete(inst.request_count()) {
                    broken.push(format!("seed {seed} D{d}/R{r}"));
                }
            }
        }
    }
    report(
        3,
        "operator round trip",
        broken.is_empty() && checked == 289 * 20,
        format!(
            "{checked} pairs checked, {} incomplete {:?}",
            broken.len(),
            broken.iter().take(5).collect::<Vec<_>>()
        ),
    );
}

// [4]

#[test]
fn searches_reach_exhaustive_optimum_on_toys() {
    let cfg = SolverConfig::default();
    let toys: Vec<Instance> = (0..25u64)
        .map(|i| random_toy(5 + (i % 4) as usize, 2, 1000 + i))
        .collect();
    let optima: Vec<f64> = toys
        .iter()
        .map(|t| support::exhaustive_optimum(Evaluator::new(t, &cfg.weights)).total)
        .collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for alg in [Algorithm::Alns, Algorithm::Multiphase, Algorithm::Hybrid] {
        let hits = toys
            .iter()
            .zip(&optima)
            .enumerate()
            .filter(|(i, (t, opt))| {
                let ev = Evaluator::new(t, &cfg.weights);
                let out = run(alg, ev, &cfg, &RunBudget::iterations(50_000, *i as u64));
                out.best.total() <= **opt + 1e-6
            })
            .count();
        ok &= hits * 10 >= toys.len() * 9;
        lines.push(format!("{alg} {hits}/{}", toys.len()));
    }
    report(4, "toy optimality", ok, lines.join(", "));
}

// [5] and [6] share the full-size runs.

/// Iterations per desk-scale run on the full-size instance.
const FULL_ITERATIONS: u64 = 600_000;
const FULL_SEEDS: [u64; 3] = [0, 1, 2];
const FULL_ALGORITHMS: [Algorithm; 3] = [Algorithm::Alns, Algorithm::Multiphase, Algorithm::Hybrid];

struct FullRun {
    algorithm: Algorithm,
    seed: u64,
    audit_clear: bool,
    consistent: bool,
    service_time: i64,
    initial_service_time: i64,
    monotone: bool,
}

fn full_instance() -> LoadedInstance {
    InstancePaths::in_dir(&data_dir().join("synthetic-251"))
        .load()
        .unwrap()
}

fn full_runs() -> &'static [FullRun] {
    static RUNS: OnceLock<Vec<FullRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let loaded = full_instance();
        let inst = &loaded.instance;
        let cfg = &loaded.solver;
        let mut runs = Vec::new();
        for alg in FULL_ALGORITHMS {
            for seed in FULL_SEEDS {
                let ev = Evaluator::new(inst, &cfg.weights);
                let out: RunOutput =
                    run(alg, ev, cfg, &RunBudget::iterations(FULL_ITERATIONS, seed));
                let file = SolutionFile::from_run(&out, inst);
                let audit = audit_solution(&file, inst);
                let monotone = out.trace.records.windows(2).all(|w| w[1].best <= w[0].best);
                runs.push(FullRun {
                    algorithm: alg,
                    seed,
                    audit_clear: audit.is_feasible(),
                    consistent: audit.is_consistent(),
                    service_time: audit.total_service_time,
                    initial_service_time: out.initial_service_time,
                    monotone,
                });
            }
        }
        runs
    })
}

#[test]
fn full_size_runs_are_feasible() {
    let runs = full_runs();
    let mut ok = true;
    let mut lines = Vec::new();
    for r in runs {
        let good =
            r.audit_clear && r.consistent && r.monotone && r.service_time < r.initial_service_time;
        ok &= good;
        lines.push(format!(
            "{} seed {}: {} {} (initial {})",
            r.algorithm,
            r.seed,
            if r.audit_clear {
                "feasible"
            } else {
                "INFEASIBLE"
            },
            r.service_time,
            r.initial_service_time
        ));
    }
    report(5, "full-size feasibility", ok, lines.join("; "));
}

#[test]
fn hybrid_is_not_worse_than_single_phase() {
    let runs = full_runs();
    let mean = |alg: Algorithm| {
        let v: Vec<i64> = runs
            .iter()
            .filter(|r| r.algorithm == alg)
            .map(|r| r.service_time)
            .collect();
        v.iter().sum::<i64>() as f64 / v.len() as f64
    };
    let (single, multi, hybrid) = (
        mean(Algorithm::Alns),
        mean(Algorithm::Multiphase),
        mean(Algorithm::Hybrid),
    );
    let ok = hybrid <= single * 1.01;
    report(
        6,
        "ordering",
        ok,
        format!(
            "mean total service time: alns {single:.1}, multiphase {multi:.1}, hybrid {hybrid:.1}"
        ),
    );
}

// [7]

#[test]
fn threshold_schedule_is_linear() {
    let reference = 1_234_567.0;
    let s = ThresholdSchedule::new(reference, 0.02, 9000).unwrap();
    let eps = reference * 1e-12;
    let linear = (0..=9000u64).all(|it| {
        let expected = reference - (reference - 0.02 * reference) * it as f64 / 9000.0;
        (s.threshold_at(it) - expected).abs() <= eps
    });
    let ok = s.threshold_at(0) == reference
        && (s.threshold_at(9000) - 0.02 * reference).abs() <= eps
        && linear;
    report(
        7,
        "threshold schedule",
        ok,
        format!(
            "t(0)={}, t(9000)={}, linear={linear}",
            s.threshold_at(0),
            s.threshold_at(9000)
        ),
    );
}

// [8]

fn crossed(d: (f64, f64), c: (f64, f64)) -> Instance {
    let reqs = (1..=4).map(|i| toy_request(i, 0, 90_000, 60)).collect();
    instance_at(reqs, &[(1.0, 0.0), (8.0, 0.0), c, d], &[0, 0])
}

fn key(a: u64, b: u64) -> TabuKey {
    TabuKey::new(StopId(a), StopId(b))
}

/// Runs the long-arc swap under 40 seeds from routes A→B and C→D; returns
/// the distinct outcomes (routes, whether it moved, newest tabu key).
fn long_arc_outcomes(
    inst: &Instance,
    routes: Vec<Vec<usize>>,
    preset: &[TabuKey],
) -> Vec<(Vec<Vec<usize>>, bool, Option<TabuKey>)> {
    let w = ObjectiveWeights::default();
    let ev = Evaluator::new(inst, &w);
    let params = SolverConfig::default().tabu;
    let mut seen = Vec::new();
    for seed in 0..40 {
        let mut sol = Solution::from_routes(ev, routes.clone());
        let mut tabu = TabuList::new(10);
        for k in preset {
            tabu.push(*k);
        }
        let moved = long_arc_swap(ev, &mut sol, &params, &mut tabu, &mut RngStream::new(seed));
        let newest = if moved {
            tabu.iter().last().copied()
        } else {
            None
        };
        let outcome = (sol.routes(), moved, newest);
        if !seen.contains(&outcome) {
            seen.push(outcome);
        }
    }
    seen
}

#[test]
fn tabu_mechanics() {
    let mut checks = Vec::new();

    // FIFO eviction over 11 real swaps on a 12-stop route.
    let inst = line_instance(&[(0, 90_000, 60); 12], &[0]);
    let w = ObjectiveWeights::default();
    let ev = Evaluator::new(&inst, &w);
    let mut sol = Solution::from_routes(ev, vec![(0..12).collect()]);
    let mut tabu = TabuList::new(10);
    let mut rng = RngStream::new(3);
    let mut keys = Vec::new();
    while keys.len() < 11 {
        if random_swap(ev, &mut sol, &mut tabu, &mut rng) {
            keys.push(*tabu.iter().last().unwrap());
        }
    }
    let held: Vec<TabuKey> = tabu.iter().copied().collect();
    checks.push((
        "fifo",
        tabu.len() == 10 && !tabu.contains(keys[0]) && held == keys[1..],
    ));

    // No long arc: every arc is 100 s.
    let flat = line_instance(&[(0, 90_000, 60); 4], &[0, 0]);
    let out = long_arc_outcomes(&flat, vec![vec![0, 1], vec![2, 3]], &[]);
    checks.push((
        "no-long-arc",
        out == vec![(vec![vec![0, 1], vec![2, 3]], false, None)],
    ));

    // Shared stop: the only long arc is drawn for both routes.
    let lone = crossed((1.0, 1.0), (8.0, 1.0));
    let out = long_arc_outcomes(&lone, vec![vec![0, 1], vec![]], &[]);
    checks.push((
        "shared-stop",
        out == vec![(vec![vec![0, 1], vec![]], false, None)],
    ));

    // A→D and C→B short: B and D exchange, BD becomes tabu.
    let ad = crossed((1.0, 1.0), (8.0, 1.0));
    let out = long_arc_outcomes(&ad, vec![vec![0, 1], vec![2, 3]], &[]);
    let expect = (vec![vec![0, 3], vec![2, 1]], true, Some(key(2, 4)));
    checks.push((
        "AD/CB-short",
        out.contains(&expect) && out.iter().all(|o| o == &expect || !o.1),
    ));

    // A→C and B→D short, A→D long: B and C exchange. With the routes' roles
    // reversed the same rule swaps D with A.
    let ac = crossed((8.0, 1.0), (1.0, 1.0));
    let out = long_arc_outcomes(&ac, vec![vec![0, 1], vec![2, 3]], &[]);
    let bc = (vec![vec![0, 2], vec![1, 3]], true, Some(key(2, 3)));
    let da = (vec![vec![3, 1], vec![2, 0]], true, Some(key(4, 1)));
    checks.push((
        "AC/BD-short",
        out.contains(&bc) && out.iter().all(|o| o == &bc || o == &da || !o.1),
    ));

    // Tabu-blocked: the BD pair is already on the list.
    let out = long_arc_outcomes(&ad, vec![vec![0, 1], vec![2, 3]], &[key(2, 4)]);
    checks.push((
        "tabu-blocked",
        out == vec![(vec![vec![0, 1], vec![2, 3]], false, None)],
    ));

    let ok = checks.iter().all(|c| c.1);
    let detail = checks
        .iter()
        .map(|(name, pass)| format!("{name} {}", if *pass { "ok" } else { "BAD" }))
        .collect::<Vec<_>>()
        .join(", ");
    report(8, "tabu mechanics", ok, detail);
}

// [9]

#[test]
fn runs_are_byte_for_byte_reproducible() {
    let syn = generate(
        &SyntheticSpec::new(40, vec![21_600, 28_800, 50_400, 64_800]),
        9,
    );
    let cfg = SolverConfig::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for alg in Algorithm::ALL {
        let outputs: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let mut spec = ExperimentSpec::new(alg, Limit::Iterations(20_000));
                spec.seed = 17;
                spec.output_dir = Some(dir.path().to_path_buf());
                let summary = run_experiment(&spec, &syn.instance, &cfg).unwrap();
                assert!(matches!(
                    summary.attempts[0].status,
                    AttemptStatus::Finished { .. }
                ));
                let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
                // The summary names its files by path; drop the temp prefix.
                let summary = String::from_utf8(read("summary.json"))
                    .unwrap()
                    .replace(&*dir.path().to_string_lossy(), "<out>");
                (
                    read("attempt-0.jsonl"),
                    read("attempt-0.toml"),
                    summary.into_bytes(),
                )
            })
            .collect();
        let same = outputs[0] == outputs[1];
        ok &= same && !outputs[0].0.is_empty();
        lines.push(format!(
            "{alg} {}",
            if same { "identical" } else { "DIFFERENT" }
        ));
    }
    report(9, "determinism", ok, lines.join(", "));
}

// [10]

#[test]
fn roulette_frequencies_follow_weights() {
    let bank = OperatorBank::with_weights(
        vec![(0u8, 3.0), (1u8, 1.0)],
        SolverConfig::default().selection,
    );
    let mut rng = RngStream::new(2024);
    let draws = 100_000;
    let first = (0..draws)
        .filter(|_| bank.roulette_pick(&mut rng).unwrap() == 0)
        .count();
    let p = first as f64 / draws as f64;
    let ok = (p - 0.75).abs() <= 0.02 && ((1.0 - p) - 0.25).abs() <= 0.02;
    report(
        10,
        "roulette frequencies",
        ok,
        format!("{p:.4} / {:.4}", 1.0 - p),
    );
}

#[test]
fn planted_plan_of_the_shipped_instance_is_feasible() {
    // Guards the data the full-size checks run on.
    let loaded = full_instance();
    let inst = &loaded.instance;
    assert_eq!(inst.request_count(), 251);
    assert_eq!(inst.shift_count(), 7);
    let ev = Evaluator::new(inst, &loaded.solver.weights);
    let initial = vrpsd_core::build_initial(ev, &mut RngStream::new(0));
    assert!(initial.is_complete(251));
    assert!(total_service_time(&initial) > 0);
}
