use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;
use vrpsd_bench::{full_instance, mid_instance};
use vrpsd_core::config::OperatorParams;
use vrpsd_core::operators::{apply_destroy, apply_repair, OperatorContext};
use vrpsd_core::orchestrate::{run, Algorithm, RunBudget};
use vrpsd_core::{build_initial, Evaluator, RngStream, Solution, SolverConfig};

fn evaluation(c: &mut Criterion) {
    let syn = full_instance();
    let cfg = SolverConfig::default();
    let ev = Evaluator::new(&syn.instance, &cfg.weights);
    let routes = syn.planted.clone();
    c.bench_function("evaluate full-size solution", |b| {
        b.iter(|| Solution::from_routes(ev, black_box(routes.clone())).total())
    });
}

fn operator_pairs(c: &mut Criterion) {
    let syn = full_instance();
    let cfg = SolverConfig::default();
    let ev = Evaluator::new(&syn.instance, &cfg.weights);
    let ctx = OperatorContext::new(ev, OperatorParams::default());
    let start = build_initial(ev, &mut RngStream::new(0));
    let mut group = c.benchmark_group("destroy+repair on full size");
    // A cheap pair, a pair that scans every insertion, and the regret repair.
    for (d, r) in [(1u8, 1u8), (1, 4), (8, 16)] {
        let mut rng = RngStream::new(1);
        group.bench_function(format!("D{d}/R{r}"), |b| {
            b.iter_batched(
                || start.clone(),
                |s| apply_repair(r, apply_destroy(d, &s, &ctx, &mut rng), &ctx, &mut rng),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn short_runs(c: &mut Criterion) {
    let syn = mid_instance();
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("2000 iterations on 80 requests");
    group.sample_size(10);
    for alg in Algorithm::ALL {
        group.bench_function(alg.name(), |b| {
            b.iter(|| {
                let ev = Evaluator::new(&syn.instance, &cfg.weights);
                run(alg, ev, &cfg, &RunBudget::iterations(2000, 3))
                    .best
                    .total()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, evaluation, operator_pairs, short_runs);
criterion_main!(benches);
