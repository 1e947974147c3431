use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use vrpsd_cli::experiment::{run_experiment, ExperimentSpec, Limit};
use vrpsd_cli::instance::load_dir;
use vrpsd_cli::{audit_solution, SolutionFile};
use vrpsd_core::ingest::save_instance;
use vrpsd_core::objective::total_service_time;
use vrpsd_core::orchestrate::Algorithm;
use vrpsd_core::synthetic::{generate, SyntheticSpec, FULL_REQUEST_COUNT, FULL_SHIFT_STARTS};
use vrpsd_core::{Evaluator, Solution, SolverConfig};

#[derive(Parser)]
#[command(name = "vrpsd", version, about = "Shift routing for security dispatch")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm for several attempts and summarize.
    Run(RunArgs),
    /// Recheck a solution file against an instance.
    Audit(AuditArgs),
    /// Write a synthetic instance with a planted feasible solution.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Directory holding matrix.csv, requests.toml and config.toml.
    #[arg(long)]
    instance: PathBuf,
    /// 0-3 or genetic, alns, multiphase, hybrid.
    #[arg(long, short)]
    algorithm: Algorithm,
    #[arg(
        long,
        conflicts_with = "iterations",
        required_unless_present = "iterations"
    )]
    time_limit: Option<f64>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long, default_value_t = 1)]
    attempts: usize,
    /// Attempt i runs with seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit per-attempt seeds; overrides --seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Where solution files, traces and summary.json go.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    no_trace: bool,
    /// Run attempts concurrently.
    #[arg(long)]
    parallel: bool,
    /// Exit nonzero when no attempt ends feasible.
    #[arg(long)]
    require_feasible: bool,
    /// Config overrides such as weights.setup_per_shift=900.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = FULL_REQUEST_COUNT)]
    requests: usize,
    /// Shift start times in seconds after midnight.
    #[arg(long, value_delimiter = ',', default_values_t = FULL_SHIFT_STARTS)]
    shift_starts: Vec<i64>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Audit(args) => audit(args),
        Command::Generate(args) => generate_instance(args),
    }
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let loaded = load_dir(&args.instance, &args.overrides)?;
    let limit = match (args.time_limit, args.iterations) {
        (Some(s), _) => Limit::Seconds(s),
        (None, Some(n)) => Limit::Iterations(n),
        (None, None) => unreachable!("clap requires one limit"),
    };
    let spec = ExperimentSpec {
        algorithm: args.algorithm,
        limit,
        attempts: args.attempts,
        seed: args.seed,
        seeds: args.seeds,
        output_dir: args.output,
        write_trace: !args.no_trace,
        parallel: args.parallel,
    };
    let summary = run_experiment(&spec, &loaded.instance, &loaded.solver)?;
    print!("{}", summary.table());
    for a in &summary.attempts {
        if let vrpsd_cli::experiment::AttemptStatus::Failed { error } = &a.status {
            eprintln!("attempt {} (seed {}): {error}", a.attempt, a.seed);
        }
    }
    let failed = summary.failed > 0 || (args.require_feasible && summary.feasible == 0);
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn audit(args: AuditArgs) -> anyhow::Result<ExitCode> {
    let loaded = load_dir(&args.instance, &[])?;
    let file = SolutionFile::load(&args.solution)?;
    let report = audit_solution(&file, &loaded.instance);
    println!("deadline misses     {}", report.deadline_misses);
    println!("back-to-back pairs  {}", report.back_to_back_pairs);
    println!("overlong shifts     {}", report.overlong_shifts);
    println!("total service time  {}", report.total_service_time);
    for p in &report.problems {
        println!("problem: {p}");
    }
    for m in &report.mismatches {
        println!("mismatch: {m}");
    }
    println!(
        "{}",
        if report.is_feasible() {
            "feasible"
        } else {
            "infeasible"
        }
    );
    let ok = report.is_feasible() && report.is_consistent();
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn generate_instance(args: GenerateArgs) -> anyhow::Result<ExitCode> {
    let syn = generate(
        &SyntheticSpec::new(args.requests, args.shift_starts),
        args.seed,
    );
    let config = SolverConfig::default();
    let paths = save_instance(&args.output, &syn.instance, &config)
        .with_context(|| format!("writing instance to {}", args.output.display()))?;
    let ev = Evaluator::new(&syn.instance, &config.weights);
    let planted = Solution::from_routes(ev, syn.planted);
    println!(
        "wrote {}, {}, {}",
        paths.matrix.display(),
        paths.requests.display(),
        paths.config.display()
    );
    println!(
        "{} requests, {} shifts; planted plan total service time {}",
        syn.instance.request_count(),
        syn.instance.shift_count(),
        total_service_time(&planted)
    );
    Ok(ExitCode::SUCCESS)
}
