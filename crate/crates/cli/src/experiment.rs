//! Repeated attempts of one algorithm on one instance, with per-attempt
//! solution files and traces and a min/max/average summary.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vrpsd_core::model::{Instance, Seconds};
use vrpsd_core::orchestrate::{run, Algorithm, RunBudget, RunOutput};
use vrpsd_core::{Evaluator, SolverConfig};

use crate::solution_file::SolutionFile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limit {
    Seconds(f64),
    Iterations(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub limit: Limit,
    pub attempts: usize,
    /// Attempt `i` uses `seed + i` unless `seeds` lists them explicitly.
    pub seed: u64,
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    pub write_trace: bool,
    /// Run attempts on the rayon pool instead of one after another.
    pub parallel: bool,
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, limit: Limit) -> Self {
        Self {
            algorithm,
            limit,
            attempts: 1,
            seed: 0,
            seeds: None,
            output_dir: None,
            write_trace: true,
            parallel: false,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.attempts == 0 {
            bail!("attempts must be at least 1");
        }
        match self.limit {
            Limit::Seconds(s) if !(s > 0.0 && s.is_finite()) => {
                bail!("time limit must be positive, got {s}")
            }
            Limit::Iterations(0) => bail!("iteration limit must be positive"),
            _ => {}
        }
        if let Some(seeds) = &self.seeds {
            if seeds.len() != self.attempts {
                bail!("{} seeds given for {} attempts", seeds.len(), self.attempts);
            }
        }
        Ok(())
    }

    pub fn seed_of(&self, attempt: usize) -> u64 {
        match &self.seeds {
            Some(seeds) => seeds[attempt],
            None => self.seed.wrapping_add(attempt as u64),
        }
    }

    pub fn budget(&self, attempt: usize) -> RunBudget {
        let seed = self.seed_of(attempt);
        match self.limit {
            Limit::Seconds(s) => RunBudget::wall_clock(Duration::from_secs_f64(s), seed),
            Limit::Iterations(n) => RunBudget::iterations(n, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub status: AttemptStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AttemptStatus {
    Finished {
        feasible: bool,
        total_service_time: Seconds,
        objective: f64,
        initial_objective: f64,
        initial_service_time: Seconds,
        iterations: u64,
        /// Only under time limits, so iteration-limited summaries repeat exactly.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        elapsed_ms: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        solution_file: Option<PathBuf>,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace_file: Option<PathBuf>,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: Seconds,
    pub max: Seconds,
    pub mean: f64,
}

impl Stats {
    pub fn of(values: &[Seconds]) -> Option<Self> {
        let min = *values.iter().min()?;
        let max = *values.iter().max()?;
        let mean = values.iter().sum::<Seconds>() as f64 / values.len() as f64;
        Some(Self { min, max, mean })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub algorithm: Algorithm,
    pub limit: Limit,
    pub attempts: Vec<AttemptRecord>,
    /// Over every finished attempt, feasible or not.
    pub total_service_time: Option<Stats>,
    pub feasible: usize,
    pub failed: usize,
}

impl ExperimentSummary {
    fn from_attempts(spec: &ExperimentSpec, attempts: Vec<AttemptRecord>) -> Self {
        let mut totals = Vec::new();
        let (mut feasible, mut failed) = (0, 0);
        for a in &attempts {
            match &a.status {
                AttemptStatus::Finished {
                    feasible: f,
                    total_service_time,
                    ..
                } => {
                    totals.push(*total_service_time);
                    feasible += usize::from(*f);
                }
                AttemptStatus::Failed { .. } => failed += 1,
            }
        }
        Self {
            algorithm: spec.algorithm,
            limit: spec.limit,
            total_service_time: Stats::of(&totals),
            attempts,
            feasible,
            failed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes to JSON")
    }

    /// One row in the layout of the usual results table: algorithm,
    /// description, limit, minimum, maximum and average total time, then the
    /// feasible tally.
    pub fn table(&self) -> String {
        let limit = match self.limit {
            Limit::Seconds(s) => format!("{s} s"),
            Limit::Iterations(n) => format!("{n} it"),
        };
        let (min, max, mean) = match &self.total_service_time {
            Some(s) => (
                s.min.to_string(),
                s.max.to_string(),
                format!("{:.1}", s.mean),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let finished = self.attempts.len() - self.failed;
        let mut out = format!(
            "{:<9} {:<34} {:>12} {:>12} {:>12} {:>14} {:>9}\n",
            "Algorithm", "Description", "Limit", "Minimum", "Maximum", "Average", "Feasible"
        );
        out += &format!(
            "{:<9} {:<34} {:>12} {:>12} {:>12} {:>14} {:>9}\n",
            self.algorithm.number(),
            description(self.algorithm),
            limit,
            min,
            max,
            mean,
            format!("{}/{}", self.feasible, finished)
        );
        if self.failed > 0 {
            out += &format!("{} attempt(s) failed\n", self.failed);
        }
        out
    }
}

pub fn description(alg: Algorithm) -> &'static str {
    match alg {
        Algorithm::Genetic => "SSGA",
        Algorithm::Alns => "ALNS and TA",
        Algorithm::Multiphase => "Multiphase ALNS and TA",
        Algorithm::Hybrid => "Hybrid multiphase ALNS, TA, and TS",
    }
}

/// Runs every attempt, writes `attempt-<i>.toml` (and `attempt-<i>.jsonl`
/// traces) plus `summary.json` into the output directory when one is set.
/// A panicking attempt is recorded as failed; the others still run.
pub fn run_experiment(
    spec: &ExperimentSpec,
    inst: &Instance,
    config: &SolverConfig,
) -> anyhow::Result<ExperimentSummary> {
    spec.validate()?;
    config
        .validate(inst)
        .context("invalid solver configuration")?;
    if let Some(dir) = &spec.output_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let one = |i: usize| attempt(spec, i, inst, config);
    let attempts: Vec<AttemptRecord> = if spec.parallel {
        (0..spec.attempts).into_par_iter().map(one).collect()
    } else {
        (0..spec.attempts).map(one).collect()
    };
    let summary = ExperimentSummary::from_attempts(spec, attempts);
    if let Some(dir) = &spec.output_dir {
        let path = dir.join("summary.json");
        std::fs::write(&path, summary.to_json())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(summary)
}

fn attempt(
    spec: &ExperimentSpec,
    i: usize,
    inst: &Instance,
    config: &SolverConfig,
) -> AttemptRecord {
    let budget = spec.budget(i);
    let ev = Evaluator::new(inst, &config.weights);
    let status = match catch_unwind(AssertUnwindSafe(|| {
        run(spec.algorithm, ev, config, &budget)
    })) {
        Ok(out) => match write_outputs(spec, i, &out, inst) {
            Ok((solution_file, trace_file)) => {
                let timed = matches!(spec.limit, Limit::Seconds(_));
                finished(&out, timed, solution_file, trace_file)
            }
            Err(e) => AttemptStatus::Failed {
                error: format!("{e:#}"),
            },
        },
        Err(panic) => AttemptStatus::Failed {
            error: panic_message(panic.as_ref()),
        },
    };
    AttemptRecord {
        attempt: i,
        seed: budget.seed,
        status,
    }
}

fn finished(
    out: &RunOutput,
    timed: bool,
    solution_file: Option<PathBuf>,
    trace_file: Option<PathBuf>,
) -> AttemptStatus {
    AttemptStatus::Finished {
        feasible: out.best.is_feasible(),
        total_service_time: vrpsd_core::objective::total_service_time(&out.best),
        objective: out.best.total(),
        initial_objective: out.initial_objective,
        initial_service_time: out.initial_service_time,
        iterations: out.iterations,
        elapsed_ms: timed.then_some(out.elapsed.as_millis() as u64),
        solution_file,
        trace_file,
    }
}

type Written = (Option<PathBuf>, Option<PathBuf>);

fn write_outputs(
    spec: &ExperimentSpec,
    i: usize,
    out: &RunOutput,
    inst: &Instance,
) -> anyhow::Result<Written> {
    let Some(dir) = &spec.output_dir else {
        return Ok((None, None));
    };
    let solution = solution_path(dir, i);
    SolutionFile::from_run(out, inst).save(&solution)?;
    let trace = if spec.write_trace {
        let path = dir.join(format!("attempt-{i}.jsonl"));
        let file =
            std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        out.trace
            .write_jsonl(std::io::BufWriter::new(file))
            .with_context(|| format!("writing {}", path.display()))?;
        Some(path)
    } else {
        None
    };
    Ok((Some(solution), trace))
}

pub fn solution_path(dir: &Path, attempt: usize) -> PathBuf {
    dir.join(format!("attempt-{attempt}.toml"))
}

fn panic_message(panic: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        format!("attempt panicked: {s}")
    } else if let Some(s) = panic.downcast_ref::<String>() {
        format!("attempt panicked: {s}")
    } else {
        "attempt panicked".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use vrpsd_core::synthetic::random_toy;

    #[test]
    fn stats_are_exact() {
        let s = Stats::of(&[5, 1, 3]).unwrap();
        assert_eq!((s.min, s.max, s.mean), (1, 5, 3.0));
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn spec_validation() {
        let mut spec = ExperimentSpec::new(Algorithm::Alns, Limit::Iterations(10));
        assert!(spec.validate().is_ok());
        spec.attempts = 0;
        assert!(spec.validate().is_err());
        spec.attempts = 2;
        spec.seeds = Some(vec![1]);
        assert!(spec.validate().is_err());
        spec.seeds = Some(vec![4, 9]);
        assert_eq!(spec.seed_of(1), 9);
        spec.limit = Limit::Seconds(0.0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn one_attempt_writes_one_of_each() {
        let inst = random_toy(6, 2, 1);
        let dir = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(Algorithm::Hybrid, Limit::Iterations(500));
        spec.output_dir = Some(dir.path().to_path_buf());
        let summary = run_experiment(&spec, &inst, &SolverConfig::default()).unwrap();
        assert_eq!(summary.attempts.len(), 1);
        assert!(dir.path().join("attempt-0.toml").exists());
        assert!(dir.path().join("attempt-0.jsonl").exists());
        assert!(dir.path().join("summary.json").exists());
        assert_eq!(summary.table().lines().count(), 2);
    }
}
