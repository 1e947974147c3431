//! Human-diffable TOML listing of a solution: per shift, the start time,
//! every stop with its timing, and the shift totals, plus the objective
//! breakdown of the whole solution.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use vrpsd_core::model::{Instance, Seconds, Solution, Violations};
use vrpsd_core::objective::total_service_time;
use vrpsd_core::orchestrate::{Algorithm, RunOutput};
use vrpsd_core::ObjectiveBreakdown;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub iterations: u64,
    pub feasible: bool,
    pub total_service_time: Seconds,
    pub objective: ObjectiveBreakdown,
    pub violations: Violations,
    #[serde(default)]
    pub shifts: Vec<ShiftRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    /// Index into the instance's shift start times.
    pub shift: usize,
    pub start_time: Seconds,
    pub completion_time: Seconds,
    pub duration: Seconds,
    pub travel: Seconds,
    pub service: Seconds,
    pub downtime: Seconds,
    #[serde(default)]
    pub stops: Vec<StopRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRecord {
    pub id: u64,
    pub site: String,
    pub window_start: Seconds,
    pub window_end: Seconds,
    pub arrival: Seconds,
    pub service_start: Seconds,
    pub completion: Seconds,
}

impl SolutionFile {
    pub fn from_run(out: &RunOutput, inst: &Instance) -> Self {
        Self::from_solution(out.algorithm, out.seed, out.iterations, &out.best, inst)
    }

    pub fn from_solution(
        algorithm: Algorithm,
        seed: u64,
        iterations: u64,
        sol: &Solution,
        inst: &Instance,
    ) -> Self {
        let shifts = sol
            .schedules(inst)
            .into_iter()
            .filter(|s| !s.is_redundant())
            .map(|s| ShiftRecord {
                shift: s.shift_id,
                start_time: s.start_time,
                completion_time: s.summary.completion_time,
                duration: s.summary.duration,
                travel: s.summary.travel,
                service: s.summary.service,
                downtime: s.summary.downtime,
                stops: s
                    .stops
                    .iter()
                    .map(|t| {
                        let req = inst.request(t.request);
                        StopRecord {
                            id: req.id.0,
                            site: req.site_id.clone(),
                            window_start: req.window_start,
                            window_end: req.window_end,
                            arrival: t.arrival,
                            service_start: t.service_start,
                            completion: t.completion,
                        }
                    })
                    .collect(),
            })
            .collect();
        Self {
            algorithm,
            seed,
            iterations,
            feasible: sol.is_feasible(),
            total_service_time: total_service_time(sol),
            objective: sol.objective,
            violations: sol.violations(),
            shifts,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("solution file serializes to TOML")
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing solution file {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_toml()).with_context(|| format!("writing {}", path.display()))
    }

    /// Stop ids of each listed shift, in visiting order.
    pub fn routes(&self) -> Vec<(usize, Vec<u64>)> {
        self.shifts
            .iter()
            .map(|s| (s.shift, s.stops.iter().map(|t| t.id).collect()))
            .collect()
    }
}
