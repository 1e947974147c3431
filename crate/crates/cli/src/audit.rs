//! Independent check of a solution file against an instance.
//!
//! Timing is recomputed from the raw matrix and request data with its own
//! forward pass, so a bug in the solver's incremental evaluation shows up
//! here as a disagreement rather than being copied.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vrpsd_core::model::{Instance, Request, Seconds, StopId, Violations};

use crate::solution_file::SolutionFile;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AuditReport {
    pub deadline_misses: u32,
    pub back_to_back_pairs: u32,
    pub overlong_shifts: u32,
    pub total_service_time: Seconds,
    /// Structural faults: unknown or repeated stops, missing requests, bad
    /// shift indices.
    pub problems: Vec<String>,
    /// Places where the file's recorded numbers differ from the recomputation.
    pub mismatches: Vec<String>,
}

impl AuditReport {
    pub fn violations(&self) -> Violations {
        Violations {
            deadline_misses: self.deadline_misses,
            back_to_back_pairs: self.back_to_back_pairs,
            overlong_shifts: self.overlong_shifts,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.violations().is_clear() && self.problems.is_empty()
    }

    /// The file agrees with the recomputation everywhere.
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

struct Lookup<'a> {
    inst: &'a Instance,
    depot: StopId,
}

impl Lookup<'_> {
    fn request(&self, id: StopId) -> Option<&Request> {
        self.inst.requests().by_id(id)
    }

    fn service(&self, id: StopId) -> Seconds {
        self.request(id).map_or(0, |r| r.service_duration)
    }

    /// The matrix entry holds travel plus service at the destination.
    fn travel(&self, from: StopId, to: StopId) -> Seconds {
        if from == to {
            return 0;
        }
        let cost = self
            .inst
            .matrix()
            .cost(from, to)
            .expect("ids checked against the matrix");
        (cost - self.service(to)).max(0)
    }

    fn back_to_back(&self, a: StopId, b: StopId) -> bool {
        if a == self.depot || b == self.depot {
            return false;
        }
        let marked = self.inst.matrix().is_back_to_back(a, b).unwrap_or(false);
        let (ra, rb) = (self.request(a), self.request(b));
        let same_group = matches!((ra, rb), (Some(x), Some(y))
            if x.site_id == y.site_id && x.service_type == y.service_type);
        marked || same_group
    }
}

pub fn audit_solution(file: &SolutionFile, inst: &Instance) -> AuditReport {
    let rules = inst.rules();
    let starts = &inst.config().shift_start_times;
    let look = Lookup {
        inst,
        depot: inst.config().depot_id,
    };
    let mut report = AuditReport::default();
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    let mut shift_seen = vec![false; starts.len()];

    for rec in &file.shifts {
        if rec.shift >= starts.len() {
            report
                .problems
                .push(format!("shift {} does not exist", rec.shift));
            continue;
        }
        if std::mem::replace(&mut shift_seen[rec.shift], true) {
            report
                .problems
                .push(format!("shift {} listed twice", rec.shift));
        }
        let start = starts[rec.shift];
        if rec.start_time != start {
            report.mismatches.push(format!(
                "shift {}: start {} but instance says {start}",
                rec.shift, rec.start_time
            ));
        }
        let mut clock = start + rules.check_in;
        let mut last = look.depot;
        let mut visited = 0;
        for stop in &rec.stops {
            let id = StopId(stop.id);
            let Some(req) = look.request(id) else {
                report
                    .problems
                    .push(format!("shift {}: unknown stop {id}", rec.shift));
                continue;
            };
            *seen.entry(stop.id).or_default() += 1;
            visited += 1;
            let arrival = clock + look.travel(last, id);
            let service_start = arrival.max(req.window_start);
            let completion = service_start + req.service_duration;
            if completion > req.window_end {
                report.deadline_misses += 1;
            }
            if look.back_to_back(last, id) {
                report.back_to_back_pairs += 1;
            }
            if (stop.arrival, stop.service_start, stop.completion)
                != (arrival, service_start, completion)
            {
                report.mismatches.push(format!(
                    "stop {id}: recorded ({}, {}, {}), recomputed ({arrival}, {service_start}, {completion})",
                    stop.arrival, stop.service_start, stop.completion
                ));
            }
            clock = completion;
            last = id;
        }
        if visited == 0 {
            continue;
        }
        let completion = clock + look.travel(last, look.depot) + rules.check_out + rules.break_time;
        let duration = completion - start;
        if duration > rules.max_duration {
            report.overlong_shifts += 1;
        }
        if rec.duration != duration {
            report.mismatches.push(format!(
                "shift {}: recorded duration {}, recomputed {duration}",
                rec.shift, rec.duration
            ));
        }
        report.total_service_time += duration;
    }

    for (id, n) in &seen {
        if *n > 1 {
            report.problems.push(format!("stop {id} visited {n} times"));
        }
    }
    let missing: Vec<String> = inst
        .requests()
        .iter()
        .filter(|r| !seen.contains_key(&r.id.0))
        .map(|r| r.id.to_string())
        .collect();
    if !missing.is_empty() {
        report
            .problems
            .push(format!("unassigned: {}", missing.join(", ")));
    }
    if file.total_service_time != report.total_service_time {
        report.mismatches.push(format!(
            "total service time recorded {}, recomputed {}",
            file.total_service_time, report.total_service_time
        ));
    }
    if file.violations != report.violations() {
        report.mismatches.push(format!(
            "violations recorded {:?}, recomputed {:?}",
            file.violations,
            report.violations()
        ));
    }
    report
}
