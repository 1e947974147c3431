//! Small hand-built instances for tests, examples and benchmarks.
//!
//! Stops live on a plane; travel between two points is 100 s per unit of
//! Euclidean distance, rounded to whole seconds. The depot is the origin and
//! has id 0, so request ids must be nonzero.

use crate::model::{
    CostMatrix, Instance, InstanceConfig, Request, RequestSet, Seconds, ShiftRules, StopId,
};

pub const DEPOT_ID: StopId = StopId(0);
pub const SECONDS_PER_UNIT: f64 = 100.0;

/// A request at its own site with a unique back-to-back group.
pub fn toy_request(
    id: u64,
    window_start: Seconds,
    window_end: Seconds,
    duration: Seconds,
) -> Request {
    Request {
        id: StopId(id),
        site_id: format!("site-{id}"),
        service_type: "patrol".into(),
        service_duration: duration,
        window_start,
        window_end,
        back_to_back_group: id as usize,
    }
}

fn travel_between(a: (f64, f64), b: (f64, f64)) -> Seconds {
    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    (d * SECONDS_PER_UNIT).round() as Seconds
}

/// Cost matrix over depot + requests with `cost = travel + service(to)`.
pub fn matrix_for(requests: &[Request], coords: &[(f64, f64)]) -> CostMatrix {
    assert_eq!(requests.len(), coords.len());
    let mut ids = vec![DEPOT_ID];
    ids.extend(requests.iter().map(|r| r.id));
    let mut pts = vec![(0.0, 0.0)];
    pts.extend_from_slice(coords);
    let n = ids.len();
    let mut cost = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let service = if j == 0 {
                    0
                } else {
                    requests[j - 1].service_duration
                };
                cost[i * n + j] = travel_between(pts[i], pts[j]) + service;
            }
        }
    }
    CostMatrix::new(ids, cost, vec![false; n * n]).expect("toy matrix is square")
}

pub fn config_for(starts: &[Seconds]) -> InstanceConfig {
    InstanceConfig {
        depot_id: DEPOT_ID,
        shift_start_times: starts.to_vec(),
        horizon: 86_400,
        rules: ShiftRules::default(),
    }
}

/// Requests placed at explicit plane coordinates.
pub fn instance_at(requests: Vec<Request>, coords: &[(f64, f64)], starts: &[Seconds]) -> Instance {
    let matrix = matrix_for(&requests, coords);
    let set = RequestSet::new(requests).expect("valid toy requests");
    Instance::new(matrix, set, config_for(starts)).expect("valid toy instance")
}

/// Requests placed on the x axis at the given positions.
pub fn instance_with_points(requests: Vec<Request>, xs: &[f64], starts: &[Seconds]) -> Instance {
    let coords: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.0)).collect();
    instance_at(requests, &coords, starts)
}

/// Request `i` sits at x = i + 1.
pub fn instance_from_requests(requests: Vec<Request>, starts: &[Seconds]) -> Instance {
    let xs: Vec<f64> = (0..requests.len()).map(|i| (i + 1) as f64).collect();
    instance_with_points(requests, &xs, starts)
}

/// `specs[i] = (window_start, window_end, duration)` for request id `i + 1`
/// at x = i + 1.
pub fn line_instance(specs: &[(Seconds, Seconds, Seconds)], starts: &[Seconds]) -> Instance {
    let reqs = specs
        .iter()
        .enumerate()
        .map(|(i, &(a, b, q))| toy_request(i as u64 + 1, a, b, q))
        .collect();
    instance_from_requests(reqs, starts)
}
