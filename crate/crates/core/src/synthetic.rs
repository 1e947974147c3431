//! Seeded instance generators.
//!
//! [`generate`] plants one feasible route per shift and derives every time
//! window around the planted service times, so each generated instance has
//! at least one violation-free solution (returned alongside it). Some sites
//! are visited more than once per day, and a few host two service types.
//! Travel is 100 s per unit of Euclidean distance on a square area.

use std::collections::BTreeMap;

use crate::model::{
    expand_multi_visits, CostMatrix, Instance, InstanceConfig, RawRequest, Seconds, ShiftRules,
    StopId, Visit,
};
use crate::rng::RngStream;

pub const DEPOT_ID: StopId = StopId(50006);
const FIRST_REQUEST_ID: u64 = 40000;
const SECONDS_PER_UNIT: f64 = 100.0;
const SERVICE_TYPES: [&str; 2] = ["patrol", "alarm-check"];
const DURATIONS: [Seconds; 5] = [240, 300, 360, 420, 540];

/// Shift starts of the full-size instance: three morning, three afternoon
/// and evening, one overnight.
pub const FULL_SHIFT_STARTS: [Seconds; 7] =
    [21_600, 25_200, 28_800, 50_400, 57_600, 64_800, 79_200];
pub const FULL_REQUEST_COUNT: usize = 251;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub requests: usize,
    pub shift_starts: Vec<Seconds>,
    /// Side of the square service area, in distance units.
    pub area: f64,
    /// Range of the step between consecutive planted stops.
    pub step: (f64, f64),
    /// Chance that a planted stop revisits a site planted in another shift.
    pub revisit_probability: f64,
    /// Chance that a planted stop is a second service type at a known site.
    pub second_type_probability: f64,
    /// Chance of a window only a few minutes wider than the service.
    pub narrow_window_probability: f64,
    /// Chance of planted waiting before a service.
    pub wait_probability: f64,
    /// Upper bounds on how far a regular window opens before the planted
    /// service start and closes after the planted completion.
    pub window_slack: (Seconds, Seconds),
}

impl SyntheticSpec {
    pub fn full_size() -> Self {
        Self::new(FULL_REQUEST_COUNT, FULL_SHIFT_STARTS.to_vec())
    }

    pub fn new(requests: usize, shift_starts: Vec<Seconds>) -> Self {
        Self {
            requests,
            shift_starts,
            area: 24.0,
            step: (1.0, 4.5),
            revisit_probability: 0.15,
            second_type_probability: 0.04,
            narrow_window_probability: 0.1,
            wait_probability: 0.2,
            window_slack: (7200, 14_400),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub instance: Instance,
    pub raw: Vec<RawRequest>,
    /// A violation-free solution, as request indices per shift.
    pub planted: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
struct Site {
    name: String,
    at: (f64, f64),
    planted_in: usize,
}

#[derive(Debug, Clone)]
struct PlantedStop {
    site: usize,
    service_type: usize,
    window: (Seconds, Seconds),
}

fn travel(a: (f64, f64), b: (f64, f64)) -> Seconds {
    (((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() * SECONDS_PER_UNIT).round() as Seconds
}

fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.unit()
}

/// Builds an instance with a planted feasible solution.
pub fn generate(spec: &SyntheticSpec, seed: u64) -> Synthetic {
    let mut rng = RngStream::new(seed);
    let rules = ShiftRules::default();
    let k = spec.shift_starts.len();
    assert!(k > 0, "at least one shift");
    let depot = (spec.area / 2.0, spec.area / 2.0);
    // Stop counts per shift, as even as possible.
    let counts: Vec<usize> = (0..k)
        .map(|s| spec.requests / k + usize::from(s < spec.requests % k))
        .collect();
    // Leave room for the return leg and overheads.
    let budget = rules.max_duration - rules.fixed_overhead() - 3 * 1800;

    let mut sites: Vec<Site> = Vec::new();
    // (site, type) -> duration, so repeat visits share it.
    let mut durations: BTreeMap<(usize, usize), Seconds> = BTreeMap::new();
    let mut stops: Vec<PlantedStop> = Vec::new();
    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); k];

    let mut carry = 0;
    for (s, &count) in counts.iter().enumerate() {
        let target = count + carry;
        carry = 0;
        let start = spec.shift_starts[s];
        let mut clock = start + rules.check_in;
        let mut at = depot;
        let mut last: Option<(usize, usize)> = None;
        let mut shift_sites: Vec<usize> = Vec::new();
        for placed in 0..target {
            let (site, service_type) = pick_site(spec, &mut rng, &sites, s, &shift_sites, last, at);
            let site = match site {
                Some(i) => i,
                None => {
                    let angle = uniform(&mut rng, 0.0, std::f64::consts::TAU);
                    let len = uniform(&mut rng, spec.step.0, spec.step.1);
                    let p = (
                        (at.0 + len * angle.cos()).clamp(0.0, spec.area),
                        (at.1 + len * angle.sin()).clamp(0.0, spec.area),
                    );
                    sites.push(Site {
                        name: format!("S{:04}", sites.len() + 1),
                        at: p,
                        planted_in: s,
                    });
                    sites.len() - 1
                }
            };
            let duration = *durations
                .entry((site, service_type))
                .or_insert_with(|| DURATIONS[rng.below(DURATIONS.len())]);
            let arrival = clock + travel(at, sites[site].at);
            let wait = if rng.chance(spec.wait_probability) {
                rng.range_i64(60, 900)
            } else {
                0
            };
            let service_start = arrival + wait;
            let completion = service_start + duration;
            if completion - start > budget {
                // Keeps the planted shift within the duration limit; the
                // rest of its quota moves to the next shift.
                carry = target - placed;
                break;
            }
            let window = if rng.chance(spec.narrow_window_probability) {
                (
                    (service_start - rng.range_i64(0, 300)).max(0),
                    completion + rng.range_i64(0, 300),
                )
            } else {
                (
                    (service_start - rng.range_i64(0, spec.window_slack.0)).max(0),
                    completion + rng.range_i64(spec.window_slack.1 / 8, spec.window_slack.1),
                )
            };
            stops.push(PlantedStop {
                site,
                service_type,
                window,
            });
            routes[s].push(stops.len() - 1);
            shift_sites.push(site);
            clock = completion;
            at = sites[site].at;
            last = Some((site, service_type));
        }
    }
    // Group visits into raw requests in order of first planted appearance,
    // assigning ids in final request order.
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut visits: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, st) in stops.iter().enumerate() {
        let key = (st.site, st.service_type);
        if !visits.contains_key(&key) {
            order.push(key);
        }
        visits.entry(key).or_default().push(i);
    }
    let mut stop_id = vec![StopId(0); stops.len()];
    let mut next_id = FIRST_REQUEST_ID;
    let mut raw = Vec::new();
    for key in &order {
        let mut group = visits[key].clone();
        group.sort_by_key(|&i| stops[i].window);
        let mut vs = Vec::new();
        for &i in &group {
            stop_id[i] = StopId(next_id);
            vs.push(Visit {
                id: StopId(next_id),
                window_start: stops[i].window.0,
                window_end: stops[i].window.1,
            });
            next_id += 1;
        }
        raw.push(RawRequest {
            site_id: sites[key.0].name.clone(),
            service_type: SERVICE_TYPES[key.1].to_string(),
            service_duration: durations[key],
            visits: vs,
        });
    }
    let requests = expand_multi_visits(&raw).expect("generated ids are unique");

    // Matrix over depot + requests in request order.
    let mut ids = vec![DEPOT_ID];
    let mut points = vec![depot];
    let mut keys = vec![None];
    for r in requests.iter() {
        let i = stop_id
            .iter()
            .position(|&id| id == r.id)
            .expect("every request is planted");
        ids.push(r.id);
        points.push(sites[stops[i].site].at);
        keys.push(Some((stops[i].site, stops[i].service_type)));
    }
    let n = ids.len();
    let mut cost = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            cost[i * n + j] = if keys[i].is_some() && keys[i] == keys[j] {
                // Same site and service type: zero marks a back-to-back pair.
                0
            } else {
                let service = if j == 0 {
                    0
                } else {
                    requests.get(j - 1).service_duration
                };
                travel(points[i], points[j]) + service
            };
        }
    }
    let b2b = (0..n * n)
        .map(|x| {
            let (i, j) = (x / n, x % n);
            i != j && i != 0 && j != 0 && cost[x] == 0
        })
        .collect();
    let matrix = CostMatrix::new(ids, cost, b2b).expect("square matrix");
    let config = InstanceConfig {
        depot_id: DEPOT_ID,
        shift_start_times: spec.shift_starts.clone(),
        horizon: 86_400,
        rules,
    };
    let instance = Instance::new(matrix, requests, config).expect("generated instance is valid");
    let planted = routes
        .iter()
        .map(|route| {
            route
                .iter()
                .map(|&i| {
                    instance
                        .requests()
                        .position(stop_id[i])
                        .expect("planted id exists")
                })
                .collect()
        })
        .collect();
    Synthetic {
        instance,
        raw,
        planted,
    }
}

/// Either a revisit of a known site or a fresh site (`None`), plus the
/// service type. Revisits never repeat the previous stop's site and type.
fn pick_site(
    spec: &SyntheticSpec,
    rng: &mut RngStream,
    sites: &[Site],
    shift: usize,
    shift_sites: &[usize],
    last: Option<(usize, usize)>,
    at: (f64, f64),
) -> (Option<usize>, usize) {
    let reach = spec.step.1 * 1.5;
    let nearby = |i: &usize| {
        let d = travel(at, sites[*i].at) as f64 / SECONDS_PER_UNIT;
        d <= reach
    };
    if rng.chance(spec.revisit_probability) {
        // Sites first planted in earlier shifts, close enough to keep the
        // route compact.
        let pool: Vec<usize> = (0..sites.len())
            .filter(|&i| sites[i].planted_in < shift && !shift_sites.contains(&i))
            .filter(nearby)
            .collect();
        if !pool.is_empty() {
            return (Some(pool[rng.below(pool.len())]), 0);
        }
    }
    if rng.chance(spec.second_type_probability) {
        let pool: Vec<usize> = (0..sites.len())
            .filter(|&i| last != Some((i, 1)) && last.map(|l| l.0) != Some(i))
            .filter(nearby)
            .collect();
        if !pool.is_empty() {
            return (Some(pool[rng.below(pool.len())]), 1);
        }
    }
    (None, 0)
}

/// Small random instance for oracle tests: `n` requests at random points
/// of an 8 × 8 area, wide random windows, shifts starting four hours apart.
/// About one request in five revisits another request's site.
pub fn random_toy(n: usize, shifts: usize, seed: u64) -> Instance {
    let mut rng = RngStream::new(seed);
    let mut raw: Vec<RawRequest> = Vec::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let a = rng.range_i64(0, 30_000);
        let b = a + rng.range_i64(1800, 20_000);
        let visit = Visit {
            id: StopId(i as u64 + 1),
            window_start: a,
            window_end: b,
        };
        if i > 0 && rng.chance(0.2) {
            let j = rng.below(raw.len());
            raw[j].visits.push(visit);
            continue;
        }
        raw.push(RawRequest {
            site_id: format!("T{}", raw.len() + 1),
            service_type: "patrol".into(),
            service_duration: DURATIONS[rng.below(DURATIONS.len())],
            visits: vec![visit],
        });
        points.push((uniform(&mut rng, 0.0, 8.0), uniform(&mut rng, 0.0, 8.0)));
    }
    let requests = expand_multi_visits(&raw).expect("unique ids");
    let site_point: BTreeMap<&str, (f64, f64)> = raw
        .iter()
        .zip(&points)
        .map(|(r, p)| (r.site_id.as_str(), *p))
        .collect();
    let mut ids = vec![StopId(0)];
    let mut pts = vec![(0.0, 0.0)];
    for r in requests.iter() {
        ids.push(r.id);
        pts.push(site_point[r.site_id.as_str()]);
    }
    let m = ids.len();
    let mut cost = vec![0; m * m];
    let mut b2b = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let same = i > 0
                && j > 0
                && requests.get(i - 1).back_to_back_group == requests.get(j - 1).back_to_back_group;
            if same {
                b2b[i * m + j] = true;
            } else {
                let service = if j == 0 {
                    0
                } else {
                    requests.get(j - 1).service_duration
                };
                cost[i * m + j] = travel(pts[i], pts[j]) + service;
            }
        }
    }
    let matrix = CostMatrix::new(ids, cost, b2b).expect("square matrix");
    let config = InstanceConfig {
        depot_id: StopId(0),
        shift_start_times: (0..shifts).map(|s| 14_400 * s as Seconds).collect(),
        horizon: 86_400,
        rules: ShiftRules::default(),
    };
    Instance::new(matrix, requests, config).expect("valid toy")
}
