//! On-disk instance formats.
//!
//! * Cost matrix: CSV with a header row of stop ids and one row per stop,
//!   first column the row's stop id. Row order must match the header. A `0`
//!   between two distinct non-depot stops marks a back-to-back pair; that
//!   entry stays `0` in the loaded costs.
//! * Requests: TOML, an array of `[[request]]` tables. A record is either a
//!   single visit (`id`, `window_start`, `window_end`) or carries a `visits`
//!   array of `{ id, window_start, window_end }` tables. `site`,
//!   `service_type` and `duration` are always required.
//! * Config: TOML with an `[instance]` table (`depot_id`,
//!   `shift_start_times`, optional `shift_count`, `horizon` and
//!   `[instance.rules]`) plus the optional solver sections of
//!   [`SolverConfig`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SolverConfig;
use crate::model::{
    expand_multi_visits, CostMatrix, Instance, InstanceConfig, ModelError, RawRequest, RequestSet,
    Seconds, ShiftRules, StopId, Visit,
};

pub const DEFAULT_HORIZON: Seconds = 86_400;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: row {row}, column {column}: {message}")]
    Cell {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: record {index}{}: {message}", .id.map(|i| format!(" (id {i})")).unwrap_or_default())]
    Record {
        path: PathBuf,
        index: usize,
        id: Option<StopId>,
        message: String,
    },
    #[error("{0}")]
    Model(#[from] ModelError),
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a cost matrix and derives the back-to-back relation from its zero
/// entries, excluding the depot's row and column.
pub fn load_cost_matrix(path: &Path, depot_id: StopId) -> Result<CostMatrix, IngestError> {
    parse_cost_matrix(&read(path)?, path, depot_id)
}

pub fn parse_cost_matrix(
    text: &str,
    path: &Path,
    depot_id: StopId,
) -> Result<CostMatrix, IngestError> {
    let cell = |row: usize, column: usize, message: String| IngestError::Cell {
        path: path.to_path_buf(),
        row,
        column,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| cell(r + 1, 0, e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(rec);
    }
    let Some(header) = rows.first() else {
        return Err(IngestError::Parse {
            path: path.to_path_buf(),
            message: "empty cost matrix".into(),
        });
    };
    let parse_id = |s: &str, row: usize, col: usize| {
        s.parse::<u64>()
            .map(StopId)
            .map_err(|_| cell(row, col, format!("invalid stop id {s:?}")))
    };
    let ids = header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(c, s)| parse_id(s, 1, c + 1))
        .collect::<Result<Vec<_>, _>>()?;
    let n = ids.len();
    if rows.len() - 1 != n {
        return Err(IngestError::Parse {
            path: path.to_path_buf(),
            message: format!(
                "matrix is not square: {n} columns but {} rows",
                rows.len() - 1
            ),
        });
    }
    let mut cost = vec![0; n * n];
    for (i, rec) in rows.iter().enumerate().skip(1) {
        let row_no = i + 1;
        if rec.len() != n + 1 {
            return Err(cell(
                row_no,
                rec.len(),
                format!("expected {} fields, found {}", n + 1, rec.len()),
            ));
        }
        let row_id = parse_id(&rec[0], row_no, 1)?;
        if row_id != ids[i - 1] {
            return Err(cell(
                row_no,
                1,
                format!("row id {row_id} does not match header id {}", ids[i - 1]),
            ));
        }
        for j in 0..n {
            let raw = &rec[j + 1];
            let v: Seconds = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && v.fract() == 0.0)
                .map(|v| v as Seconds)
                .ok_or_else(|| cell(row_no, j + 2, format!("invalid cost {raw:?}")))?;
            if v < 0 {
                return Err(cell(row_no, j + 2, format!("negative cost {v}")));
            }
            cost[(i - 1) * n + j] = v;
        }
    }
    let depot = ids
        .iter()
        .position(|&id| id == depot_id)
        .ok_or_else(|| IngestError::Parse {
            path: path.to_path_buf(),
            message: format!("depot id {depot_id} not found in matrix header"),
        })?;
    let mut b2b = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            b2b[i * n + j] = i != j && i != depot && j != depot && cost[i * n + j] == 0;
        }
    }
    Ok(CostMatrix::new(ids, cost, b2b)?)
}

pub fn write_cost_matrix(matrix: &CostMatrix) -> String {
    let mut out = String::from("stop_id");
    for id in matrix.stop_ids() {
        let _ = write!(out, ",{id}");
    }
    out.push('\n');
    for (i, id) in matrix.stop_ids().iter().enumerate() {
        let _ = write!(out, "{id}");
        for j in 0..matrix.len() {
            let _ = write!(out, ",{}", matrix.cost_at(i, j));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequestsFile {
    #[serde(default, rename = "request")]
    requests: Vec<RequestRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequestRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    site: String,
    service_type: String,
    duration: Seconds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window_start: Option<Seconds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window_end: Option<Seconds>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    visits: Vec<VisitRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VisitRecord {
    id: u64,
    window_start: Seconds,
    window_end: Seconds,
}

pub fn load_requests(path: &Path) -> Result<RequestSet, IngestError> {
    parse_requests(&read(path)?, path)
}

pub fn parse_requests(text: &str, path: &Path) -> Result<RequestSet, IngestError> {
    let file: RequestsFile = toml::from_str(text).map_err(|e| IngestError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let record_err = |index: usize, id: Option<u64>, message: String| IngestError::Record {
        path: path.to_path_buf(),
        index,
        id: id.map(StopId),
        message,
    };
    let mut raw = Vec::with_capacity(file.requests.len());
    for (i, rec) in file.requests.into_iter().enumerate() {
        let index = i + 1;
        if rec.duration <= 0 {
            return Err(record_err(
                index,
                rec.id,
                format!("duration must be positive, got {}", rec.duration),
            ));
        }
        let visits = if rec.visits.is_empty() {
            let id = rec
                .id
                .ok_or_else(|| record_err(index, None, "missing field `id`".into()))?;
            let window_start = rec
                .window_start
                .ok_or_else(|| record_err(index, rec.id, "missing field `window_start`".into()))?;
            let window_end = rec
                .window_end
                .ok_or_else(|| record_err(index, rec.id, "missing field `window_end`".into()))?;
            vec![Visit {
                id: StopId(id),
                window_start,
                window_end,
            }]
        } else {
            if rec.id.is_some() || rec.window_start.is_some() || rec.window_end.is_some() {
                return Err(record_err(
                    index,
                    rec.id,
                    "a record with `visits` must not also set `id` or a window".into(),
                ));
            }
            rec.visits
                .iter()
                .map(|v| Visit {
                    id: StopId(v.id),
                    window_start: v.window_start,
                    window_end: v.window_end,
                })
                .collect()
        };
        for v in &visits {
            if v.window_end <= v.window_start {
                return Err(record_err(
                    index,
                    Some(v.id.0),
                    format!(
                        "window_end {} must exceed window_start {}",
                        v.window_end, v.window_start
                    ),
                ));
            }
        }
        raw.push(RawRequest {
            site_id: rec.site,
            service_type: rec.service_type,
            service_duration: rec.duration,
            visits,
        });
    }
    Ok(expand_multi_visits(&raw)?)
}

/// One flat record per request, in set order.
pub fn write_requests(requests: &RequestSet) -> String {
    let file = RequestsFile {
        requests: requests
            .iter()
            .map(|r| RequestRecord {
                id: Some(r.id.0),
                site: r.site_id.clone(),
                service_type: r.service_type.clone(),
                duration: r.service_duration,
                window_start: Some(r.window_start),
                window_end: Some(r.window_end),
                visits: Vec::new(),
            })
            .collect(),
    };
    toml::to_string(&file).expect("requests serialize to TOML")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    pub depot_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_count: Option<usize>,
    pub shift_start_times: Vec<Seconds>,
    #[serde(default = "default_horizon")]
    pub horizon: Seconds,
    #[serde(default)]
    pub rules: ShiftRules,
}

fn default_horizon() -> Seconds {
    DEFAULT_HORIZON
}

impl InstanceSection {
    pub fn to_config(&self) -> Result<InstanceConfig, ModelError> {
        if let Some(k) = self.shift_count {
            if k != self.shift_start_times.len() {
                return Err(ModelError::InvalidConfig(format!(
                    "shift_count = {k} but {} shift_start_times given",
                    self.shift_start_times.len()
                )));
            }
        }
        if self.shift_start_times.is_empty() {
            return Err(ModelError::NoShifts);
        }
        if self.horizon <= 0 {
            return Err(ModelError::InvalidConfig("horizon must be positive".into()));
        }
        Ok(InstanceConfig {
            depot_id: StopId(self.depot_id),
            shift_start_times: self.shift_start_times.clone(),
            horizon: self.horizon,
            rules: self.rules,
        })
    }

    pub fn from_config(config: &InstanceConfig) -> Self {
        Self {
            depot_id: config.depot_id.0,
            shift_count: Some(config.shift_count()),
            shift_start_times: config.shift_start_times.clone(),
            horizon: config.horizon,
            rules: config.rules,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub instance: InstanceSection,
    #[serde(flatten)]
    pub solver: SolverConfig,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, IngestError> {
    parse_config(&read(path)?, path)
}

pub fn parse_config(text: &str, path: &Path) -> Result<ConfigFile, IngestError> {
    toml::from_str(text).map_err(|e| IngestError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_config(config: &ConfigFile) -> String {
    toml::to_string(config).expect("config serializes to TOML")
}

/// A validated instance together with the solver settings from its config.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub solver: SolverConfig,
}

pub fn load_instance(
    matrix_path: &Path,
    requests_path: &Path,
    config_path: &Path,
) -> Result<LoadedInstance, IngestError> {
    let config = load_config(config_path)?;
    let instance_config = config.instance.to_config()?;
    let matrix = load_cost_matrix(matrix_path, instance_config.depot_id)?;
    let requests = load_requests(requests_path)?;
    let instance = Instance::new(matrix, requests, instance_config)?;
    config.solver.validate(&instance)?;
    Ok(LoadedInstance {
        instance,
        solver: config.solver,
    })
}

/// Writes `matrix.csv`, `requests.toml` and `config.toml` into `dir`.
pub fn save_instance(
    dir: &Path,
    instance: &Instance,
    solver: &SolverConfig,
) -> Result<InstancePaths, IngestError> {
    std::fs::create_dir_all(dir).map_err(|source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let paths = InstancePaths::in_dir(dir);
    let write = |p: &Path, text: String| {
        std::fs::write(p, text).map_err(|source| IngestError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    write(&paths.matrix, write_cost_matrix(instance.matrix()))?;
    write(&paths.requests, write_requests(instance.requests()))?;
    write(
        &paths.config,
        write_config(&ConfigFile {
            instance: InstanceSection::from_config(instance.config()),
            solver: solver.clone(),
        }),
    )?;
    Ok(paths)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstancePaths {
    pub matrix: PathBuf,
    pub requests: PathBuf,
    pub config: PathBuf,
}

impl InstancePaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            matrix: dir.join("matrix.csv"),
            requests: dir.join("requests.toml"),
            config: dir.join("config.toml"),
        }
    }

    pub fn load(&self) -> Result<LoadedInstance, IngestError> {
        load_instance(&self.matrix, &self.requests, &self.config)
    }
}
