//! Loading an instance directory with `key=value` overrides applied to its
//! config file before parsing.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use vrpsd_core::ingest::{
    load_cost_matrix, load_requests, parse_config, InstancePaths, LoadedInstance,
};
use vrpsd_core::model::Instance;

/// Loads `matrix.csv`, `requests.toml` and `config.toml` from `dir`.
pub fn load_dir(dir: &Path, overrides: &[String]) -> anyhow::Result<LoadedInstance> {
    load_paths(&InstancePaths::in_dir(dir), overrides)
}

pub fn load_paths(paths: &InstancePaths, overrides: &[String]) -> anyhow::Result<LoadedInstance> {
    let text = std::fs::read_to_string(&paths.config)
        .with_context(|| format!("reading {}", paths.config.display()))?;
    let text = apply_overrides(&text, overrides)
        .with_context(|| format!("overriding {}", paths.config.display()))?;
    let config = parse_config(&text, &paths.config)?;
    let instance_config = config.instance.to_config()?;
    let matrix = load_cost_matrix(&paths.matrix, instance_config.depot_id)?;
    let requests = load_requests(&paths.requests)?;
    let instance =
        Instance::new(matrix, requests, instance_config).context("instance files disagree")?;
    config
        .solver
        .validate(&instance)
        .with_context(|| format!("invalid settings in {}", paths.config.display()))?;
    Ok(LoadedInstance {
        instance,
        solver: config.solver,
    })
}

/// Sets dotted keys such as `weights.setup_per_shift=900` in a TOML
/// document. Values parse as TOML and fall back to plain strings.
pub fn apply_overrides(text: &str, overrides: &[String]) -> anyhow::Result<String> {
    if overrides.is_empty() {
        return Ok(text.to_string());
    }
    let mut doc: toml::Table = toml::from_str(text)?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("override {item:?} is not key=value"))?;
        let value = parse_value(raw.trim());
        let parts: Vec<&str> = key.trim().split('.').collect();
        let (last, path) = parts.split_last().expect("split yields at least one part");
        let mut table = &mut doc;
        for part in path {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = match entry {
                toml::Value::Table(t) => t,
                _ => bail!("override {key:?}: {part:?} is not a table"),
            };
        }
        table.insert(last.to_string(), value);
    }
    Ok(toml::to_string(&doc)?)
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
