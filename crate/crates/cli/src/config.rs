//! Flag records and the flat config file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Every key a config file may carry.
const KNOWN_KEYS: &[&str] = &[
    "potential", "baseline", "k", "R", "rect", "tol", "out", "nx", "ny", "gamma-min", "gamma-max", "points", "alpha",
    "beta", "step", "threads", "example",
];

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct SpectrumArgs {
    /// Potential, e.g. `v1`, `hrp`, `w:[-1,1]:1`, `@record.json`.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Radius of the real search interval [0, R].
    #[arg(long = "R", alias = "radius")]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Complex search rectangle `re_min,re_max,im_min,im_max`.
    #[arg(long, allow_hyphen_values = true)]
    pub rect: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct CountCompareArgs {
    #[arg(long)]
    pub potential: Option<String>,
    /// Second potential; the report then includes the slope ratio.
    #[arg(long)]
    pub baseline: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "R", alias = "radius")]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct PhaseplotArgs {
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rect: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Output prefix; writes PREFIX.ppm and PREFIX.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct DeltaArgs {
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct TrigDensityArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Counting radius (default 10⁴).
    #[arg(long = "R", alias = "radius")]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Grid step (default min(π, π/β)/8).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct RecordArgs {
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
#[serde(default, rename_all = "kebab-case")]
pub struct ReproduceArgs {
    /// Example id: 2.1, 2.2, 2.3, 2.4 or 2.5.
    pub example: Option<String>,
    /// Output directory (default `reproduce-<id>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load(path: Option<&Path>) -> Result<toml::Table, Failure> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Failure::Usage(format!("config {}: {}", path.display(), e.message())))?;
    for (key, value) in &table {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Failure::Usage(format!("config: unknown key `{key}`")));
        }
        if value.is_table() || value.is_array() {
            return Err(Failure::Usage(format!("config: `{key}` must be a plain value")));
        }
    }
    Ok(table)
}

pub fn threads_from(file: &toml::Table) -> Result<Option<usize>, Failure> {
    match file.get("threads") {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .and_then(|i| usize::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| Failure::Usage("config: `threads` must be a non-negative integer".into())),
    }
}

/// Flags over file values.
pub fn resolve<A: Serialize + DeserializeOwned>(flags: A, file: &toml::Table) -> Result<A, Failure> {
    let mut merged = file.clone();
    merged.remove("threads");
    let over = toml::Table::try_from(&flags).map_err(|e| Failure::Usage(e.to_string()))?;
    merged.extend(over);
    // Integers in the file are accepted where floats are expected.
    let merged: toml::Table = merged.into_iter().map(|(k, v)| (k.clone(), widen(&k, v))).collect();
    merged.try_into().map_err(|e: toml::de::Error| Failure::Usage(format!("config: {}", e.message())))
}

fn widen(key: &str, v: toml::Value) -> toml::Value {
    const FLOAT_KEYS: &[&str] = &["k", "R", "tol", "gamma-min", "gamma-max", "alpha", "beta", "step"];
    match v {
        toml::Value::Integer(i) if FLOAT_KEYS.contains(&key) => toml::Value::Float(i as f64),
        other => other,
    }
}
