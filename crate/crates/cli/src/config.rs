//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "dims": [{ "size": 1, "p_table": "ehrenfest" }, { "size": 3, "p_table": [0.3, 0.6] }],
//!   "select_prob": "uniform",
//!   "time": [0.5, 1.0],
//!   "initial": [0, 0],
//!   "oracle_cap": 4096,
//!   "output": { "path": "out.csv", "format": "csv" },
//!   "d_sweep": [4, 16, 64],
//!   "repetitions": 5
//! }
//! ```

use std::path::{Path, PathBuf};

use bdqw_core::{DimensionSpec, MultiChainSpec, DEFAULT_ORACLE_CAP};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PTable {
    Generator(String),
    Table(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimConfig {
    pub size: usize,
    pub p_table: PTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SelectProb {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Times {
    Single(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dims: Vec<DimConfig>,
    #[serde(default = "uniform")]
    pub select_prob: SelectProb,
    pub time: Times,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_sweep: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
}

fn uniform() -> SelectProb {
    SelectProb::Named("uniform".to_owned())
}

impl ExperimentConfig {
    /// Parses JSON; errors name the offending path and the line/column.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.is_empty() {
                CliError::Config(inner.to_string())
            } else {
                CliError::Config(format!("field `{path}`: {inner}"))
            }
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_spec(&self) -> CliResult<MultiChainSpec> {
        let dims = self
            .dims
            .iter()
            .enumerate()
            .map(|(i, d)| dimension_spec(d).map_err(|msg| CliError::Config(format!("dims[{i}]: {msg}"))))
            .collect::<CliResult<Vec<_>>>()?;
        if dims.is_empty() {
            return Err(CliError::Config("dims: at least one dimension is required".into()));
        }
        let select = match &self.select_prob {
            SelectProb::Named(name) if name == "uniform" => vec![1.0 / dims.len() as f64; dims.len()],
            SelectProb::Named(name) => {
                return Err(CliError::Config(format!(
                    "select_prob: unknown value \"{name}\" (expected \"uniform\" or a list)"
                )))
            }
            SelectProb::Explicit(q) => q.clone(),
        };
        MultiChainSpec::new(dims, select).map_err(|e| CliError::from_core("select_prob", e))
    }

    pub fn times(&self) -> CliResult<Vec<f64>> {
        let times = match &self.time {
            Times::Single(t) => vec![*t],
            Times::List(ts) => ts.clone(),
        };
        validate_times(&times, "time")?;
        Ok(times)
    }

    /// Start position; all zeros when omitted.
    pub fn initial(&self, spec: &MultiChainSpec) -> CliResult<Vec<usize>> {
        let initial = self.initial.clone().unwrap_or_else(|| vec![0; spec.num_dims()]);
        spec.space()
            .check_index(&initial)
            .map_err(|e| CliError::from_core("initial", e))?;
        Ok(initial)
    }

    /// Normalized copy: explicit tables, explicit selection probabilities,
    /// times as a list.
    pub fn normalized(&self) -> CliResult<Self> {
        let spec = self.to_spec()?;
        let mut out = self.clone();
        out.dims = spec
            .dims()
            .iter()
            .map(|d| DimConfig {
                size: d.size(),
                p_table: PTable::Table(d.decrease_prob().to_vec()),
            })
            .collect();
        out.select_prob = SelectProb::Explicit(spec.select_prob().to_vec());
        out.time = Times::List(self.times()?);
        Ok(out)
    }
}

pub fn validate_times(times: &[f64], field: &str) -> CliResult<()> {
    if times.is_empty() {
        return Err(CliError::Config(format!("{field}: at least one time value is required")));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(CliError::Config(format!("{field}: time value {t} is not finite")));
    }
    Ok(())
}

fn dimension_spec(d: &DimConfig) -> Result<DimensionSpec, String> {
    match &d.p_table {
        PTable::Generator(name) if name == "ehrenfest" => {
            DimensionSpec::ehrenfest(d.size).map_err(|e| e.to_string())
        }
        PTable::Generator(name) => Err(format!(
            "unknown p_table generator \"{name}\" (expected \"ehrenfest\" or a list)"
        )),
        PTable::Table(t) => DimensionSpec::new(d.size, t.clone()).map_err(|e| e.to_string()),
    }
}

/// Oracle cap precedence: explicit flag (or `BDQW_ORACLE_CAP`, which clap
/// folds into the flag), then the config file, then the built-in default.
pub fn resolve_cap(flag: Option<usize>, config: &ExperimentConfig) -> usize {
    flag.or(config.oracle_cap).unwrap_or(DEFAULT_ORACLE_CAP)
}
