//! Experiment configuration files.
//!
//! Batch runs are described by a TOML file:
//!
//! ```toml
//! output_dir = "out/twin"
//! seeds = { start = 0, count = 8 }   # or seeds = [0, 1, 2]
//!
//! [environment]
//! name = "deceptive_twin"
//! dim = 2
//!
//! [[methods]]
//! method = "plalam"
//! sigma = 1.0
//! budget = { total_queries = 500, n_init = 50, n_par = 50, n_thres = 10, cp = 2.0 }
//!
//! [[methods]]
//! method = "cem"
//! ```
//!
//! Unknown keys are rejected at every level. The `PLALAM_OUTPUT_DIR`
//! environment variable replaces `output_dir`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use plalam_core::envs::EnvSpec;
use plalam_core::theorylab::{DeltaSchedule, RegionCdfSpec};
use plalam_core::MethodConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const OUTPUT_DIR_ENV: &str = "PLALAM_OUTPUT_DIR";

/// Seeds as an explicit list or a consecutive range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range(SeedRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

impl Seeds {
    pub fn to_vec(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range(r) => (r.start..r.start + r.count).collect(),
        }
    }

    /// Parses `--seeds`: `a,b,c`, `start..end` (end exclusive) or a single
    /// seed.
    pub fn parse(s: &str) -> Result<Seeds, CliError> {
        let bad = || CliError::Config(format!("cannot parse seeds '{s}'"));
        if let Some((a, b)) = s.split_once("..") {
            let start: u64 = a.trim().parse().map_err(|_| bad())?;
            let end: u64 = b.trim().parse().map_err(|_| bad())?;
            if end <= start {
                return Err(bad());
            }
            return Ok(Seeds::Range(SeedRange {
                start,
                count: end - start,
            }));
        }
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<Vec<u64>, _>>()
            .map(Seeds::List)
    }
}

/// Grid for the `sweep` command; every method is run at every `sigma`,
/// partition-search methods additionally at every `cp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default = "default_cp_grid")]
    pub cp: Vec<f64>,
    #[serde(default = "default_sigma_grid")]
    pub sigma: Vec<f64>,
}

fn default_cp_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}

fn default_sigma_grid() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            cp: default_cp_grid(),
            sigma: default_sigma_grid(),
        }
    }
}

/// Settings of the `diagnose` command.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Random splits averaged per tree node.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Fixed dilution constant of the `z_k` series.
    #[serde(default = "default_zk_c")]
    pub zk_c: f64,
}

fn default_trials() -> usize {
    20
}

fn default_zk_c() -> f64 {
    1.0
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            zk_c: default_zk_c(),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A batch of `(method, seed)` runs on one environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub seeds: Seeds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    pub environment: EnvSpec,
    pub methods: Vec<MethodConfig>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut c = Self::from_toml(&text)?;
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            c.output_dir = PathBuf::from(dir);
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Config("at least one method is required".into()));
        }
        let seeds = self.seeds.to_vec();
        if seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        if seeds.iter().collect::<HashSet<_>>().len() != seeds.len() {
            return Err(CliError::Config("seeds must be distinct".into()));
        }
        let mut names = HashSet::new();
        for m in &self.methods {
            if !names.insert(m.method) {
                return Err(CliError::Config(format!("method '{}' listed twice", m.method.name())));
            }
            m.budget.validate().map_err(|e| CliError::Config(e.to_string()))?;
            if !(m.sigma > 0.0) {
                return Err(CliError::Config("sigma must be positive".into()));
            }
        }
        if let Some(g) = &self.sweep {
            if g.cp.is_empty() || g.sigma.is_empty() || g.cp.iter().chain(&g.sigma).any(|v| !(*v > 0.0)) {
                return Err(CliError::Config("sweep grids must be non-empty and positive".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the configuration with `output_dir` blanked, so the same
    /// experiment written to two places shares a hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        hash_json(&c)
    }
}

fn hash_json<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serializes");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

/// Bandit experiments of the `theory` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TheoryExperiment {
    /// Mean final regret on a geometric grid of horizons.
    RegretCurve {
        regions: Vec<RegionCdfSpec>,
        t_min: usize,
        t_max: usize,
        points: usize,
        runs: usize,
        delta: DeltaSchedule,
    },
    /// Unsplit parent against an informed and a random split.
    Split {
        parent: RegionCdfSpec,
        good: RegionCdfSpec,
        bad: RegionCdfSpec,
        t: usize,
        runs: usize,
        delta: DeltaSchedule,
    },
    /// The empirical-max bound on a grid of confidence levels and sample
    /// counts.
    Fbound {
        regions: Vec<RegionCdfSpec>,
        deltas: Vec<f64>,
        j_max: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub experiment: TheoryExperiment,
}

impl TheoryConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: TheoryConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for r in c.regions() {
            r.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut c = Self::from_toml(&text)?;
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            c.output_dir = PathBuf::from(dir);
        }
        Ok(c)
    }

    fn regions(&self) -> Vec<RegionCdfSpec> {
        match &self.experiment {
            TheoryExperiment::RegretCurve { regions, .. } | TheoryExperiment::Fbound { regions, .. } => {
                regions.clone()
            }
            TheoryExperiment::Split { parent, good, bad, .. } => vec![*parent, *good, *bad],
        }
    }

    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        hash_json(&c)
    }
}
