//! Multi-seed batches of `(method, seed)` cells.

use std::path::{Path, PathBuf};
use std::time::Instant;

use plalam_core::partition::PartitionTree;
use plalam_core::stats::{mean, sem};
use plalam_core::{run_method, Method, MethodConfig, RunRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::{create_dir, fmt_opt, write_csv, write_json, CliError};

pub const AGGREGATE_COLUMNS: [&str; 8] = [
    "method",
    "env",
    "n_seeds",
    "mean_best",
    "sem_best",
    "success_rate",
    "sem_success",
    "wall_ms",
];

/// One configured method, labelled for file names and aggregate rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub label: String,
    pub config: MethodConfig,
}

/// Persisted result of one `(method, seed)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub config_hash: String,
    pub env: String,
    pub label: String,
    pub method: Method,
    pub seed: u64,
    pub best_value: f64,
    pub success: Option<bool>,
    pub rebuilds: usize,
    pub rejections: usize,
    pub forced_accepts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    pub record: RunRecord,
    /// Final partition tree of partition-search methods.
    pub tree: Option<PartitionTree>,
}

/// One row of `aggregate.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub method: String,
    pub env: String,
    pub n_seeds: usize,
    pub mean_best: f64,
    pub sem_best: f64,
    pub success_rate: Option<f64>,
    pub sem_success: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl AggregateRow {
    fn fields(&self) -> Vec<String> {
        vec![
            self.method.clone(),
            self.env.clone(),
            self.n_seeds.to_string(),
            fmt_opt(Some(self.mean_best)),
            fmt_opt(Some(self.sem_best)),
            fmt_opt(self.success_rate),
            fmt_opt(self.sem_success),
            fmt_opt(self.wall_ms),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchOptions {
    pub jobs: usize,
    /// Record wall-clock time; off by default so reruns are byte-identical.
    pub timing: bool,
    /// Expand every method over the configured `cp`/`sigma` grid.
    pub sweep: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            timing: false,
            sweep: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatchSummary {
    pub dir: PathBuf,
    pub config_hash: String,
    pub rows: Vec<AggregateRow>,
    pub run_files: usize,
}

/// Methods of the batch, expanded over the sweep grid when asked.
pub fn cells(config: &RunConfig, sweep: bool) -> Vec<Cell> {
    if !sweep {
        return config
            .methods
            .iter()
            .map(|m| Cell {
                label: m.method.name().to_string(),
                config: m.clone(),
            })
            .collect();
    }
    let grid = config.sweep.clone().unwrap_or_default();
    let mut out = Vec::new();
    for m in &config.methods {
        let cps: Vec<Option<f64>> = if m.method.is_partition_search() {
            grid.cp.iter().map(|&c| Some(c)).collect()
        } else {
            vec![None]
        };
        for cp in cps {
            for &sigma in &grid.sigma {
                let mut c = m.clone().with_sigma(sigma);
                let label = match cp {
                    Some(cp) => {
                        c.budget.cp = cp;
                        format!("{}_cp{cp}_sigma{sigma}", m.method.name())
                    }
                    None => format!("{}_sigma{sigma}", m.method.name()),
                };
                out.push(Cell { label, config: c });
            }
        }
    }
    out
}

/// Directory a batch writes to; sweeps go to a `sweep` subdirectory.
pub fn batch_dir(config: &RunConfig, sweep: bool) -> PathBuf {
    if sweep {
        config.output_dir.join("sweep")
    } else {
        config.output_dir.clone()
    }
}

pub fn run_file_name(label: &str, seed: u64) -> String {
    format!("{label}_seed{seed}.json")
}

fn run_cell(config: &RunConfig, hash: &str, cell: &Cell, seed: u64, timing: bool) -> Result<RunFile, CliError> {
    let start = Instant::now();
    let run = run_method(&config.environment, &cell.config, seed)?;
    let wall_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let best_value = run
        .record
        .best_value()
        .ok_or_else(|| CliError::Config("run produced no samples".into()))?;
    Ok(RunFile {
        config_hash: hash.to_string(),
        env: config.environment.name().to_string(),
        label: cell.label.clone(),
        method: cell.config.method,
        seed,
        best_value,
        success: run.success,
        rebuilds: run.rebuilds,
        rejections: run.rejections,
        forced_accepts: run.forced_accepts,
        wall_ms,
        record: run.record,
        tree: run.tree,
    })
}

/// Reads the `# config_hash=` header of an existing output file.
pub fn read_hash_header(path: &Path) -> Result<Option<String>, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# config_hash="))
            .map(str::to_string)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::io(path, e)),
    }
}

/// Runs every cell, writes one JSON file per cell and then the aggregate.
pub fn run_batch(config: &RunConfig, options: BatchOptions) -> Result<BatchSummary, CliError> {
    config.validate()?;
    let hash = config.hash();
    let dir = batch_dir(config, options.sweep);
    let runs_dir = dir.join("runs");
    create_dir(&runs_dir)?;
    let config_path = dir.join("config.toml");
    if let Some(old) = read_hash_header(&config_path)? {
        if old != hash {
            return Err(CliError::HashMismatch(format!(
                "{} already holds results of config {old}",
                dir.display()
            )));
        }
    }
    std::fs::write(&config_path, format!("# config_hash={hash}\n{}", config.to_toml()?))
        .map_err(|e| CliError::io(&config_path, e))?;

    let cells = cells(config, options.sweep);
    let seeds = config.seeds.to_vec();
    let jobs: Vec<(&Cell, u64)> = cells.iter().flat_map(|c| seeds.iter().map(move |&s| (c, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter().try_for_each(|&(cell, seed)| {
            let file = run_cell(config, &hash, cell, seed, options.timing)?;
            write_json(&runs_dir.join(run_file_name(&cell.label, seed)), &file)
        })
    })?;

    let labels: Vec<String> = cells.iter().map(|c| c.label.clone()).collect();
    let files = load_runs(&runs_dir, &hash)?;
    let rows = aggregate(&files, &labels);
    write_csv(
        &dir.join("aggregate.csv"),
        &hash,
        &AGGREGATE_COLUMNS,
        &rows.iter().map(AggregateRow::fields).collect::<Vec<_>>(),
    )?;
    Ok(BatchSummary {
        dir,
        config_hash: hash,
        rows,
        run_files: files.len(),
    })
}

/// Loads every run file in `runs_dir`, sorted by file name. A file written
/// under another configuration hash is an error.
pub fn load_runs(runs_dir: &Path, hash: &str) -> Result<Vec<RunFile>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(runs_dir)
        .map_err(|e| CliError::io(runs_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            let file: RunFile = serde_json::from_str(&text).map_err(|e| CliError::format(p, e))?;
            if file.config_hash != hash {
                return Err(CliError::HashMismatch(format!(
                    "{} has config hash {}, expected {hash}",
                    p.display(),
                    file.config_hash
                )));
            }
            Ok(file)
        })
        .collect()
}

/// Aggregate rows in `labels` order; runs are ordered by seed within a row.
pub fn aggregate(files: &[RunFile], labels: &[String]) -> Vec<AggregateRow> {
    labels
        .iter()
        .filter_map(|label| {
            let mut runs: Vec<&RunFile> = files.iter().filter(|f| &f.label == label).collect();
            if runs.is_empty() {
                return None;
            }
            runs.sort_by_key(|f| f.seed);
            let best: Vec<f64> = runs.iter().map(|f| f.best_value).collect();
            let success: Option<Vec<f64>> = runs
                .iter()
                .map(|f| f.success.map(|s| if s { 1.0 } else { 0.0 }))
                .collect();
            let wall: Option<Vec<f64>> = runs.iter().map(|f| f.wall_ms).collect();
            Some(AggregateRow {
                method: label.clone(),
                env: runs[0].env.clone(),
                n_seeds: runs.len(),
                mean_best: mean(&best),
                sem_best: sem(&best),
                success_rate: success.as_deref().map(mean),
                sem_success: success.as_deref().map(sem),
                wall_ms: wall.as_deref().map(mean),
            })
        })
        .collect()
}
