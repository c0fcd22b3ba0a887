//! Experiment orchestration for the `plalam` binary: configuration files,
//! multi-seed batches, partition diagnostics and bandit experiments.
//!
//! Output layout of a batch in `output_dir`:
//!
//! - `config.toml`: the resolved configuration.
//! - `runs/<label>_seed<seed>.json`: one [`batch::RunFile`] per cell.
//! - `aggregate.csv`: one row per method label with columns
//!   `method, env, n_seeds, mean_best, sem_best, success_rate, sem_success, wall_ms`.
//!
//! Every file starts with (or, for JSON, contains) the configuration hash.

pub mod batch;
pub mod config;
pub mod diagnose;
pub mod theory;

use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("mixed outputs: {0}")]
    HashMismatch(String),
    #[error("missing tree snapshots: {0}")]
    MissingTrees(String),
    #[error(transparent)]
    Core(#[from] plalam_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl ToString) -> Self {
        CliError::Format {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }
}

/// Shortest round-trip decimal form; blank for `None`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Creates `path` with a `# config_hash=` line followed by CSV rows.
pub(crate) fn write_csv(path: &Path, hash: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    use std::io::Write;
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "# config_hash={hash}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(|e| CliError::format(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::format(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::format(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
