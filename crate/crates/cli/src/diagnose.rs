//! Partition-quality and dilution diagnostics over the persisted trees of a
//! finished batch.
//!
//! Writes three files next to `aggregate.csv`:
//!
//! - `partition_nodes.csv`: `method, seed, node, depth, n, n_good, learned_l, random_l, learned_c, random_c`
//! - `partition_summary.csv`: `method, seed, n_nodes, frac_l, frac_c, mean_learned_l, mean_random_l, mean_learned_c, mean_random_c, learned_wins_both`
//! - `zk_series.csv`: `method, seed, interval, end_query, z_k`

use plalam_core::diagnostics::{compare_random_partition, zk_series, PartitionComparison};
use plalam_core::rng::seeded_stream;

use crate::batch::{load_runs, RunFile};
use crate::config::RunConfig;
use crate::{fmt_opt, write_csv, CliError};

/// Random stream used for the random-split baseline of each run.
pub const DIAGNOSTICS_STREAM: u64 = 2;

pub const NODE_COLUMNS: [&str; 10] = [
    "method", "seed", "node", "depth", "n", "n_good", "learned_l", "random_l", "learned_c", "random_c",
];

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "method",
    "seed",
    "n_nodes",
    "frac_l",
    "frac_c",
    "mean_learned_l",
    "mean_random_l",
    "mean_learned_c",
    "mean_random_c",
    "learned_wins_both",
];

pub const ZK_COLUMNS: [&str; 5] = ["method", "seed", "interval", "end_query", "z_k"];

#[derive(Clone, Debug)]
pub struct RunDiagnostics {
    pub label: String,
    pub seed: u64,
    pub comparison: PartitionComparison,
    pub zk: Vec<plalam_core::diagnostics::ZkPoint>,
}

fn f(v: f64) -> String {
    fmt_opt(Some(v))
}

/// Diagnoses one persisted partition-search run.
pub fn diagnose_run(config: &RunConfig, file: &RunFile) -> Result<RunDiagnostics, CliError> {
    let tree = file.tree.as_ref().ok_or_else(|| {
        CliError::MissingTrees(format!("run {} seed {} has no tree", file.label, file.seed))
    })?;
    let budget = config
        .methods
        .iter()
        .find(|m| m.method == file.method)
        .map(|m| m.budget)
        .ok_or_else(|| CliError::Config(format!("method {} not in config", file.method.name())))?;
    let mut rng = seeded_stream(file.seed, DIAGNOSTICS_STREAM);
    let comparison = compare_random_partition(tree, &mut rng, config.diagnostics.trials)?;
    let values: Vec<f64> = file.record.samples.iter().map(|s| s.value).collect();
    let zk = zk_series(&values, budget.n_init, budget.n_par, config.diagnostics.zk_c, tree.dim)?;
    Ok(RunDiagnostics {
        label: file.label.clone(),
        seed: file.seed,
        comparison,
        zk,
    })
}

/// Reads the batch's run files, diagnoses every partition-search run and
/// writes the three CSV files.
pub fn run_diagnostics(config: &RunConfig) -> Result<Vec<RunDiagnostics>, CliError> {
    config.validate()?;
    let hash = config.hash();
    let runs_dir = config.output_dir.join("runs");
    if !runs_dir.is_dir() {
        return Err(CliError::MissingTrees(format!("{} does not exist", runs_dir.display())));
    }
    let files: Vec<RunFile> = load_runs(&runs_dir, &hash)?
        .into_iter()
        .filter(|f| f.method.is_partition_search())
        .collect();
    if files.is_empty() {
        return Err(CliError::MissingTrees(format!(
            "no partition-search runs in {}",
            runs_dir.display()
        )));
    }
    let mut out: Vec<RunDiagnostics> = files.iter().map(|f| diagnose_run(config, f)).collect::<Result<_, _>>()?;
    let order: Vec<_> = config.methods.iter().map(|m| m.method.name()).collect();
    out.sort_by_key(|d| (order.iter().position(|n| *n == d.label), d.seed));

    let mut nodes = Vec::new();
    let mut summary = Vec::new();
    let mut zk = Vec::new();
    for d in &out {
        let c = &d.comparison;
        for n in &c.nodes {
            nodes.push(vec![
                d.label.clone(),
                d.seed.to_string(),
                n.node.to_string(),
                n.depth.to_string(),
                n.n.to_string(),
                n.n_good.to_string(),
                f(n.learned_l),
                f(n.random_l),
                f(n.learned_c),
                f(n.random_c),
            ]);
        }
        summary.push(vec![
            d.label.clone(),
            d.seed.to_string(),
            c.nodes.len().to_string(),
            f(c.frac_l),
            f(c.frac_c),
            f(c.mean_learned_l),
            f(c.mean_random_l),
            f(c.mean_learned_c),
            f(c.mean_random_c),
            c.learned_wins_both().to_string(),
        ]);
        for p in &d.zk {
            zk.push(vec![
                d.label.clone(),
                d.seed.to_string(),
                p.interval.to_string(),
                p.end_query.to_string(),
                f(p.z_k),
            ]);
        }
    }
    let dir = &config.output_dir;
    write_csv(&dir.join("partition_nodes.csv"), &hash, &NODE_COLUMNS, &nodes)?;
    write_csv(&dir.join("partition_summary.csv"), &hash, &SUMMARY_COLUMNS, &summary)?;
    write_csv(&dir.join("zk_series.csv"), &hash, &ZK_COLUMNS, &zk)?;
    Ok(out)
}
