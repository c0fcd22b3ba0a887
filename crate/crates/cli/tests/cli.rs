use std::path::Path;
use std::process::{Command, Output};

use plalam_cli::batch::RunFile;
use plalam_core::stats::{mean, sem};

const TWIN: &str = r#"
seeds = [0, 1, 2]

[environment]
name = "deceptive_twin"
dim = 2

[[methods]]
method = "plalam"
budget = { total_queries = 120, n_init = 20, n_par = 20, n_thres = 10, cp = 2.0 }

[[methods]]
method = "cem"
budget = { total_queries = 120, n_init = 20, n_par = 20, n_thres = 10, cp = 2.0 }
"#;

const BUDGET: &str = "budget = { total_queries = 120, n_init = 20, n_par = 20, n_thres = 10, cp = 2.0 }";

/// Config text for `env` with one `[[methods]]` block per method.
fn config(env: &str, methods: &[&str]) -> String {
    let mut text = format!("seeds = [0, 1, 2]\n\n[environment]\nname = \"{env}\"\n");
    for m in methods {
        text += &format!("\n[[methods]]\nmethod = \"{m}\"\n{BUDGET}\n");
    }
    text
}

fn plalam(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plalam"))
        .args(args)
        .current_dir(dir)
        .env_remove("PLALAM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_config(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

/// Header-keyed rows of a CSV written with a `# config_hash=` first line.
fn read_csv(path: &Path) -> (String, Vec<std::collections::HashMap<String, String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (first, rest) = text.split_once('\n').unwrap();
    let hash = first.strip_prefix("# config_hash=").expect("hash line").to_string();
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    let headers = r.headers().unwrap().clone();
    let rows = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().map(str::to_string).zip(rec.iter().map(str::to_string)).collect()
        })
        .collect();
    (hash, rows)
}

fn run_files(dir: &Path) -> Vec<RunFile> {
    let mut paths: Vec<_> = std::fs::read_dir(dir.join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

#[test]
fn batch_writes_runs_and_reproducible_aggregate() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "twin.toml", TWIN);
    ok(&plalam(&["run", "--config", "twin.toml", "--out", "a"], tmp.path()));
    let dir = tmp.path().join("a");
    let files = run_files(&dir);
    assert_eq!(files.len(), 6);
    let (hash, rows) = read_csv(&dir.join("aggregate.csv"));
    assert_eq!(rows.len(), 2);
    assert!(files.iter().all(|f| f.config_hash == hash));

    for row in &rows {
        let best: Vec<f64> = files
            .iter()
            .filter(|f| f.label == row["method"])
            .map(|f| f.best_value)
            .collect();
        assert_eq!(best.len(), 3);
        assert_eq!(row["n_seeds"], "3");
        assert_eq!(row["env"], "deceptive_twin");
        assert_eq!(row["mean_best"].parse::<f64>().unwrap(), mean(&best));
        assert_eq!(row["sem_best"].parse::<f64>().unwrap(), sem(&best));
        assert_eq!(row["wall_ms"], "");
    }
    let trees = files.iter().filter(|f| f.tree.is_some()).count();
    assert_eq!(trees, 3);

    let first = std::fs::read(dir.join("aggregate.csv")).unwrap();
    ok(&plalam(&["run", "--config", "twin.toml", "--out", "a"], tmp.path()));
    assert_eq!(first, std::fs::read(dir.join("aggregate.csv")).unwrap());

    // Parallel cells produce the same results.
    ok(&plalam(&["run", "--config", "twin.toml", "--out", "b", "--jobs", "3"], tmp.path()));
    assert_eq!(first, std::fs::read(tmp.path().join("b/aggregate.csv")).unwrap());
}

#[test]
fn aggregate_header_and_column_order() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "twin.toml", TWIN);
    ok(&plalam(&["run", "--config", "twin.toml", "--out", "o", "--seeds", "4", "--timing"], tmp.path()));
    let text = std::fs::read_to_string(tmp.path().join("o/aggregate.csv")).unwrap();
    let header = text.lines().nth(1).unwrap();
    assert_eq!(
        header,
        "method,env,n_seeds,mean_best,sem_best,success_rate,sem_success,wall_ms"
    );
    let (_, rows) = read_csv(&tmp.path().join("o/aggregate.csv"));
    assert!(rows.iter().all(|r| r["n_seeds"] == "1" && r["wall_ms"].parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn invalid_configs_fail_with_message() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "typo.toml", &TWIN.replace("seeds =", "seed_list ="));
    let out = plalam(&["run", "--config", "typo.toml"], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid configuration"));

    write_config(tmp.path(), "budget.toml", &TWIN.replace("n_init = 20", "n_init = 500"));
    assert!(!plalam(&["run", "--config", "budget.toml"], tmp.path()).status.success());
    assert!(!plalam(&["run", "--config", "missing.toml"], tmp.path()).status.success());
}

#[test]
fn outputs_of_different_configs_are_never_mixed() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "twin.toml", TWIN);
    ok(&plalam(&["run", "--config", "twin.toml", "--out", "o"], tmp.path()));
    let out = plalam(&["run", "--config", "twin.toml", "--out", "o", "--seeds", "7,8"], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mixed outputs"));
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "twin.toml", &format!("output_dir = \"ignored\"\n{TWIN}"));
    let out = Command::new(env!("CARGO_BIN_EXE_plalam"))
        .args(["run", "--config", "twin.toml", "--seeds", "0"])
        .current_dir(tmp.path())
        .env("PLALAM_OUTPUT_DIR", "from_env")
        .output()
        .unwrap();
    ok(&out);
    assert!(tmp.path().join("from_env/aggregate.csv").exists());
    assert!(!tmp.path().join("ignored").exists());
}

#[test]
fn diagnose_tables_are_consistent() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "twin.toml", TWIN);
    ok(&plalam(&["run", "--config", "twin.toml", "--out", "o"], tmp.path()));
    ok(&plalam(&["diagnose", "--config", "twin.toml", "--out", "o"], tmp.path()));
    let dir = tmp.path().join("o");
    let (h1, summary) = read_csv(&dir.join("partition_summary.csv"));
    let (h2, nodes) = read_csv(&dir.join("partition_nodes.csv"));
    let (h3, zk) = read_csv(&dir.join("zk_series.csv"));
    assert!(h1 == h2 && h2 == h3);
    assert_eq!(summary.len(), 3);
    // Five full rebuild intervals after the initial draws.
    assert_eq!(zk.len(), 3 * 5);
    for s in &summary {
        let own: Vec<_> = nodes.iter().filter(|n| n["seed"] == s["seed"]).collect();
        assert_eq!(own.len().to_string(), s["n_nodes"]);
        let f = |k: &str| -> f64 { own.iter().map(|n| n[k].parse::<f64>().unwrap()).sum::<f64>() };
        let wins_l = own
            .iter()
            .filter(|n| n["learned_l"].parse::<f64>().unwrap() < n["random_l"].parse::<f64>().unwrap())
            .count() as f64;
        if !own.is_empty() {
            let frac_l: f64 = s["frac_l"].parse().unwrap();
            assert!((frac_l - wins_l / own.len() as f64).abs() < 1e-12);
            let mean_l: f64 = s["mean_learned_l"].parse().unwrap();
            assert!((mean_l - f("learned_l") / own.len() as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn constant_world_has_zero_zk() {
    let tmp = tempfile::tempdir().unwrap();
    let text = &config("constant", &["plalam"]);
    write_config(tmp.path(), "flat.toml", text);
    ok(&plalam(&["run", "--config", "flat.toml", "--out", "o"], tmp.path()));
    ok(&plalam(&["diagnose", "--config", "flat.toml", "--out", "o"], tmp.path()));
    let (_, zk) = read_csv(&tmp.path().join("o/zk_series.csv"));
    assert!(!zk.is_empty());
    assert!(zk.iter().all(|r| r["z_k"].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn diagnose_without_trees_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cem_only = config("deceptive_twin", &["cem"]);
    write_config(tmp.path(), "cem.toml", &cem_only);
    assert!(!plalam(&["diagnose", "--config", "cem.toml", "--out", "o"], tmp.path()).status.success());
    ok(&plalam(&["run", "--config", "cem.toml", "--out", "o"], tmp.path()));
    let out = plalam(&["diagnose", "--config", "cem.toml", "--out", "o"], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing tree snapshots"));
}

#[test]
fn sweep_labels_each_grid_point() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("{TWIN}\n[sweep]\ncp = [1.0, 4.0]\nsigma = [2.0]\n").replace("seeds = [0, 1, 2]", "seeds = [0]");
    write_config(tmp.path(), "sweep.toml", &text);
    ok(&plalam(&["sweep", "--config", "sweep.toml", "--out", "o"], tmp.path()));
    let (_, rows) = read_csv(&tmp.path().join("o/sweep/aggregate.csv"));
    let labels: Vec<&str> = rows.iter().map(|r| r["method"].as_str()).collect();
    assert_eq!(labels, ["plalam_cp1_sigma2", "plalam_cp4_sigma2", "cem_sigma2"]);
}

#[test]
fn theory_experiments_write_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let region = |g: f64, c: f64| format!("{{ g_star = {g}, d = 2, family = {{ family = \"power_law\", c = {c} }} }}");
    write_config(
        tmp.path(),
        "split.toml",
        &format!(
            "seed = 1\n[experiment]\nkind = \"split\"\nt = 200\nruns = 6\ndelta = {{ kind = \"inverse_cubic\", eta = 1.0 }}\nparent = {}\ngood = {}\nbad = {}\n",
            region(1.0, 1.0),
            region(1.0, 0.3),
            region(0.5, 0.3)
        ),
    );
    ok(&plalam(&["theory", "--config", "split.toml", "--out", "s"], tmp.path()));
    let (_, rows) = read_csv(&tmp.path().join("s/split.csv"));
    assert_eq!(rows.len(), 6);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("s/summary.json")).unwrap()).unwrap();
    let learned: Vec<f64> = rows.iter().map(|r| r["learned"].parse().unwrap()).collect();
    assert!((summary["mean_learned"].as_f64().unwrap() - mean(&learned)).abs() < 1e-9);

    write_config(
        tmp.path(),
        "curve.toml",
        &format!(
            "[experiment]\nkind = \"regret_curve\"\nregions = [{}]\nt_min = 10\nt_max = 1000\npoints = 5\nruns = 4\ndelta = {{ kind = \"inverse_cubic\", eta = 1.0 }}\n",
            region(1.0, 1.0)
        ),
    );
    ok(&plalam(&["theory", "--config", "curve.toml", "--out", "c"], tmp.path()));
    let (_, rows) = read_csv(&tmp.path().join("c/regret_curve.csv"));
    assert_eq!(rows.len(), 5);

    write_config(
        tmp.path(),
        "fb.toml",
        &format!(
            "[experiment]\nkind = \"fbound\"\nregions = [{}]\ndeltas = [0.1, 0.5]\nj_max = 10\n",
            region(1.0, 1.0)
        ),
    );
    ok(&plalam(&["theory", "--config", "fb.toml", "--out", "f"], tmp.path()));
    let (_, rows) = read_csv(&tmp.path().join("f/fbound.csv"));
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r["holds"] == "true"));
}
