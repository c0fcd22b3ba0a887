use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plalam_cli::batch::{run_batch, BatchOptions};
use plalam_cli::config::{RunConfig, Seeds, TheoryConfig};
use plalam_cli::diagnose::run_diagnostics;
use plalam_cli::theory::run_theory;
use plalam_cli::CliError;

#[derive(Parser)]
#[command(name = "plalam", version, about = "Partition-search trajectory optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the configuration and PLALAM_OUTPUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BatchArgs {
    #[command(flatten)]
    common: Common,
    /// Seeds as `a,b,c` or `start..end`, overriding the configuration.
    #[arg(long)]
    seeds: Option<String>,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record wall-clock time per run.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured method on every seed.
    Run(BatchArgs),
    /// Run every method over the cp and sigma grid.
    Sweep(BatchArgs),
    /// Compare learned and random partitions of a finished batch.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seeds: Option<String>,
    },
    /// Run a bandit experiment.
    Theory {
        #[command(flatten)]
        common: Common,
    },
}

fn load_run_config(common: &Common, seeds: Option<&str>) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(s) = seeds {
        config.seeds = Seeds::parse(s)?;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn batch(args: &BatchArgs, sweep: bool) -> Result<(), CliError> {
    let config = load_run_config(&args.common, args.seeds.as_deref())?;
    let summary = run_batch(
        &config,
        BatchOptions {
            jobs: args.jobs,
            timing: args.timing,
            sweep,
        },
    )?;
    println!(
        "{} runs written to {} (config {})",
        summary.run_files,
        summary.dir.display(),
        &summary.config_hash[..12]
    );
    for r in &summary.rows {
        let success = r.success_rate.map(|s| format!("  success {:.3}", s)).unwrap_or_default();
        println!("{:<28} best {:.6} ± {:.6}{success}", r.method, r.mean_best, r.sem_best);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => batch(&args, false),
        Command::Sweep(args) => batch(&args, true),
        Command::Diagnose { common, seeds } => {
            let config = load_run_config(&common, seeds.as_deref())?;
            let diags = run_diagnostics(&config)?;
            let wins = diags.iter().filter(|d| d.comparison.learned_wins_both()).count();
            println!(
                "{} runs diagnosed; learned split better on both metrics in {wins}",
                diags.len()
            );
            Ok(())
        }
        Command::Theory { common } => {
            let mut config = TheoryConfig::load(&common.config)?;
            if let Some(out) = common.out {
                config.output_dir = out;
            }
            let summary = run_theory(&config)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
