//! Bandit experiments on synthetic regions.
//!
//! | experiment     | CSV                                               | summary.json                       |
//! |----------------|---------------------------------------------------|------------------------------------|
//! | `regret_curve` | `regret_curve.csv`: `t, mean_regret, sem_regret`  | log-log slope over the upper half  |
//! | `split`        | `split.csv`: `run, unsplit, learned, random`      | means and one-sided Welch p-values |
//! | `fbound`       | `fbound.csv`: `region, delta, j, lhs, rhs, holds` | count of violations                |

use plalam_core::rng::seeded_rng;
use plalam_core::stats::{mean, ols, sem, welch_less};
use plalam_core::theorylab::{check_fbound, geometric_grid, mean_regret, split_experiment};
use serde_json::json;

use crate::config::{TheoryConfig, TheoryExperiment};
use crate::{create_dir, fmt_opt, write_csv, write_json, CliError};

fn f(v: f64) -> String {
    fmt_opt(Some(v))
}

/// Runs the configured experiment and returns the summary it wrote.
pub fn run_theory(config: &TheoryConfig) -> Result<serde_json::Value, CliError> {
    let hash = config.hash();
    let dir = &config.output_dir;
    create_dir(dir)?;
    let mut rng = seeded_rng(config.seed);
    let summary = match &config.experiment {
        TheoryExperiment::RegretCurve {
            regions,
            t_min,
            t_max,
            points,
            runs,
            delta,
        } => {
            let grid = geometric_grid(*t_min, *t_max, *points);
            let mut rows = Vec::new();
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for &t in &grid {
                let r = mean_regret(regions, t, *delta, &mut rng, *runs)?;
                let m = mean(&r);
                rows.push(vec![t.to_string(), f(m), f(sem(&r))]);
                xs.push((t as f64).ln());
                ys.push(m.ln());
            }
            write_csv(&dir.join("regret_curve.csv"), &hash, &["t", "mean_regret", "sem_regret"], &rows)?;
            let half = xs.len() / 2;
            let slope = ols(&xs[half..], &ys[half..]).ok().map(|l| l.slope);
            json!({ "config_hash": hash, "horizons": grid, "slope_upper_half": slope })
        }
        TheoryExperiment::Split {
            parent,
            good,
            bad,
            t,
            runs,
            delta,
        } => {
            let out = split_experiment(parent, good, bad, *t, *delta, &mut rng, *runs)?;
            let rows: Vec<Vec<String>> = (0..*runs)
                .map(|i| vec![i.to_string(), f(out.unsplit[i]), f(out.learned[i]), f(out.random[i])])
                .collect();
            write_csv(&dir.join("split.csv"), &hash, &["run", "unsplit", "learned", "random"], &rows)?;
            let (mu, ml, mr) = out.means();
            let p_vs_unsplit = welch_less(&out.learned, &out.unsplit).ok().map(|x| x.1);
            let p_vs_random = welch_less(&out.learned, &out.random).ok().map(|x| x.1);
            json!({
                "config_hash": hash,
                "mean_unsplit": mu,
                "mean_learned": ml,
                "mean_random": mr,
                "p_learned_below_unsplit": p_vs_unsplit,
                "p_learned_below_random": p_vs_random,
            })
        }
        TheoryExperiment::Fbound { regions, deltas, j_max } => {
            let mut rows = Vec::new();
            let mut violations = 0usize;
            for (k, spec) in regions.iter().enumerate() {
                for &d in deltas {
                    for j in 1..=*j_max {
                        let b = check_fbound(spec, d, j)?;
                        violations += usize::from(!b.holds);
                        rows.push(vec![k.to_string(), f(d), j.to_string(), f(b.lhs), f(b.rhs), b.holds.to_string()]);
                    }
                }
            }
            write_csv(
                &dir.join("fbound.csv"),
                &hash,
                &["region", "delta", "j", "lhs", "rhs", "holds"],
                &rows,
            )?;
            json!({ "config_hash": hash, "checks": rows.len(), "violations": violations })
        }
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}
