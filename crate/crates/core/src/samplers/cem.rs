//! Cross-entropy method with a fixed per-run sampling width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{clamp_to_bounds, Oracle};
use crate::rng::SeededRng;
use crate::types::Sample;

use super::rank_descending;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CemConfig {
    /// Population size N.
    pub population: usize,
    /// Elite count N_e.
    pub elites: usize,
    /// Initial (and, without refit, permanent) standard deviation.
    pub sigma: f64,
    /// Refit the standard deviation to the elites each generation.
    #[serde(default)]
    pub refit_std: bool,
    /// Elementwise lower bound on the standard deviation.
    #[serde(default = "default_floor")]
    pub std_floor: f64,
}

fn default_floor() -> f64 {
    1e-3
}

impl Default for CemConfig {
    fn default() -> Self {
        Self {
            population: 100,
            elites: 10,
            sigma: 1.0,
            refit_std: false,
            std_floor: default_floor(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CemState {
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
    pub population: usize,
    pub elites: usize,
    pub refit_std: bool,
    pub std_floor: f64,
}

impl CemState {
    pub fn new(mean: Vec<f64>, config: &CemConfig) -> Result<Self> {
        if config.elites == 0 || config.elites > config.population {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= elites <= population, got {} and {}",
                config.elites, config.population
            )));
        }
        if !(config.sigma > 0.0) {
            return Err(Error::InvalidArgument("CEM sigma must be positive".into()));
        }
        let n = mean.len();
        Ok(Self {
            mean,
            stddev: vec![config.sigma.max(config.std_floor); n],
            population: config.population,
            elites: config.elites,
            refit_std: config.refit_std,
            std_floor: config.std_floor,
        })
    }
}

/// Refits the state to the best `elites` of an evaluated population.
pub fn cem_update(state: &mut CemState, candidates: &[Vec<f64>], values: &[f64]) {
    let order = rank_descending(values);
    let k = state.elites.min(candidates.len());
    if k == 0 {
        return;
    }
    let elite = &order[..k];
    let n = state.mean.len();
    let mean: Vec<f64> = (0..n)
        .map(|j| elite.iter().map(|&i| candidates[i][j]).sum::<f64>() / k as f64)
        .collect();
    if state.refit_std {
        for j in 0..n {
            let var = elite
                .iter()
                .map(|&i| (candidates[i][j] - mean[j]).powi(2))
                .sum::<f64>()
                / k as f64;
            state.stddev[j] = var.sqrt().max(state.std_floor);
        }
    }
    state.mean = mean;
}

/// Draws and evaluates one generation (truncated to the remaining budget)
/// and updates the state. Returns the evaluated samples.
pub fn cem_step(
    state: &mut CemState,
    oracle: &mut Oracle<'_>,
    rng: &mut SeededRng,
) -> Result<Vec<Sample>> {
    let count = state.population.min(oracle.remaining());
    if count == 0 {
        return Err(Error::BudgetExhausted {
            budget: oracle.budget(),
        });
    }
    let bounds = oracle.bounds();
    let candidates: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let mut x: Vec<f64> = state
                .mean
                .iter()
                .zip(&state.stddev)
                .map(|(m, s)| m + s * rng.normal())
                .collect();
            if let Some(b) = &bounds {
                clamp_to_bounds(&mut x, b);
            }
            x
        })
        .collect();
    let mut samples = Vec::with_capacity(count);
    for c in &candidates {
        samples.push(oracle.evaluate(c.clone())?.clone());
    }
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    cem_update(state, &candidates, &values);
    Ok(samples)
}

/// Standalone CEM baseline spending the oracle's whole remaining budget.
pub fn run_cem(
    oracle: &mut Oracle<'_>,
    mean: Vec<f64>,
    config: &CemConfig,
    rng: &mut SeededRng,
) -> Result<CemState> {
    let mut state = CemState::new(mean, config)?;
    while oracle.remaining() > 0 {
        cem_step(&mut state, oracle, rng)?;
    }
    Ok(state)
}
