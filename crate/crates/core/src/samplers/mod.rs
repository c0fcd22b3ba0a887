//! Evolutionary samplers: CMA-ES, the cross-entropy method and random
//! shooting. All of them maximize and draw their queries through an
//! [`Oracle`](crate::oracle::Oracle), so the shared budget is respected.

pub mod cem;
pub mod cmaes;
pub mod shooting;

pub use cem::{cem_step, cem_update, run_cem, CemConfig, CemState};
pub use cmaes::{run_cmaes, CmaesParams, CmaesState};
pub use shooting::random_shooting;

use serde::{Deserialize, Serialize};

use crate::oracle::Objective;
use crate::rng::SeededRng;

/// Distribution of the first, non-adaptive queries of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum InitDistribution {
    /// Uniform over a box.
    Uniform(Vec<(f64, f64)>),
    /// Isotropic Gaussian around `mean`.
    Gaussian { mean: Vec<f64>, sigma: f64 },
}

impl InitDistribution {
    /// Uniform over the objective's bounds, or `N(0, sigma² I)` when the
    /// objective is unbounded.
    pub fn for_objective(objective: &dyn Objective, sigma: f64) -> Self {
        match objective.bounds() {
            Some(b) => InitDistribution::Uniform(b),
            None => InitDistribution::Gaussian {
                mean: vec![0.0; objective.dim()],
                sigma,
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            InitDistribution::Uniform(b) => b.len(),
            InitDistribution::Gaussian { mean, .. } => mean.len(),
        }
    }

    pub fn sample(&self, rng: &mut SeededRng) -> Vec<f64> {
        match self {
            InitDistribution::Uniform(b) => b.iter().map(|&(lo, hi)| rng.uniform_in(lo, hi)).collect(),
            InitDistribution::Gaussian { mean, sigma } => {
                mean.iter().map(|m| m + sigma * rng.normal()).collect()
            }
        }
    }

    /// Center of the distribution, used as the starting mean of adaptive
    /// samplers.
    pub fn center(&self) -> Vec<f64> {
        match self {
            InitDistribution::Uniform(b) => b.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect(),
            InitDistribution::Gaussian { mean, .. } => mean.clone(),
        }
    }
}

/// Indices sorted by value, best first; equal values keep index order.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}
