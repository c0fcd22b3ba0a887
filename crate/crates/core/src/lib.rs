//! Black-box trajectory optimization by learned space partitioning.
//!
//! The crate provides the partition-search planner with its ablation
//! variants, evolutionary baselines, deterministic navigation and
//! sequence-ordering benchmarks, dilution diagnostics and a bandit
//! simulator for regret experiments.

pub mod diagnostics;
pub mod envs;
pub mod error;
pub mod latent;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod runner;
pub mod samplers;
pub mod search;
pub mod stats;
pub mod theorylab;
pub mod types;

pub use error::{Error, Result};
pub use oracle::{Objective, Oracle};
pub use rng::{seeded_rng, seeded_stream, SeededRng};
pub use types::{record_best, Method, RunRecord, Sample, SearchBudget};
pub use runner::{run_method, MethodConfig, MethodRun};
