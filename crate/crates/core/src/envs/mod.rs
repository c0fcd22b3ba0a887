//! Deterministic benchmark objectives and their registry.

pub mod bench;
pub mod nav;
pub mod seqorder;

pub use bench::{BenchFn, BenchKind};
pub use nav::{NavTask, NavWorld};
pub use seqorder::{SeqOrderTask, SeqOrderWorld};

use serde::{Deserialize, Serialize};

use crate::oracle::Objective;

fn default_bench_dim() -> usize {
    2
}

/// Named environment, instantiated per run seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvSpec {
    MazeS3,
    FourRooms,
    SelectObj,
    SeqOrder,
    DeceptiveTwin {
        #[serde(default = "default_bench_dim")]
        dim: usize,
    },
    Rastrigin {
        #[serde(default = "default_bench_dim")]
        dim: usize,
    },
    Ackley {
        #[serde(default = "default_bench_dim")]
        dim: usize,
    },
    Constant {
        #[serde(default = "default_bench_dim")]
        dim: usize,
    },
}

impl EnvSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EnvSpec::MazeS3 => "maze_s3",
            EnvSpec::FourRooms => "four_rooms",
            EnvSpec::SelectObj => "select_obj",
            EnvSpec::SeqOrder => "seq_order",
            EnvSpec::DeceptiveTwin { .. } => "deceptive_twin",
            EnvSpec::Rastrigin { .. } => "rastrigin",
            EnvSpec::Ackley { .. } => "ackley",
            EnvSpec::Constant { .. } => "constant",
        }
    }

    /// Builds the instance for `seed`; seeded layouts (maze, start and goal
    /// positions, hidden chains) are drawn from it.
    pub fn build(&self, seed: u64) -> Env {
        match *self {
            EnvSpec::MazeS3 => Env::Nav(NavTask::new(NavWorld::maze_s3(seed))),
            EnvSpec::FourRooms => Env::Nav(NavTask::new(NavWorld::four_rooms(seed))),
            EnvSpec::SelectObj => Env::Nav(NavTask::new(NavWorld::select_obj(seed))),
            EnvSpec::SeqOrder => Env::Seq(SeqOrderTask::new(SeqOrderWorld::generate(seed))),
            EnvSpec::DeceptiveTwin { dim } => Env::Bench(BenchFn::new(BenchKind::DeceptiveTwin, dim)),
            EnvSpec::Rastrigin { dim } => Env::Bench(BenchFn::new(BenchKind::Rastrigin, dim)),
            EnvSpec::Ackley { dim } => Env::Bench(BenchFn::new(BenchKind::Ackley, dim)),
            EnvSpec::Constant { dim } => Env::Bench(BenchFn::new(BenchKind::Constant, dim)),
        }
    }
}

/// A built environment instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Env {
    Nav(NavTask),
    Seq(SeqOrderTask),
    Bench(BenchFn),
}

impl Env {
    /// Per-step state trajectory of a candidate, for sequential tasks.
    pub fn states(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        match self {
            Env::Nav(t) => Some(t.states(x)),
            Env::Seq(t) => Some(t.states(x)),
            Env::Bench(_) => None,
        }
    }

    pub fn horizon(&self) -> Option<usize> {
        match self {
            Env::Nav(t) => Some(t.world.horizon),
            Env::Seq(t) => Some(t.world.horizon),
            Env::Bench(_) => None,
        }
    }

    fn inner(&self) -> &dyn Objective {
        match self {
            Env::Nav(t) => t,
            Env::Seq(t) => t,
            Env::Bench(t) => t,
        }
    }
}

impl Objective for Env {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn bounds(&self) -> Option<Vec<(f64, f64)>> {
        self.inner().bounds()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.inner().evaluate(x)
    }
    fn success(&self, x: &[f64]) -> Option<bool> {
        self.inner().success(x)
    }
}
