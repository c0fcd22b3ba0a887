//! Analytic test functions, negated where needed so that larger is better.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::oracle::Objective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchKind {
    /// Two attractors: a near one at `(-1, …)` and a far one at `(3, …)`
    /// that pays an extra unit inside radius 0.5.
    DeceptiveTwin,
    Rastrigin,
    Ackley,
    /// Constant zero; useful as a structureless control.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchFn {
    pub kind: BenchKind,
    pub dim: usize,
}

pub const TWIN_NEAR: f64 = -1.0;
pub const TWIN_FAR: f64 = 3.0;

fn norm_to(x: &[f64], c: f64) -> f64 {
    x.iter().map(|v| (v - c) * (v - c)).sum::<f64>().sqrt()
}

impl BenchFn {
    pub fn new(kind: BenchKind, dim: usize) -> Self {
        Self { kind, dim }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            BenchKind::DeceptiveTwin => {
                let da = norm_to(x, TWIN_NEAR);
                let db = norm_to(x, TWIN_FAR);
                -da.min(db) + if db < 0.5 { 1.0 } else { 0.0 }
            }
            BenchKind::Rastrigin => {
                let n = x.len() as f64;
                -(10.0 * n
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>())
            }
            BenchKind::Ackley => {
                let n = x.len() as f64;
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                20.0 * (-0.2 * sq.sqrt()).exp() + cs.exp() - 20.0 - E
            }
            BenchKind::Constant => 0.0,
        }
    }

    pub fn half_width(&self) -> f64 {
        match self.kind {
            BenchKind::DeceptiveTwin | BenchKind::Constant => 5.0,
            BenchKind::Rastrigin => 5.12,
            BenchKind::Ackley => 32.768,
        }
    }
}

impl Objective for BenchFn {
    fn dim(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> Option<Vec<(f64, f64)>> {
        let h = self.half_width();
        Some(vec![(-h, h); self.dim])
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.value(x)
    }

    fn success(&self, x: &[f64]) -> Option<bool> {
        match self.kind {
            BenchKind::DeceptiveTwin => Some(norm_to(x, TWIN_FAR) < 0.5),
            _ => None,
        }
    }
}
