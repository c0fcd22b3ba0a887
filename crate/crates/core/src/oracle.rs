//! Objective abstraction and the budget-enforcing query wrapper.

use crate::error::{Error, Result};
use crate::types::{Method, RunRecord, Sample};

/// A deterministic black-box objective to be maximized.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Per-coordinate `[lo, hi]` box, if the search space is bounded.
    fn bounds(&self) -> Option<Vec<(f64, f64)>> {
        None
    }

    fn evaluate(&self, x: &[f64]) -> f64;

    /// Task-level success indicator for a solution, when the task defines one.
    fn success(&self, _x: &[f64]) -> Option<bool> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn bounds(&self) -> Option<Vec<(f64, f64)>> {
        (**self).bounds()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
    fn success(&self, x: &[f64]) -> Option<bool> {
        (**self).success(x)
    }
}

/// Wraps a closure as an unbounded or boxed objective.
pub struct FnObjective<F> {
    dim: usize,
    bounds: Option<Vec<(f64, f64)>>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, bounds: None, f }
    }

    pub fn bounded(dim: usize, lo: f64, hi: f64, f: F) -> Self {
        Self {
            dim,
            bounds: Some(vec![(lo, hi); dim]),
            f,
        }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn bounds(&self) -> Option<Vec<(f64, f64)>> {
        self.bounds.clone()
    }
    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Counts and logs every query against a fixed budget.
///
/// All optimizers go through this type, so overspending is impossible and
/// the sample log doubles as the run record.
pub struct Oracle<'a> {
    objective: &'a dyn Objective,
    budget: usize,
    samples: Vec<Sample>,
}

impl<'a> Oracle<'a> {
    pub fn new(objective: &'a dyn Objective, budget: usize) -> Self {
        Self {
            objective,
            budget,
            samples: Vec::with_capacity(budget),
        }
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn bounds(&self) -> Option<Vec<(f64, f64)>> {
        self.objective.bounds()
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.objective
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.samples.len()
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.samples.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Evaluates `x`, appending the sample to the log.
    pub fn evaluate(&mut self, x: Vec<f64>) -> Result<&Sample> {
        if x.len() != self.objective.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.dim(),
                got: x.len(),
            });
        }
        if self.samples.len() >= self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        let eval_index = self.samples.len();
        let value = self.objective.evaluate(&x);
        if !value.is_finite() {
            return Err(Error::NonFiniteValue { value, eval_index });
        }
        self.samples.push(Sample {
            x,
            value,
            eval_index,
        });
        Ok(&self.samples[eval_index])
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn into_record(self, seed: u64, method: Method) -> RunRecord {
        RunRecord::new(seed, method, self.samples)
    }
}

/// Clamps `x` into `bounds` in place.
pub fn clamp_to_bounds(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}
