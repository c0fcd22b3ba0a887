//! Shared domain types: samples, budgets, method labels and run records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A queried point and its objective value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub value: f64,
    /// Zero-based query number within the run.
    pub eval_index: usize,
}

/// Query budget and tree hyperparameters of a partition-search run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBudget {
    pub total_queries: usize,
    pub n_init: usize,
    /// Queries between tree rebuilds.
    pub n_par: usize,
    /// Minimum member count for a node to be split.
    pub n_thres: usize,
    /// UCB exploration constant.
    pub cp: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            total_queries: 2000,
            n_init: 50,
            n_par: 50,
            n_thres: 10,
            cp: 2.0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.n_init < 1 {
            return Err(Error::InvalidBudget("n_init must be >= 1".into()));
        }
        if self.total_queries < self.n_init {
            return Err(Error::InvalidBudget(format!(
                "total_queries {} < n_init {}",
                self.total_queries, self.n_init
            )));
        }
        if self.n_par < 1 {
            return Err(Error::InvalidBudget("n_par must be >= 1".into()));
        }
        if self.n_thres < 2 {
            return Err(Error::InvalidBudget("n_thres must be >= 2".into()));
        }
        if !(self.cp >= 0.0) || !self.cp.is_finite() {
            return Err(Error::InvalidBudget(format!("cp must be finite and >= 0, got {}", self.cp)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plalam,
    PlalamMean,
    PlalamNotree,
    PlalamNoucb,
    Cem,
    Cmaes,
    RandomShooting,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Plalam,
        Method::PlalamMean,
        Method::PlalamNotree,
        Method::PlalamNoucb,
        Method::Cem,
        Method::Cmaes,
        Method::RandomShooting,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Plalam => "plalam",
            Method::PlalamMean => "plalam_mean",
            Method::PlalamNotree => "plalam_notree",
            Method::PlalamNoucb => "plalam_noucb",
            Method::Cem => "cem",
            Method::Cmaes => "cmaes",
            Method::RandomShooting => "random_shooting",
        }
    }

    pub fn is_partition_search(&self) -> bool {
        matches!(
            self,
            Method::Plalam | Method::PlalamMean | Method::PlalamNotree | Method::PlalamNoucb
        )
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

/// Everything a single optimizer run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub method: Method,
    pub samples: Vec<Sample>,
    /// `(eval_index, best value so far)`, one entry per evaluation.
    pub best_curve: Vec<(usize, f64)>,
}

impl RunRecord {
    pub fn new(seed: u64, method: Method, samples: Vec<Sample>) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let best_curve = if values.is_empty() {
            Vec::new()
        } else {
            samples
                .iter()
                .map(|s| s.eval_index)
                .zip(record_best(&values))
                .collect()
        };
        Self {
            seed,
            method,
            samples,
            best_curve,
        }
    }

    /// Best sample, earliest on ties.
    pub fn best(&self) -> Option<&Sample> {
        self.samples.iter().fold(None, |acc: Option<&Sample>, s| match acc {
            Some(b) if b.value >= s.value => Some(b),
            _ => Some(s),
        })
    }

    pub fn best_value(&self) -> Option<f64> {
        self.best_curve.last().map(|&(_, v)| v)
    }
}

/// Running maximum of `values`. Empty input gives an empty curve.
pub fn record_best(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::NEG_INFINITY, |best, &v| {
            if v > *best {
                *best = v;
            }
            Some(*best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn running_max_examples() {
        assert_eq!(record_best(&[1.0, 3.0, 2.0]), vec![1.0, 3.0, 3.0]);
        assert_eq!(record_best(&[5.0]), vec![5.0]);
        assert_eq!(
            record_best(&[-2.0, -1.0, -3.0, 0.0]),
            vec![-2.0, -1.0, -1.0, 0.0]
        );
    }

    #[test]
    fn budget_validation() {
        assert!(SearchBudget::default().validate().is_ok());
        let bad = SearchBudget {
            total_queries: 5,
            n_init: 10,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidBudget(_))));
        let bad = SearchBudget {
            n_thres: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SearchBudget {
            cp: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.name()));
        }
    }

    proptest! {
        #[test]
        fn best_curve_is_monotone_prefix_max(values in prop::collection::vec(-1e6f64..1e6, 1..64)) {
            let curve = record_best(&values);
            prop_assert_eq!(curve.len(), values.len());
            for i in 0..values.len() {
                let m = values[..=i].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(curve[i], m);
                if i > 0 { prop_assert!(curve[i] >= curve[i - 1]); }
            }
        }
    }
}
