//! Permutation-sensitive sequence-ordering surrogate.
//!
//! A sequence of discrete transformations earns the payoff of every hidden
//! chain it contains as an in-order subsequence. Each position that does not
//! take part in a found chain costs `base_cost`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::rng::seeded_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub actions: Vec<usize>,
    pub payoff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqOrderWorld {
    pub n_actions: usize,
    pub horizon: usize,
    pub chains: Vec<Chain>,
    pub base_cost: f64,
}

/// Positions of the greedy leftmost embedding of `chain` in `seq`, or the
/// length of the longest embedded prefix when the chain is absent.
fn embed(seq: &[usize], chain: &[usize]) -> std::result::Result<Vec<usize>, usize> {
    let mut pos = Vec::with_capacity(chain.len());
    let mut k = 0;
    for (i, &a) in seq.iter().enumerate() {
        if k < chain.len() && a == chain[k] {
            pos.push(i);
            k += 1;
        }
    }
    if k == chain.len() {
        Ok(pos)
    } else {
        Err(k)
    }
}

impl SeqOrderWorld {
    /// Default surrogate: 16 actions, horizon 20, three chains of length
    /// 2 to 4 with distinct actions and payoffs 10, 6 and 4, base cost 0.1.
    pub fn generate(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let n_actions = 16;
        let chains = [10.0, 6.0, 4.0]
            .iter()
            .map(|&payoff| {
                let len = 2 + rng.below(3);
                let mut pool: Vec<usize> = (0..n_actions).collect();
                rng.shuffle(&mut pool);
                Chain {
                    actions: pool[..len].to_vec(),
                    payoff,
                }
            })
            .collect();
        Self {
            n_actions,
            horizon: 20,
            chains,
            base_cost: 0.1,
        }
    }

    fn check(&self, actions: &[usize]) -> Result<()> {
        match actions.iter().find(|&&a| a >= self.n_actions) {
            Some(&a) => Err(Error::ActionOutOfRange {
                action: a,
                n_actions: self.n_actions,
            }),
            None => Ok(()),
        }
    }

    pub fn reward(&self, actions: &[usize]) -> Result<f64> {
        self.check(actions)?;
        let mut used = vec![false; actions.len()];
        let mut total = 0.0;
        for chain in &self.chains {
            if let Ok(pos) = embed(actions, &chain.actions) {
                total += chain.payoff;
                pos.iter().for_each(|&p| used[p] = true);
            }
        }
        let idle = used.iter().filter(|&&u| !u).count();
        Ok(total - self.base_cost * idle as f64)
    }

    /// Fraction of each chain matched in order, one entry per chain.
    pub fn progress(&self, actions: &[usize]) -> Vec<f64> {
        self.chains
            .iter()
            .map(|c| {
                let k = match embed(actions, &c.actions) {
                    Ok(_) => c.actions.len(),
                    Err(k) => k,
                };
                k as f64 / c.actions.len() as f64
            })
            .collect()
    }

    /// Upper bound on the reward: every chain found, no shared positions.
    pub fn reward_upper_bound(&self) -> f64 {
        let len: usize = self.chains.iter().map(|c| c.actions.len()).sum();
        let payoff: f64 = self.chains.iter().map(|c| c.payoff).sum();
        payoff - self.base_cost * self.horizon.saturating_sub(len) as f64
    }

    /// Per-step argmax over `n_actions` logits; the first maximum wins.
    pub fn decode(&self, x: &[f64]) -> Vec<usize> {
        x.chunks(self.n_actions)
            .take(self.horizon)
            .map(|logits| {
                logits
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                        if v > bv {
                            (i, v)
                        } else {
                            (bi, bv)
                        }
                    })
                    .0
            })
            .collect()
    }
}

/// The surrogate as an objective over flattened action logits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqOrderTask {
    pub world: SeqOrderWorld,
}

impl SeqOrderTask {
    pub fn new(world: SeqOrderWorld) -> Self {
        Self { world }
    }

    /// Chain progress after every prefix of the decoded sequence.
    pub fn states(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let seq = self.world.decode(x);
        (1..=seq.len()).map(|t| self.world.progress(&seq[..t])).collect()
    }
}

impl Objective for SeqOrderTask {
    fn dim(&self) -> usize {
        self.world.n_actions * self.world.horizon
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.world
            .reward(&self.world.decode(x))
            .expect("decoded actions are in range")
    }

    fn success(&self, x: &[f64]) -> Option<bool> {
        let seq = self.world.decode(x);
        Some(
            self.world
                .chains
                .iter()
                .all(|c| embed(&seq, &c.actions).is_ok()),
        )
    }
}
