//! The partition-search main loop and its ablation variants.
//!
//! After `n_init` draws from the initial distribution, every iteration
//! descends the partition tree to a leaf, fits a diagonal Gaussian search
//! distribution to the sampling-space encodings of the leaf's members,
//! draws a candidate that routes back into the leaf (up to a retry cap) and
//! evaluates it. Every `n_par` iterations the sampling codec is refit and
//! the tree is rebuilt from scratch; in between, new samples are added to
//! the node statistics along their root-to-leaf path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::{CodecKind, LatentCodec, PartitionEncoder};
use crate::oracle::{clamp_to_bounds, Objective, Oracle};
use crate::partition::{build_partition, PartitionTree};
use crate::rng::SeededRng;
use crate::samplers::{rank_descending, CmaesParams, CmaesState, InitDistribution};
use crate::types::{Method, RunRecord, SearchBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeScore {
    Max,
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Descend {
    /// Child-by-child UCB descent from the root.
    TreeUcb,
    /// UCB over all leaves at once, against the root count.
    FlatLeafUcb,
    /// Child-by-child descent on node score alone.
    TreeGreedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchVariant {
    pub node_score: NodeScore,
    pub descend: Descend,
}

impl SearchVariant {
    pub const PLALAM: Self = Self {
        node_score: NodeScore::Max,
        descend: Descend::TreeUcb,
    };
    pub const MEAN: Self = Self {
        node_score: NodeScore::Mean,
        descend: Descend::TreeUcb,
    };
    pub const NOTREE: Self = Self {
        node_score: NodeScore::Max,
        descend: Descend::FlatLeafUcb,
    };
    pub const NOUCB: Self = Self {
        node_score: NodeScore::Max,
        descend: Descend::TreeGreedy,
    };

    pub fn for_method(method: Method) -> Option<Self> {
        match method {
            Method::Plalam => Some(Self::PLALAM),
            Method::PlalamMean => Some(Self::MEAN),
            Method::PlalamNotree => Some(Self::NOTREE),
            Method::PlalamNoucb => Some(Self::NOUCB),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UcbScore {
    pub exploit: f64,
    pub explore: f64,
    pub total: f64,
}

impl UcbScore {
    pub fn new(node_score: f64, n_child: usize, n_parent: usize, cp: f64) -> Self {
        let explore = if n_child == 0 {
            f64::INFINITY
        } else {
            cp * (2.0 * (n_parent as f64).ln() / n_child as f64).sqrt()
        };
        Self {
            exploit: node_score,
            explore,
            total: node_score + explore,
        }
    }
}

/// `node_score + cp·sqrt(2 ln n_parent / n_child)`, infinite for an
/// unvisited child.
pub fn ucb(node_score: f64, n_child: usize, n_parent: usize, cp: f64) -> f64 {
    UcbScore::new(node_score, n_child, n_parent, cp).total
}

fn node_score(tree: &PartitionTree, id: usize, kind: NodeScore) -> f64 {
    let n = tree.node(id);
    match kind {
        NodeScore::Max => n.score_max,
        NodeScore::Mean => n.score_mean,
    }
}

/// Picks the leaf to sample from. Ties go to the good child, and among
/// leaves to the lower node id.
pub fn select_leaf(tree: &PartitionTree, variant: SearchVariant, cp: f64) -> usize {
    match variant.descend {
        Descend::FlatLeafUcb => {
            let n_root = tree.node(tree.root).n;
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for leaf in tree.leaves() {
                let b = ucb(node_score(tree, leaf.id, variant.node_score), leaf.n, n_root, cp);
                if b > best.0 || best.1 == usize::MAX {
                    best = (b, leaf.id);
                }
            }
            best.1
        }
        Descend::TreeUcb | Descend::TreeGreedy => {
            let mut id = tree.root;
            while let Some((good, bad)) = tree.node(id).children {
                let n_parent = tree.node(id).n;
                let score = |c: usize| {
                    let s = node_score(tree, c, variant.node_score);
                    if variant.descend == Descend::TreeUcb {
                        ucb(s, tree.node(c).n, n_parent, cp)
                    } else {
                        s
                    }
                };
                id = if score(bad) > score(good) { bad } else { good };
            }
            id
        }
    }
}

/// Where the leaf search distribution is centered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafCenter {
    /// Plain average of the member encodings.
    MemberMean,
    /// Members are told to the fresh CMA-ES as one ranked generation: the
    /// center is the log-weighted recombination of the better half.
    #[default]
    Recombined,
}

/// Leaf-sampler settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafSamplerConfig {
    #[serde(default)]
    pub center: LeafCenter,
    /// Multiplier on the members' per-dimension standard deviation.
    pub sigma_mult: f64,
    /// Per-dimension lower bound on the sampling standard deviation.
    pub sigma_floor: f64,
    /// Rejected draws allowed before an out-of-region draw is accepted.
    pub max_retries: usize,
}

impl Default for LeafSamplerConfig {
    fn default() -> Self {
        Self {
            center: LeafCenter::default(),
            sigma_mult: 1.0,
            sigma_floor: 1e-3,
            max_retries: 20,
        }
    }
}

/// A candidate drawn for a leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub x: Vec<f64>,
    /// Partition-space encoding of `x`.
    pub z: Vec<f64>,
    pub rejections: usize,
    pub in_region: bool,
}

/// Search distribution seeded from the latent encodings of a leaf's members
/// and their values. The spread is always the members' per-dimension
/// standard deviation around their plain mean.
pub fn leaf_distribution(
    encodings: &[Vec<f64>],
    values: &[f64],
    config: &LeafSamplerConfig,
) -> Result<CmaesState> {
    let m = encodings.len();
    if m == 0 {
        return Err(Error::Precondition("leaf has no members".into()));
    }
    if values.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: values.len(),
        });
    }
    let dim = encodings[0].len();
    let mean: Vec<f64> = (0..dim)
        .map(|j| encodings.iter().map(|z| z[j]).sum::<f64>() / m as f64)
        .collect();
    let stds: Vec<f64> = (0..dim)
        .map(|j| {
            let var = encodings.iter().map(|z| (z[j] - mean[j]).powi(2)).sum::<f64>() / m as f64;
            (config.sigma_mult * var.sqrt()).max(config.sigma_floor)
        })
        .collect();
    let center = match config.center {
        LeafCenter::Recombined if m >= 2 => {
            let params = CmaesParams::with_lambda(dim, m);
            let order = rank_descending(values);
            let mut c = vec![0.0; dim];
            for (w, &i) in params.weights.iter().zip(&order) {
                for (cj, zj) in c.iter_mut().zip(&encodings[i]) {
                    *cj += w * zj;
                }
            }
            c
        }
        _ => mean,
    };
    Ok(CmaesState::from_diagonal(center, stds, 1.0))
}

/// Draws a candidate for `leaf`: members are encoded with `codec`, a fresh
/// diagonal CMA-ES distribution is seeded from them, and decoded draws are
/// retried until one routes into `leaf` or the retry cap is hit, in which
/// case the last draw is returned.
#[allow(clippy::too_many_arguments)]
pub fn propose_in_leaf(
    tree: &PartitionTree,
    leaf: usize,
    xs: &[Vec<f64>],
    codec: &LatentCodec,
    encoder: &dyn PartitionEncoder,
    bounds: Option<&[(f64, f64)]>,
    config: &LeafSamplerConfig,
    rng: &mut SeededRng,
) -> Result<Proposal> {
    let members = &tree.node(leaf).members;
    let encodings: Vec<Vec<f64>> = members.iter().map(|&i| codec.encode(&xs[i])).collect();
    let values: Vec<f64> = members.iter().map(|&i| tree.values[i]).collect();
    let dist = leaf_distribution(&encodings, &values, config)?;
    let mut rejections = 0;
    loop {
        let mut x = codec.decode(&dist.sample_one(rng));
        if let Some(b) = bounds {
            clamp_to_bounds(&mut x, b);
        }
        let z = encoder.encode(&x);
        let in_region = tree.route(&z) == leaf;
        if in_region || rejections >= config.max_retries {
            return Ok(Proposal {
                x,
                z,
                rejections,
                in_region,
            });
        }
        rejections += 1;
    }
}

/// Everything a partition-search run produces.
#[derive(Clone, Debug)]
pub struct PlalamRun {
    pub record: RunRecord,
    /// Tree at the end of the run, including every sample.
    pub final_tree: Option<PartitionTree>,
    pub rebuilds: usize,
    pub rejections: usize,
    /// Proposals accepted outside their target leaf.
    pub forced_accepts: usize,
}

/// Settings of a partition-search run besides the budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlalamConfig {
    pub variant: SearchVariant,
    pub codec: CodecKind,
    pub leaf: LeafSamplerConfig,
}

impl Default for PlalamConfig {
    fn default() -> Self {
        Self {
            variant: SearchVariant::PLALAM,
            codec: CodecKind::Identity,
            leaf: LeafSamplerConfig::default(),
        }
    }
}

fn method_of(variant: SearchVariant) -> Method {
    match variant {
        SearchVariant::MEAN => Method::PlalamMean,
        SearchVariant::NOTREE => Method::PlalamNotree,
        SearchVariant::NOUCB => Method::PlalamNoucb,
        _ => Method::Plalam,
    }
}

/// Runs the full partition search for `budget.total_queries` queries.
pub fn run_plalam(
    objective: &dyn Objective,
    budget: &SearchBudget,
    config: &PlalamConfig,
    encoder: &dyn PartitionEncoder,
    init: &InitDistribution,
    seed: u64,
    rng: &mut SeededRng,
) -> Result<PlalamRun> {
    budget.validate()?;
    if init.dim() != objective.dim() {
        return Err(Error::DimensionMismatch {
            expected: objective.dim(),
            got: init.dim(),
        });
    }
    let bounds = objective.bounds();
    let mut oracle = Oracle::new(objective, budget.total_queries);
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(budget.total_queries);
    let mut zs: Vec<Vec<f64>> = Vec::with_capacity(budget.total_queries);
    let mut values: Vec<f64> = Vec::with_capacity(budget.total_queries);
    for _ in 0..budget.n_init {
        let x = init.sample(rng);
        let s = oracle.evaluate(x.clone())?;
        values.push(s.value);
        zs.push(encoder.encode(&x));
        xs.push(x);
    }

    let mut tree: Option<PartitionTree> = None;
    let mut codec = LatentCodec::identity(objective.dim());
    let mut since_rebuild = budget.n_par;
    let (mut rebuilds, mut rejections, mut forced) = (0, 0, 0);
    while oracle.remaining() > 0 {
        if since_rebuild >= budget.n_par || tree.is_none() {
            codec = config.codec.fit(&xs, &values, objective.dim(), rng)?;
            tree = Some(build_partition(&zs, &values, budget.n_thres, rng)?);
            since_rebuild = 0;
            rebuilds += 1;
        }
        let t = tree.as_mut().expect("tree built above");
        let leaf = select_leaf(t, config.variant, budget.cp);
        let p = propose_in_leaf(
            t,
            leaf,
            &xs,
            &codec,
            encoder,
            bounds.as_deref(),
            &config.leaf,
            rng,
        )?;
        rejections += p.rejections;
        forced += usize::from(!p.in_region);
        let value = oracle.evaluate(p.x.clone())?.value;
        t.insert(p.z.clone(), value)?;
        xs.push(p.x);
        zs.push(p.z);
        values.push(value);
        since_rebuild += 1;
    }

    Ok(PlalamRun {
        record: oracle.into_record(seed, method_of(config.variant)),
        final_tree: tree,
        rebuilds,
        rejections,
        forced_accepts: forced,
    })
}
