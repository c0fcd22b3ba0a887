//! Sampling codecs and partition encoders.
//!
//! A [`LatentCodec`] is the invertible-ish pair used to sample candidates:
//! leaf members are encoded, a search distribution is fit in the latent
//! space and its draws are decoded back. A [`PartitionEncoder`] is one-way
//! and only maps candidates to the space where region boundaries are
//! learned, e.g. the agent's positions at a few snapshot times.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Sample weighting for the reconstruction objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReconstructionWeight {
    Uniform,
    /// `w ∝ exp(beta · p)` where `p ∈ [0, 1]` is the value's rank
    /// percentile (ties share their average rank).
    RankExp { beta: f64 },
}

impl Default for ReconstructionWeight {
    fn default() -> Self {
        ReconstructionWeight::RankExp { beta: 2.0 }
    }
}

impl ReconstructionWeight {
    /// Positive weights, non-decreasing in value.
    pub fn weights(&self, values: &[f64]) -> Vec<f64> {
        match *self {
            ReconstructionWeight::Uniform => vec![1.0; values.len()],
            ReconstructionWeight::RankExp { beta } => rank_percentiles(values)
                .into_iter()
                .map(|p| (beta * p).exp())
                .collect(),
        }
    }
}

/// Average-rank percentile of each value in `[0, 1]`; a single value maps
/// to 1.
pub fn rank_percentiles(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n <= 1 {
        return vec![1.0; n];
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut pct = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            pct[k] = avg / (n - 1) as f64;
        }
        i = j + 1;
    }
    pct
}

/// Encoder/decoder pair of the sampling space.
#[derive(Clone, Debug, PartialEq)]
pub enum LatentCodec {
    Identity { dim: usize },
    /// Rows of `basis` are orthonormal; decoding applies the transpose.
    RandomProjection { basis: DMatrix<f64> },
    /// Affine PCA map `z = B (x − μ)`, `x̂ = μ + Bᵀ z`.
    WeightedPca { mean: DVector<f64>, basis: DMatrix<f64> },
}

impl LatentCodec {
    pub fn identity(dim: usize) -> Self {
        LatentCodec::Identity { dim }
    }

    /// Orthonormal `latent_dim × dim` projection drawn from `rng`.
    pub fn random_projection(dim: usize, latent_dim: usize, rng: &mut SeededRng) -> Result<Self> {
        Ok(LatentCodec::RandomProjection {
            basis: orthonormal_rows(dim, latent_dim, rng)?,
        })
    }

    pub fn latent_dim(&self) -> usize {
        match self {
            LatentCodec::Identity { dim } => *dim,
            LatentCodec::RandomProjection { basis } | LatentCodec::WeightedPca { basis, .. } => {
                basis.nrows()
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            LatentCodec::Identity { dim } => *dim,
            LatentCodec::RandomProjection { basis } | LatentCodec::WeightedPca { basis, .. } => {
                basis.ncols()
            }
        }
    }

    pub fn encode(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LatentCodec::Identity { .. } => x.to_vec(),
            LatentCodec::RandomProjection { basis } => {
                (basis * DVector::from_column_slice(x)).as_slice().to_vec()
            }
            LatentCodec::WeightedPca { mean, basis } => {
                (basis * (DVector::from_column_slice(x) - mean)).as_slice().to_vec()
            }
        }
    }

    pub fn decode(&self, z: &[f64]) -> Vec<f64> {
        match self {
            LatentCodec::Identity { .. } => z.to_vec(),
            LatentCodec::RandomProjection { basis } => {
                (basis.tr_mul(&DVector::from_column_slice(z))).as_slice().to_vec()
            }
            LatentCodec::WeightedPca { mean, basis } => {
                (mean + basis.tr_mul(&DVector::from_column_slice(z))).as_slice().to_vec()
            }
        }
    }
}

fn orthonormal_rows(dim: usize, latent_dim: usize, rng: &mut SeededRng) -> Result<DMatrix<f64>> {
    if latent_dim == 0 || latent_dim > dim {
        return Err(Error::InvalidArgument(format!(
            "latent dimension {latent_dim} must be in 1..={dim}"
        )));
    }
    let g = DMatrix::from_fn(dim, latent_dim, |_, _| rng.normal());
    let q = g.qr().q();
    Ok(q.transpose())
}

/// Weighted PCA minimizing `Σ w_i ‖x_i − x̂_i‖²` over affine rank-k maps.
///
/// Components with eigenvalue below `1e-12 × largest` are dropped, so a
/// rank-deficient sample yields fewer than `latent_dim` components and
/// decodes the missing directions to the mean. Each component's largest
/// entry is made positive.
pub fn fit_weighted_pca(
    points: &[Vec<f64>],
    values: &[f64],
    latent_dim: usize,
    weight: ReconstructionWeight,
) -> Result<LatentCodec> {
    let m = points.len();
    if m == 0 {
        return Err(Error::Precondition("weighted PCA needs samples".into()));
    }
    let dim = points[0].len();
    if latent_dim == 0 || latent_dim > dim {
        return Err(Error::InvalidArgument(format!(
            "latent dimension {latent_dim} must be in 1..={dim}"
        )));
    }
    if m < latent_dim + 1 {
        return Err(Error::Precondition(format!(
            "weighted PCA with latent dimension {latent_dim} needs at least {} samples, got {m}",
            latent_dim + 1
        )));
    }
    if values.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: values.len(),
        });
    }
    let w = weight.weights(values);
    let total: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|v| v / total).collect();

    let mut mean = DVector::zeros(dim);
    for (p, wi) in points.iter().zip(&w) {
        mean.axpy(*wi, &DVector::from_column_slice(p), 1.0);
    }
    // Rows are sqrt(w_i)·(x_i − μ).
    let centered = DMatrix::from_fn(m, dim, |i, j| w[i].sqrt() * (points[i][j] - mean[j]));

    let (eigvals, components): (Vec<f64>, Vec<DVector<f64>>) = if m < dim {
        let gram = &centered * centered.transpose();
        let eig = SymmetricEigen::new(gram);
        let order = descending(&eig.eigenvalues);
        order
            .into_iter()
            .map(|k| {
                let lam = eig.eigenvalues[k];
                let v = centered.tr_mul(&eig.eigenvectors.column(k).into_owned());
                let norm = v.norm();
                (lam, if norm > 0.0 { v / norm } else { v })
            })
            .unzip()
    } else {
        let cov = centered.tr_mul(&centered);
        let eig = SymmetricEigen::new(cov);
        let order = descending(&eig.eigenvalues);
        order
            .into_iter()
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned()))
            .unzip()
    };

    let top = eigvals.first().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<DVector<f64>> = eigvals
        .iter()
        .zip(components)
        .filter(|(lam, _)| top > 0.0 && **lam > 1e-12 * top)
        .take(latent_dim)
        .map(|(_, mut v)| {
            let lead = v.iamax();
            if v[lead] < 0.0 {
                v.neg_mut();
            }
            v
        })
        .collect();
    let basis = if keep.is_empty() {
        DMatrix::zeros(0, dim)
    } else {
        DMatrix::from_rows(&keep.iter().map(|v| v.transpose()).collect::<Vec<_>>())
    };
    Ok(LatentCodec::WeightedPca { mean, basis })
}

fn descending(v: &DVector<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    idx
}

/// Configuration of the sampling codec.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodecKind {
    Identity,
    RandomProjection {
        latent_dim: usize,
    },
    WeightedPca {
        latent_dim: usize,
        #[serde(default)]
        weight: ReconstructionWeight,
    },
}

impl Default for CodecKind {
    fn default() -> Self {
        CodecKind::Identity
    }
}

impl CodecKind {
    pub fn is_trainable(&self) -> bool {
        matches!(self, CodecKind::WeightedPca { .. })
    }

    /// Builds the codec from the current samples. A weighted PCA with too
    /// few samples for its latent dimension falls back to the largest
    /// dimension the data supports.
    pub fn fit(
        &self,
        points: &[Vec<f64>],
        values: &[f64],
        dim: usize,
        rng: &mut SeededRng,
    ) -> Result<LatentCodec> {
        match *self {
            CodecKind::Identity => Ok(LatentCodec::identity(dim)),
            CodecKind::RandomProjection { latent_dim } => {
                LatentCodec::random_projection(dim, latent_dim, rng)
            }
            CodecKind::WeightedPca { latent_dim, weight } => {
                let k = latent_dim.min(points.len().saturating_sub(1)).max(1);
                fit_weighted_pca(points, values, k, weight)
            }
        }
    }
}

/// Picks the entries of a state trajectory at 1-based indices `stride`,
/// `2·stride`, … and appends the final state unless it was already taken.
pub fn snapshot_encode(states: &[Vec<f64>], stride: usize) -> Vec<f64> {
    let stride = stride.max(1);
    let n = states.len();
    let mut out = Vec::new();
    let mut t = stride;
    while t <= n {
        out.extend_from_slice(&states[t - 1]);
        t += stride;
    }
    if n > 0 && n % stride != 0 {
        out.extend_from_slice(&states[n - 1]);
    }
    out
}

/// Number of snapshots `snapshot_encode` takes from `horizon` states.
pub fn snapshot_count(horizon: usize, stride: usize) -> usize {
    let stride = stride.max(1);
    horizon / stride + usize::from(horizon % stride != 0)
}

/// Source of per-step states for snapshot encoding.
pub trait StateSource: Sync {
    fn states(&self, x: &[f64]) -> Vec<Vec<f64>>;
}

impl StateSource for crate::envs::Env {
    fn states(&self, x: &[f64]) -> Vec<Vec<f64>> {
        crate::envs::Env::states(self, x).unwrap_or_else(|| vec![x.to_vec()])
    }
}

/// One-way map into the partition space.
pub trait PartitionEncoder: Sync {
    fn encode(&self, x: &[f64]) -> Vec<f64>;
}

pub struct IdentityEncoder;

impl PartitionEncoder for IdentityEncoder {
    fn encode(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

/// Fixed linear map drawn once from a seed.
pub struct ProjectionEncoder {
    pub matrix: DMatrix<f64>,
}

impl ProjectionEncoder {
    pub fn new(dim: usize, out_dim: usize, rng: &mut SeededRng) -> Result<Self> {
        Ok(Self {
            matrix: orthonormal_rows(dim, out_dim, rng)?,
        })
    }
}

impl PartitionEncoder for ProjectionEncoder {
    fn encode(&self, x: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(x)).as_slice().to_vec()
    }
}

/// Snapshots of the simulated state trajectory.
pub struct SnapshotEncoder<'a> {
    pub source: &'a dyn StateSource,
    pub stride: usize,
}

impl PartitionEncoder for SnapshotEncoder<'_> {
    fn encode(&self, x: &[f64]) -> Vec<f64> {
        snapshot_encode(&self.source.states(x), self.stride)
    }
}

/// Configuration of the partition encoder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EncoderKind {
    Identity,
    /// Snapshots every `stride` steps; defaults to a quarter of the horizon.
    StateSnapshots {
        #[serde(default)]
        stride: Option<usize>,
    },
    RandomProjection {
        out_dim: usize,
    },
}

impl Default for EncoderKind {
    fn default() -> Self {
        EncoderKind::Identity
    }
}

impl EncoderKind {
    /// Builds the encoder for an environment instance.
    pub fn build<'a>(
        &self,
        env: &'a crate::envs::Env,
        rng: &mut SeededRng,
    ) -> Result<Box<dyn PartitionEncoder + 'a>> {
        use crate::oracle::Objective;
        Ok(match *self {
            EncoderKind::Identity => Box::new(IdentityEncoder),
            EncoderKind::StateSnapshots { stride } => {
                let horizon = env.horizon().unwrap_or(1);
                Box::new(SnapshotEncoder {
                    source: env,
                    stride: stride.unwrap_or((horizon / 4).max(1)),
                })
            }
            EncoderKind::RandomProjection { out_dim } => {
                Box::new(ProjectionEncoder::new(env.dim(), out_dim, rng)?)
            }
        })
    }
}
