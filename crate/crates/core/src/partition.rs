//! Learned recursive partition of the partition space.
//!
//! A node with enough members is split in two steps. First a 2-means
//! clustering runs on the members' standardized coordinates augmented with
//! their min-max scaled values; the cluster with the higher mean value is
//! labeled good. Then a linear hinge-loss classifier is trained on the
//! coordinates alone to separate the good cluster from the bad one, and the
//! members are handed to the children according to the classifier. Storing
//! membership by classifier decision keeps [`PartitionTree::route`] exactly
//! consistent with the stored member lists.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

const KMEANS_MAX_ITER: usize = 100;
const SVM_LAMBDA: f64 = 1e-3;
const SVM_ITERS: usize = 200;
const SVM_BATCH: usize = 256;

/// Oriented hyperplane separating a node's good and bad halves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearBoundary {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub positive_is_good: bool,
    /// Fraction of training points on their own side.
    pub train_accuracy: f64,
}

impl LinearBoundary {
    /// Signed score `w·z + b`.
    pub fn score(&self, z: &[f64]) -> f64 {
        dot(&self.weights, z) + self.bias
    }

    /// Whether `z` falls on the good side. Points on the hyperplane count as
    /// positive.
    pub fn is_good(&self, z: &[f64]) -> bool {
        (self.score(z) >= 0.0) == self.positive_is_good
    }
}

/// Labels (`true` = good cluster) and the two cluster centers, good first.
#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<bool>,
    pub centers: [Vec<f64>; 2],
    pub iterations: usize,
}

/// 2-means clustering with Lloyd iterations.
///
/// The last coordinate of every point is the value coordinate; the cluster
/// whose center has the larger last coordinate is labeled good. Seeds are
/// the point farthest from the centroid and the point farthest from that
/// one, so the result depends only on the data.
pub fn kmeans2(points: &[Vec<f64>]) -> Result<KMeansResult> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "kmeans2 needs at least 2 points, got {}",
            points.len()
        )));
    }
    let dim = points[0].len();
    if dim == 0 {
        return Err(Error::InvalidArgument("kmeans2 needs non-empty points".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }

    let centroid = mean_of(points.iter().map(|p| p.as_slice()), dim);
    let a = argmax_by(points, |p| sq_dist(p, &centroid));
    let b = argmax_by(points, |p| sq_dist(p, &points[a]));
    if sq_dist(&points[a], &points[b]) == 0.0 {
        return Err(Error::DegenerateCluster);
    }

    let mut centers = [points[a].clone(), points[b].clone()];
    let mut assign: Vec<usize> = vec![usize::MAX; points.len()];
    let mut iterations = 0;
    for it in 0..KMEANS_MAX_ITER {
        iterations = it + 1;
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let c = usize::from(sq_dist(p, &centers[1]) < sq_dist(p, &centers[0]));
            if assign[i] != c {
                assign[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (k, center) in centers.iter_mut().enumerate() {
            let members = points
                .iter()
                .zip(&assign)
                .filter(|(_, &c)| c == k)
                .map(|(p, _)| p.as_slice());
            let count = assign.iter().filter(|&&c| c == k).count();
            if count == 0 {
                return Err(Error::DegenerateCluster);
            }
            *center = mean_of(members, dim);
        }
    }
    if assign.iter().all(|&c| c == assign[0]) {
        return Err(Error::DegenerateCluster);
    }

    let good = usize::from(centers[1][dim - 1] > centers[0][dim - 1]);
    let labels = assign.iter().map(|&c| c == good).collect();
    let [c0, c1] = centers;
    let centers = if good == 0 { [c0, c1] } else { [c1, c0] };
    Ok(KMeansResult {
        labels,
        centers,
        iterations,
    })
}

/// Trains a linear soft-margin classifier with positive side = `good`.
///
/// Pegasos subgradient descent on the class-balanced, L2-regularized hinge
/// loss (λ = 1e-3, 200 iterations) over internally standardized features
/// with an augmented constant feature. Nodes larger than 256 points train on
/// a fresh random mini-batch each iteration.
pub fn fit_boundary(
    good: &[Vec<f64>],
    bad: &[Vec<f64>],
    rng: &mut SeededRng,
) -> Result<LinearBoundary> {
    if good.is_empty() || bad.is_empty() {
        return Err(Error::InvalidArgument(
            "fit_boundary needs both classes non-empty".into(),
        ));
    }
    let dim = good[0].len();
    if let Some(p) = good.iter().chain(bad).find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }

    let all: Vec<&[f64]> = good.iter().chain(bad).map(|p| p.as_slice()).collect();
    let m = all.len();
    let mean = mean_of(all.iter().copied(), dim);
    let std: Vec<f64> = (0..dim)
        .map(|j| {
            let var = all.iter().map(|p| (p[j] - mean[j]).powi(2)).sum::<f64>() / m as f64;
            let s = var.sqrt();
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();

    // Standardized features with a trailing constant 1 for the bias.
    let feats: Vec<Vec<f64>> = all
        .iter()
        .map(|p| {
            let mut f: Vec<f64> = (0..dim).map(|j| (p[j] - mean[j]) / std[j]).collect();
            f.push(1.0);
            f
        })
        .collect();
    let labels: Vec<f64> = (0..m)
        .map(|i| if i < good.len() { 1.0 } else { -1.0 })
        .collect();
    let w_good = m as f64 / (2.0 * good.len() as f64);
    let w_bad = m as f64 / (2.0 * bad.len() as f64);
    let sample_weight = |i: usize| if i < good.len() { w_good } else { w_bad };

    let mut w = vec![0.0; dim + 1];
    let mut grad = vec![0.0; dim + 1];
    let mut batch: Vec<usize> = (0..m).collect();
    let radius = 1.0 / SVM_LAMBDA.sqrt();
    for t in 1..=SVM_ITERS {
        let idx: &[usize] = if m > SVM_BATCH {
            for i in 0..SVM_BATCH {
                batch[i] = rng.below(m);
            }
            &batch[..SVM_BATCH]
        } else {
            &batch
        };
        let eta = 1.0 / (SVM_LAMBDA * t as f64);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for &i in idx {
            if labels[i] * dot(&w, &feats[i]) < 1.0 {
                let s = sample_weight(i) * labels[i];
                for (g, f) in grad.iter_mut().zip(&feats[i]) {
                    *g += s * f;
                }
            }
        }
        let shrink = 1.0 - eta * SVM_LAMBDA;
        let scale = eta / idx.len() as f64;
        for (wj, gj) in w.iter_mut().zip(&grad) {
            *wj = shrink * *wj + scale * gj;
        }
        let norm = dot(&w, &w).sqrt();
        if norm > radius {
            w.iter_mut().for_each(|wj| *wj *= radius / norm);
        }
    }

    let weights: Vec<f64> = (0..dim).map(|j| w[j] / std[j]).collect();
    let bias = w[dim] - (0..dim).map(|j| w[j] * mean[j] / std[j]).sum::<f64>();
    if weights.iter().all(|&v| v == 0.0) {
        return Err(Error::FitFailure("zero weight vector".into()));
    }
    if !bias.is_finite() || weights.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("non-finite weights".into()));
    }
    let mut boundary = LinearBoundary {
        weights,
        bias,
        positive_is_good: true,
        train_accuracy: 0.0,
    };
    let correct = good.iter().filter(|p| boundary.is_good(p)).count()
        + bad.iter().filter(|p| !boundary.is_good(p)).count();
    boundary.train_accuracy = correct as f64 / m as f64;
    Ok(boundary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionNode {
    pub id: usize,
    pub depth: usize,
    pub parent: Option<usize>,
    pub boundary: Option<LinearBoundary>,
    /// `(good_child, bad_child)` for internal nodes.
    pub children: Option<(usize, usize)>,
    /// Indices into the tree's point list.
    pub members: Vec<usize>,
    pub n: usize,
    pub score_max: f64,
    pub score_mean: f64,
}

impl RegionNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    fn absorb(&mut self, index: usize, value: f64) {
        self.members.push(index);
        self.n += 1;
        if value > self.score_max {
            self.score_max = value;
        }
        self.score_mean += (value - self.score_mean) / self.n as f64;
    }
}

/// Arena-allocated binary partition tree over partition-space points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionTree {
    pub nodes: Vec<RegionNode>,
    pub root: usize,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

/// Builds the partition breadth-first; nodes with `n >= n_thres` members are
/// split when clustering, classification and the resulting member split all
/// succeed, and remain leaves otherwise.
pub fn build_partition(
    points: &[Vec<f64>],
    values: &[f64],
    n_thres: usize,
    rng: &mut SeededRng,
) -> Result<PartitionTree> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("build_partition needs samples".into()));
    }
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }

    let mut tree = PartitionTree {
        nodes: Vec::new(),
        root: 0,
        dim,
        points: points.to_vec(),
        values: values.to_vec(),
    };
    tree.push_node(0, None, (0..points.len()).collect());

    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        if tree.nodes[id].n < n_thres.max(2) {
            continue;
        }
        let Some((boundary, good, bad)) = tree.try_split(id, rng) else {
            continue;
        };
        let depth = tree.nodes[id].depth + 1;
        let g = tree.push_node(depth, Some(id), good);
        let b = tree.push_node(depth, Some(id), bad);
        let node = &mut tree.nodes[id];
        node.boundary = Some(boundary);
        node.children = Some((g, b));
        queue.push_back(g);
        queue.push_back(b);
    }
    Ok(tree)
}

impl PartitionTree {
    fn push_node(&mut self, depth: usize, parent: Option<usize>, members: Vec<usize>) -> usize {
        let id = self.nodes.len();
        let n = members.len();
        let score_max = members
            .iter()
            .map(|&i| self.values[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let score_mean = members.iter().map(|&i| self.values[i]).sum::<f64>() / n.max(1) as f64;
        self.nodes.push(RegionNode {
            id,
            depth,
            parent,
            boundary: None,
            children: None,
            members,
            n,
            score_max,
            score_mean,
        });
        id
    }

    fn try_split(
        &self,
        id: usize,
        rng: &mut SeededRng,
    ) -> Option<(LinearBoundary, Vec<usize>, Vec<usize>)> {
        let members = &self.nodes[id].members;
        let augmented = self.augmented_features(members);
        let km = kmeans2(&augmented).ok()?;
        let (good_pts, bad_pts): (Vec<_>, Vec<_>) = members
            .iter()
            .zip(&km.labels)
            .partition(|(_, &is_good)| is_good);
        let good_pts: Vec<Vec<f64>> = good_pts.iter().map(|(&i, _)| self.points[i].clone()).collect();
        let bad_pts: Vec<Vec<f64>> = bad_pts.iter().map(|(&i, _)| self.points[i].clone()).collect();
        let boundary = fit_boundary(&good_pts, &bad_pts, rng).ok()?;
        let (good, bad): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&i| boundary.is_good(&self.points[i]));
        if good.is_empty() || bad.is_empty() {
            return None;
        }
        Some((boundary, good, bad))
    }

    /// Per-node standardized coordinates followed by min-max scaled value.
    fn augmented_features(&self, members: &[usize]) -> Vec<Vec<f64>> {
        let n = members.len() as f64;
        let mean = mean_of(members.iter().map(|&i| self.points[i].as_slice()), self.dim);
        let std: Vec<f64> = (0..self.dim)
            .map(|j| {
                let var = members
                    .iter()
                    .map(|&i| (self.points[i][j] - mean[j]).powi(2))
                    .sum::<f64>()
                    / n;
                var.sqrt()
            })
            .collect();
        let (lo, hi) = members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(self.values[i]), hi.max(self.values[i]))
        });
        let range = hi - lo;
        members
            .iter()
            .map(|&i| {
                let mut f: Vec<f64> = (0..self.dim)
                    .map(|j| {
                        if std[j] > 1e-12 {
                            (self.points[i][j] - mean[j]) / std[j]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                f.push(if range > 0.0 {
                    (self.values[i] - lo) / range
                } else {
                    0.0
                });
                f
            })
            .collect()
    }

    pub fn node(&self, id: usize) -> &RegionNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &RegionNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = &RegionNode> {
        self.nodes.iter().filter(|n| !n.is_leaf())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Root-to-leaf node ids followed by `z`.
    pub fn path(&self, z: &[f64]) -> Vec<usize> {
        let mut path = vec![self.root];
        let mut id = self.root;
        while let (Some(b), Some((g, bad))) = (&self.nodes[id].boundary, self.nodes[id].children) {
            id = if b.is_good(z) { g } else { bad };
            path.push(id);
        }
        path
    }

    /// Leaf containing `z`.
    pub fn route(&self, z: &[f64]) -> usize {
        *self.path(z).last().expect("path always contains the root")
    }

    /// Adds a new sample to every node on its root-to-leaf path and returns
    /// the leaf it landed in. Boundaries are left untouched.
    pub fn insert(&mut self, point: Vec<f64>, value: f64) -> Result<usize> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let path = self.path(&point);
        let index = self.points.len();
        self.points.push(point);
        self.values.push(value);
        for &id in &path {
            self.nodes[id].absorb(index, value);
        }
        Ok(*path.last().expect("non-empty path"))
    }

    /// Compact JSON view: id, depth, n, scores and boundary per node.
    pub fn dump_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .map(|n| {
                serde_json::json!({
                    "id": n.id,
                    "depth": n.depth,
                    "n": n.n,
                    "score_max": n.score_max,
                    "score_mean": n.score_mean,
                    "children": n.children,
                    "weights": n.boundary.as_ref().map(|b| b.weights.clone()),
                    "bias": n.boundary.as_ref().map(|b| b.bias),
                })
            })
            .collect();
        serde_json::json!({ "root": self.root, "dim": self.dim, "nodes": nodes })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn mean_of<'a>(points: impl Iterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    let mut n = 0usize;
    for p in points {
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
        n += 1;
    }
    sum.iter_mut().for_each(|s| *s /= n.max(1) as f64);
    sum
}

/// First index attaining the maximum of `key`.
fn argmax_by(points: &[Vec<f64>], key: impl Fn(&[f64]) -> f64) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let v = key(p);
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    /// Exhaustive minimum within-cluster sum of squares over all 2-partitions.
    fn brute_force_best_split(points: &[Vec<f64>]) -> Vec<bool> {
        let n = points.len();
        let dim = points[0].len();
        let mut best = (f64::INFINITY, 0u32);
        for mask in 1..(1u32 << n) - 1 {
            let mut cost = 0.0;
            for side in [true, false] {
                let idx: Vec<usize> = (0..n).filter(|&i| ((mask >> i) & 1 == 1) == side).collect();
                let c = mean_of(idx.iter().map(|&i| points[i].as_slice()), dim);
                cost += idx.iter().map(|&i| sq_dist(&points[i], &c)).sum::<f64>();
            }
            if cost < best.0 - 1e-12 {
                best = (cost, mask);
            }
        }
        (0..n).map(|i| (best.1 >> i) & 1 == 1).collect()
    }

    #[test]
    fn kmeans_matches_exhaustive_partition() {
        let pts = vec![
            vec![0.0, 1.0],
            vec![0.1, 1.1],
            vec![5.0, 9.0],
            vec![5.1, 9.2],
        ];
        let km = kmeans2(&pts).unwrap();
        assert_eq!(km.labels, vec![false, false, true, true]);
        let oracle = brute_force_best_split(&pts);
        let same = oracle == km.labels || oracle.iter().zip(&km.labels).all(|(a, b)| a != b);
        assert!(same);
    }

    #[test]
    fn kmeans_separated_sets() {
        let mut pts = vec![vec![0.0, 0.0]; 3];
        pts.extend(vec![vec![10.0, 10.0]; 3]);
        let km = kmeans2(&pts).unwrap();
        assert_eq!(km.centers[0], vec![10.0, 10.0]);
        assert_eq!(km.centers[1], vec![0.0, 0.0]);
        assert_eq!(km.labels, vec![false, false, false, true, true, true]);
    }

    #[test]
    fn kmeans_identical_points_degenerate() {
        let pts = vec![vec![1.0, 2.0]; 5];
        assert_eq!(kmeans2(&pts).unwrap_err(), Error::DegenerateCluster);
    }

    #[test]
    fn boundary_separates_1d() {
        let mut rng = seeded_rng(0);
        let b = fit_boundary(&[vec![3.0], vec![4.0]], &[vec![0.0], vec![1.0]], &mut rng).unwrap();
        let threshold = -b.bias / b.weights[0];
        assert!(threshold > 1.0 && threshold < 3.0, "threshold {threshold}");
        assert_eq!(b.train_accuracy, 1.0);
        assert!(b.is_good(&[4.0]) && !b.is_good(&[0.0]));
    }

    #[test]
    fn boundary_two_points() {
        let mut rng = seeded_rng(1);
        let b = fit_boundary(&[vec![1.0]], &[vec![-1.0]], &mut rng).unwrap();
        assert!(b.score(&[1.0]) > 0.0);
        assert!(b.score(&[-1.0]) < 0.0);
    }

    #[test]
    fn boundary_interleaved_is_soft() {
        let mut rng = seeded_rng(2);
        let b = fit_boundary(&[vec![0.0], vec![2.0]], &[vec![1.0], vec![3.0]], &mut rng).unwrap();
        assert!(b.train_accuracy >= 0.5);
    }

    #[test]
    fn boundary_mini_batch_path_separates() {
        let mut rng = seeded_rng(3);
        let good: Vec<Vec<f64>> = (0..300).map(|i| vec![2.0 + (i % 17) as f64 * 0.1, (i % 5) as f64]).collect();
        let bad: Vec<Vec<f64>> = (0..300).map(|i| vec![-2.0 - (i % 13) as f64 * 0.1, (i % 7) as f64]).collect();
        let b = fit_boundary(&good, &bad, &mut rng).unwrap();
        assert_eq!(b.train_accuracy, 1.0);
    }

    #[test]
    fn small_sample_stays_leaf() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0]];
        let tree = build_partition(&pts, &[0.0, 1.0, 2.0], 4, &mut seeded_rng(0)).unwrap();
        assert_eq!(tree.len(), 1);
        assert!(tree.node(0).is_leaf());
        assert_eq!(tree.route(&[100.0]), 0);
    }

    #[test]
    fn two_clusters_give_depth_one_tree() {
        // Each cluster repeats one point, so the children cannot be split
        // further even though they reach the threshold.
        let mut pts = vec![vec![0.0, 0.0]; 4];
        pts.extend(vec![vec![5.0, 5.0]; 4]);
        let vals = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let tree = build_partition(&pts, &vals, 4, &mut seeded_rng(0)).unwrap();
        assert_eq!(tree.depth(), 1);
        let (g, b) = tree.node(0).children.unwrap();
        assert_eq!(tree.node(g).members, vec![4, 5, 6, 7]);
        assert_eq!(tree.node(b).members, vec![0, 1, 2, 3]);
        assert_eq!(tree.route(&[5.0, 5.0]), g);
        assert_eq!(tree.route(&[0.0, 0.0]), b);
    }

    #[test]
    fn spread_clusters_below_threshold_remain_leaves() {
        let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.2, 0.3, 5.0, 5.1, 5.2, 5.3]
            .iter()
            .map(|&x| vec![x])
            .collect();
        let vals = [0.0, 0.1, 0.0, 0.1, 1.0, 1.1, 1.0, 1.1];
        let tree = build_partition(&pts, &vals, 5, &mut seeded_rng(0)).unwrap();
        assert_eq!(tree.len(), 3);
        let (g, b) = tree.node(0).children.unwrap();
        assert_eq!(tree.node(g).n, 4);
        assert_eq!(tree.node(b).n, 4);
        assert_eq!(tree.route(&[5.1]), g);
    }

    #[test]
    fn identical_samples_single_leaf() {
        let pts = vec![vec![1.0, 1.0]; 12];
        let tree = build_partition(&pts, &[3.0; 12], 4, &mut seeded_rng(0)).unwrap();
        assert_eq!(tree.len(), 1);
    }

    #[test]
    fn insert_updates_path_statistics() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let vals: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let mut tree = build_partition(&pts, &vals, 10, &mut seeded_rng(5)).unwrap();
        let leaf = tree.insert(vec![25.0], 100.0).unwrap();
        assert_eq!(tree.node(0).score_max, 100.0);
        assert_eq!(tree.node(0).n, 21);
        assert!((tree.node(0).score_mean - (190.0 + 100.0) / 21.0).abs() < 1e-12);
        assert!(tree.node(leaf).members.contains(&20));
        assert_eq!(tree.route(&[25.0]), leaf);
    }

    fn cloud() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, u64)> {
        (2usize..4, 5usize..80, any::<u64>()).prop_flat_map(|(dim, n, seed)| {
            (
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), n),
                prop::collection::vec(-5.0f64..5.0, n),
                Just(seed),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn members_route_to_their_leaf((pts, vals, seed) in cloud()) {
            let tree = build_partition(&pts, &vals, 6, &mut seeded_rng(seed)).unwrap();
            for leaf in tree.leaves() {
                for &i in &leaf.members {
                    prop_assert_eq!(tree.route(&pts[i]), leaf.id);
                }
            }
            for node in tree.internal_nodes() {
                let (g, b) = node.children.unwrap();
                let mut union: Vec<usize> = tree.node(g).members.iter().chain(&tree.node(b).members).copied().collect();
                union.sort();
                let mut parent = node.members.clone();
                parent.sort();
                prop_assert_eq!(union, parent);
                prop_assert!(tree.node(g).n >= 1 && tree.node(b).n >= 1);
            }
        }

        #[test]
        fn every_point_reaches_exactly_one_leaf(
            (pts, vals, seed) in cloud(),
            probes in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 20),
        ) {
            let tree = build_partition(&pts, &vals, 6, &mut seeded_rng(seed)).unwrap();
            for z in probes {
                let z = &z[..tree.dim];
                let leaf = tree.route(z);
                prop_assert!(tree.node(leaf).is_leaf());
                let hits = tree.leaves().filter(|l| {
                    let mut id = l.id;
                    while let Some(p) = tree.node(id).parent {
                        let b = tree.node(p).boundary.as_ref().unwrap();
                        let (g, _) = tree.node(p).children.unwrap();
                        if b.is_good(z) != (id == g) { return false; }
                        id = p;
                    }
                    true
                }).count();
                prop_assert_eq!(hits, 1);
            }
        }

        #[test]
        fn rebuild_is_idempotent((pts, vals, seed) in cloud()) {
            let a = build_partition(&pts, &vals, 6, &mut seeded_rng(seed)).unwrap();
            let b = build_partition(&pts, &vals, 6, &mut seeded_rng(seed)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn good_cluster_has_higher_mean_value((pts, vals, _seed) in cloud()) {
            let aug: Vec<Vec<f64>> = pts.iter().zip(&vals).map(|(p, v)| {
                let mut q = p.clone();
                q.push(*v);
                q
            }).collect();
            if let Ok(km) = kmeans2(&aug) {
                let mean = |flag: bool| {
                    let vs: Vec<f64> = vals.iter().zip(&km.labels).filter(|(_, &l)| l == flag).map(|(v, _)| *v).collect();
                    vs.iter().sum::<f64>() / vs.len() as f64
                };
                prop_assert!(mean(true) >= mean(false));
                prop_assert!(km.labels.iter().any(|&l| l) && km.labels.iter().any(|&l| !l));
            }
        }
    }
}
