//! Sample-based estimates of region smoothness and dilution.
//!
//! For a region with best observed value `g*`, the gaps are `y_i = g* − f_i`
//! and the empirical tail function is `F̂(y) = #{f_i ≤ g* − y} / n`. A region
//! is `(z, c)`-diluted when `F̂(y) ≤ 1 − (y/c)^d` on `[0, c·(1 − z)^{1/d}]`.
//!
//! The inequality is checked at every gap point inside that interval using
//! the right limit of the step, `F̂(y_i⁺) = #{y_j > y_i} / n`, and at the
//! interval's right end, where the bound equals `z`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::PartitionTree;
use crate::rng::SeededRng;

/// Pairs closer than this are ignored by [`estimate_lipschitz`].
pub const MIN_PAIR_DISTANCE: f64 = 1e-12;
/// Relative tolerance of the bisection in [`estimate_ck`].
/// Bisection cap; reached only when the gaps are subnormal.
const CK_MAX_ITERS: usize = 200;

pub const CK_REL_TOL: f64 = 1e-6;
/// Tail mass at which `c_k` is estimated.
pub const DEFAULT_Z: f64 = 0.5;

/// Smoothness and dilution summary of one region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DilutionEstimate {
    pub l_k: f64,
    pub c_k: f64,
    pub z_k: f64,
    pub d: usize,
    pub n_samples: usize,
}

/// Largest pairwise slope `|f_i − f_j| / ‖x_i − x_j‖`.
pub fn estimate_lipschitz(points: &[Vec<f64>], values: &[f64]) -> Result<f64> {
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    let mut best: Option<f64> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dist = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist < MIN_PAIR_DISTANCE {
                continue;
            }
            let slope = (values[i] - values[j]).abs() / dist;
            best = Some(best.map_or(slope, |b: f64| b.max(slope)));
        }
    }
    best.ok_or_else(|| Error::Undefined("no pair of distinct positions".into()))
}

/// Gaps to the best value, sorted ascending.
fn sorted_gaps(values: &[f64]) -> Vec<f64> {
    let g = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut gaps: Vec<f64> = values.iter().map(|v| g - v).collect();
    gaps.sort_by(f64::total_cmp);
    gaps
}

/// Right limit `F̂(y⁺) = #{gaps > y} / n` over ascending gaps.
fn tail(gaps: &[f64], y: f64) -> f64 {
    let upto = gaps.partition_point(|&g| g <= y);
    (gaps.len() - upto) as f64 / gaps.len() as f64
}

/// Whether the sorted gaps satisfy the `(z, c)` dilution inequality.
pub fn dilution_holds(gaps: &[f64], c: f64, z: f64, d: usize) -> bool {
    if gaps.is_empty() {
        return true;
    }
    if c <= 0.0 {
        // Limit of c → 0: only a region without any positive gap qualifies.
        return gaps.iter().all(|&g| g <= 0.0);
    }
    let d = d as f64;
    let end = c * (1.0 - z).max(0.0).powf(1.0 / d);
    if tail(gaps, end) > z {
        return false;
    }
    gaps.iter()
        .take_while(|&&y| y <= end)
        .all(|&y| tail(gaps, y) <= 1.0 - (y / c).powf(d))
}

/// Smallest `c` for which the region is `(z, c)`-diluted, by bisection to
/// a relative tolerance of [`CK_REL_TOL`]. Zero when at most a fraction
/// `z` of the values lies below the best one.
pub fn estimate_ck(values: &[f64], d: usize, z: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Precondition("c_k needs at least two samples".into()));
    }
    if d == 0 || !(0.0..1.0).contains(&z) {
        return Err(Error::InvalidArgument(format!("need d ≥ 1 and z in [0, 1), got d={d}, z={z}")));
    }
    let gaps = sorted_gaps(values);
    let max_gap = *gaps.last().expect("non-empty");
    if max_gap <= 0.0 || tail(&gaps, 0.0) <= z {
        // Every c > 0 is feasible once the positive gaps fit in the tail.
        return Ok(0.0);
    }
    // Beyond c = max_gap/(1−z)^{1/d}·n^{1/d} the interval covers every gap
    // and each (y/c)^d ≤ 1/n, so all checks pass.
    let n = gaps.len() as f64;
    let mut hi = max_gap * n.powf(1.0 / d as f64) / (1.0 - z).powf(1.0 / d as f64) * (1.0 + 1e-9);
    debug_assert!(dilution_holds(&gaps, hi, z, d));
    let mut lo = 0.0;
    for _ in 0..CK_MAX_ITERS {
        if hi - lo <= CK_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if dilution_holds(&gaps, mid, z, d) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `z` on the grid `{0, 1/n, …, 1}` for which the region is
/// `(z, c)`-diluted.
pub fn estimate_zk(values: &[f64], c: f64, d: usize) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Precondition("z_k needs at least two samples".into()));
    }
    if !(c > 0.0) || d == 0 {
        return Err(Error::InvalidArgument(format!("need c > 0 and d ≥ 1, got c={c}, d={d}")));
    }
    let gaps = sorted_gaps(values);
    let n = gaps.len();
    let z = (0..=n)
        .map(|k| k as f64 / n as f64)
        .find(|&z| dilution_holds(&gaps, c, z, d))
        .unwrap_or(1.0);
    Ok(z)
}

/// All three estimates for one region. `L_k` is zero when fewer than two
/// distinct positions exist, and `c_k = z_k = 0` for a single sample.
pub fn estimate_region(points: &[Vec<f64>], values: &[f64], d: usize) -> Result<DilutionEstimate> {
    let n = values.len();
    let l_k = match estimate_lipschitz(points, values) {
        Ok(l) => l,
        Err(Error::Undefined(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let (c_k, z_k) = if n < 2 {
        (0.0, 0.0)
    } else {
        let c = estimate_ck(values, d, DEFAULT_Z)?;
        let z = if c > 0.0 { estimate_zk(values, c, d)? } else { 0.0 };
        (c, z)
    };
    Ok(DilutionEstimate {
        l_k,
        c_k,
        z_k,
        d,
        n_samples: n,
    })
}

/// Learned against random split metrics of one internal node.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeComparison {
    pub node: usize,
    pub depth: usize,
    pub n: usize,
    pub n_good: usize,
    pub learned_l: f64,
    pub learned_c: f64,
    pub random_l: f64,
    pub random_c: f64,
}

/// Tree-wide comparison of the learned splits with same-ratio random splits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionComparison {
    pub nodes: Vec<NodeComparison>,
    /// Fraction of internal nodes where the learned split has the lower `L`.
    pub frac_l: f64,
    /// Fraction of internal nodes where the learned split has the lower `c`.
    pub frac_c: f64,
    pub mean_learned_l: f64,
    pub mean_random_l: f64,
    pub mean_learned_c: f64,
    pub mean_random_c: f64,
}

impl PartitionComparison {
    /// Whether the learned run-level averages are below the random ones on
    /// both metrics.
    pub fn learned_wins_both(&self) -> bool {
        !self.nodes.is_empty()
            && self.mean_learned_l < self.mean_random_l
            && self.mean_learned_c < self.mean_random_c
    }
}

fn split_metrics(tree: &PartitionTree, a: &[usize], b: &[usize], d: usize) -> Result<(f64, f64)> {
    let mut l = 0.0;
    let mut c = 0.0;
    for members in [a, b] {
        let points: Vec<Vec<f64>> = members.iter().map(|&i| tree.points[i].clone()).collect();
        let values: Vec<f64> = members.iter().map(|&i| tree.values[i]).collect();
        let est = estimate_region(&points, &values, d)?;
        l += est.l_k;
        c += est.c_k;
    }
    Ok((l / 2.0, c / 2.0))
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Compares every learned split with `trials` random splits of the same
/// node into groups of the same sizes. `d` is the partition-space
/// dimension. A tree without internal nodes gives fractions of 0.5.
pub fn compare_random_partition(
    tree: &PartitionTree,
    rng: &mut SeededRng,
    trials: usize,
) -> Result<PartitionComparison> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let d = tree.dim;
    let mut nodes = Vec::new();
    for node in tree.internal_nodes() {
        let (g, b) = node.children.expect("internal node");
        let good = &tree.node(g).members;
        let bad = &tree.node(b).members;
        let (learned_l, learned_c) = split_metrics(tree, good, bad, d)?;
        let mut pool: Vec<usize> = good.iter().chain(bad).copied().collect();
        let (mut rl, mut rc) = (0.0, 0.0);
        for _ in 0..trials {
            rng.shuffle(&mut pool);
            let (a, b) = pool.split_at(good.len());
            let (l, c) = split_metrics(tree, a, b, d)?;
            rl += l;
            rc += c;
        }
        nodes.push(NodeComparison {
            node: node.id,
            depth: node.depth,
            n: pool.len(),
            n_good: good.len(),
            learned_l,
            learned_c,
            random_l: rl / trials as f64,
            random_c: rc / trials as f64,
        });
    }
    let frac = |f: &dyn Fn(&NodeComparison) -> bool| {
        if nodes.is_empty() {
            0.5
        } else {
            nodes.iter().filter(|n| f(n)).count() as f64 / nodes.len() as f64
        }
    };
    Ok(PartitionComparison {
        frac_l: frac(&|n| n.learned_l < n.random_l),
        frac_c: frac(&|n| n.learned_c < n.random_c),
        mean_learned_l: mean(nodes.iter().map(|n| n.learned_l)),
        mean_random_l: mean(nodes.iter().map(|n| n.random_l)),
        mean_learned_c: mean(nodes.iter().map(|n| n.learned_c)),
        mean_random_c: mean(nodes.iter().map(|n| n.random_c)),
        nodes,
    })
}

/// One point of a `z_k` time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZkPoint {
    /// Rebuild interval index, starting at 0 for the first `n_par` queries
    /// after the initial draws.
    pub interval: usize,
    pub end_query: usize,
    pub z_k: f64,
}

/// `z_k` of the samples drawn in each rebuild interval, with `c` held fixed.
/// A trailing partial interval is dropped.
pub fn zk_series(values: &[f64], n_init: usize, n_par: usize, c: f64, d: usize) -> Result<Vec<ZkPoint>> {
    if n_par < 2 {
        return Err(Error::InvalidArgument("n_par must be at least 2".into()));
    }
    values
        .get(n_init.min(values.len())..)
        .unwrap_or(&[])
        .chunks_exact(n_par)
        .enumerate()
        .map(|(i, chunk)| {
            Ok(ZkPoint {
                interval: i,
                end_query: n_init + (i + 1) * n_par,
                z_k: estimate_zk(chunk, c, d)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    /// Brute-force dilution check: gap points by linear scan plus a dense
    /// grid over the interval, using the right-limit tail count.
    fn oracle_holds(values: &[f64], c: f64, z: f64, d: usize) -> bool {
        let g = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps: Vec<f64> = values.iter().map(|v| g - v).collect();
        let n = values.len() as f64;
        let f_hat = |y: f64| gaps.iter().filter(|&&gap| gap > y).count() as f64 / n;
        let end = c * (1.0 - z).powf(1.0 / d as f64);
        let bound = |y: f64| 1.0 - (y / c).powi(d as i32);
        let grid_ok = (0..=2000).all(|k| {
            let y = end * k as f64 / 2000.0;
            // Between gap points the right limit at the previous gap is
            // the binding value; on the grid compare against the nearest
            // gap at or below y.
            let prev = gaps.iter().copied().filter(|&gap| gap <= y).fold(0.0, f64::max);
            f_hat(prev) <= bound(prev) + 1e-12
        });
        grid_ok && f_hat(end) <= z + 1e-12 && gaps.iter().all(|&y| y > end || f_hat(y) <= bound(y) + 1e-12)
    }

    #[test]
    fn lipschitz_examples() {
        let p = |xs: &[f64]| xs.iter().map(|&x| vec![x]).collect::<Vec<_>>();
        assert_eq!(estimate_lipschitz(&p(&[0.0, 1.0]), &[0.0, 2.0]).unwrap(), 2.0);
        assert_eq!(estimate_lipschitz(&p(&[0.0, 1.0, 2.0]), &[0.0, 2.0, 2.5]).unwrap(), 2.0);
        assert_eq!(estimate_lipschitz(&p(&[0.0, 1.0, 2.0]), &[4.0; 3]).unwrap(), 0.0);
        assert!(matches!(
            estimate_lipschitz(&p(&[1.0, 1.0]), &[0.0, 1.0]),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn ck_of_constant_region_is_zero() {
        assert_eq!(estimate_ck(&[3.0; 5], 2, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn ck_of_uniform_quantiles_is_near_one() {
        let n = 100;
        let values: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let c = estimate_ck(&values, 1, 0.5).unwrap();
        assert!((c - 1.0).abs() < 0.05, "c = {c}");
    }

    #[test]
    fn ck_matches_brute_force_grid() {
        let values = [1.0, 0.9, 0.5, 0.1];
        let c = estimate_ck(&values, 1, 0.5).unwrap();
        let grid = 100_000;
        let upper = 4.0;
        let brute = (1..=grid)
            .map(|k| upper * k as f64 / grid as f64)
            .find(|&c| oracle_holds(&values, c, 0.5, 1))
            .unwrap();
        assert!((c - brute).abs() < upper / grid as f64 + 1e-6, "{c} vs {brute}");
        // Hand derivation: the interval end c/2 must reach the gap 0.1,
        // where F̂(0.1⁺) = 1/2 ≤ 1 − 0.1/c.
        assert!((c - 0.2).abs() < 1e-6);
    }

    #[test]
    fn zk_examples() {
        assert_eq!(estimate_zk(&[2.0; 6], 0.7, 3).unwrap(), 0.0);
        let n = 200;
        let values: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        assert!(estimate_zk(&values, 1.0, 1).unwrap() <= 2.0 / n as f64);
        let z = estimate_zk(&values, 0.5, 1).unwrap();
        let brute = (0..=n)
            .map(|k| k as f64 / n as f64)
            .find(|&z| oracle_holds(&values, 0.5, z, 1))
            .unwrap();
        assert_eq!(z, brute);
        // Every gap k/n with k ≥ 2 violates the bound at c = 0.5, so the
        // interval must end below 2/n.
        assert!(z > 1.0 - 4.0 / n as f64);
    }

    #[test]
    fn single_member_region_estimates_zero() {
        let est = estimate_region(&[vec![1.0, 2.0]], &[0.3], 2).unwrap();
        assert_eq!((est.l_k, est.c_k, est.z_k, est.n_samples), (0.0, 0.0, 0.0, 1));
    }

    #[test]
    fn value_separated_split_beats_random() {
        // Good cluster near x = 0 with values near 10, bad cluster far away
        // with values near 0.
        let mut rng = seeded_rng(3);
        let mut points = Vec::new();
        let mut values = Vec::new();
        for i in 0..30 {
            points.push(vec![rng.uniform_in(-0.5, 0.5), rng.uniform_in(-0.5, 0.5)]);
            values.push(10.0 - 0.01 * i as f64);
            points.push(vec![20.0 + rng.uniform_in(-0.5, 0.5), rng.uniform_in(-0.5, 0.5)]);
            values.push(0.01 * i as f64);
        }
        let tree = build_partition(&points, &values, 1000, &mut rng).unwrap();
        assert_eq!(tree.internal_nodes().count(), 0);
        let tree = build_partition(&points, &values, 60, &mut rng).unwrap();
        let cmp = compare_random_partition(&tree, &mut rng, 20).unwrap();
        assert_eq!(cmp.nodes.len(), 1);
        assert_eq!(cmp.frac_c, 1.0);
        assert!(cmp.nodes[0].learned_c < cmp.nodes[0].random_c);
    }

    #[test]
    fn unstructured_nodes_beat_random_about_half_the_time() {
        let mut rng = seeded_rng(11);
        let mut wins = 0;
        let mut total = 0;
        for _ in 0..60 {
            let points: Vec<Vec<f64>> = (0..24).map(|_| vec![rng.normal(), rng.normal()]).collect();
            let values: Vec<f64> = (0..24).map(|_| rng.uniform()).collect();
            let tree = build_partition(&points, &values, 24, &mut rng).unwrap();
            // The learned boundary sees the values; shuffling them afterwards
            // removes any relation between the split and the values.
            let mut shuffled = tree.clone();
            rng.shuffle(&mut shuffled.values);
            let cmp = compare_random_partition(&shuffled, &mut rng, 10).unwrap();
            for n in &cmp.nodes {
                wins += usize::from(n.learned_c < n.random_c);
                total += 1;
            }
        }
        let frac = wins as f64 / total as f64;
        assert!((frac - 0.5).abs() < 0.15, "fraction {frac} over {total} nodes");
    }

    #[test]
    fn single_leaf_comparison_is_neutral() {
        let mut rng = seeded_rng(0);
        let tree = build_partition(&[vec![0.0], vec![1.0]], &[0.0, 1.0], 10, &mut rng).unwrap();
        let cmp = compare_random_partition(&tree, &mut rng, 3).unwrap();
        assert!(cmp.nodes.is_empty());
        assert_eq!((cmp.frac_l, cmp.frac_c), (0.5, 0.5));
        assert!(!cmp.learned_wins_both());
    }

    #[test]
    fn zk_series_uses_full_intervals() {
        let values: Vec<f64> = (0..57).map(|i| i as f64).collect();
        let s = zk_series(&values, 5, 10, 1.0, 1).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[4].end_query, 55);
    }

    proptest! {
        #[test]
        fn ck_does_not_grow_when_adding_a_best_tie(values in prop::collection::vec(-5.0f64..5.0, 2..30), d in 1usize..4) {
            let c0 = estimate_ck(&values, d, 0.5).unwrap();
            let mut more = values.clone();
            more.push(values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let c1 = estimate_ck(&more, d, 0.5).unwrap();
            prop_assert!(c1 <= c0 * (1.0 + 2.0 * CK_REL_TOL) + 1e-12, "{} > {}", c1, c0);
        }

        #[test]
        fn zk_non_increasing_in_c(values in prop::collection::vec(-5.0f64..5.0, 2..30), c in 0.01f64..5.0, d in 1usize..4) {
            let z1 = estimate_zk(&values, c, d).unwrap();
            let z2 = estimate_zk(&values, 1.5 * c, d).unwrap();
            prop_assert!(z2 <= z1);
        }

        #[test]
        fn lipschitz_of_linear_function_is_its_slope(
            w in prop::collection::vec(-3.0f64..3.0, 1..4),
            seed in 0u64..1000,
        ) {
            let mut rng = seeded_rng(seed);
            let points: Vec<Vec<f64>> = (0..12).map(|_| w.iter().map(|_| rng.normal()).collect()).collect();
            let values: Vec<f64> = points.iter().map(|p| p.iter().zip(&w).map(|(a, b)| a * b).sum()).collect();
            let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            let l = estimate_lipschitz(&points, &values).unwrap();
            prop_assert!(l <= norm * (1.0 + 1e-9));
            // With one input dimension every pair attains the slope.
            if w.len() == 1 {
                prop_assert!((l - norm).abs() < 1e-9 * norm.max(1.0));
            }
        }

        #[test]
        fn ck_feasible_and_tight(values in prop::collection::vec(-5.0f64..5.0, 2..20), d in 1usize..4) {
            let c = estimate_ck(&values, d, 0.5).unwrap();
            if c > 0.0 {
                prop_assert!(oracle_holds(&values, c, 0.5, d));
                prop_assert!(!oracle_holds(&values, c * (1.0 - 1e-3), 0.5, d));
            }
        }
    }
}
