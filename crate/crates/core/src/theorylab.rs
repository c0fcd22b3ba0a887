//! Fixed-region UCB bandit simulator.
//!
//! Each region `k` is described by its optimum `g*_k` and the tail function
//! `F_k(y) = P[f ≤ g*_k − y]`. Samples are drawn as `f = g*_k − F_k⁻¹(U)`
//! with `U` uniform, the confidence radius after `n` samples is
//! `r = F_k⁻¹(δ^{1/n})`, and the bandit picks `argmax_k g_k + r_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Bisection iterations for numeric inverses.
const INVERSE_ITERS: usize = 200;

/// Tail-function families with known dilution parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CdfFamily {
    /// `F(y) = 1 − (y/c)^d` on `[0, c]`.
    PowerLaw { c: f64 },
    /// Exponential tail with scale `scale`, truncated at `cutoff`.
    TruncatedExp { scale: f64, cutoff: f64 },
    /// With probability `1 − weight` a power law of scale `c`, otherwise a
    /// uniform gap on `[0, tail]` with `tail > c`.
    HeavyTail { c: f64, weight: f64, tail: f64 },
}

/// One region of the bandit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionCdfSpec {
    pub g_star: f64,
    pub d: usize,
    pub family: CdfFamily,
}

impl RegionCdfSpec {
    pub fn power_law(g_star: f64, c: f64, d: usize) -> Self {
        Self {
            g_star,
            d,
            family: CdfFamily::PowerLaw { c },
        }
    }

    /// Values uniform on `[g* − 1, g*]`.
    pub fn uniform(g_star: f64) -> Self {
        Self::power_law(g_star, 1.0, 1)
    }

    pub fn truncated_exp(g_star: f64, scale: f64, cutoff: f64, d: usize) -> Self {
        Self {
            g_star,
            d,
            family: CdfFamily::TruncatedExp { scale, cutoff },
        }
    }

    pub fn heavy_tail(g_star: f64, c: f64, weight: f64, tail: f64, d: usize) -> Self {
        Self {
            g_star,
            d,
            family: CdfFamily::HeavyTail { c, weight, tail },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.d >= 1
            && self.g_star.is_finite()
            && match self.family {
                CdfFamily::PowerLaw { c } => c > 0.0,
                CdfFamily::TruncatedExp { scale, cutoff } => scale > 0.0 && cutoff > 0.0,
                CdfFamily::HeavyTail { c, weight, tail } => {
                    c > 0.0 && weight > 0.0 && weight < 1.0 && tail > c
                }
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid region spec {self:?}")))
        }
    }

    /// Largest possible gap below `g*`.
    pub fn support(&self) -> f64 {
        match self.family {
            CdfFamily::PowerLaw { c } => c,
            CdfFamily::TruncatedExp { cutoff, .. } => cutoff,
            CdfFamily::HeavyTail { tail, .. } => tail,
        }
    }

    /// `F(y) = P[f ≤ g* − y]`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        let d = self.d as i32;
        let power = |c: f64| if y >= c { 0.0 } else { 1.0 - (y / c).powi(d) };
        match self.family {
            CdfFamily::PowerLaw { c } => power(c),
            CdfFamily::TruncatedExp { scale, cutoff } => {
                if y >= cutoff {
                    0.0
                } else {
                    let floor = (-cutoff / scale).exp();
                    ((-y / scale).exp() - floor) / (1.0 - floor)
                }
            }
            CdfFamily::HeavyTail { c, weight, tail } => {
                (1.0 - weight) * power(c) + weight * (1.0 - y / tail).max(0.0)
            }
        }
    }

    /// `F⁻¹(u)` for `u ∈ [0, 1]`; closed form except for the mixture.
    pub fn inverse(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self.family {
            CdfFamily::PowerLaw { c } => c * (1.0 - u).powf(1.0 / self.d as f64),
            CdfFamily::TruncatedExp { scale, cutoff } => {
                let floor = (-cutoff / scale).exp();
                (-scale * (u * (1.0 - floor) + floor).ln()).clamp(0.0, cutoff)
            }
            CdfFamily::HeavyTail { tail, .. } => {
                let (mut lo, mut hi) = (0.0, tail);
                for _ in 0..INVERSE_ITERS {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) > u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Declared dilution pair `(z, c)`.
    pub fn dilution(&self) -> (f64, f64) {
        match self.family {
            CdfFamily::PowerLaw { c } => (0.0, c),
            // 1 − F is concave on [0, cutoff], so it lies above its chord
            // y / cutoff ≥ (y / cutoff)^d.
            CdfFamily::TruncatedExp { cutoff, .. } => (0.0, cutoff),
            // The tail component contributes at most `weight` to F; the
            // power-law part alone gives the bound on [0, c].
            CdfFamily::HeavyTail { c, weight, .. } => {
                (weight, c / (1.0 - weight).powf(1.0 / self.d as f64))
            }
        }
    }

    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        self.g_star - self.inverse(rng.uniform())
    }
}

/// `F⁻¹(δ^{1/n})`: with probability `1 − δ` the best of `n` samples is
/// within this distance of `g*`.
pub fn confidence_radius(spec: &RegionCdfSpec, delta: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) || n == 0 {
        return Err(Error::InvalidArgument(format!("need 0 < δ < 1 and n ≥ 1, got δ={delta}, n={n}")));
    }
    Ok(spec.inverse(delta.powf(1.0 / n as f64)))
}

/// Both sides of `F⁻¹(δ^{1/j}) ≤ c·(ln(1/δ)/j)^{1/d}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_fbound(spec: &RegionCdfSpec, delta: f64, j: usize) -> Result<FBound> {
    let (z, c) = spec.dilution();
    if !(delta >= z && delta < 1.0) || j == 0 {
        return Err(Error::Precondition(format!(
            "need δ in [{z}, 1) and j ≥ 1, got δ={delta}, j={j}"
        )));
    }
    let lhs = spec.inverse(delta.powf(1.0 / j as f64));
    let rhs = c * ((1.0 / delta).ln() / j as f64).powf(1.0 / spec.d as f64);
    Ok(FBound {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-12) + 1e-12,
    })
}

/// `(z, c)` implied by an `L`-Lipschitz region of relative volume `Ṽ`
/// containing an `ε₀`-ball around its optimum, under uniform sampling.
pub fn lipschitz_to_dilution(l: f64, eps0: f64, relative_volume: f64, d: usize) -> Result<(f64, f64)> {
    let ball = eps0.powi(d as i32);
    if !(l >= 0.0 && eps0 > 0.0 && relative_volume >= ball) || d == 0 {
        return Err(Error::Precondition(format!(
            "need L ≥ 0, ε₀ > 0, Ṽ ≥ ε₀^d, got L={l}, ε₀={eps0}, Ṽ={relative_volume}"
        )));
    }
    Ok((1.0 - ball / relative_volume, l * relative_volume.powf(1.0 / d as f64)))
}

/// Confidence level per horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSchedule {
    /// `δ = η / T³`.
    InverseCubic { eta: f64 },
    /// `δ = η / T^p`.
    InversePower { eta: f64, power: f64 },
}

impl DeltaSchedule {
    pub fn delta(&self, t: usize) -> f64 {
        match *self {
            Self::InverseCubic { eta } => eta / (t as f64).powi(3),
            Self::InversePower { eta, power } => eta / (t as f64).powf(power),
        }
    }

    pub fn eta(&self) -> f64 {
        match *self {
            Self::InverseCubic { eta } | Self::InversePower { eta, .. } => eta,
        }
    }
}

/// Reporting split of the regions by gap threshold `Δ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegretDecomposition {
    /// ℓ_d norm of `c_k` over regions with `Δ_k < Δ₀`.
    pub c_good: f64,
    /// ℓ_d norm of `c_k` over regions with `Δ_k ≥ Δ₀`.
    pub c_bad: f64,
    /// Smallest positive gap, or infinity when every region is optimal.
    pub delta0: f64,
}

/// Outcome of one bandit run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretRecord {
    pub t: usize,
    pub choices: Vec<usize>,
    /// `regret[t−1] = R(t)`.
    pub regret: Vec<f64>,
    pub counts: Vec<usize>,
    /// `sup f − inf f` over all regions.
    pub m: f64,
    pub k: usize,
    pub delta: f64,
    pub eta: f64,
    pub decomposition: RegretDecomposition,
}

impl RegretRecord {
    pub fn total(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

pub fn decomposition(specs: &[RegionCdfSpec]) -> RegretDecomposition {
    let f_star = specs.iter().map(|s| s.g_star).fold(f64::NEG_INFINITY, f64::max);
    let d = specs.first().map_or(1, |s| s.d) as f64;
    let delta0 = specs
        .iter()
        .map(|s| f_star - s.g_star)
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    let norm = |good: bool| {
        specs
            .iter()
            .filter(|s| ((f_star - s.g_star) < delta0) == good)
            .map(|s| s.dilution().1.powf(d))
            .sum::<f64>()
            .powf(1.0 / d)
    };
    RegretDecomposition {
        c_good: norm(true),
        c_bad: norm(false),
        delta0,
    }
}

/// Runs the region bandit for `t` steps: every region once, then
/// `argmax_k g_k + r_k` with ties to the lower index. Regret at each step is
/// `f* − g` of the chosen region after adding the new sample.
pub fn run_bandit(
    specs: &[RegionCdfSpec],
    t: usize,
    schedule: DeltaSchedule,
    rng: &mut SeededRng,
) -> Result<RegretRecord> {
    let k = specs.len();
    if k == 0 || t < k {
        return Err(Error::Precondition(format!("need 1 ≤ K ≤ T, got K={k}, T={t}")));
    }
    for s in specs {
        s.validate()?;
    }
    let delta = schedule.delta(t);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("δ = {delta} outside (0, 1)")));
    }
    let f_star = specs.iter().map(|s| s.g_star).fold(f64::NEG_INFINITY, f64::max);
    let f_min = specs
        .iter()
        .map(|s| s.g_star - s.support())
        .fold(f64::INFINITY, f64::min);
    let mut best = vec![f64::NEG_INFINITY; k];
    let mut counts = vec![0usize; k];
    let mut choices = Vec::with_capacity(t);
    let mut regret = Vec::with_capacity(t);
    let mut total = 0.0;
    for step in 0..t {
        let arm = if step < k {
            step
        } else {
            let mut arm = 0;
            let mut top = f64::NEG_INFINITY;
            for (i, s) in specs.iter().enumerate() {
                let b = best[i] + s.inverse(delta.powf(1.0 / counts[i] as f64));
                if b > top {
                    top = b;
                    arm = i;
                }
            }
            arm
        };
        let f = specs[arm].sample(rng);
        best[arm] = best[arm].max(f);
        counts[arm] += 1;
        total += f_star - best[arm];
        choices.push(arm);
        regret.push(total);
    }
    Ok(RegretRecord {
        t,
        choices,
        regret,
        counts,
        m: f_star - f_min,
        k,
        delta,
        eta: schedule.eta(),
        decomposition: decomposition(specs),
    })
}

/// Mean final regret over `runs` runs with consecutive seeds from `rng`.
pub fn mean_regret(
    specs: &[RegionCdfSpec],
    t: usize,
    schedule: DeltaSchedule,
    rng: &mut SeededRng,
    runs: usize,
) -> Result<Vec<f64>> {
    (0..runs)
        .map(|_| {
            let mut run_rng = rng.split();
            run_bandit(specs, t, schedule, &mut run_rng).map(|r| r.total())
        })
        .collect()
}

/// Final regrets of the three configurations of a split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitOutcome {
    pub unsplit: Vec<f64>,
    pub learned: Vec<f64>,
    pub random: Vec<f64>,
}

impl SplitOutcome {
    pub fn means(&self) -> (f64, f64, f64) {
        let m = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        (m(&self.unsplit), m(&self.learned), m(&self.random))
    }
}

/// Regret of the parent alone, of an informed split into `good` and `bad`,
/// and of a random split modeled as two copies of the parent.
pub fn split_experiment(
    parent: &RegionCdfSpec,
    good: &RegionCdfSpec,
    bad: &RegionCdfSpec,
    t: usize,
    schedule: DeltaSchedule,
    rng: &mut SeededRng,
    runs: usize,
) -> Result<SplitOutcome> {
    Ok(SplitOutcome {
        unsplit: mean_regret(&[*parent], t, schedule, rng, runs)?,
        learned: mean_regret(&[*good, *bad], t, schedule, rng, runs)?,
        random: mean_regret(&[*parent, *parent], t, schedule, rng, runs)?,
    })
}

/// Least-squares slope of `ln E[R(T)]` against `ln T` over the upper half
/// of `t_grid`, with `runs` runs per horizon.
pub fn regret_slope(
    specs: &[RegionCdfSpec],
    t_grid: &[usize],
    schedule: DeltaSchedule,
    rng: &mut SeededRng,
    runs: usize,
) -> Result<f64> {
    if t_grid.len() < 4 {
        return Err(Error::InvalidArgument("need at least four horizons".into()));
    }
    let tail = &t_grid[t_grid.len() / 2..];
    let mut xs = Vec::with_capacity(tail.len());
    let mut ys = Vec::with_capacity(tail.len());
    for &t in tail {
        let r = mean_regret(specs, t, schedule, rng, runs)?;
        let mean = r.iter().sum::<f64>() / runs as f64;
        xs.push((t as f64).ln());
        ys.push(mean.ln());
    }
    Ok(crate::stats::ols(&xs, &ys)?.slope)
}

/// Geometric grid of `points` horizons from `lo` to `hi`.
pub fn geometric_grid(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1).max(1) as f64).exp().round() as usize)
        .collect();
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    const CUBIC: DeltaSchedule = DeltaSchedule::InverseCubic { eta: 1.0 };

    fn valid_specs() -> Vec<RegionCdfSpec> {
        vec![
            RegionCdfSpec::uniform(0.0),
            RegionCdfSpec::power_law(1.0, 2.0, 2),
            RegionCdfSpec::power_law(-1.0, 0.5, 4),
            RegionCdfSpec::truncated_exp(0.0, 0.3, 2.0, 2),
            RegionCdfSpec::heavy_tail(0.0, 0.5, 0.05, 3.0, 2),
        ]
    }

    #[test]
    fn inverse_round_trips() {
        for s in valid_specs() {
            for k in 0..=100 {
                let y = s.support() * k as f64 / 100.0;
                assert!((s.inverse(s.cdf(y)) - y).abs() < 1e-9, "{s:?} at {y}");
            }
            assert_eq!(s.cdf(0.0), 1.0);
        }
    }

    #[test]
    fn radius_examples() {
        let u = RegionCdfSpec::uniform(0.0);
        assert!((confidence_radius(&u, 0.5, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!(confidence_radius(&u, 0.5, 1_000_000).unwrap() < 1e-5);
        let r: Vec<f64> = (1..20).map(|n| confidence_radius(&u, 0.2, n).unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fbound_examples() {
        let u = RegionCdfSpec::uniform(0.0);
        let b = check_fbound(&u, (-1f64).exp(), 1).unwrap();
        assert!((b.lhs - (1.0 - (-1f64).exp())).abs() < 1e-12);
        assert!((b.rhs - 1.0).abs() < 1e-12);
        assert!(b.holds);
        let far = check_fbound(&u, 0.3, 1_000_000).unwrap();
        assert!(far.holds && far.lhs < 1e-5 && far.rhs < 1e-5);
        let heavy = RegionCdfSpec::heavy_tail(0.0, 0.5, 0.05, 3.0, 2);
        assert!(matches!(check_fbound(&heavy, 0.01, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn fbound_holds_on_full_grid() {
        for s in valid_specs() {
            let (z, _) = s.dilution();
            for di in 1..=90 {
                let delta = di as f64 / 100.0;
                if delta < z {
                    continue;
                }
                for j in 1..=100 {
                    assert!(check_fbound(&s, delta, j).unwrap().holds, "{s:?} δ={delta} j={j}");
                }
            }
        }
    }

    #[test]
    fn declared_dilution_holds_on_dense_grid() {
        for s in valid_specs() {
            let (z, c) = s.dilution();
            let end = c * (1.0 - z).powf(1.0 / s.d as f64);
            for k in 0..=10_000 {
                let y = end * k as f64 / 10_000.0;
                assert!(s.cdf(y) <= 1.0 - (y / c).powi(s.d as i32) + 1e-12, "{s:?} at {y}");
            }
        }
    }

    #[test]
    fn lipschitz_corollary_examples() {
        assert_eq!(lipschitz_to_dilution(1.0, 1.0, 1.0, 3).unwrap(), (0.0, 1.0));
        let (z, c) = lipschitz_to_dilution(2.0, 0.5, 4.0, 2).unwrap();
        assert!((z - 0.9375).abs() < 1e-15 && (c - 4.0).abs() < 1e-15);
        assert!(lipschitz_to_dilution(1.0, 2.0, 1.0, 2).is_err());
    }

    #[test]
    fn corollary_bounds_empirical_dilution_on_disk() {
        // f(x) = −‖x‖ on the disk of radius 2: L = 1, a unit ball around the
        // optimum, Ṽ = 4.
        let (z_cor, c_cor) = lipschitz_to_dilution(1.0, 1.0, 4.0, 2).unwrap();
        assert_eq!((z_cor, c_cor), (0.75, 2.0));
        let mut rng = seeded_rng(5);
        let n = 10_000;
        let mut gaps: Vec<f64> = (0..n)
            .map(|_| loop {
                let (a, b) = (rng.uniform_in(-2.0, 2.0), rng.uniform_in(-2.0, 2.0));
                if a * a + b * b <= 4.0 {
                    break (a * a + b * b).sqrt();
                }
            })
            .collect();
        gaps.sort_by(f64::total_cmp);
        // Dvoretzky–Kiefer–Wolfowitz band at level 0.001.
        let eps = ((2.0f64 / 0.001).ln() / (2.0 * n as f64)).sqrt();
        let end = c_cor * (1.0 - z_cor).sqrt();
        for (i, &y) in gaps.iter().enumerate().take_while(|(_, &y)| y <= end) {
            let f_hat = (n - i - 1) as f64 / n as f64;
            assert!(f_hat <= 1.0 - (y / c_cor).powi(2) + eps, "y={y}");
        }
    }

    #[test]
    fn single_uniform_region_regret_is_harmonic() {
        let t = 10_000;
        let runs = 200;
        let mut rng = seeded_rng(2);
        let r = mean_regret(&[RegionCdfSpec::uniform(1.0)], t, CUBIC, &mut rng, runs).unwrap();
        let mean = r.iter().sum::<f64>() / runs as f64;
        let expected: f64 = (1..=t).map(|i| 1.0 / (i as f64 + 1.0)).sum();
        assert!((mean / expected - 1.0).abs() < 0.15, "{mean} vs {expected}");
    }

    #[test]
    fn bad_region_visits_obey_proof_bound() {
        let t = 10_000;
        let specs = [RegionCdfSpec::power_law(1.0, 1.0, 2), RegionCdfSpec::power_law(0.2, 0.1, 2)];
        let delta = CUBIC.delta(t);
        let (c2, gap2) = (0.1f64, 0.8f64);
        let bound = (c2 / gap2).powi(2) * (1.0 / delta).ln() + specs.len() as f64;
        let mut rng = seeded_rng(8);
        for _ in 0..20 {
            let rec = run_bandit(&specs, t, CUBIC, &mut rng).unwrap();
            assert!(rec.counts[1] as f64 <= bound, "{} > {bound}", rec.counts[1]);
        }
    }

    #[test]
    fn identical_regions_share_visits() {
        let specs = [RegionCdfSpec::power_law(0.0, 1.0, 2); 3];
        let mut rng = seeded_rng(4);
        let mut share = [0.0; 3];
        let runs = 100;
        for _ in 0..runs {
            let rec = run_bandit(&specs, 600, CUBIC, &mut rng).unwrap();
            for (s, c) in share.iter_mut().zip(&rec.counts) {
                *s += *c as f64 / 600.0 / runs as f64;
            }
        }
        for s in share {
            assert!((s - 1.0 / 3.0).abs() < 0.03, "{share:?}");
        }
    }

    #[test]
    fn decomposition_uses_smallest_positive_gap() {
        let specs = [
            RegionCdfSpec::power_law(1.0, 0.5, 2),
            RegionCdfSpec::power_law(0.5, 0.3, 2),
            RegionCdfSpec::power_law(0.2, 0.4, 2),
        ];
        let d = decomposition(&specs);
        assert!((d.delta0 - 0.5).abs() < 1e-15);
        assert!((d.c_good - 0.5).abs() < 1e-15);
        assert!((d.c_bad - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_split_matches_random() {
        let p = RegionCdfSpec::power_law(0.0, 1.0, 2);
        let mut rng = seeded_rng(6);
        let out = split_experiment(&p, &p, &p, 500, CUBIC, &mut rng, 200).unwrap();
        let (_, learned, random) = out.means();
        assert!((learned / random - 1.0).abs() < 0.05, "{learned} vs {random}");
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(100, 100_000, 7);
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&100_000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn regret_is_monotone_and_nonnegative(seed in 0u64..10_000, k in 1usize..4, t in 4usize..200) {
            let specs: Vec<RegionCdfSpec> = (0..k)
                .map(|i| RegionCdfSpec::power_law(-(i as f64) * 0.3, 0.5 + i as f64, 2))
                .collect();
            prop_assume!(t >= k);
            let mut rng = seeded_rng(seed);
            let rec = run_bandit(&specs, t, CUBIC, &mut rng).unwrap();
            prop_assert!(rec.regret[0] >= 0.0);
            prop_assert!(rec.regret.windows(2).all(|w| w[1] >= w[0]));
            prop_assert_eq!(rec.counts.iter().sum::<usize>(), t);
        }
    }
}
