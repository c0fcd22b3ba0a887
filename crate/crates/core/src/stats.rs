//! Summary statistics and the hypothesis tests used by the experiments.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, DiscreteCDF, Hypergeometric, StudentsT};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with `n − 1` in the denominator.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean; zero for fewer than two values.
pub fn sem(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// One-sided Fisher exact test of `p₁ > p₂` from `k₁/n₁` and `k₂/n₂`
/// successes: the probability, with all margins fixed, that group 1 has at
/// least `k₁` successes.
pub fn fisher_exact_greater(k1: u64, n1: u64, k2: u64, n2: u64) -> Result<f64> {
    if k1 > n1 || k2 > n2 || n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument(format!("invalid counts {k1}/{n1}, {k2}/{n2}")));
    }
    let total = n1 + n2;
    let successes = k1 + k2;
    if successes == 0 || successes == total {
        return Ok(1.0);
    }
    let h = Hypergeometric::new(total, successes, n1)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(if k1 == 0 { 1.0 } else { h.sf(k1 - 1) })
}

/// Welch's unequal-variance t statistic and one-sided p-value for
/// `mean(a) < mean(b)`.
pub fn welch_less(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument("Welch test needs two values per group".into()));
    }
    let (va, vb) = (variance(a) / a.len() as f64, variance(b) / b.len() as f64);
    let se = (va + vb).sqrt();
    let diff = mean(a) - mean(b);
    if se == 0.0 {
        let p = if diff < 0.0 { 0.0 } else { 1.0 };
        return Ok((diff.signum() * f64::INFINITY, p));
    }
    let t = diff / se;
    let df = (va + vb).powi(2)
        / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((t, dist.cdf(t)))
}

/// Average ranks starting at 1, with ties sharing their mean rank.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Spearman correlation with its one-sided p-value for a negative trend,
/// from the t approximation with `n − 2` degrees of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Spearman {
    pub rho: f64,
    pub p_negative: f64,
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<Spearman> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidArgument("Spearman needs ≥ 3 paired values".into()));
    }
    let rho = pearson(&ranks(x), &ranks(y));
    let n = x.len() as f64;
    let p_negative = if rho <= -1.0 {
        0.0
    } else if rho >= 1.0 {
        1.0
    } else {
        let t = rho * ((n - 2.0) / (1.0 - rho * rho)).sqrt();
        StudentsT::new(0.0, 1.0, n - 2.0)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .cdf(t)
    };
    Ok(Spearman { rho, p_negative })
}

/// Ordinary least squares line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<Line> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument("OLS needs ≥ 2 paired values".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Undefined("OLS with constant regressor".into()));
    }
    let slope = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
    Ok(Line {
        slope,
        intercept: my - slope * mx,
    })
}
