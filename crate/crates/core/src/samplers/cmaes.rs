//! (μ/μ_w, λ)-CMA-ES with cumulative step-size adaptation.
//!
//! Default strategy parameters for dimension n:
//!
//! | symbol | value |
//! |--------|-------|
//! | λ      | 4 + ⌊3 ln n⌋ |
//! | μ      | ⌊λ/2⌋ |
//! | w_i    | ln(μ + ½) − ln i, normalized to sum 1 |
//! | μ_eff  | 1 / Σ w_i² |
//! | c_c    | (4 + μ_eff/n) / (n + 4 + 2μ_eff/n) |
//! | c_σ    | (μ_eff + 2) / (n + μ_eff + 5) |
//! | c_1    | 2 / ((n + 1.3)² + μ_eff) |
//! | c_μ    | min(1 − c_1, 2(μ_eff − 2 + 1/μ_eff) / ((n + 2)² + μ_eff)) |
//! | d_σ    | 1 + 2 max(0, √((μ_eff − 1)/(n + 1)) − 1) + c_σ |
//! | E‖N(0,I)‖ | √n (1 − 1/(4n) + 1/(21n²)) |
//!
//! The eigendecomposition of C is refreshed lazily, at most every
//! λ / ((c_1 + c_μ) · n · 10) evaluations, and eigenvalues are floored so C
//! stays positive definite. A state seeded with a diagonal covariance samples
//! without any decomposition until its first update.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::oracle::{clamp_to_bounds, Oracle};
use crate::rng::SeededRng;

use super::rank_descending;

/// Relative eigenvalue floor used for SPD repair.
const EIG_FLOOR_REL: f64 = 1e-14;
const EIG_FLOOR_ABS: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct CmaesParams {
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mueff: f64,
    pub cc: f64,
    pub cs: f64,
    pub c1: f64,
    pub cmu: f64,
    pub damps: f64,
    pub chi_n: f64,
}

impl CmaesParams {
    pub fn new(n: usize) -> Self {
        Self::with_lambda(n, 4 + (3.0 * (n as f64).ln()).floor() as usize)
    }

    pub fn with_lambda(n: usize, lambda: usize) -> Self {
        let nf = n as f64;
        let lambda = lambda.max(2);
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let cs = (mueff + 2.0) / (nf + mueff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mueff);
        let cmu = (1.0 - c1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
        let damps = 1.0 + 2.0 * (((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Self {
            lambda,
            mu,
            weights,
            mueff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Factor {
    /// C = diag(d²); no decomposition needed.
    Diagonal(DVector<f64>),
    /// C = B diag(d²) Bᵀ.
    Full {
        cov: DMatrix<f64>,
        b: DMatrix<f64>,
        d: DVector<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CmaesState {
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub ps: DVector<f64>,
    pub pc: DVector<f64>,
    pub params: CmaesParams,
    pub generation: usize,
    factor: Factor,
    evals: usize,
    eigen_evals: usize,
}

impl CmaesState {
    /// Isotropic start: C = I.
    pub fn new(mean: Vec<f64>, sigma: f64) -> Self {
        let n = mean.len();
        Self::from_diagonal(mean, vec![1.0; n], sigma)
    }

    /// Start with C = diag(stds²) and step size `sigma`.
    pub fn from_diagonal(mean: Vec<f64>, stds: Vec<f64>, sigma: f64) -> Self {
        assert_eq!(mean.len(), stds.len(), "mean and stds dimensions differ");
        let n = mean.len();
        Self {
            mean: DVector::from_vec(mean),
            sigma,
            ps: DVector::zeros(n),
            pc: DVector::zeros(n),
            params: CmaesParams::new(n),
            generation: 0,
            factor: Factor::Diagonal(DVector::from_vec(stds)),
            evals: 0,
            eigen_evals: 0,
        }
    }

    pub fn with_params(mut self, params: CmaesParams) -> Self {
        self.params = params;
        self
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn lambda(&self) -> usize {
        self.params.lambda
    }

    /// Dense covariance matrix C.
    pub fn covariance(&self) -> DMatrix<f64> {
        match &self.factor {
            Factor::Diagonal(d) => DMatrix::from_diagonal(&d.map(|v| v * v)),
            Factor::Full { cov, .. } => cov.clone(),
        }
    }

    /// Smallest eigenvalue of the factor currently used for sampling.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = match &self.factor {
            Factor::Diagonal(d) => d,
            Factor::Full { d, .. } => d,
        };
        d.iter().map(|v| v * v).fold(f64::INFINITY, f64::min)
    }

    /// One draw from N(mean, σ² C).
    pub fn sample_one(&self, rng: &mut SeededRng) -> Vec<f64> {
        let n = self.dim();
        let z = DVector::from_fn(n, |_, _| rng.normal());
        let step = match &self.factor {
            Factor::Diagonal(d) => z.component_mul(d),
            Factor::Full { b, d, .. } => b * z.component_mul(d),
        };
        (&self.mean + step * self.sigma).as_slice().to_vec()
    }

    /// λ draws from N(mean, σ² C).
    pub fn ask(&self, rng: &mut SeededRng) -> Vec<Vec<f64>> {
        (0..self.params.lambda).map(|_| self.sample_one(rng)).collect()
    }

    /// Updates mean, paths, covariance and step size from one evaluated
    /// generation. Higher values are better; ties are ranked by index.
    pub fn tell(&mut self, candidates: &[Vec<f64>], values: &[f64]) -> Result<()> {
        let p = &self.params;
        let n = self.dim();
        if candidates.len() != p.lambda || values.len() != p.lambda {
            return Err(Error::InvalidArgument(format!(
                "tell expects {} candidates and values, got {} and {}",
                p.lambda,
                candidates.len(),
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                value: v,
                eval_index: self.evals,
            });
        }
        if let Some(c) = candidates.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }

        let order = rank_descending(values);
        let old_mean = self.mean.clone();
        let ys: Vec<DVector<f64>> = order[..p.mu]
            .iter()
            .map(|&i| (DVector::from_column_slice(&candidates[i]) - &old_mean) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in p.weights.iter().zip(&ys) {
            y_w.axpy(*w, y, 1.0);
        }
        self.mean = &old_mean + &y_w * self.sigma;

        let c_inv_sqrt_y = match &self.factor {
            Factor::Diagonal(d) => y_w.component_div(d),
            Factor::Full { b, d, .. } => b * (b.transpose() * &y_w).component_div(d),
        };
        self.ps = &self.ps * (1.0 - p.cs) + c_inv_sqrt_y * (p.cs * (2.0 - p.cs) * p.mueff).sqrt();
        let ps_norm = self.ps.norm();
        let gen = (self.generation + 1) as f64;
        let hsig = ps_norm / (1.0 - (1.0 - p.cs).powf(2.0 * gen)).sqrt() / p.chi_n
            < 1.4 + 2.0 / (n as f64 + 1.0);
        let hsig_f = if hsig { 1.0 } else { 0.0 };
        self.pc = &self.pc * (1.0 - p.cc) + &y_w * (hsig_f * (p.cc * (2.0 - p.cc) * p.mueff).sqrt());

        let mut cov = self.covariance();
        let old_factor = 1.0 - p.c1 - p.cmu + (1.0 - hsig_f) * p.c1 * p.cc * (2.0 - p.cc);
        cov *= old_factor;
        cov.ger(p.c1, &self.pc, &self.pc, 1.0);
        for (w, y) in p.weights.iter().zip(&ys) {
            cov.ger(p.cmu * w, y, y, 1.0);
        }
        // Enforce exact symmetry against round-off.
        let cov = (&cov + cov.transpose()) * 0.5;

        self.sigma *= ((p.cs / p.damps) * (ps_norm / p.chi_n - 1.0)).exp();
        self.generation += 1;
        self.evals += p.lambda;

        let interval = p.lambda as f64 / ((p.c1 + p.cmu) * n as f64 * 10.0);
        let stale = (self.evals - self.eigen_evals) as f64 > interval;
        self.factor = match std::mem::replace(&mut self.factor, Factor::Diagonal(DVector::zeros(0))) {
            Factor::Full { b, d, .. } if !stale => Factor::Full { cov, b, d },
            _ => {
                self.eigen_evals = self.evals;
                decompose(cov)
            }
        };
        Ok(())
    }
}

/// Eigendecomposition with eigenvalue floor; C is rebuilt from the repaired
/// spectrum when any eigenvalue had to be raised.
fn decompose(cov: DMatrix<f64>) -> Factor {
    let eig = SymmetricEigen::new(cov.clone());
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let floor = (max_eig * EIG_FLOOR_REL).max(EIG_FLOOR_ABS);
    let repaired = eig.eigenvalues.iter().any(|&v| !(v >= floor));
    let vals = eig.eigenvalues.map(|v| if v >= floor { v } else { floor });
    let b = eig.eigenvectors;
    let cov = if repaired {
        let scaled = &b * DMatrix::from_diagonal(&vals);
        let c = scaled * b.transpose();
        (&c + c.transpose()) * 0.5
    } else {
        cov
    };
    Factor::Full {
        cov,
        b,
        d: vals.map(f64::sqrt),
    }
}

/// Standalone CMA-ES baseline that spends the oracle's whole remaining
/// budget. A final partial generation is evaluated but not told.
pub fn run_cmaes(
    oracle: &mut Oracle<'_>,
    mean: Vec<f64>,
    sigma: f64,
    rng: &mut SeededRng,
) -> Result<CmaesState> {
    let mut state = CmaesState::new(mean, sigma);
    let bounds = oracle.bounds();
    while oracle.remaining() > 0 {
        let mut candidates = state.ask(rng);
        if let Some(b) = &bounds {
            candidates.iter_mut().for_each(|c| clamp_to_bounds(c, b));
        }
        let mut values = Vec::with_capacity(candidates.len());
        for c in &candidates {
            if oracle.remaining() == 0 {
                break;
            }
            values.push(oracle.evaluate(c.clone())?.value);
        }
        if values.len() == candidates.len() {
            state.tell(&candidates, &values)?;
        }
    }
    Ok(state)
}
