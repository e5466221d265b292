use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{make_scenario_set, ScenarioSet};
use crate::error::{Error, Result};
use crate::rng;

const MAX_RESAMPLES: u64 = 16;

/// Multivariate Gaussian one-period market: asset returns `R ~ N(mu, sigma)`
/// and risk-free rate `rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMarket {
    mu: Vec<f64>,
    sigma: Vec<Vec<f64>>,
    rate: f64,
}

impl GaussianMarket {
    pub fn new(mu: Vec<f64>, sigma: Vec<Vec<f64>>, rate: f64) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::Shape("empty mean vector".into()));
        }
        if sigma.len() != d || sigma.iter().any(|row| row.len() != d) {
            return Err(Error::Shape(format!("covariance must be {d}x{d}")));
        }
        if !(rate.is_finite() && rate > -1.0) {
            return Err(Error::Domain(format!(
                "risk-free rate {rate} must exceed -1"
            )));
        }
        for (i, row) in sigma.iter().enumerate() {
            for (j, v) in row.iter().enumerate().take(i) {
                if (v - sigma[j][i]).abs() > 1e-12 {
                    return Err(Error::Domain("covariance matrix is not symmetric".into()));
                }
            }
        }
        let m = Self::matrix(&sigma);
        let smallest = m.clone().symmetric_eigen().eigenvalues.min();
        if !(smallest > 0.0) {
            return Err(Error::Domain(format!(
                "covariance not positive definite (eigenvalue {smallest})"
            )));
        }
        if mu.iter().all(|m| *m == rate) {
            return Err(Error::Domain(
                "mean return equals the risk-free rate in every asset".into(),
            ));
        }
        Ok(GaussianMarket { mu, sigma, rate })
    }

    fn matrix(sigma: &[Vec<f64>]) -> DMatrix<f64> {
        let d = sigma.len();
        DMatrix::from_fn(d, d, |i, j| sigma[i][j])
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[Vec<f64>] {
        &self.sigma
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Mean excess returns `mu - r 1`.
    pub fn excess_mean(&self) -> Vec<f64> {
        self.mu.iter().map(|m| m - self.rate).collect()
    }

    /// `Σ⁻¹ (mu - r 1)`, the unnormalized tangency portfolio.
    pub fn tangency(&self) -> Vec<f64> {
        let chol = Self::matrix(&self.sigma)
            .cholesky()
            .expect("validated positive definite");
        chol.solve(&DVector::from_vec(self.excess_mean()))
            .iter()
            .copied()
            .collect()
    }

    /// Maximal Sharpe ratio `sqrt((mu - r1)ᵀ Σ⁻¹ (mu - r1))`.
    pub fn max_sharpe(&self) -> f64 {
        let e = self.excess_mean();
        let t = self.tangency();
        e.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>().sqrt()
    }

    /// Mean and standard deviation of the excess return of portfolio `pi`.
    pub fn portfolio_moments(&self, pi: &[f64]) -> (f64, f64) {
        let mean: f64 = pi.iter().zip(self.excess_mean()).map(|(p, e)| p * e).sum();
        let m = Self::matrix(&self.sigma);
        let v = DVector::from_column_slice(pi);
        let var = (v.transpose() * &m * &v)[(0, 0)];
        (mean, var.max(0.0).sqrt())
    }
}

/// Draws `n` equally likely excess-return scenarios from
/// `N(mu - r 1, sigma)`, deterministic in `seed`, resampling on a fresh
/// stream if the draw fails market validation.
pub fn discretize_gaussian(gm: &GaussianMarket, n: usize, seed: u64) -> Result<ScenarioSet> {
    let d = gm.dim();
    if n < d + 1 {
        return Err(Error::Precondition(format!(
            "need at least {} scenarios for {d} assets, got {n}",
            d + 1
        )));
    }
    let chol = GaussianMarket::matrix(&gm.sigma)
        .cholesky()
        .expect("validated positive definite")
        .l();
    let shift = gm.excess_mean();
    let probs = vec![1.0 / n as f64; n];
    let mut last_err = None;
    for attempt in 0..MAX_RESAMPLES {
        let mut rng = rng::stream(seed, attempt);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let z = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
                let x = &chol * z;
                (0..d).map(|i| shift[i] + x[i]).collect()
            })
            .collect();
        match make_scenario_set(&rows, &probs, gm.rate) {
            Ok(set) => return Ok(set),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Generation(format!(
        "no valid market after {MAX_RESAMPLES} draws: {}",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_asset() -> GaussianMarket {
        GaussianMarket::new(vec![0.25], vec![vec![0.01]], 0.05).unwrap()
    }

    #[test]
    fn sample_mean_matches_excess_mean() {
        let set = discretize_gaussian(&one_asset(), 1000, 42).unwrap();
        let col = set.column(0);
        let mean = col.iter().sum::<f64>() / 1000.0;
        // Standard error is 0.1 / sqrt(1000).
        assert!((mean - 0.2).abs() < 3.0 * 0.1 / 1000f64.sqrt());
        assert!(set.probs().iter().all(|p| *p == 1.0 / 1000.0));
    }

    #[test]
    fn deterministic_in_seed() {
        let a = discretize_gaussian(&one_asset(), 50, 7).unwrap();
        let b = discretize_gaussian(&one_asset(), 50, 7).unwrap();
        let c = discretize_gaussian(&one_asset(), 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_scenarios() {
        assert!(matches!(
            discretize_gaussian(&one_asset(), 1, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rejects_bad_covariance() {
        assert!(
            GaussianMarket::new(vec![0.1, 0.2], vec![vec![1.0, 0.5], vec![0.4, 1.0]], 0.0).is_err()
        );
        assert!(
            GaussianMarket::new(vec![0.1, 0.2], vec![vec![1.0, 2.0], vec![2.0, 1.0]], 0.0).is_err()
        );
        assert!(
            GaussianMarket::new(vec![0.1, 0.1], vec![vec![1.0, 0.0], vec![0.0, 1.0]], 0.1).is_err()
        );
    }

    #[test]
    fn sharpe_ratio_of_diagonal_market() {
        let gm = GaussianMarket::new(vec![0.3, 0.1], vec![vec![0.04, 0.0], vec![0.0, 0.01]], 0.1)
            .unwrap();
        // (0.2/0.2)^2 + 0 = 1
        assert!((gm.max_sharpe() - 1.0).abs() < 1e-12);
    }
}
