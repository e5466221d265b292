//! Finite-scenario market models.
//!
//! A [`ScenarioSet`] holds the excess returns `X^i = S^i_1 - S^0_1` of `d`
//! normalized risky assets over `n` scenarios together with the scenario
//! probabilities and the risk-free rate. Construction always validates the
//! two standing assumptions on markets: no arbitrage and non-redundancy.

mod gaussian;
mod lp;

pub use gaussian::{discretize_gaussian, GaussianMarket};

use std::ops::Deref;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Probabilities must sum to one within this tolerance.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Relative tolerance of the rank test used for non-redundancy.
pub const RANK_TOL: f64 = 1e-10;

/// A random variable on the scenario set: one value per scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Payoff(pub Vec<f64>);

impl Payoff {
    pub fn new(values: Vec<f64>) -> Self {
        Payoff(values)
    }

    pub fn constant(value: f64, n: usize) -> Self {
        Payoff(vec![value; n])
    }

    pub fn scaled(&self, lambda: f64) -> Payoff {
        Payoff(self.0.iter().map(|v| lambda * v).collect())
    }

    pub fn shifted(&self, c: f64) -> Payoff {
        Payoff(self.0.iter().map(|v| v + c).collect())
    }

    /// `base + scale * self`, the wealth map used by the reparametrization.
    pub fn affine(&self, base: f64, scale: f64) -> Payoff {
        Payoff(self.0.iter().map(|v| base + scale * v).collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Payoff {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Payoff {
    fn from(v: Vec<f64>) -> Self {
        Payoff(v)
    }
}

/// Outcome of [`validate_market`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketReport {
    pub no_arbitrage: bool,
    pub non_redundant: bool,
    pub rank: usize,
    /// Strictly positive `q` with `returnsᵀ q = 0`, normalized to sum to one.
    pub state_prices: Option<Vec<f64>>,
}

/// On-disk form: `{"rate": r, "probs": [...], "returns": [[...], ...]}` with
/// one row per scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub rate: f64,
    pub probs: Vec<f64>,
    pub returns: Vec<Vec<f64>>,
}

/// A validated, arbitrage-free, non-redundant finite market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDocument", into = "ScenarioDocument")]
pub struct ScenarioSet {
    n_scenarios: usize,
    n_assets: usize,
    /// Row-major `n_scenarios x n_assets`.
    returns: Vec<f64>,
    probs: Vec<f64>,
    rate: f64,
    state_prices: Vec<f64>,
}

impl ScenarioSet {
    pub fn n_scenarios(&self) -> usize {
        self.n_scenarios
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn state_prices(&self) -> &[f64] {
        &self.state_prices
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.returns[s * self.n_assets..(s + 1) * self.n_assets]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.n_scenarios)
            .map(|s| self.returns[s * self.n_assets + i])
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_scenarios)
            .map(|s| self.row(s).to_vec())
            .collect()
    }

    /// Excess return `X_π = π · X` of the portfolio with wealth fractions `pi`.
    pub fn portfolio(&self, pi: &[f64]) -> Payoff {
        assert_eq!(pi.len(), self.n_assets, "portfolio dimension");
        Payoff(
            (0..self.n_scenarios)
                .map(|s| self.row(s).iter().zip(pi).map(|(x, p)| x * p).sum())
                .collect(),
        )
    }

    /// Probability-weighted column means.
    pub fn mean_returns(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_assets];
        for s in 0..self.n_scenarios {
            for (mi, x) in m.iter_mut().zip(self.row(s)) {
                *mi += self.probs[s] * x;
            }
        }
        m
    }

    /// Probability-weighted covariance matrix of the columns.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.mean_returns();
        let d = self.n_assets;
        let mut c = DMatrix::zeros(d, d);
        for s in 0..self.n_scenarios {
            let row = self.row(s);
            for i in 0..d {
                for j in 0..d {
                    c[(i, j)] += self.probs[s] * (row[i] - mean[i]) * (row[j] - mean[j]);
                }
            }
        }
        c
    }

    pub fn to_document(&self) -> ScenarioDocument {
        ScenarioDocument {
            rate: self.rate,
            probs: self.probs.clone(),
            returns: self.rows(),
        }
    }
}

impl TryFrom<ScenarioDocument> for ScenarioSet {
    type Error = Error;

    fn try_from(doc: ScenarioDocument) -> Result<Self> {
        make_scenario_set(&doc.returns, &doc.probs, doc.rate)
    }
}

impl From<ScenarioSet> for ScenarioDocument {
    fn from(s: ScenarioSet) -> Self {
        s.to_document()
    }
}

fn flatten(returns: &[Vec<f64>]) -> Result<(usize, usize, Vec<f64>)> {
    let n = returns.len();
    if n == 0 {
        return Err(Error::Shape("no scenarios".into()));
    }
    let d = returns[0].len();
    if d == 0 {
        return Err(Error::Shape("no assets".into()));
    }
    let mut flat = Vec::with_capacity(n * d);
    for (s, row) in returns.iter().enumerate() {
        if row.len() != d {
            return Err(Error::Shape(format!(
                "row {s} has {} entries, expected {d}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape(format!("row {s} has a non-finite return")));
        }
        flat.extend_from_slice(row);
    }
    Ok((n, d, flat))
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Probability(format!(
            "probability {p} is not strictly positive"
        )));
    }
    let sum = compensated_sum(probs);
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Probability(format!(
            "probabilities sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Neumaier summation, so that `n` copies of `1/n` sum to one within an ulp.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Builds a validated market; fails on bad probabilities, arbitrage or
/// redundancy.
pub fn make_scenario_set(returns: &[Vec<f64>], probs: &[f64], rate: f64) -> Result<ScenarioSet> {
    let (n, d, flat) = flatten(returns)?;
    check_len(n, probs.len())?;
    check_probs(probs)?;
    if !(rate.is_finite() && rate > -1.0) {
        return Err(Error::Domain(format!(
            "risk-free rate {rate} must exceed -1"
        )));
    }
    let report = validate_flat(&flat, n, d);
    if !report.non_redundant {
        return Err(Error::Redundancy {
            rank: report.rank,
            assets: d,
        });
    }
    let Some(state_prices) = report.state_prices else {
        return Err(Error::Arbitrage);
    };
    Ok(ScenarioSet {
        n_scenarios: n,
        n_assets: d,
        returns: flat,
        probs: probs.to_vec(),
        rate,
        state_prices,
    })
}

/// Reports no-arbitrage (existence of a strictly positive state-price vector
/// pricing every excess return to zero) and non-redundancy (full column
/// rank). Probabilities only enter through their support, which is assumed
/// to be every scenario.
pub fn validate_market(returns: &[Vec<f64>], probs: &[f64]) -> Result<MarketReport> {
    let (n, d, flat) = flatten(returns)?;
    check_len(n, probs.len())?;
    Ok(validate_flat(&flat, n, d))
}

fn validate_flat(flat: &[f64], n: usize, d: usize) -> MarketReport {
    let rank = column_rank(flat, n, d);
    let state_prices = state_price_vector(flat, n, d);
    MarketReport {
        no_arbitrage: state_prices.is_some(),
        non_redundant: rank == d,
        rank,
        state_prices,
    }
}

/// Rank from a column-pivoted QR factorization.
fn column_rank(flat: &[f64], n: usize, d: usize) -> usize {
    let m = DMatrix::from_row_slice(n, d, flat);
    let largest = (0..d).map(|j| m.column(j).norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    let r = m.col_piv_qr().r();
    let k = n.min(d);
    (0..k)
        .filter(|&i| r[(i, i)].abs() > RANK_TOL * largest)
        .count()
}

/// Solves `returnsᵀ q = 0, q >= 1` by writing `q = 1 + p` with `p >= 0`.
fn state_price_vector(flat: &[f64], n: usize, d: usize) -> Option<Vec<f64>> {
    // Constraint rows are the assets: sum_s X[s][i] p_s = -sum_s X[s][i].
    let mut a = vec![0.0; d * n];
    let mut b = vec![0.0; d];
    for s in 0..n {
        for i in 0..d {
            let x = flat[s * d + i];
            a[i * n + s] = x;
            b[i] -= x;
        }
    }
    let p = lp::nonnegative_solution(&a, d, n, &b)?;
    let q: Vec<f64> = p.iter().map(|v| 1.0 + v).collect();
    // Guard against a numerically spurious phase-one success.
    let scale = flat.iter().fold(1.0_f64, |m, v| m.max(v.abs())) * q.iter().sum::<f64>();
    for i in 0..d {
        let priced: f64 = (0..n).map(|s| flat[s * d + i] * q[s]).sum();
        if priced.abs() > 1e-8 * scale {
            return None;
        }
    }
    let total: f64 = q.iter().sum();
    Some(q.into_iter().map(|v| v / total).collect())
}
