//! Gaussian markets in which mean maximization under a VaR or ES constraint
//! has no solution.
//!
//! For a Gaussian excess return with mean `m_π` and volatility `s_π`, both
//! risks are `s_π · q - m_π` with `q` the risk of a standard normal. Along
//! the tangency portfolio `m_π / s_π` equals the maximal Sharpe ratio, so
//! whenever that ratio reaches `q` the scaled portfolios `nπ₀` have mean
//! `n · SR_max` and non-positive risk.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::rng;
use crate::scenarios::GaussianMarket;

/// Volatility of every asset in a generated witness market.
const VOLATILITY: f64 = 0.2;
const RATE: f64 = 0.01;
pub const DEFAULT_TERMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessRisk {
    Var { alpha: f64 },
    Es { alpha: f64 },
}

impl WitnessRisk {
    pub fn alpha(self) -> f64 {
        match self {
            WitnessRisk::Var { alpha } | WitnessRisk::Es { alpha } => alpha,
        }
    }

    /// `VaR^α(Z)` or `ES^α(Z)` for standard normal `Z`.
    pub fn threshold(self) -> f64 {
        match self {
            WitnessRisk::Var { alpha } => normal::value_at_risk(alpha),
            WitnessRisk::Es { alpha } => normal::expected_shortfall(alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub n: usize,
    pub pi: Vec<f64>,
    pub mean: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianWitness {
    pub market: GaussianMarket,
    pub risk: WitnessRisk,
    pub alpha: f64,
    pub threshold: f64,
    pub sr_max: f64,
    pub base_direction: Vec<f64>,
    pub sequence: Vec<WitnessStep>,
}

impl GaussianWitness {
    /// Columns `n, pi_1..pi_d, mean, risk`.
    pub fn to_csv(&self) -> String {
        let d = self.base_direction.len();
        let mut out = String::from("n");
        for i in 1..=d {
            out.push_str(&format!(",pi_{i}"));
        }
        out.push_str(",mean,risk\n");
        for s in &self.sequence {
            out.push_str(&s.n.to_string());
            for p in &s.pi {
                out.push_str(&format!(",{p}"));
            }
            out.push_str(&format!(",{},{}\n", s.mean, s.risk));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum WitnessOutcome {
    Witness(GaussianWitness),
    NotApplicable {
        threshold: f64,
        sr_max: f64,
        gap: f64,
    },
}

pub fn gaussian_witness(
    risk: WitnessRisk,
    target_sr: f64,
    d: usize,
    seed: u64,
) -> Result<WitnessOutcome> {
    gaussian_witness_with_terms(risk, target_sr, d, seed, DEFAULT_TERMS)
}

pub fn gaussian_witness_with_terms(
    risk: WitnessRisk,
    target_sr: f64,
    d: usize,
    seed: u64,
    terms: usize,
) -> Result<WitnessOutcome> {
    if !(target_sr.is_finite() && target_sr > 0.0) || d == 0 {
        return Err(Error::Precondition(format!(
            "need a positive Sharpe ratio and dimension, got {target_sr} and {d}"
        )));
    }
    let alpha = risk.alpha();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Precondition(format!(
            "witness level must lie in (0, 1), got {alpha}"
        )));
    }

    let mut g = rng::stream(seed, 0);
    let u: Vec<f64> = loop {
        let v: Vec<f64> = (0..d).map(|_| g.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            break v.into_iter().map(|x| x / n).collect();
        }
    };
    let mu: Vec<f64> = u
        .iter()
        .map(|ui| RATE + target_sr * VOLATILITY * ui)
        .collect();
    let sigma: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { VOLATILITY * VOLATILITY } else { 0.0 })
                .collect()
        })
        .collect();
    let market = GaussianMarket::new(mu, sigma, RATE)?;
    let sr_max = market.max_sharpe();
    let threshold = risk.threshold();
    if sr_max < threshold {
        return Ok(WitnessOutcome::NotApplicable {
            threshold,
            sr_max,
            gap: threshold - sr_max,
        });
    }

    // π₀ = Σ⁻¹(μ - r1) / SR_max has unit volatility and mean SR_max
    let base_direction: Vec<f64> = market.tangency().iter().map(|t| t / sr_max).collect();
    let sequence = (1..=terms)
        .map(|n| {
            let pi: Vec<f64> = base_direction.iter().map(|p| n as f64 * p).collect();
            let (mean, sd) = market.portfolio_moments(&pi);
            WitnessStep {
                n,
                risk: sd * threshold - mean,
                mean,
                pi,
            }
        })
        .collect();
    Ok(WitnessOutcome::Witness(GaussianWitness {
        market,
        risk,
        alpha,
        threshold,
        sr_max,
        base_direction,
        sequence,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_witness_exists_es_refused() {
        let var = WitnessRisk::Var { alpha: 0.05 };
        let es = WitnessRisk::Es { alpha: 0.05 };
        match gaussian_witness(var, 2.0, 3, 1).unwrap() {
            WitnessOutcome::Witness(w) => {
                assert_eq!(w.sequence.len(), 20);
                assert!(w.sequence.iter().all(|s| s.risk <= 1e-9));
            }
            other => panic!("{other:?}"),
        }
        match gaussian_witness(es, 2.0, 3, 1).unwrap() {
            WitnessOutcome::NotApplicable { gap, .. } => assert!((gap - 0.0627128).abs() < 1e-5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            gaussian_witness(es, 2.5, 2, 7).unwrap(),
            WitnessOutcome::Witness(_)
        ));
    }

    #[test]
    fn csv_columns() {
        let WitnessOutcome::Witness(w) =
            gaussian_witness(WitnessRisk::Es { alpha: 0.05 }, 2.5, 2, 7).unwrap()
        else {
            panic!("expected witness");
        };
        let csv = w.to_csv();
        assert!(csv.starts_with("n,pi_1,pi_2,mean,risk\n"));
        assert_eq!(csv.lines().count(), 21);
    }
}
