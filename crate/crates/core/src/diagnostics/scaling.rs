//! Scaling probes: how a functional behaves on `λY` as `λ` grows.

use serde::{Deserialize, Serialize};

use super::harness::Functional;
use crate::error::{Error, Result};

/// `2^0, 2^1, …, 2^40`.
pub fn default_schedule() -> Vec<f64> {
    (0..=40).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTrace {
    pub lambdas: Vec<f64>,
    #[serde(with = "crate::serde_ext::extended_vec")]
    pub values: Vec<f64>,
    /// Utility is negative (risk positive) from some scale to the end of the
    /// schedule.
    pub crossed: bool,
    pub lambda_at_cross: Option<f64>,
}

/// Evaluates the functional along `λY` for each `λ` in `schedule`.
pub fn scaling_probe(
    side: &Functional,
    y: &[f64],
    probs: &[f64],
    schedule: &[f64],
) -> Result<ScalingTrace> {
    if !y.iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("payoff has no loss scenario".into()));
    }
    let values: Vec<f64> = schedule
        .iter()
        .map(|&l| {
            let scaled: Vec<f64> = y.iter().map(|v| l * v).collect();
            side.value(&scaled, probs)
        })
        .collect::<Result<_>>()?;
    let bad = |v: f64| match side {
        Functional::Utility(_) => v < 0.0,
        Functional::Risk(_) => v > 0.0,
    };
    let mut first = values.len();
    while first > 0 && bad(values[first - 1]) {
        first -= 1;
    }
    let crossed = first < values.len();
    Ok(ScalingTrace {
        lambda_at_cross: crossed.then(|| schedule[first]),
        lambdas: schedule.to_vec(),
        values,
        crossed,
    })
}
