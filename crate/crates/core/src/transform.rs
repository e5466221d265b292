//! Wealth/rate reparametrization and the share/fraction bijection.
//!
//! With initial wealth `w` and rate `r`, a portfolio holding fractions `π`
//! of wealth in the risky assets has terminal wealth `w(1+r) + w X_π`. The
//! transformed functionals
//!
//! ```text
//! U_{w,r}(Y) = U(w(1+r) + wY) - U(w(1+r))
//! R_{w,r}(Y) = R(w(1+r) + wY) - R(w(1+r))
//! ```
//!
//! are normalized, so the share-space problem with threshold `R_max` and the
//! fraction-space problem with `R̃_max = R_max - R(w(1+r))` share optimizers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::RiskSpec;
use crate::utility::UtilitySpec;

/// Tolerance on the budget identity `θ·S₀ = w`.
pub const BUDGET_TOL: f64 = 1e-12;

/// Wealth, rate and risk thresholds of one problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemFrame {
    pub w: f64,
    pub r: f64,
    /// Share-space threshold on `R(θ·S₁)`.
    pub r_max: f64,
    /// Fraction-space threshold on `R_{w,r}(X_π)`.
    pub r_tilde_max: f64,
    /// `R(w(1+r))`, computed once.
    pub risk_baseline: f64,
}

fn check_wealth(w: f64, r: f64) -> Result<()> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::Domain(format!(
            "initial wealth must be positive, got {w}"
        )));
    }
    if !(r.is_finite() && r > -1.0) {
        return Err(Error::Domain(format!("rate must exceed -1, got {r}")));
    }
    Ok(())
}

fn constant_value(f: impl Fn(&[f64], &[f64]) -> Result<f64>, c: f64, probs: &[f64]) -> Result<f64> {
    f(&vec![c; probs.len()], probs)
}

impl ProblemFrame {
    /// Frame from the share-space threshold `R_max >= R(w(1+r))`.
    pub fn from_r_max(risk: &RiskSpec, probs: &[f64], w: f64, r: f64, r_max: f64) -> Result<Self> {
        check_wealth(w, r)?;
        let base = constant_value(|y, p| risk.value(y, p), w * (1.0 + r), probs)?;
        if !base.is_finite() {
            return Err(Error::Domain(format!(
                "risk of the riskless position is {base}"
            )));
        }
        if r_max < base - 1e-12 * (1.0 + base.abs()) {
            return Err(Error::Domain(format!(
                "risk threshold {r_max} lies below the riskless risk {base}"
            )));
        }
        Ok(ProblemFrame {
            w,
            r,
            r_max,
            r_tilde_max: (r_max - base).max(0.0),
            risk_baseline: base,
        })
    }

    /// Frame from the fraction-space threshold `R̃_max >= 0`.
    pub fn from_r_tilde(
        risk: &RiskSpec,
        probs: &[f64],
        w: f64,
        r: f64,
        r_tilde_max: f64,
    ) -> Result<Self> {
        check_wealth(w, r)?;
        if !(r_tilde_max >= 0.0) {
            return Err(Error::Domain(format!(
                "fraction-space threshold must be >= 0, got {r_tilde_max}"
            )));
        }
        let base = constant_value(|y, p| risk.value(y, p), w * (1.0 + r), probs)?;
        if !base.is_finite() {
            return Err(Error::Domain(format!(
                "risk of the riskless position is {base}"
            )));
        }
        Ok(ProblemFrame {
            w,
            r,
            r_max: r_tilde_max + base,
            r_tilde_max,
            risk_baseline: base,
        })
    }

    /// Riskless terminal wealth `w(1+r)`.
    pub fn riskless_wealth(&self) -> f64 {
        self.w * (1.0 + self.r)
    }
}

/// `U_{w,r}(Y)` evaluated directly from the definition.
pub fn transformed_utility(
    spec: &UtilitySpec,
    frame: &ProblemFrame,
    y: &[f64],
    probs: &[f64],
) -> Result<f64> {
    let base = frame.riskless_wealth();
    let u0 = constant_value(|v, p| spec.value(v, p), base, probs)?;
    let shifted: Vec<f64> = y.iter().map(|v| base + frame.w * v).collect();
    difference(spec.value(&shifted, probs)?, u0)
}

/// `R_{w,r}(Y)` evaluated directly from the definition.
pub fn transformed_risk(
    spec: &RiskSpec,
    frame: &ProblemFrame,
    y: &[f64],
    probs: &[f64],
) -> Result<f64> {
    let base = frame.riskless_wealth();
    let r0 = constant_value(|v, p| spec.value(v, p), base, probs)?;
    let shifted: Vec<f64> = y.iter().map(|v| base + frame.w * v).collect();
    difference(spec.value(&shifted, probs)?, r0)
}

fn difference(value: f64, baseline: f64) -> Result<f64> {
    if !baseline.is_finite() {
        return Err(Error::Domain(format!(
            "functional is {baseline} at the riskless position"
        )));
    }
    Ok(if value.is_infinite() {
        value
    } else {
        value - baseline
    })
}

/// Transformed utility and risk for one problem with cached baselines.
#[derive(Debug, Clone)]
pub struct FrameEvaluator {
    utility: UtilitySpec,
    risk: RiskSpec,
    frame: ProblemFrame,
    probs: Vec<f64>,
    utility_baseline: f64,
    risk_baseline: f64,
}

impl FrameEvaluator {
    pub fn new(
        utility: &UtilitySpec,
        risk: &RiskSpec,
        frame: &ProblemFrame,
        probs: &[f64],
    ) -> Result<Self> {
        let base = frame.riskless_wealth();
        let utility_baseline = constant_value(|v, p| utility.value(v, p), base, probs)?;
        let risk_baseline = constant_value(|v, p| risk.value(v, p), base, probs)?;
        for (name, v) in [("utility", utility_baseline), ("risk", risk_baseline)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "{name} of the riskless position is {v}"
                )));
            }
        }
        Ok(FrameEvaluator {
            utility: utility.clone(),
            risk: risk.clone(),
            frame: *frame,
            probs: probs.to_vec(),
            utility_baseline,
            risk_baseline,
        })
    }

    pub fn frame(&self) -> &ProblemFrame {
        &self.frame
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn utility_spec(&self) -> &UtilitySpec {
        &self.utility
    }

    pub fn risk_spec(&self) -> &RiskSpec {
        &self.risk
    }

    /// `U(w(1+r))`.
    pub fn utility_baseline(&self) -> f64 {
        self.utility_baseline
    }

    /// `R(w(1+r))`.
    pub fn risk_baseline(&self) -> f64 {
        self.risk_baseline
    }

    fn wealth(&self, y: &[f64]) -> Vec<f64> {
        let base = self.frame.riskless_wealth();
        y.iter().map(|v| base + self.frame.w * v).collect()
    }

    /// `U_{w,r}(Y)`.
    pub fn utility(&self, y: &[f64]) -> Result<f64> {
        let v = self.utility.value(&self.wealth(y), &self.probs)?;
        Ok(if v.is_infinite() {
            v
        } else {
            v - self.utility_baseline
        })
    }

    /// `R_{w,r}(Y)`.
    pub fn risk(&self, y: &[f64]) -> Result<f64> {
        let v = self.risk.value(&self.wealth(y), &self.probs)?;
        Ok(if v.is_infinite() {
            v
        } else {
            v - self.risk_baseline
        })
    }
}

/// `π^i = θ^i / w` for the risky holdings of `θ = (θ⁰, θ¹, …, θᵈ)` with unit
/// prices.
pub fn shares_to_fractions(theta: &[f64], w: f64) -> Result<Vec<f64>> {
    if theta.is_empty() {
        return Err(Error::Shape(
            "share vector needs the riskless holding θ⁰".into(),
        ));
    }
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::Domain(format!(
            "initial wealth must be positive, got {w}"
        )));
    }
    let cost: f64 = theta.iter().sum();
    if (cost - w).abs() > BUDGET_TOL * (1.0 + w.abs()) {
        return Err(Error::Budget { cost, wealth: w });
    }
    Ok(theta[1..].iter().map(|t| t / w).collect())
}

/// Inverse of [`shares_to_fractions`]: `θ^i = wπ^i`, `θ⁰ = w - Σθ^i`.
pub fn fractions_to_shares(pi: &[f64], w: f64) -> Result<Vec<f64>> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::Domain(format!(
            "initial wealth must be positive, got {w}"
        )));
    }
    let risky: Vec<f64> = pi.iter().map(|p| w * p).collect();
    let mut theta = Vec::with_capacity(pi.len() + 1);
    theta.push(w - risky.iter().sum::<f64>());
    theta.extend(risky);
    Ok(theta)
}
