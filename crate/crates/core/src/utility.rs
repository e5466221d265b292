//! Utility functions, utility functionals and their large-loss behaviour.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::pwl::PiecewiseLinear;
use crate::scenarios::compensated_sum;

/// A one-dimensional utility function `u` with `u(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UtilityFunction {
    /// `u(y) = a y`
    Linear {
        a: f64,
    },
    /// `u(y) = 1 - exp(-a y)`
    Exponential {
        a: f64,
    },
    /// `u(y) = y^γ / γ` for `y >= 0`, `-∞` otherwise
    Power {
        gamma: f64,
    },
    /// `u(y) = y^α` for `y >= 0`, `-(-y)^β` otherwise
    #[serde(rename = "sshaped")]
    SShaped {
        alpha: f64,
        beta: f64,
    },
    /// `u(y) = 1 - exp(-y)` for `y >= 0`, `exp(y) - 1` otherwise
    BoundedExponential,
    PiecewiseLinear {
        knots: PiecewiseLinear,
    },
}

/// Asymptotic loss-gain ratio `limsup u(-y)/u(y)` as `y → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum AlgVerdict {
    NegativeInfinity,
    Finite(f64),
}

impl AlgVerdict {
    pub fn is_neg_infinite(self) -> bool {
        matches!(self, AlgVerdict::NegativeInfinity)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            AlgVerdict::NegativeInfinity => f64::NEG_INFINITY,
            AlgVerdict::Finite(v) => v,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

impl UtilityFunction {
    pub fn linear(a: f64) -> Result<Self> {
        positive("a", a)?;
        Ok(UtilityFunction::Linear { a })
    }

    pub fn exponential(a: f64) -> Result<Self> {
        positive("a", a)?;
        Ok(UtilityFunction::Exponential { a })
    }

    pub fn power(gamma: f64) -> Result<Self> {
        unit_open("gamma", gamma)?;
        Ok(UtilityFunction::Power { gamma })
    }

    pub fn s_shaped(alpha: f64, beta: f64) -> Result<Self> {
        unit_open("alpha", alpha)?;
        unit_open("beta", beta)?;
        Ok(UtilityFunction::SShaped { alpha, beta })
    }

    /// Piecewise-linear utility through `knots`; it must strictly increase
    /// eventually so that it is not satiated.
    pub fn piecewise_linear(knots: &[(f64, f64)]) -> Result<Self> {
        let f = PiecewiseLinear::new(knots)?;
        if f.right_slope() <= 0.0 {
            return Err(Error::InvalidSpec(
                "utility must keep increasing beyond the last knot".into(),
            ));
        }
        Ok(UtilityFunction::PiecewiseLinear { knots: f })
    }

    /// Re-checks parameter ranges, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            UtilityFunction::Linear { a } | UtilityFunction::Exponential { a } => positive("a", *a),
            UtilityFunction::Power { gamma } => unit_open("gamma", *gamma),
            UtilityFunction::SShaped { alpha, beta } => {
                unit_open("alpha", *alpha).and(unit_open("beta", *beta))
            }
            UtilityFunction::BoundedExponential => Ok(()),
            UtilityFunction::PiecewiseLinear { knots } => {
                UtilityFunction::piecewise_linear(&knots.knots()).map(|_| ())
            }
        }
    }

    /// `u(y)`; `-∞` only for the power utility at negative wealth.
    pub fn value(&self, y: f64) -> f64 {
        match self {
            UtilityFunction::Linear { a } => a * y,
            UtilityFunction::Exponential { a } => -(-a * y).exp_m1(),
            UtilityFunction::Power { gamma } => {
                if y >= 0.0 {
                    y.powf(*gamma) / gamma
                } else {
                    f64::NEG_INFINITY
                }
            }
            UtilityFunction::SShaped { alpha, beta } => {
                if y >= 0.0 {
                    y.powf(*alpha)
                } else {
                    -(-y).powf(*beta)
                }
            }
            UtilityFunction::BoundedExponential => {
                if y >= 0.0 {
                    -(-y).exp_m1()
                } else {
                    y.exp_m1()
                }
            }
            UtilityFunction::PiecewiseLinear { knots } => knots.eval(y),
        }
    }

    /// `u(∞)`.
    pub fn bliss(&self) -> f64 {
        match self {
            UtilityFunction::Exponential { .. } | UtilityFunction::BoundedExponential => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// Closed-form asymptotic loss-gain ratio.
    pub fn alg(&self) -> AlgVerdict {
        match self {
            UtilityFunction::Linear { .. } | UtilityFunction::BoundedExponential => {
                AlgVerdict::Finite(-1.0)
            }
            UtilityFunction::Exponential { .. } | UtilityFunction::Power { .. } => {
                AlgVerdict::NegativeInfinity
            }
            // u(-y)/u(y) = -y^(β-α)
            UtilityFunction::SShaped { alpha, beta } => {
                if alpha < beta {
                    AlgVerdict::NegativeInfinity
                } else if alpha == beta {
                    AlgVerdict::Finite(-1.0)
                } else {
                    AlgVerdict::Finite(0.0)
                }
            }
            UtilityFunction::PiecewiseLinear { knots } => {
                AlgVerdict::Finite(-knots.left_slope() / knots.right_slope() + 0.0)
            }
        }
    }

    /// Unbounded above or below.
    pub fn is_unbounded(&self) -> bool {
        !matches!(self, UtilityFunction::BoundedExponential)
    }

    /// `u(λy) >= λu(y)` for `y > 0`, `λ ∈ (0, 1)`.
    pub fn neg_star_shaped_on_positives(&self) -> bool {
        match self {
            UtilityFunction::PiecewiseLinear { knots } => knots.ratio_nonincreasing_on_positives(),
            _ => true,
        }
    }

    /// `u(λy) >= λu(y)` for all real `y`, `λ ∈ (0, 1)`.
    pub fn neg_star_shaped(&self) -> bool {
        match self {
            UtilityFunction::Linear { .. }
            | UtilityFunction::Exponential { .. }
            | UtilityFunction::Power { .. } => true,
            UtilityFunction::SShaped { .. } | UtilityFunction::BoundedExponential => false,
            UtilityFunction::PiecewiseLinear { knots } => {
                knots.ratio_nonincreasing_on_positives() && knots.ratio_nonincreasing_on_negatives()
            }
        }
    }

    pub fn is_concave(&self) -> bool {
        match self {
            UtilityFunction::Linear { .. }
            | UtilityFunction::Exponential { .. }
            | UtilityFunction::Power { .. } => true,
            UtilityFunction::SShaped { .. } | UtilityFunction::BoundedExponential => false,
            UtilityFunction::PiecewiseLinear { knots } => knots.is_concave(),
        }
    }

    pub fn is_linear(&self) -> bool {
        match self {
            UtilityFunction::Linear { .. } => true,
            UtilityFunction::PiecewiseLinear { knots } => knots.is_concave() && knots.is_convex(),
            _ => false,
        }
    }

    /// `u(λy) = λu(y)` for `λ > 0`.
    pub fn positively_homogeneous(&self) -> bool {
        match self {
            UtilityFunction::Linear { .. } => true,
            UtilityFunction::PiecewiseLinear { knots } => {
                knots.ratio_nonincreasing_on_positives()
                    && knots.ratio_nondecreasing_on_positives()
                    && knots.ratio_nonincreasing_on_negatives()
                    && knots.ratio_nondecreasing_on_negatives()
            }
            _ => false,
        }
    }
}

/// Analytic properties of a utility functional, fixed by the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityMeta {
    pub upper_fatou: bool,
    pub law_invariant: bool,
    pub sensitivity_equivalent: bool,
    pub unbounded: bool,
    pub neg_star_shaped_on_plus: bool,
    #[serde(with = "crate::serde_ext::extended")]
    pub bliss_value: f64,
    pub monotone: bool,
    pub concave: bool,
    pub cash_concave: bool,
    pub cash_additive: bool,
    pub positively_homogeneous: bool,
    pub neg_star_shaped: bool,
}

/// A utility functional on scenario payoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilitySpec {
    /// `E[u(Y)]`
    ExpectedUtility { u: UtilityFunction },
    /// `E[Y]`
    Mean,
    /// `min Y` if `Y >= 0`, otherwise `1 - exp(-E[Y])`.
    EssinfMean,
    /// `min_s Y_s 1_A(s)` for a scenario index set `A` (0-based).
    PartitionEssinf { set: Vec<usize> },
}

/// Large-loss verdicts for one functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SllReport {
    pub sll: bool,
    pub weak_sll: bool,
    pub applicable: bool,
    pub reason: String,
}

impl UtilitySpec {
    pub fn expected(u: UtilityFunction) -> Self {
        UtilitySpec::ExpectedUtility { u }
    }

    /// Evaluates the functional on payoff `y` under `probs`.
    pub fn value(&self, y: &[f64], probs: &[f64]) -> Result<f64> {
        check_len(probs.len(), y.len())?;
        Ok(match self {
            UtilitySpec::ExpectedUtility { u } => expected_utility(u, y, probs),
            UtilitySpec::Mean => mean(y, probs),
            UtilitySpec::EssinfMean => {
                let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
                if lo >= 0.0 {
                    lo
                } else {
                    -(-mean(y, probs)).exp_m1()
                }
            }
            UtilitySpec::PartitionEssinf { set } => {
                if let Some(bad) = set.iter().find(|&&s| s >= y.len()) {
                    return Err(Error::Shape(format!(
                        "scenario index {bad} out of range for {} scenarios",
                        y.len()
                    )));
                }
                (0..y.len())
                    .map(|s| if set.contains(&s) { y[s] } else { 0.0 })
                    .fold(f64::INFINITY, f64::min)
            }
        })
    }

    pub fn metadata(&self) -> UtilityMeta {
        match self {
            UtilitySpec::Mean => UtilityMeta {
                upper_fatou: true,
                law_invariant: true,
                sensitivity_equivalent: true,
                unbounded: true,
                neg_star_shaped_on_plus: true,
                bliss_value: f64::INFINITY,
                monotone: true,
                concave: true,
                cash_concave: true,
                cash_additive: true,
                positively_homogeneous: true,
                neg_star_shaped: true,
            },
            UtilitySpec::ExpectedUtility { u } => {
                let unbounded = u.is_unbounded();
                let nss_plus = u.neg_star_shaped_on_positives();
                UtilityMeta {
                    // every catalog utility is continuous where finite
                    upper_fatou: true,
                    law_invariant: true,
                    sensitivity_equivalent: unbounded && nss_plus,
                    unbounded,
                    neg_star_shaped_on_plus: nss_plus,
                    bliss_value: u.bliss(),
                    monotone: true,
                    concave: u.is_concave(),
                    // a constant-plus-payoff mix reduces cash-concavity of E[u] to concavity of u
                    cash_concave: u.is_concave(),
                    cash_additive: u.is_linear(),
                    positively_homogeneous: u.positively_homogeneous(),
                    neg_star_shaped: u.neg_star_shaped(),
                }
            }
            UtilitySpec::EssinfMean => UtilityMeta {
                upper_fatou: true,
                law_invariant: true,
                sensitivity_equivalent: false,
                unbounded: true,
                neg_star_shaped_on_plus: false,
                bliss_value: f64::INFINITY,
                // jumps down from f(E[Y]) near 1 to min Y near 0 when the loss vanishes
                monotone: false,
                concave: false,
                cash_concave: false,
                cash_additive: false,
                positively_homogeneous: false,
                neg_star_shaped: false,
            },
            UtilitySpec::PartitionEssinf { .. } => UtilityMeta {
                upper_fatou: true,
                law_invariant: false,
                // neither weakly nor strongly sensitive, so trivially equivalent
                sensitivity_equivalent: true,
                unbounded: true,
                neg_star_shaped_on_plus: true,
                // U(c) = min(c, 0) once some scenario lies outside the set
                bliss_value: 0.0,
                monotone: true,
                concave: true,
                cash_concave: true,
                cash_additive: false,
                positively_homogeneous: true,
                neg_star_shaped: true,
            },
        }
    }

    /// Sensitivity to large losses from the analytic catalog.
    pub fn sll(&self) -> SllReport {
        match self {
            UtilitySpec::Mean => SllReport {
                sll: false,
                weak_sll: false,
                applicable: true,
                reason: "the mean is linear: E[λY] stays positive for every λ when E[Y] > 0".into(),
            },
            UtilitySpec::ExpectedUtility { u: UtilityFunction::BoundedExponential } => SllReport {
                sll: false,
                weak_sll: true,
                applicable: true,
                reason: "bounded utility: E[u(λY)] tends to P[Y>0] - P[Y<0], below the bliss value 1 but \
                         positive when gains are more likely than losses"
                    .into(),
            },
            UtilitySpec::ExpectedUtility { u } => {
                let alg = u.alg();
                let applicable = u.is_unbounded() && u.neg_star_shaped_on_positives();
                if applicable {
                    let sll = alg.is_neg_infinite();
                    SllReport {
                        sll,
                        weak_sll: sll,
                        applicable,
                        reason: format!(
                            "unbounded utility, negatively star-shaped on the positive half-line; \
                             loss-gain ratio {}",
                            fmt_ext(alg.as_f64())
                        ),
                    }
                } else {
                    SllReport {
                        sll: false,
                        weak_sll: false,
                        applicable,
                        reason: "utility is not negatively star-shaped on the positive half-line; \
                                 the loss-gain ratio criterion does not apply"
                            .into(),
                    }
                }
            }
            UtilitySpec::EssinfMean => SllReport {
                sll: false,
                weak_sll: true,
                applicable: true,
                reason: "essinf/mean fixture: U(λY) = 1 - exp(-λE[Y]) tends to 1 when E[Y] > 0, \
                         which stays below the bliss value ∞"
                    .into(),
            },
            UtilitySpec::PartitionEssinf { .. } => SllReport {
                sll: false,
                weak_sll: false,
                applicable: true,
                reason: "partition fixture: a payoff losing only off the set keeps U(λY) = 0 = U(∞)".into(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            UtilitySpec::ExpectedUtility { u } => u.validate(),
            UtilitySpec::PartitionEssinf { set } if set.is_empty() => Err(Error::InvalidSpec(
                "partition fixture needs a non-empty scenario set".into(),
            )),
            _ => Ok(()),
        }
    }
}

pub(crate) fn fmt_ext(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn mean(y: &[f64], probs: &[f64]) -> f64 {
    y.iter().zip(probs).map(|(v, p)| v * p).sum()
}

/// `Σ p_s u(Y_s)`; a single `-∞` scenario makes the total `-∞`.
pub fn expected_utility(u: &UtilityFunction, y: &[f64], probs: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(y.len());
    for (v, p) in y.iter().zip(probs) {
        let uv = u.value(*v);
        if uv == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        terms.push(p * uv);
    }
    compensated_sum(&terms)
}

/// `u(-y)/u(y)` along an increasing grid of positive points.
pub fn numeric_alg_trace(u: &UtilityFunction, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&y| {
            let up = u.value(y);
            if !(up > 0.0) {
                return Err(Error::Domain(format!("u({y}) = {up} is not positive")));
            }
            Ok(u.value(-y) / up)
        })
        .collect()
}
