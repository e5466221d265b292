use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pwl::PiecewiseLinear;
use crate::utility::AlgVerdict;

/// An increasing loss function `ℓ` with `ℓ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LossFunction {
    /// `ℓ(y) = y`
    Identity,
    /// `ℓ(y) = (exp(a y) - 1) / a`
    ExpMinusOne {
        a: f64,
    },
    /// `ℓ(y) = c max(y, 0)`
    PositivePart {
        c: f64,
    },
    /// `ℓ(y) = c max(y, 0)^p`
    PowerPlus {
        p: f64,
        c: f64,
    },
    PiecewiseLinear {
        knots: PiecewiseLinear,
    },
}

impl LossFunction {
    pub fn exp_minus_one(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "exponential loss rate must be positive, got {a}"
            )));
        }
        Ok(LossFunction::ExpMinusOne { a })
    }

    pub fn positive_part(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "positive-part weight must be positive, got {c}"
            )));
        }
        Ok(LossFunction::PositivePart { c })
    }

    pub fn power_plus(p: f64, c: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0 && c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "power loss needs p > 1 and c > 0, got p={p}, c={c}"
            )));
        }
        Ok(LossFunction::PowerPlus { p, c })
    }

    pub fn piecewise_linear(knots: &[(f64, f64)]) -> Result<Self> {
        Ok(LossFunction::PiecewiseLinear {
            knots: PiecewiseLinear::new(knots)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossFunction::Identity => Ok(()),
            LossFunction::ExpMinusOne { a } => LossFunction::exp_minus_one(*a).map(|_| ()),
            LossFunction::PositivePart { c } => LossFunction::positive_part(*c).map(|_| ()),
            LossFunction::PowerPlus { p, c } => LossFunction::power_plus(*p, *c).map(|_| ()),
            LossFunction::PiecewiseLinear { knots } => {
                PiecewiseLinear::new(&knots.knots()).map(|_| ())
            }
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        match self {
            LossFunction::Identity => y,
            LossFunction::ExpMinusOne { a } => (a * y).exp_m1() / a,
            LossFunction::PositivePart { c } => c * y.max(0.0),
            LossFunction::PowerPlus { p, c } => c * y.max(0.0).powf(*p),
            LossFunction::PiecewiseLinear { knots } => knots.eval(y),
        }
    }

    /// `limsup ℓ(y)/ℓ(-y)` as `y → ∞`; a left tail that vanishes counts as `-∞`.
    pub fn alg(&self) -> AlgVerdict {
        match self {
            LossFunction::Identity => AlgVerdict::Finite(-1.0),
            LossFunction::ExpMinusOne { .. }
            | LossFunction::PositivePart { .. }
            | LossFunction::PowerPlus { .. } => AlgVerdict::NegativeInfinity,
            LossFunction::PiecewiseLinear { knots } => {
                let left = knots.left_slope();
                let right = knots.right_slope();
                if left == 0.0 {
                    if right > 0.0 {
                        AlgVerdict::NegativeInfinity
                    } else {
                        AlgVerdict::Finite(0.0)
                    }
                } else {
                    AlgVerdict::Finite(-right / left + 0.0)
                }
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            LossFunction::PiecewiseLinear { knots } => knots.is_convex(),
            _ => true,
        }
    }

    /// `ℓ(λy) <= λℓ(y)` for all real `y` and `λ ∈ (0, 1)`.
    pub fn pos_star_shaped(&self) -> bool {
        match self {
            LossFunction::PiecewiseLinear { knots } => {
                knots.ratio_nondecreasing_on_positives() && knots.ratio_nondecreasing_on_negatives()
            }
            _ => true,
        }
    }

    /// `ℓ(λy) = λℓ(y)` for `λ > 0`.
    pub fn positively_homogeneous(&self) -> bool {
        match self {
            LossFunction::Identity | LossFunction::PositivePart { .. } => true,
            LossFunction::ExpMinusOne { .. } | LossFunction::PowerPlus { .. } => false,
            LossFunction::PiecewiseLinear { knots } => {
                knots.ratio_nondecreasing_on_positives()
                    && knots.ratio_nonincreasing_on_positives()
                    && knots.ratio_nondecreasing_on_negatives()
                    && knots.ratio_nonincreasing_on_negatives()
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        match self {
            LossFunction::Identity => true,
            LossFunction::PiecewiseLinear { knots } => knots.is_convex() && knots.is_concave(),
            _ => false,
        }
    }

    pub fn positive_on_positives(&self) -> bool {
        match self {
            LossFunction::PiecewiseLinear { knots } => knots.positive_on_positives(),
            _ => true,
        }
    }

    pub fn vanishes_on_negatives(&self) -> bool {
        match self {
            LossFunction::PositivePart { .. } | LossFunction::PowerPlus { .. } => true,
            LossFunction::PiecewiseLinear { knots } => knots.vanishes_on_negatives(),
            _ => false,
        }
    }

    /// `ℓ(y) >= y` for every `y`, required for optimized certainty equivalents.
    pub fn dominates_identity(&self) -> bool {
        match self {
            LossFunction::Identity | LossFunction::ExpMinusOne { .. } => true,
            LossFunction::PositivePart { c } => *c >= 1.0,
            // c y^p < y just right of zero
            LossFunction::PowerPlus { .. } => false,
            LossFunction::PiecewiseLinear { knots } => knots.dominates_identity(),
        }
    }

    /// `liminf ℓ(y)/y = ∞` as `y → ∞`.
    pub fn superlinear_gains(&self) -> bool {
        matches!(
            self,
            LossFunction::ExpMinusOne { .. } | LossFunction::PowerPlus { .. }
        )
    }

    /// `limsup ℓ(y)/y = 0` as `y → -∞`.
    pub fn flat_left_tail(&self) -> bool {
        match self {
            LossFunction::Identity => false,
            LossFunction::ExpMinusOne { .. }
            | LossFunction::PositivePart { .. }
            | LossFunction::PowerPlus { .. } => true,
            LossFunction::PiecewiseLinear { knots } => knots.left_slope() == 0.0,
        }
    }

    /// `lim ℓ(y)` as `y → -∞`.
    pub fn left_limit(&self) -> f64 {
        match self {
            LossFunction::Identity => f64::NEG_INFINITY,
            LossFunction::ExpMinusOne { a } => -1.0 / a,
            LossFunction::PositivePart { .. } | LossFunction::PowerPlus { .. } => 0.0,
            LossFunction::PiecewiseLinear { knots } => {
                if knots.left_slope() > 0.0 {
                    f64::NEG_INFINITY
                } else {
                    knots.knots()[0].1
                }
            }
        }
    }
}
