//! Step-function parameters of the loss-VaR and adjusted-ES families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk form shared by both step functions:
/// `{"breakpoints": [...], "values": [...], "limit_at_zero": x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDocument {
    pub breakpoints: Vec<f64>,
    #[serde(with = "crate::serde_ext::extended_vec")]
    pub values: Vec<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_extended"
    )]
    pub limit_at_zero: Option<f64>,
}

mod opt_extended {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    struct Wrap(#[serde(with = "crate::serde_ext::extended")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => crate::serde_ext::extended::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Benchmark loss distribution `β`: level `b_1` on `(-∞, ℓ_1]` and `b_j` on
/// `(ℓ_{j-1}, ℓ_j]`, with `ℓ_1 < … < ℓ_k = 0` and `0 <= b_1 <= … <= b_k < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepDocument", into = "StepDocument")]
pub struct ThresholdDistribution {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl ThresholdDistribution {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != levels.len() {
            return Err(Error::InvalidSpec(
                "threshold distribution needs matching, non-empty breakpoints and levels".into(),
            ));
        }
        if breakpoints.iter().any(|l| !l.is_finite())
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidSpec(
                "threshold breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if *breakpoints.last().unwrap() != 0.0 {
            return Err(Error::InvalidSpec(
                "last threshold breakpoint must be 0".into(),
            ));
        }
        if levels.iter().any(|b| !(*b >= 0.0 && *b < 1.0)) || levels.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::InvalidSpec(
                "threshold levels must be increasing in [0, 1)".into(),
            ));
        }
        Ok(ThresholdDistribution {
            breakpoints,
            levels,
        })
    }

    /// `β ≡ alpha`.
    pub fn constant(alpha: f64) -> Result<Self> {
        ThresholdDistribution::new(vec![0.0], vec![alpha])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `inf β = b_1`.
    pub fn infimum(&self) -> f64 {
        self.levels[0]
    }
}

impl TryFrom<StepDocument> for ThresholdDistribution {
    type Error = Error;

    fn try_from(doc: StepDocument) -> Result<Self> {
        ThresholdDistribution::new(doc.breakpoints, doc.values)
    }
}

impl From<ThresholdDistribution> for StepDocument {
    fn from(t: ThresholdDistribution) -> Self {
        StepDocument {
            breakpoints: t.breakpoints,
            values: t.levels,
            limit_at_zero: None,
        }
    }
}

/// Decreasing risk profile `g` on `(0, 1]` with `g(1) = 0`: `g(0+)` on
/// `(0, α_1)`, `g_j` on `[α_j, α_{j+1})` and `g_k = 0` at `α_k = 1`.
/// Values may be `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepDocument", into = "StepDocument")]
pub struct RiskProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    limit_at_zero: f64,
}

impl RiskProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, limit_at_zero: f64) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidSpec(
                "risk profile needs matching, non-empty breakpoints and values".into(),
            ));
        }
        if breakpoints.iter().any(|a| !(*a > 0.0 && *a <= 1.0))
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidSpec(
                "profile breakpoints must be strictly increasing in (0, 1]".into(),
            ));
        }
        if *breakpoints.last().unwrap() != 1.0 || *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidSpec(
                "risk profile must end at breakpoint 1 with value 0".into(),
            ));
        }
        if values.iter().any(|g| g.is_nan() || *g < 0.0) || values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidSpec(
                "profile values must be decreasing in [0, ∞]".into(),
            ));
        }
        if limit_at_zero.is_nan() || limit_at_zero < values[0] {
            return Err(Error::InvalidSpec(
                "limit at zero must be at least the first profile value".into(),
            ));
        }
        Ok(RiskProfile {
            breakpoints,
            values,
            limit_at_zero,
        })
    }

    /// `g = ∞` on `(0, alpha)`, `0` on `[alpha, 1]`.
    pub fn expected_shortfall(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            RiskProfile::new(vec![1.0], vec![0.0], f64::INFINITY)
        } else {
            RiskProfile::new(vec![alpha, 1.0], vec![0.0, 0.0], f64::INFINITY)
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn limit_at_zero(&self) -> f64 {
        self.limit_at_zero
    }

    pub fn is_finite(&self) -> bool {
        self.limit_at_zero.is_finite()
    }
}

impl TryFrom<StepDocument> for RiskProfile {
    type Error = Error;

    fn try_from(doc: StepDocument) -> Result<Self> {
        let first = doc.values.first().copied().unwrap_or(0.0);
        RiskProfile::new(
            doc.breakpoints,
            doc.values,
            doc.limit_at_zero.unwrap_or(first),
        )
    }
}

impl From<RiskProfile> for StepDocument {
    fn from(g: RiskProfile) -> Self {
        StepDocument {
            breakpoints: g.breakpoints,
            values: g.values,
            limit_at_zero: Some(g.limit_at_zero),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ThresholdDistribution::new(vec![-1.0, 0.0], vec![0.0, 0.05]).is_ok());
        assert!(ThresholdDistribution::new(vec![-1.0, 0.0], vec![0.1, 0.05]).is_err());
        assert!(ThresholdDistribution::new(vec![-1.0], vec![0.1]).is_err());
        assert!(ThresholdDistribution::new(vec![0.0], vec![1.0]).is_err());
        assert!(RiskProfile::new(vec![0.05, 1.0], vec![0.0, 0.0], 1.0).is_ok());
        assert!(RiskProfile::new(vec![0.05, 1.0], vec![0.0, 1.0], 1.0).is_err());
        assert!(RiskProfile::new(vec![0.05, 0.9], vec![1.0, 0.0], 1.0).is_err());
        assert!(RiskProfile::new(vec![0.5, 1.0], vec![2.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn json_forms() {
        let g: RiskProfile = serde_json::from_str(
            r#"{"breakpoints":[0.05,1],"values":["inf",0],"limit_at_zero":"inf"}"#,
        )
        .unwrap();
        assert!(!g.is_finite());
        assert_eq!(g.values()[0], f64::INFINITY);
        let back: RiskProfile = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let b: ThresholdDistribution =
            serde_json::from_str(r#"{"breakpoints":[-2,0],"values":[0,0.5]}"#).unwrap();
        assert_eq!(b.infimum(), 0.0);
    }
}
