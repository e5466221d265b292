//! Market-independent well-posedness from catalog metadata.
//!
//! Sufficient: `U` upper Fatou, `R` lower Fatou, and either `U` sensitive
//! to large losses or `R` sensitive to large losses and cash-convex.
//! Necessary (when `U` is also sensitivity equivalent, `R` cash-convex and
//! one side law-invariant): one of the two sensitivities.

use serde::{Deserialize, Serialize};

use crate::risk::RiskSpec;
use crate::utility::UtilitySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PremiseCode {
    UNotUpperFatou,
    UNotSensitivityEquivalent,
    RNotLowerFatou,
    RNotCashConvex,
    NoLawInvariantSide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    WellPosed,
    IllPosed,
    Unknown { reasons: Vec<PremiseCode> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawInvarianceSide {
    Neither,
    Utility,
    Risk,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub u_sll: bool,
    pub r_sll: bool,
    pub u_weak_sll: bool,
    pub u_upper_fatou: bool,
    pub u_sensitivity_equiv: bool,
    pub r_lower_fatou: bool,
    pub r_cash_convex: bool,
    pub law_invariance_side: LawInvarianceSide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub basis: Basis,
    pub citations: Vec<String>,
}

impl Classification {
    pub fn is_well_posed(&self) -> bool {
        self.verdict == Verdict::WellPosed
    }
}

const EITHER_OR: &str = "either-or characterization: well-posed in every market iff U or R is sensitive to large losses";
const SUFFICIENCY: &str = "sufficiency: a sensitive utility, or a sensitive cash-convex risk, bounds every maximizing sequence";
const EXPECTED_UTILITY: &str =
    "expected-utility dichotomy: for unbounded, upper semicontinuous u negatively star-shaped on the gains, ALG(u) = -inf or a sensitive risk";
const ALG: &str = "expected utility is sensitive to large losses iff ALG(u) = -inf";

pub fn classify_wellposedness(utility: &UtilitySpec, risk: &RiskSpec) -> Classification {
    let um = utility.metadata();
    let rm = risk.metadata();
    let us = utility.sll();
    let rs = risk.sll();
    let side = match (um.law_invariant, rm.law_invariant) {
        (true, true) => LawInvarianceSide::Both,
        (true, false) => LawInvarianceSide::Utility,
        (false, true) => LawInvarianceSide::Risk,
        (false, false) => LawInvarianceSide::Neither,
    };
    let basis = Basis {
        u_sll: us.sll,
        r_sll: rs.sll,
        u_weak_sll: us.weak_sll,
        u_upper_fatou: um.upper_fatou,
        u_sensitivity_equiv: um.sensitivity_equivalent,
        r_lower_fatou: rm.lower_fatou,
        r_cash_convex: rm.cash_convex,
        law_invariance_side: side,
    };

    let mut citations = Vec::new();
    let expected = matches!(utility, UtilitySpec::ExpectedUtility { .. });
    if expected && um.unbounded && um.neg_star_shaped_on_plus {
        citations.push(EXPECTED_UTILITY.to_string());
        citations.push(ALG.to_string());
    }

    let sufficient = basis.u_upper_fatou
        && basis.r_lower_fatou
        && (basis.u_sll || (basis.r_sll && basis.r_cash_convex));
    if sufficient {
        citations.push(SUFFICIENCY.to_string());
        return Classification {
            verdict: Verdict::WellPosed,
            basis,
            citations,
        };
    }

    let mut reasons = Vec::new();
    if !basis.u_upper_fatou {
        reasons.push(PremiseCode::UNotUpperFatou);
    }
    if !basis.u_sensitivity_equiv {
        reasons.push(PremiseCode::UNotSensitivityEquivalent);
    }
    if !basis.r_lower_fatou {
        reasons.push(PremiseCode::RNotLowerFatou);
    }
    if !basis.r_cash_convex {
        reasons.push(PremiseCode::RNotCashConvex);
    }
    if side == LawInvarianceSide::Neither {
        reasons.push(PremiseCode::NoLawInvariantSide);
    }
    citations.push(EITHER_OR.to_string());
    let verdict = if reasons.is_empty() {
        Verdict::IllPosed
    } else {
        Verdict::Unknown { reasons }
    };
    Classification {
        verdict,
        basis,
        citations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::UtilityFunction;

    #[test]
    fn headline_cells() {
        let var = RiskSpec::var(0.05).unwrap();
        assert_eq!(
            classify_wellposedness(&UtilitySpec::Mean, &var).verdict,
            Verdict::IllPosed
        );
        let power = UtilitySpec::expected(UtilityFunction::power(0.5).unwrap());
        let c = classify_wellposedness(&power, &RiskSpec::es(0.05).unwrap());
        assert_eq!(c.verdict, Verdict::WellPosed);
        assert!(c.basis.u_sll && !c.basis.r_sll);
        let c = classify_wellposedness(&UtilitySpec::Mean, &RiskSpec::entropic(1.0).unwrap());
        assert_eq!(c.verdict, Verdict::WellPosed);
    }

    #[test]
    fn pathological_fixtures_are_unknown() {
        let c = classify_wellposedness(
            &UtilitySpec::PartitionEssinf { set: vec![0] },
            &RiskSpec::PartitionFixture { set: vec![0] },
        );
        assert_eq!(
            c.verdict,
            Verdict::Unknown {
                reasons: vec![PremiseCode::NoLawInvariantSide]
            }
        );
        let c = classify_wellposedness(&UtilitySpec::EssinfMean, &RiskSpec::Zero);
        assert_eq!(
            c.verdict,
            Verdict::Unknown {
                reasons: vec![PremiseCode::UNotSensitivityEquivalent]
            }
        );
        let bounded = UtilitySpec::expected(UtilityFunction::BoundedExponential);
        let c = classify_wellposedness(&bounded, &RiskSpec::Zero);
        assert_eq!(
            c.verdict,
            Verdict::Unknown {
                reasons: vec![PremiseCode::UNotSensitivityEquivalent]
            }
        );
    }

    #[test]
    fn json_shape() {
        let c = classify_wellposedness(&UtilitySpec::Mean, &RiskSpec::var(0.05).unwrap());
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["verdict"], "IllPosed");
        assert_eq!(v["basis"]["law_invariance_side"], "both");
        assert!(!v["citations"].as_array().unwrap().is_empty());
    }
}
