//! Scenario-based utility/risk portfolio selection.
//!
//! The crate evaluates utility functionals `U` and risk functionals `R` on
//! finite scenario markets, solves `sup U(X_π)` subject to `R(X_π) <= R̃`
//! (and the reverse risk-minimization problem), detects portfolio sequences
//! whose utility runs off to the bliss value with bounded risk, and
//! classifies utility/risk pairs by whether the problem has a solution in
//! every arbitrage-free market.
//!
//! ```
//! use utilrisk::{make_scenario_set, RiskSpec, UtilitySpec};
//!
//! let market = make_scenario_set(&[vec![2.0], vec![-1.0]], &[0.5, 0.5], 0.0).unwrap();
//! let payoff = market.portfolio(&[0.5]);
//! let es = RiskSpec::es(0.5).unwrap();
//! assert_eq!(es.value(&payoff, market.probs()).unwrap(), 0.5);
//! assert_eq!(UtilitySpec::Mean.value(&payoff, market.probs()).unwrap(), 0.25);
//! ```

// `!(x > 0.0)` is used on purpose to reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod normal;
pub mod optimizer;
pub mod parse;
pub mod pwl;
pub mod risk;
pub mod rng;
pub mod scenarios;
pub mod serde_ext;
pub mod transform;
pub mod utility;

pub use error::{Error, Result};
pub use exec::Execution;
pub use risk::{LossFunction, RiskMeta, RiskProfile, RiskSpec, ThresholdDistribution};
pub use scenarios::{
    discretize_gaussian, make_scenario_set, validate_market, GaussianMarket, MarketReport, Payoff,
    ScenarioSet,
};
pub use transform::{fractions_to_shares, shares_to_fractions, FrameEvaluator, ProblemFrame};
pub use utility::{AlgVerdict, SllReport, UtilityFunction, UtilityMeta, UtilitySpec};
