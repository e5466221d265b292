//! Compact text grammar for catalog entries and JSON loaders.
//!
//! ```text
//! utility: mean | exp:A | power:G | sshaped:A,B | linear:A | boundedexp
//!        | pwl:X,Y;X,Y;... | essinf_mean | partition:I,J,...
//! risk:    zero | var:A | es:A | worstcase | entropic:A
//!        | lvar:FILE | adjes:FILE | ew:LOSS | sr:LOSS | oce:LOSS | partition:I,J,...
//! loss:    id | expm1:A | pospart:C | powplus:P,C | pwl:X,Y;X,Y;...
//! ```
//!
//! Any spec starting with `{` is read as the serde JSON form. `lvar` and
//! `adjes` take a step-function document, inline or from a file.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::SolveOptions;
use crate::risk::{LossFunction, RiskProfile, RiskSpec, ThresholdDistribution};
use crate::scenarios::{ScenarioDocument, ScenarioSet};
use crate::utility::{UtilityFunction, UtilitySpec};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

fn number(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => t
            .parse::<f64>()
            .map_err(|_| invalid(format!("not a number: {t:?}"))),
    }
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(number).collect::<Result<_>>()?;
    if v.len() != n {
        return Err(invalid(format!(
            "{what} takes {n} parameter(s), got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn knots(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(';')
        .filter(|k| !k.trim().is_empty())
        .map(|k| {
            let v = numbers(k, 2, "pwl knot")?;
            Ok((v[0], v[1]))
        })
        .collect()
}

fn indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("not a scenario index: {t:?}")))
        })
        .collect()
}

fn split(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((head, rest)) => (head.trim(), Some(rest)),
        None => (s.trim(), None),
    }
}

fn need<'a>(arg: Option<&'a str>, what: &str) -> Result<&'a str> {
    arg.ok_or_else(|| invalid(format!("{what} needs parameters after ':'")))
}

/// JSON text inline (starting with `{`) or from a file.
fn document<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let t = arg.trim();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(serde_json::from_str(t)?)
    } else {
        Ok(serde_json::from_str(&std::fs::read_to_string(t)?)?)
    }
}

pub fn parse_loss(s: &str) -> Result<LossFunction> {
    let s = s.trim();
    if s.starts_with('{') {
        let l: LossFunction = serde_json::from_str(s)?;
        l.validate()?;
        return Ok(l);
    }
    let (head, arg) = split(s);
    match head {
        "id" | "identity" => Ok(LossFunction::Identity),
        "expm1" => LossFunction::exp_minus_one(numbers(need(arg, head)?, 1, head)?[0]),
        "pospart" => LossFunction::positive_part(numbers(need(arg, head)?, 1, head)?[0]),
        "powplus" => {
            let v = numbers(need(arg, head)?, 2, head)?;
            LossFunction::power_plus(v[0], v[1])
        }
        "pwl" => LossFunction::piecewise_linear(&knots(need(arg, head)?)?),
        _ => Err(invalid(format!("unknown loss function {head:?}"))),
    }
}

pub fn parse_utility(s: &str) -> Result<UtilitySpec> {
    let s = s.trim();
    if s.starts_with('{') {
        let u: UtilitySpec = serde_json::from_str(s)?;
        u.validate()?;
        return Ok(u);
    }
    let (head, arg) = split(s);
    let eu = UtilitySpec::expected;
    match head {
        "mean" => Ok(UtilitySpec::Mean),
        "essinf_mean" => Ok(UtilitySpec::EssinfMean),
        "partition" => Ok(UtilitySpec::PartitionEssinf {
            set: indices(need(arg, head)?)?,
        }),
        "exp" => Ok(eu(UtilityFunction::exponential(
            numbers(need(arg, head)?, 1, head)?[0],
        )?)),
        "power" => Ok(eu(UtilityFunction::power(
            numbers(need(arg, head)?, 1, head)?[0],
        )?)),
        "linear" => Ok(eu(UtilityFunction::linear(
            numbers(need(arg, head)?, 1, head)?[0],
        )?)),
        "sshaped" => {
            let v = numbers(need(arg, head)?, 2, head)?;
            Ok(eu(UtilityFunction::s_shaped(v[0], v[1])?))
        }
        "boundedexp" => Ok(eu(UtilityFunction::BoundedExponential)),
        "pwl" => Ok(eu(UtilityFunction::piecewise_linear(&knots(need(
            arg, head,
        )?)?)?)),
        _ => Err(invalid(format!("unknown utility {head:?}"))),
    }
}

pub fn parse_risk(s: &str) -> Result<RiskSpec> {
    let s = s.trim();
    if s.starts_with('{') {
        let r: RiskSpec = serde_json::from_str(s)?;
        r.validate()?;
        return Ok(r);
    }
    let (head, arg) = split(s);
    let one = |arg: Option<&str>| -> Result<f64> { Ok(numbers(need(arg, head)?, 1, head)?[0]) };
    match head {
        "zero" => Ok(RiskSpec::Zero),
        "worstcase" => Ok(RiskSpec::WorstCase),
        "var" => RiskSpec::var(one(arg)?),
        "es" => RiskSpec::es(one(arg)?),
        "entropic" => RiskSpec::entropic(one(arg)?),
        "lvar" => Ok(RiskSpec::LVaR {
            beta: document::<ThresholdDistribution>(need(arg, head)?)?,
        }),
        "adjes" => Ok(RiskSpec::AdjustedEs {
            g: document::<RiskProfile>(need(arg, head)?)?,
        }),
        "ew" => Ok(RiskSpec::ExpectedWeightedLoss {
            loss: parse_loss(need(arg, head)?)?,
        }),
        "sr" => Ok(RiskSpec::ShortfallRisk {
            loss: parse_loss(need(arg, head)?)?,
        }),
        "oce" => RiskSpec::oce(parse_loss(need(arg, head)?)?),
        "partition" => {
            let r = RiskSpec::PartitionFixture {
                set: indices(need(arg, head)?)?,
            };
            r.validate()?;
            Ok(r)
        }
        _ => Err(invalid(format!("unknown risk functional {head:?}"))),
    }
}

impl FromStr for UtilitySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_utility(s)
    }
}

impl FromStr for RiskSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_risk(s)
    }
}

impl FromStr for LossFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_loss(s)
    }
}

/// Reads a scenario document `{"rate", "probs", "returns"}` and validates it.
pub fn load_scenarios(path: impl AsRef<Path>) -> Result<ScenarioSet> {
    let text = std::fs::read_to_string(path)?;
    let doc: ScenarioDocument = serde_json::from_str(&text)?;
    ScenarioSet::try_from(doc)
}

/// Solve configuration file. Explicit command-line flags override it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub utility: Option<String>,
    pub risk: Option<String>,
    pub scenarios: Option<String>,
    pub w: Option<f64>,
    pub r: Option<f64>,
    pub rmax: Option<f64>,
    pub umin: Option<f64>,
    pub options: SolveOptions,
}

impl SolveConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
