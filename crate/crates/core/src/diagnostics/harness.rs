//! Randomized checks of the functional axioms against catalog metadata.
//!
//! Every axiom is sampled; only those the metadata claims are required to
//! hold, and a claimed axiom with a counterexample is a mismatch.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::risk::{LossFunction, RiskProfile, RiskSpec, ThresholdDistribution};
use crate::rng;
use crate::utility::{UtilityFunction, UtilitySpec};

/// One side of a utility/risk pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "side", content = "spec", rename_all = "lowercase")]
pub enum Functional {
    Utility(UtilitySpec),
    Risk(RiskSpec),
}

impl Functional {
    pub fn value(&self, y: &[f64], probs: &[f64]) -> Result<f64> {
        match self {
            Functional::Utility(u) => u.value(y, probs),
            Functional::Risk(r) => r.value(y, probs),
        }
    }

    fn is_utility(&self) -> bool {
        matches!(self, Functional::Utility(_))
    }

    /// Axioms the catalog claims for this functional.
    pub fn claims(&self, axiom: Axiom) -> bool {
        match self {
            Functional::Utility(u) => {
                let m = u.metadata();
                match axiom {
                    Axiom::Monotone => m.monotone,
                    Axiom::Normalized => true,
                    Axiom::CashAdditive => m.cash_additive,
                    Axiom::PositivelyHomogeneous => m.positively_homogeneous,
                    Axiom::StarShaped => m.neg_star_shaped,
                    Axiom::ConvexSample => m.concave,
                    Axiom::CashConvexSample => m.cash_concave,
                    Axiom::LawInvariantOnUniform => m.law_invariant,
                }
            }
            Functional::Risk(r) => {
                let m = r.metadata();
                match axiom {
                    Axiom::Monotone | Axiom::Normalized => true,
                    Axiom::CashAdditive => m.cash_additive,
                    Axiom::PositivelyHomogeneous => m.positively_homogeneous,
                    Axiom::StarShaped => m.pos_star_shaped,
                    Axiom::ConvexSample => m.convex,
                    Axiom::CashConvexSample => m.cash_convex,
                    Axiom::LawInvariantOnUniform => m.law_invariant,
                }
            }
        }
    }
}

/// Sampled axioms. For utilities the shape axioms are read with the
/// inequality reversed: negative star-shapedness, concavity, cash-concavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotone,
    Normalized,
    CashAdditive,
    PositivelyHomogeneous,
    StarShaped,
    ConvexSample,
    CashConvexSample,
    LawInvariantOnUniform,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Monotone,
        Axiom::Normalized,
        Axiom::CashAdditive,
        Axiom::PositivelyHomogeneous,
        Axiom::StarShaped,
        Axiom::ConvexSample,
        Axiom::CashConvexSample,
        Axiom::LawInvariantOnUniform,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub probs: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    #[serde(with = "crate::serde_ext::extended")]
    pub lhs: f64,
    #[serde(with = "crate::serde_ext::extended")]
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub required: bool,
    pub passed: bool,
    pub failures: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    /// Claimed axioms that failed.
    pub fn mismatches(&self) -> Vec<Axiom> {
        self.checks
            .iter()
            .filter(|c| c.required && !c.passed)
            .map(|c| c.axiom)
            .collect()
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is checked")
    }
}

fn tol(a: f64, b: f64) -> f64 {
    1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn approx_eq(a: f64, b: f64) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= tol(a, b))
}

/// `a <= b` up to tolerance, with `-∞ <= x <= +∞`.
fn approx_le(a: f64, b: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return false;
    }
    a <= b || (a.is_finite() && b.is_finite() && a - b <= tol(a, b))
}

/// `λa + (1-λ)b` with infinite values absorbing.
fn mix(lambda: f64, a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return a;
    }
    if b.is_infinite() {
        return b;
    }
    lambda * a + (1.0 - lambda) * b
}

fn scale(lambda: f64, a: f64) -> f64 {
    if a.is_infinite() {
        a
    } else {
        lambda * a
    }
}

fn random_probs(g: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| g.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}

/// Payoffs on a mix of continuous values and a coarse lattice, so ties and
/// exact zeros appear.
fn random_payoff(g: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let lattice = g.random_bool(0.3);
    let width = [0.5, 2.0, 5.0][g.random_range(0..3)];
    (0..n)
        .map(|_| {
            let v: f64 = g.random_range(-width..width);
            if lattice {
                (2.0 * v).round() / 2.0
            } else {
                v
            }
        })
        .collect()
}

struct Trial {
    /// One slot per axiom in [`Axiom::ALL`] order.
    failures: Vec<Option<Counterexample>>,
}

fn run_trial(f: &Functional, trial: usize, seed: u64) -> Trial {
    let mut g = rng::stream(seed, trial as u64);
    let n = g.random_range(2..=8);
    let probs = random_probs(&mut g, n);
    let y = random_payoff(&mut g, n);
    let z = random_payoff(&mut g, n);
    let bump: Vec<f64> = (0..n)
        .map(|_| {
            if g.random_bool(0.3) {
                0.0
            } else {
                g.random_range(0.0..2.0)
            }
        })
        .collect();
    let lambda: f64 = g.random_range(0.01..0.99);
    let big: f64 = g.random_range(0.01..5.0);
    let c: f64 = g.random_range(-3.0..3.0);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut g);

    let util = f.is_utility();
    let val = |v: &[f64], p: &[f64]| f.value(v, p).unwrap_or(f64::NAN);
    let constant = |k: f64| val(&vec![k; n], &probs);
    let ex = |lhs: f64,
              rhs: f64,
              z: Option<Vec<f64>>,
              lambda: Option<f64>,
              c: Option<f64>,
              p: &[f64]| Counterexample {
        trial,
        probs: p.to_vec(),
        y: y.clone(),
        z,
        lambda,
        c,
        lhs,
        rhs,
    };
    // "better or equal" in the functional's own direction
    let prefers = |hi: f64, lo: f64| {
        if util {
            approx_le(lo, hi)
        } else {
            approx_le(hi, lo)
        }
    };

    let fy = val(&y, &probs);
    let mut failures = Vec::with_capacity(Axiom::ALL.len());
    for axiom in Axiom::ALL {
        let outcome = match axiom {
            Axiom::Monotone => {
                let up: Vec<f64> = y.iter().zip(&bump).map(|(a, b)| a + b).collect();
                let fu = val(&up, &probs);
                (!prefers(fu, fy)).then(|| ex(fu, fy, Some(up), None, None, &probs))
            }
            Axiom::Normalized => {
                let f0 = val(&vec![0.0; n], &probs);
                (!approx_eq(f0, 0.0)).then(|| ex(f0, 0.0, None, None, None, &probs))
            }
            Axiom::CashAdditive => {
                let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
                let lhs = val(&shifted, &probs);
                let fc = constant(c);
                let rhs = if fy.is_infinite() {
                    fy
                } else if fc.is_infinite() {
                    fc
                } else {
                    fy + fc
                };
                // cash-additivity forces H(c) = c H(1)
                let linear = approx_eq(fc, scale(c, constant(1.0)));
                (!approx_eq(lhs, rhs) || !linear).then(|| ex(lhs, rhs, None, None, Some(c), &probs))
            }
            Axiom::PositivelyHomogeneous => {
                let scaled: Vec<f64> = y.iter().map(|v| big * v).collect();
                let lhs = val(&scaled, &probs);
                let rhs = scale(big, fy);
                (!approx_eq(lhs, rhs)).then(|| ex(lhs, rhs, None, Some(big), None, &probs))
            }
            Axiom::StarShaped => {
                let scaled: Vec<f64> = y.iter().map(|v| lambda * v).collect();
                let lhs = val(&scaled, &probs);
                let rhs = scale(lambda, fy);
                (!prefers(lhs, rhs)).then(|| ex(lhs, rhs, None, Some(lambda), None, &probs))
            }
            Axiom::ConvexSample => {
                let m: Vec<f64> = y
                    .iter()
                    .zip(&z)
                    .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                    .collect();
                let lhs = val(&m, &probs);
                let rhs = mix(lambda, fy, val(&z, &probs));
                (!prefers(lhs, rhs))
                    .then(|| ex(lhs, rhs, Some(z.clone()), Some(lambda), None, &probs))
            }
            Axiom::CashConvexSample => {
                let m: Vec<f64> = y.iter().map(|a| lambda * a + (1.0 - lambda) * c).collect();
                let lhs = val(&m, &probs);
                let rhs = mix(lambda, fy, constant(c));
                (!prefers(lhs, rhs)).then(|| ex(lhs, rhs, None, Some(lambda), Some(c), &probs))
            }
            Axiom::LawInvariantOnUniform => {
                let uniform = vec![1.0 / n as f64; n];
                let permuted: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
                let lhs = val(&permuted, &uniform);
                let rhs = val(&y, &uniform);
                (!approx_eq(lhs, rhs)).then(|| ex(lhs, rhs, Some(permuted), None, None, &uniform))
            }
        };
        failures.push(outcome);
    }
    Trial { failures }
}

pub fn axiom_harness(spec: &Functional, trials: usize, seed: u64) -> AxiomReport {
    axiom_harness_with(spec, trials, seed, Execution::default())
}

/// Runs `trials` seeded trials; trial `t` draws from stream `t`, so the
/// report is identical under either execution policy.
pub fn axiom_harness_with(
    spec: &Functional,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> AxiomReport {
    let results = exec.map_indices(trials, |t| run_trial(spec, t, seed));
    let checks = Axiom::ALL
        .iter()
        .enumerate()
        .map(|(k, &axiom)| {
            let failing: Vec<&Counterexample> = results
                .iter()
                .filter_map(|r| r.failures[k].as_ref())
                .collect();
            AxiomCheck {
                axiom,
                required: spec.claims(axiom),
                passed: failing.is_empty(),
                failures: failing.len(),
                counterexample: failing.first().map(|c| (*c).clone()),
            }
        })
        .collect();
    AxiomReport { trials, checks }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub functional: Functional,
}

/// Every catalog functional at representative parameters, including the
/// pathological fixtures.
pub fn catalog() -> Vec<CatalogEntry> {
    let u = |name: &str, spec: UtilitySpec| CatalogEntry {
        name: name.into(),
        functional: Functional::Utility(spec),
    };
    let r = |name: &str, spec: RiskSpec| CatalogEntry {
        name: name.into(),
        functional: Functional::Risk(spec),
    };
    let eu = UtilitySpec::expected;
    let expm1 = LossFunction::exp_minus_one(1.0).expect("valid");
    let pwl_loss =
        LossFunction::piecewise_linear(&[(-1.0, -0.5), (0.0, 0.0), (1.0, 2.0)]).expect("valid");
    vec![
        u("mean", UtilitySpec::Mean),
        u(
            "linear(2)",
            eu(UtilityFunction::linear(2.0).expect("valid")),
        ),
        u(
            "exp(1)",
            eu(UtilityFunction::exponential(1.0).expect("valid")),
        ),
        u(
            "power(0.5)",
            eu(UtilityFunction::power(0.5).expect("valid")),
        ),
        u(
            "sshaped(0.5,0.7)",
            eu(UtilityFunction::s_shaped(0.5, 0.7).expect("valid")),
        ),
        u(
            "sshaped(0.7,0.5)",
            eu(UtilityFunction::s_shaped(0.7, 0.5).expect("valid")),
        ),
        u(
            "sshaped(0.6,0.5)",
            eu(UtilityFunction::s_shaped(0.6, 0.5).expect("valid")),
        ),
        u("boundedexp", eu(UtilityFunction::BoundedExponential)),
        u(
            "pwl(-1,-3;0,0;1,1;2,1.5)",
            eu(UtilityFunction::piecewise_linear(&[
                (-1.0, -3.0),
                (0.0, 0.0),
                (1.0, 1.0),
                (2.0, 1.5),
            ])
            .expect("valid")),
        ),
        u("essinf_mean", UtilitySpec::EssinfMean),
        u(
            "partition_essinf{0}",
            UtilitySpec::PartitionEssinf { set: vec![0] },
        ),
        r("zero", RiskSpec::Zero),
        r("var(0.05)", RiskSpec::var(0.05).expect("valid")),
        r("var(0.3)", RiskSpec::var(0.3).expect("valid")),
        r("es(0.05)", RiskSpec::es(0.05).expect("valid")),
        r("es(0.3)", RiskSpec::es(0.3).expect("valid")),
        r(
            "lvar(beta 0 below -1, 0.05 above)",
            RiskSpec::LVaR {
                beta: ThresholdDistribution::new(vec![-1.0, 0.0], vec![0.0, 0.05]).expect("valid"),
            },
        ),
        r(
            "lvar(beta 0.05)",
            RiskSpec::LVaR {
                beta: ThresholdDistribution::constant(0.05).expect("valid"),
            },
        ),
        r(
            "adjes(g(0+)=1, 0 from 0.05)",
            RiskSpec::AdjustedEs {
                g: RiskProfile::new(vec![0.05, 1.0], vec![0.0, 0.0], 1.0).expect("valid"),
            },
        ),
        r(
            "adjes(three steps)",
            RiskSpec::AdjustedEs {
                g: RiskProfile::new(vec![0.1, 0.5, 1.0], vec![0.4, 0.1, 0.0], 2.0).expect("valid"),
            },
        ),
        r(
            "ew(expm1(1))",
            RiskSpec::ExpectedWeightedLoss {
                loss: expm1.clone(),
            },
        ),
        r(
            "ew(id)",
            RiskSpec::ExpectedWeightedLoss {
                loss: LossFunction::Identity,
            },
        ),
        r(
            "ew(pospart(2))",
            RiskSpec::ExpectedWeightedLoss {
                loss: LossFunction::positive_part(2.0).expect("valid"),
            },
        ),
        r(
            "ew(powplus(2,1))",
            RiskSpec::ExpectedWeightedLoss {
                loss: LossFunction::power_plus(2.0, 1.0).expect("valid"),
            },
        ),
        r(
            "ew(pwl)",
            RiskSpec::ExpectedWeightedLoss {
                loss: pwl_loss.clone(),
            },
        ),
        r(
            "sr(expm1(1))",
            RiskSpec::ShortfallRisk {
                loss: expm1.clone(),
            },
        ),
        r(
            "sr(id)",
            RiskSpec::ShortfallRisk {
                loss: LossFunction::Identity,
            },
        ),
        r(
            "sr(pospart(1))",
            RiskSpec::ShortfallRisk {
                loss: LossFunction::positive_part(1.0).expect("valid"),
            },
        ),
        r("sr(pwl)", RiskSpec::ShortfallRisk { loss: pwl_loss }),
        r("oce(expm1(1))", RiskSpec::oce(expm1).expect("valid")),
        r(
            "oce(pospart(20))",
            RiskSpec::oce(LossFunction::positive_part(20.0).expect("valid")).expect("valid"),
        ),
        r("entropic(1)", RiskSpec::entropic(1.0).expect("valid")),
        r("worstcase", RiskSpec::WorstCase),
        r("partition{0}", RiskSpec::PartitionFixture { set: vec![0] }),
    ]
}
