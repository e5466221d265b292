//! Risk functionals on scenario payoffs.
//!
//! Every functional is decreasing and normalized: `R(0) = 0`, and a larger
//! payoff never has larger risk. Values may be `+∞` (the partition fixture,
//! or overflow in exponential losses), never `-∞`.

mod loss;
mod profile;

pub use loss::LossFunction;
pub use profile::{RiskProfile, StepDocument, ThresholdDistribution};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::utility::fmt_ext;

/// Tolerance on cumulative probabilities when locating quantile atoms.
const ATOM_TOL: f64 = 1e-12;
/// Bracket expansion stops at this multiple of the payoff range.
const EXPANSION_CAP: f64 = 1_099_511_627_776.0; // 2^40

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiskSpec {
    Zero,
    #[serde(rename = "var")]
    VaR {
        alpha: f64,
    },
    #[serde(rename = "es")]
    ES {
        alpha: f64,
    },
    #[serde(rename = "lvar")]
    LVaR {
        beta: ThresholdDistribution,
    },
    AdjustedEs {
        g: RiskProfile,
    },
    ExpectedWeightedLoss {
        loss: LossFunction,
    },
    ShortfallRisk {
        loss: LossFunction,
    },
    #[serde(rename = "oce")]
    OCE {
        loss: LossFunction,
    },
    Entropic {
        a: f64,
    },
    WorstCase,
    /// `0` if `Y >= 0` off the scenario set (0-based), else `+∞`.
    PartitionFixture {
        set: Vec<usize>,
    },
}

/// Analytic properties of a risk functional, fixed by the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskMeta {
    pub lower_fatou: bool,
    pub cash_convex: bool,
    pub pos_star_shaped: bool,
    pub law_invariant: bool,
    pub cash_additive: bool,
    pub convex: bool,
    pub positively_homogeneous: bool,
    /// `R(∞) = lim R(c)` as `c → ∞`.
    #[serde(with = "crate::serde_ext::extended")]
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskSll {
    pub sll: bool,
    pub applicable: bool,
    pub reason: String,
}

impl RiskSpec {
    pub fn var(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidSpec(format!(
                "VaR level must lie in [0, 1), got {alpha}"
            )));
        }
        Ok(RiskSpec::VaR { alpha })
    }

    pub fn es(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "ES level must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(RiskSpec::ES { alpha })
    }

    pub fn entropic(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "entropic risk aversion must be positive, got {a}"
            )));
        }
        Ok(RiskSpec::Entropic { a })
    }

    pub fn oce(loss: LossFunction) -> Result<Self> {
        if !loss.is_convex() || !loss.dominates_identity() {
            return Err(Error::InvalidSpec(
                "OCE needs a convex loss with ℓ(y) >= y".into(),
            ));
        }
        Ok(RiskSpec::OCE { loss })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RiskSpec::VaR { alpha } => RiskSpec::var(*alpha).map(|_| ()),
            RiskSpec::ES { alpha } => RiskSpec::es(*alpha).map(|_| ()),
            RiskSpec::Entropic { a } => RiskSpec::entropic(*a).map(|_| ()),
            RiskSpec::OCE { loss } => {
                loss.validate()?;
                RiskSpec::oce(loss.clone()).map(|_| ())
            }
            RiskSpec::ExpectedWeightedLoss { loss } | RiskSpec::ShortfallRisk { loss } => {
                loss.validate()
            }
            RiskSpec::PartitionFixture { set } if set.is_empty() => Err(Error::InvalidSpec(
                "partition fixture needs a non-empty scenario set".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn value(&self, y: &[f64], probs: &[f64]) -> Result<f64> {
        check_len(probs.len(), y.len())?;
        match self {
            RiskSpec::Zero => Ok(0.0),
            RiskSpec::VaR { alpha } => value_at_risk(y, probs, *alpha),
            RiskSpec::ES { alpha } => expected_shortfall(y, probs, *alpha),
            RiskSpec::LVaR { beta } => loss_var(y, probs, beta),
            RiskSpec::AdjustedEs { g } => adjusted_es(y, probs, g),
            RiskSpec::ExpectedWeightedLoss { loss } => expected_weighted_loss(y, probs, loss),
            RiskSpec::ShortfallRisk { loss } => shortfall_risk(y, probs, loss),
            RiskSpec::OCE { loss } => oce_risk(y, probs, loss),
            RiskSpec::Entropic { a } => entropic_risk(y, probs, *a),
            RiskSpec::WorstCase => Ok(worst_case_risk(y)),
            RiskSpec::PartitionFixture { set } => {
                if let Some(bad) = set.iter().find(|&&s| s >= y.len()) {
                    return Err(Error::Shape(format!(
                        "scenario index {bad} out of range for {} scenarios",
                        y.len()
                    )));
                }
                let loses_off_set = (0..y.len()).any(|s| !set.contains(&s) && y[s] < 0.0);
                Ok(if loses_off_set { f64::INFINITY } else { 0.0 })
            }
        }
    }

    pub fn metadata(&self) -> RiskMeta {
        let coherent = RiskMeta {
            lower_fatou: true,
            cash_convex: true,
            pos_star_shaped: true,
            law_invariant: true,
            cash_additive: true,
            convex: true,
            positively_homogeneous: true,
            floor: f64::NEG_INFINITY,
        };
        match self {
            RiskSpec::Zero => RiskMeta {
                floor: 0.0,
                ..coherent
            },
            RiskSpec::ES { .. } | RiskSpec::WorstCase => coherent,
            RiskSpec::VaR { .. } => RiskMeta {
                convex: false,
                ..coherent
            },
            // the shifts ℓ_j <= 0 and g >= 0 break homogeneity but keep star-shapedness
            RiskSpec::LVaR { .. } => RiskMeta {
                convex: false,
                positively_homogeneous: false,
                ..coherent
            },
            RiskSpec::AdjustedEs { .. } => RiskMeta {
                positively_homogeneous: false,
                ..coherent
            },
            RiskSpec::Entropic { .. } => RiskMeta {
                positively_homogeneous: false,
                ..coherent
            },
            RiskSpec::OCE { loss } => RiskMeta {
                positively_homogeneous: loss.positively_homogeneous(),
                ..coherent
            },
            RiskSpec::ExpectedWeightedLoss { loss } => RiskMeta {
                lower_fatou: true,
                cash_convex: loss.is_convex(),
                pos_star_shaped: loss.pos_star_shaped(),
                law_invariant: true,
                cash_additive: loss.is_linear(),
                convex: loss.is_convex(),
                positively_homogeneous: loss.positively_homogeneous(),
                floor: loss.left_limit(),
            },
            RiskSpec::ShortfallRisk { loss } => RiskMeta {
                lower_fatou: true,
                cash_convex: loss.pos_star_shaped(),
                pos_star_shaped: loss.pos_star_shaped(),
                law_invariant: true,
                cash_additive: true,
                convex: loss.is_convex(),
                // a loss vanishing on losses' mirror side turns SR into the worst case
                positively_homogeneous: loss.positively_homogeneous()
                    || (loss.vanishes_on_negatives() && loss.positive_on_positives()),
                floor: f64::NEG_INFINITY,
            },
            RiskSpec::PartitionFixture { .. } => RiskMeta {
                lower_fatou: true,
                cash_convex: true,
                pos_star_shaped: true,
                law_invariant: false,
                cash_additive: false,
                convex: true,
                positively_homogeneous: true,
                floor: 0.0,
            },
        }
    }

    /// Sensitivity to large losses from the analytic catalog.
    pub fn sll(&self) -> RiskSll {
        let (sll, reason) = match self {
            RiskSpec::Zero => (false, "no risk constraint".to_string()),
            RiskSpec::VaR { alpha } => {
                if *alpha == 0.0 {
                    (true, "VaR at level 0 is the worst-case risk".to_string())
                } else {
                    (false, format!("VaR ignores losses of probability below {alpha}"))
                }
            }
            RiskSpec::ES { alpha } => (false, format!("ES is positively homogeneous and negative on payoffs whose loss mass is small against {alpha}")),
            RiskSpec::LVaR { beta } => {
                let inf = beta.infimum();
                (inf == 0.0, format!("infimum of the benchmark distribution is {inf}"))
            }
            RiskSpec::AdjustedEs { g } => {
                if g.is_finite() {
                    (true, "risk profile is finite everywhere".to_string())
                } else {
                    (false, "risk profile is infinite near zero".to_string())
                }
            }
            RiskSpec::ExpectedWeightedLoss { loss } => {
                let alg = loss.alg();
                (alg.is_neg_infinite(), format!("loss-gain ratio of the loss function is {}", fmt_ext(alg.as_f64())))
            }
            RiskSpec::ShortfallRisk { loss } => {
                let alg = loss.alg();
                let pos = loss.positive_on_positives();
                (
                    alg.is_neg_infinite() && pos,
                    format!(
                        "loss-gain ratio {}; loss {} on the positive half-line",
                        fmt_ext(alg.as_f64()),
                        if pos { "positive" } else { "not positive" }
                    ),
                )
            }
            RiskSpec::OCE { loss } => {
                let a = loss.superlinear_gains();
                let b = loss.flat_left_tail();
                (
                    a && b,
                    format!(
                        "loss {} superlinear on the right; left slope ratio {}",
                        if a { "is" } else { "is not" },
                        if b { "vanishes" } else { "stays positive" }
                    ),
                )
            }
            RiskSpec::Entropic { .. } => (true, "OCE with exponential loss".to_string()),
            RiskSpec::WorstCase => (true, "every loss scenario is charged in full".to_string()),
            RiskSpec::PartitionFixture { .. } => {
                (false, "partition fixture: payoffs losing only on the set have risk 0 at every scale".to_string())
            }
        };
        RiskSll {
            sll,
            applicable: true,
            reason,
        }
    }
}

fn mean(y: &[f64], probs: &[f64]) -> f64 {
    y.iter().zip(probs).map(|(v, p)| v * p).sum()
}

/// Atoms of `Y` in increasing order with their merged probabilities.
fn atoms(y: &[f64], probs: &[f64]) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = y.iter().copied().zip(probs.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for (v, p) in pairs {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += p,
            _ => out.push((v, p)),
        }
    }
    out
}

/// `VaR^α(Y) = inf{m : P[m + Y < 0] <= α}`, i.e. minus the largest atom `y`
/// with `P[Y < y] <= α`.
pub fn value_at_risk(y: &[f64], probs: &[f64], alpha: f64) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let mut below = 0.0;
    let mut best = f64::NAN;
    for (v, p) in atoms(y, probs) {
        if below <= alpha + ATOM_TOL {
            best = v;
        } else {
            break;
        }
        below += p;
    }
    Ok(-best)
}

/// `ES^α(Y) = min_η { η + E[(-Y - η)⁺] / α }`. The objective is piecewise
/// linear with kinks at the atoms of `-Y`, so the minimum over those atoms
/// is exact.
pub fn expected_shortfall(y: &[f64], probs: &[f64], alpha: f64) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    if alpha >= 1.0 {
        return Ok(-mean(y, probs));
    }
    let mut losses: Vec<(f64, f64)> = y.iter().map(|v| -v).zip(probs.iter().copied()).collect();
    losses.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = losses.len();
    // tail sums over strictly larger positions
    let mut tail_p = vec![0.0; n + 1];
    let mut tail_pl = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tail_p[k] = tail_p[k + 1] + losses[k].1;
        tail_pl[k] = tail_pl[k + 1] + losses[k].1 * losses[k].0;
    }
    let mut best = f64::INFINITY;
    for k in 0..n {
        let eta = losses[k].0;
        let excess = tail_pl[k + 1] - eta * tail_p[k + 1];
        best = best.min(eta + excess / alpha);
    }
    Ok(best)
}

/// `LVaR^β(Y) = max_j { VaR^{b_j}(Y) + ℓ_j }`: on each step of `β` the
/// supremum sits at the right endpoint.
pub fn loss_var(y: &[f64], probs: &[f64], beta: &ThresholdDistribution) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let mut best = f64::NEG_INFINITY;
    for (l, b) in beta.breakpoints().iter().zip(beta.levels()) {
        best = best.max(value_at_risk(y, probs, *b)? + l);
    }
    Ok(best)
}

/// `ES^g(Y) = sup_α { ES^α(Y) - g(α) }`. `ES^α` is continuous and decreasing
/// in `α`, so each step of `g` contributes its left endpoint; the first
/// step contributes the worst case minus `g(0+)`.
pub fn adjusted_es(y: &[f64], probs: &[f64], g: &RiskProfile) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let mut best = f64::NEG_INFINITY;
    if g.limit_at_zero().is_finite() {
        best = worst_case_risk(y) - g.limit_at_zero();
    }
    for (a, gv) in g.breakpoints().iter().zip(g.values()) {
        if gv.is_finite() {
            best = best.max(expected_shortfall(y, probs, *a)? - gv);
        }
    }
    Ok(best)
}

/// `EW^ℓ(Y) = E[ℓ(-Y)]`, `+∞` absorbing.
pub fn expected_weighted_loss(y: &[f64], probs: &[f64], loss: &LossFunction) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let mut acc = 0.0;
    for (v, p) in y.iter().zip(probs) {
        let l = loss.value(-v);
        if l == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        acc += p * l;
    }
    Ok(acc)
}

/// `SR^ℓ(Y) = inf{ m : E[ℓ(-Y - m)] <= 0 }` by bracketing and bisection on
/// the decreasing map `m ↦ E[ℓ(-Y - m)]`.
pub fn shortfall_risk(y: &[f64], probs: &[f64], loss: &LossFunction) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let f = |m: f64| -> f64 {
        let mut acc = 0.0;
        for (v, p) in y.iter().zip(probs) {
            acc += p * loss.value(-v - m);
        }
        acc
    };
    let lo_y = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_y = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = (hi_y - lo_y).max(1.0);
    // at m = -min Y every argument is <= 0, so the objective is <= 0
    let hi = -lo_y;
    let mut step = range;
    let mut lo = -hi_y - step;
    while !(f(lo) > 0.0) {
        step *= 2.0;
        if step > EXPANSION_CAP * range {
            return Err(Error::NoRoot(
                "expected weighted loss never turns positive; shortfall risk is -∞".into(),
            ));
        }
        lo = -hi_y - step;
    }
    Ok(bisect_decreasing(f, lo, hi))
}

/// Smallest `m` in `[lo, hi]` with `f(m) <= 0`, given `f(lo) > 0 >= f(hi)`.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        if f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `OCE^ℓ(Y) = inf_η { E[ℓ(η - Y)] - η }`, minimized by golden-section search
/// on a bracket grown from `[min Y - 1, max Y + 1]` while the convex
/// objective keeps decreasing outward.
pub fn oce_risk(y: &[f64], probs: &[f64], loss: &LossFunction) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let h = |eta: f64| -> f64 {
        let mut acc = 0.0;
        for (v, p) in y.iter().zip(probs) {
            acc += p * loss.value(eta - v);
        }
        acc - eta
    };
    let lo_y = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_y = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = (hi_y - lo_y).max(1.0);
    let cap = EXPANSION_CAP * range;
    let strictly_below = |a: f64, b: f64| a < b - 1e-12 * (1.0 + b.abs());

    let mut a = lo_y - 1.0;
    let mut b = hi_y + 1.0;
    let mut w = b - a;
    while strictly_below(h(b + w), h(b)) {
        b += w;
        w *= 2.0;
        if w > cap {
            return Err(Error::UnboundedBelow(
                "OCE objective keeps decreasing as η → ∞".into(),
            ));
        }
    }
    b += w;
    let mut w = b - a;
    while strictly_below(h(a - w), h(a)) {
        a -= w;
        w *= 2.0;
        if w > cap {
            return Err(Error::UnboundedBelow(
                "OCE objective keeps decreasing as η → -∞".into(),
            ));
        }
    }
    a -= w;
    Ok(golden_min(h, a, b))
}

/// Minimum value of a convex function on `[a, b]`, tracking the best point
/// evaluated.
fn golden_min(h: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut hc = h(c);
    let mut hd = h(d);
    let mut best = hc.min(hd).min(h(a)).min(h(b));
    for _ in 0..500 {
        if b - a <= 1e-14 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if hc <= hd {
            b = d;
            d = c;
            hd = hc;
            c = b - inv_phi * (b - a);
            hc = h(c);
            best = best.min(hc);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + inv_phi * (b - a);
            hd = h(d);
            best = best.min(hd);
        }
    }
    best
}

/// `(1/a) log E[exp(-aY)]`, computed with a max shift.
pub fn entropic_risk(y: &[f64], probs: &[f64], a: f64) -> Result<f64> {
    check_len(probs.len(), y.len())?;
    let shift = y.iter().map(|v| -a * v).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = y
        .iter()
        .zip(probs)
        .map(|(v, p)| p * (-a * v - shift).exp())
        .sum();
    Ok((sum.ln() + shift) / a)
}

/// `-min_s Y_s`.
pub fn worst_case_risk(y: &[f64]) -> f64 {
    -y.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: [f64; 2] = [0.5, 0.5];
    const LOG_COSH_1: f64 = 0.433_780_830_483_027;

    #[test]
    fn value_at_risk_conventions() {
        assert_eq!(value_at_risk(&[5.0, 5.0], &P, 0.1).unwrap(), -5.0);
        assert_eq!(value_at_risk(&[-1.0, 1.0], &P, 0.5).unwrap(), -1.0);
        assert_eq!(value_at_risk(&[-1.0, 1.0], &P, 0.4).unwrap(), 1.0);
        assert_eq!(
            value_at_risk(&[3.0, -2.0, 0.0], &[0.2, 0.3, 0.5], 0.0).unwrap(),
            2.0
        );
    }

    #[test]
    fn expected_shortfall_examples() {
        assert_eq!(expected_shortfall(&[-1.0, 1.0], &P, 1.0).unwrap(), 0.0);
        assert_eq!(expected_shortfall(&[-1.0, 1.0], &P, 0.5).unwrap(), 1.0);
        for alpha in [0.05, 0.3, 0.9] {
            assert!((expected_shortfall(&[2.5, 2.5], &P, alpha).unwrap() + 2.5).abs() < 1e-15);
        }
        // lowest 0.25 of mass: all of the -4 atom (0.1) plus 0.15 of the -1 atom
        let es = expected_shortfall(&[-4.0, -1.0, 2.0], &[0.1, 0.4, 0.5], 0.25).unwrap();
        assert!((es - (0.1 * 4.0 + 0.15 * 1.0) / 0.25).abs() < 1e-14);
    }

    #[test]
    fn loss_var_examples() {
        let b = ThresholdDistribution::constant(0.4).unwrap();
        assert_eq!(
            loss_var(&[-1.0, 1.0], &P, &b).unwrap(),
            value_at_risk(&[-1.0, 1.0], &P, 0.4).unwrap()
        );
        let b = ThresholdDistribution::new(vec![-2.0, 0.0], vec![0.0, 0.5]).unwrap();
        assert_eq!(loss_var(&[-1.0, 1.0], &P, &b).unwrap(), -1.0);
        assert_eq!(loss_var(&[3.0, 3.0], &P, &b).unwrap(), -3.0);
    }

    #[test]
    fn adjusted_es_examples() {
        let y = [-4.0, -1.0, 2.0];
        let p = [0.1, 0.4, 0.5];
        let g = RiskProfile::expected_shortfall(0.3).unwrap();
        assert_eq!(
            adjusted_es(&y, &p, &g).unwrap(),
            expected_shortfall(&y, &p, 0.3).unwrap()
        );
        let zero = RiskProfile::new(vec![1.0], vec![0.0], 0.0).unwrap();
        assert_eq!(adjusted_es(&y, &p, &zero).unwrap(), 4.0);
        let finite = RiskProfile::new(vec![0.05, 1.0], vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(adjusted_es(&[2.0, 2.0], &P, &finite).unwrap(), -2.0);
        // ES^0.05 = 4, worst case minus g(0+) = 3
        assert_eq!(adjusted_es(&y, &p, &finite).unwrap(), 4.0);
    }

    #[test]
    fn loss_based_examples() {
        let y = [-1.0, 1.0];
        assert_eq!(
            expected_weighted_loss(&y, &P, &LossFunction::Identity).unwrap(),
            0.0
        );
        assert_eq!(
            expected_weighted_loss(&y, &P, &LossFunction::positive_part(2.0).unwrap()).unwrap(),
            1.0
        );
        let e1 = LossFunction::exp_minus_one(1.0).unwrap();
        assert_eq!(expected_weighted_loss(&[0.0, 0.0], &P, &e1).unwrap(), 0.0);
        assert!((shortfall_risk(&y, &P, &e1).unwrap() - LOG_COSH_1).abs() < 1e-12);
        assert!(shortfall_risk(&[0.0, 0.0], &P, &e1).unwrap().abs() < 1e-12);
        let sr_id =
            shortfall_risk(&[-3.0, 1.0, 0.5], &[0.2, 0.3, 0.5], &LossFunction::Identity).unwrap();
        assert!((sr_id - 0.05).abs() < 1e-12);
    }

    #[test]
    fn shortfall_with_vanishing_left_side_is_worst_case() {
        let y = [-3.0, 1.0, 0.5];
        let p = [0.2, 0.3, 0.5];
        let sr = shortfall_risk(&y, &p, &LossFunction::positive_part(1.0).unwrap()).unwrap();
        assert!((sr - 3.0).abs() < 1e-12);
    }

    #[test]
    fn shortfall_without_root() {
        let never =
            LossFunction::piecewise_linear(&[(-1.0, -1.0), (0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(
            shortfall_risk(&[0.5, 0.25], &P, &never),
            Err(Error::NoRoot(_))
        ));
        // a flat stretch above zero still has a root
        let late =
            LossFunction::piecewise_linear(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (2.0, 1.0)])
                .unwrap();
        assert!((shortfall_risk(&[0.5, 0.25], &P, &late).unwrap() + 1.25).abs() < 1e-12);
    }

    #[test]
    fn oce_examples() {
        let y = [-1.0, 1.0];
        assert!((oce_risk(&y, &P, &LossFunction::Identity).unwrap() - 0.0).abs() < 1e-12);
        assert!(
            (oce_risk(&y, &P, &LossFunction::positive_part(2.0).unwrap()).unwrap() - 1.0).abs()
                < 1e-10
        );
        let e1 = LossFunction::exp_minus_one(1.0).unwrap();
        assert!(oce_risk(&[0.0, 0.0], &P, &e1).unwrap().abs() < 1e-12);
        assert!((oce_risk(&y, &P, &e1).unwrap() - LOG_COSH_1).abs() < 1e-10);
        assert!(RiskSpec::oce(LossFunction::power_plus(2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn entropic_examples() {
        assert_eq!(entropic_risk(&[0.0, 0.0], &P, 1.0).unwrap(), 0.0);
        assert!((entropic_risk(&[-1.0, 1.0], &P, 1.0).unwrap() - LOG_COSH_1).abs() < 1e-15);
        let y = [-0.3, 2.0, 0.7];
        let p = [0.2, 0.5, 0.3];
        let shifted: Vec<f64> = y.iter().map(|v| v + 3.0).collect();
        let lhs = entropic_risk(&shifted, &p, 2.0).unwrap();
        assert!((lhs - (entropic_risk(&y, &p, 2.0).unwrap() - 3.0)).abs() < 1e-12);
        // no overflow at extreme scale
        assert!((entropic_risk(&[-1e6, 1e6], &P, 1.0).unwrap() - (1e6 - 2f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn dispatch_and_fixture() {
        assert_eq!(RiskSpec::Zero.value(&[-9.0, 1.0], &P).unwrap(), 0.0);
        assert_eq!(
            RiskSpec::var(0.5).unwrap().value(&[-1.0, 1.0], &P).unwrap(),
            -1.0
        );
        assert_eq!(
            RiskSpec::WorstCase
                .value(&[-3.0, 2.0, 0.0], &[0.2, 0.3, 0.5])
                .unwrap(),
            3.0
        );
        let part = RiskSpec::PartitionFixture { set: vec![0] };
        assert_eq!(part.value(&[-5.0, 1.0], &P).unwrap(), 0.0);
        assert_eq!(part.value(&[5.0, -1.0], &P).unwrap(), f64::INFINITY);
        assert!(RiskSpec::Zero.value(&[1.0], &P).is_err());
    }

    #[test]
    fn sll_catalog() {
        assert!(!RiskSpec::es(0.05).unwrap().sll().sll);
        assert!(RiskSpec::entropic(1.0).unwrap().sll().sll);
        assert!(RiskSpec::var(0.0).unwrap().sll().sll);
        assert!(!RiskSpec::var(0.05).unwrap().sll().sll);
        let b = ThresholdDistribution::new(vec![-1.0, 0.0], vec![0.0, 0.05]).unwrap();
        assert!(RiskSpec::LVaR { beta: b }.sll().sll);
        let pp = LossFunction::positive_part(20.0).unwrap();
        assert!(!RiskSpec::oce(pp.clone()).unwrap().sll().sll);
        assert!(RiskSpec::ShortfallRisk { loss: pp }.sll().sll);
        assert!(
            !RiskSpec::ShortfallRisk {
                loss: LossFunction::Identity
            }
            .sll()
            .sll
        );
    }
}
