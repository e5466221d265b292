use proptest::prelude::*;
use utilrisk::risk::{expected_shortfall, value_at_risk};
use utilrisk::{LossFunction, RiskSpec};

fn probs_from(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

fn market() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(0.5f64..1.5, n),
        )
            .prop_map(|(y, raw)| (y, probs_from(&raw)))
    })
}

/// `-(1/α) ∫_0^α q_Y(u) du` by walking the sorted atoms.
fn quantile_integral(y: &[f64], p: &[f64], alpha: f64) -> f64 {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    let mut left = alpha;
    let mut acc = 0.0;
    for i in idx {
        let take = p[i].min(left);
        acc += take * y[i];
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    -acc / alpha
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oce_with_scaled_positive_part_is_expected_shortfall((y, p) in market(), alpha in 0.02f64..0.98) {
        let oce = RiskSpec::oce(LossFunction::positive_part(1.0 / alpha).unwrap()).unwrap();
        let a = oce.value(&y, &p).unwrap();
        let b = RiskSpec::es(alpha).unwrap().value(&y, &p).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn shortfall_with_exponential_loss_is_entropic((y, p) in market(), a in 0.1f64..3.0) {
        let sr = RiskSpec::ShortfallRisk { loss: LossFunction::exp_minus_one(a).unwrap() };
        let x = sr.value(&y, &p).unwrap();
        let e = RiskSpec::entropic(a).unwrap().value(&y, &p).unwrap();
        prop_assert!((x - e).abs() <= 1e-8 * (1.0 + e.abs()), "{} vs {}", x, e);
    }

    #[test]
    fn es_matches_quantile_integral((y, p) in market(), alpha in 0.01f64..1.0) {
        let es = expected_shortfall(&y, &p, alpha).unwrap();
        let oracle = quantile_integral(&y, &p, alpha);
        prop_assert!((es - oracle).abs() <= 1e-6, "{} vs {}", es, oracle);
    }

    #[test]
    fn es_dominates_var_and_is_bounded_by_worst_case((y, p) in market(), alpha in 0.01f64..0.99) {
        let es = expected_shortfall(&y, &p, alpha).unwrap();
        let var = value_at_risk(&y, &p, alpha).unwrap();
        let worst = -y.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(var <= es + 1e-9 && es <= worst + 1e-9);
    }

    #[test]
    fn cash_additive_risks_shift_by_minus_c((y, p) in market(), c in -3.0f64..3.0) {
        let flagged = [
            RiskSpec::var(0.2).unwrap(),
            RiskSpec::es(0.2).unwrap(),
            RiskSpec::entropic(1.0).unwrap(),
            RiskSpec::WorstCase,
            RiskSpec::ShortfallRisk { loss: LossFunction::exp_minus_one(1.0).unwrap() },
            RiskSpec::ShortfallRisk { loss: LossFunction::Identity },
            RiskSpec::oce(LossFunction::exp_minus_one(1.0).unwrap()).unwrap(),
            RiskSpec::oce(LossFunction::positive_part(4.0).unwrap()).unwrap(),
        ];
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        for r in &flagged {
            prop_assert!(r.metadata().cash_additive);
            let lhs = r.value(&shifted, &p).unwrap();
            let rhs = r.value(&y, &p).unwrap() - c;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{:?}: {} vs {}", r, lhs, rhs);
        }
        // the zero functional is cash-additive with slope 0
        prop_assert_eq!(RiskSpec::Zero.value(&shifted, &p).unwrap(), 0.0);
    }

    #[test]
    fn risks_are_monotone((y, p) in market(), bump in prop::collection::vec(0.0f64..2.0, 8)) {
        let up: Vec<f64> = y.iter().zip(&bump).map(|(a, b)| a + b).collect();
        for r in [
            RiskSpec::es(0.3).unwrap(),
            RiskSpec::var(0.3).unwrap(),
            RiskSpec::entropic(2.0).unwrap(),
            RiskSpec::ExpectedWeightedLoss { loss: LossFunction::exp_minus_one(1.0).unwrap() },
        ] {
            prop_assert!(r.value(&up, &p).unwrap() <= r.value(&y, &p).unwrap() + 1e-9);
        }
    }
}

#[test]
fn documented_values() {
    let y = [-1.0, 1.0];
    let p = [0.5, 0.5];
    assert_eq!(RiskSpec::es(0.5).unwrap().value(&y, &p).unwrap(), 1.0);
    assert_eq!(RiskSpec::var(0.4).unwrap().value(&y, &p).unwrap(), 1.0);
    let ent = RiskSpec::entropic(1.0).unwrap().value(&y, &p).unwrap();
    assert!((ent - 1f64.cosh().ln()).abs() < 1e-12);
    assert!(RiskSpec::oce(LossFunction::power_plus(2.0, 1.0).unwrap()).is_err());
}
