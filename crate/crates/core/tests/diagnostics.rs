use utilrisk::diagnostics::{
    catalog, classify_wellposedness, default_schedule, gaussian_witness, scaling_probe, table1,
    table2, table_matrix, Functional, PremiseCode, Verdict, WitnessOutcome, WitnessRisk,
};
use utilrisk::normal;
use utilrisk::optimizer::{divergence_probe_along, SolveOptions};
use utilrisk::rng;
use utilrisk::{discretize_gaussian, ProblemFrame, RiskSpec, UtilitySpec};

use rand::Rng;

const Y: bool = true;
const N: bool = false;

#[test]
fn table1_cells_match_the_published_grid() {
    let expected = vec![
        vec![N, N, Y, Y, Y],
        vec![N, N, Y, Y, Y],
        vec![N, N, Y, Y, Y],
        vec![Y, Y, Y, Y, Y],
    ];
    let t = table1();
    assert_eq!(
        t.title,
        "Market-independent well-posedness of utility-risk portfolio selection"
    );
    assert_eq!(t.marks(), expected);
}

#[test]
fn table2_cells_match_the_published_grid() {
    let expected = vec![
        vec![Y, N],
        vec![Y, Y],
        vec![Y, N],
        vec![Y, Y],
        vec![Y, N],
        vec![Y, Y],
        vec![Y, N],
        vec![Y, Y],
        vec![Y, N],
        vec![Y, Y],
        vec![Y, N],
    ];
    assert_eq!(table2().marks(), expected);
    assert_eq!(
        table_matrix().iter().map(|t| t.cell_count()).sum::<usize>(),
        42
    );
}

#[test]
fn crossed_cells_are_ill_posed_not_unknown() {
    for t in table_matrix() {
        for row in &t.rows {
            for cell in &row.cells {
                assert!(
                    matches!(cell.verdict, Verdict::WellPosed | Verdict::IllPosed),
                    "{}: {:?}",
                    row.label,
                    cell.verdict
                );
            }
        }
    }
}

fn sides() -> (Vec<UtilitySpec>, Vec<RiskSpec>) {
    let mut us = Vec::new();
    let mut rs = Vec::new();
    for e in catalog() {
        match e.functional {
            Functional::Utility(u) => us.push(u),
            Functional::Risk(r) => rs.push(r),
        }
    }
    (us, rs)
}

#[test]
fn either_side_sensitivity_decides_when_premises_hold() {
    let (us, rs) = sides();
    for u in &us {
        for r in &rs {
            let c = classify_wellposedness(u, r);
            let b = &c.basis;
            let premises = b.u_upper_fatou && b.r_lower_fatou && b.r_cash_convex;
            if premises {
                assert_eq!(c.is_well_posed(), b.u_sll || b.r_sll, "{u:?} / {r:?}");
            }
            if c.verdict == Verdict::IllPosed {
                assert!(!b.u_sll && !b.r_sll);
                assert!(b.u_sensitivity_equiv);
            }
        }
    }
}

#[test]
fn swapping_the_sensitive_side_keeps_well_posed() {
    // mean is insensitive, entropic sensitive; S-shaped (0.5,0.7) sensitive, zero insensitive
    let mean = UtilitySpec::Mean;
    let s = "sshaped:0.5,0.7".parse::<UtilitySpec>().unwrap();
    let ent = RiskSpec::entropic(1.0).unwrap();
    assert!(classify_wellposedness(&mean, &ent).is_well_posed());
    assert!(classify_wellposedness(&s, &RiskSpec::Zero).is_well_posed());
    assert!(classify_wellposedness(&s, &ent).is_well_posed());
    assert_eq!(
        classify_wellposedness(&mean, &RiskSpec::Zero).verdict,
        Verdict::IllPosed
    );
}

#[test]
fn fixtures_report_their_blocking_premises() {
    let c = classify_wellposedness(
        &UtilitySpec::PartitionEssinf { set: vec![0] },
        &RiskSpec::PartitionFixture { set: vec![0] },
    );
    match c.verdict {
        Verdict::Unknown { reasons } => assert!(reasons.contains(&PremiseCode::NoLawInvariantSide)),
        v => panic!("{v:?}"),
    }
    let c = classify_wellposedness(&UtilitySpec::EssinfMean, &RiskSpec::Zero);
    match c.verdict {
        Verdict::Unknown { reasons } => {
            assert_eq!(reasons, vec![PremiseCode::UNotSensitivityEquivalent])
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn standard_normal_thresholds() {
    assert!((WitnessRisk::Var { alpha: 0.05 }.threshold() - 1.644854).abs() < 1e-5);
    assert!((WitnessRisk::Es { alpha: 0.05 }.threshold() - 2.062713).abs() < 1e-4);
    // ES(α) of a standard normal is φ(q)/α
    for alpha in [0.01, 0.05, 0.1, 0.3] {
        let q = normal::value_at_risk(alpha);
        let closed = normal::pdf(q) / alpha;
        assert!(
            (normal::expected_shortfall(alpha) - closed).abs() < 1e-6,
            "{alpha}"
        );
    }
}

/// Closed-form Gaussian risk of a linear portfolio, recomputed without the
/// witness module: mean `π·(μ-r)`, volatility `sqrt(πᵀΣπ)`.
fn recheck(w: &utilrisk::diagnostics::GaussianWitness) {
    let excess: Vec<f64> = w.market.mu().iter().map(|m| m - w.market.rate()).collect();
    let sigma = w.market.sigma();
    let d = excess.len();
    let base_mean: f64 = (0..d).map(|i| w.base_direction[i] * excess[i]).sum();
    assert!((base_mean - w.sr_max).abs() < 1e-12);
    for step in &w.sequence {
        let pi = &step.pi;
        let mean: f64 = (0..d).map(|i| pi[i] * excess[i]).sum();
        let var: f64 = (0..d)
            .map(|i| (0..d).map(|j| pi[i] * sigma[i][j] * pi[j]).sum::<f64>())
            .sum();
        let risk = var.sqrt() * w.threshold - mean;
        assert!((mean - step.mean).abs() < 1e-9 * (1.0 + mean.abs()));
        assert!((risk - step.risk).abs() < 1e-9 * (1.0 + mean.abs()));
        assert!(step.risk <= 1e-9);
        assert!((step.mean / step.n as f64 - w.sr_max).abs() < 1e-12);
    }
}

#[test]
fn witnesses_recheck_analytically() {
    for seed in 0..10 {
        for (risk, sr) in [
            (WitnessRisk::Var { alpha: 0.05 }, 2.0),
            (WitnessRisk::Es { alpha: 0.05 }, 2.5),
            (WitnessRisk::Var { alpha: 0.1 }, 1.3),
        ] {
            match gaussian_witness(risk, sr, 1 + seed as usize % 4, seed).unwrap() {
                WitnessOutcome::Witness(w) => recheck(&w),
                other => panic!("{other:?}"),
            }
        }
    }
}

#[test]
fn discretized_witness_market_shows_divergence_on_witness_direction() {
    let WitnessOutcome::Witness(w) =
        gaussian_witness(WitnessRisk::Var { alpha: 0.05 }, 2.0, 2, 3).unwrap()
    else {
        panic!("expected a witness");
    };
    let mkt = discretize_gaussian(&w.market, 20000, 17).unwrap();
    let var = RiskSpec::var(0.05).unwrap();
    let frame = ProblemFrame::from_r_tilde(&var, mkt.probs(), 1.0, w.market.rate(), 0.0).unwrap();
    let ev = divergence_probe_along(
        &UtilitySpec::Mean,
        &var,
        &mkt,
        &frame,
        &w.base_direction,
        &SolveOptions::default(),
    )
    .unwrap();
    let ev = ev.expect("divergence evidence along the tangency direction");
    assert!(ev.trace.windows(2).all(|p| p[0].utility < p[1].utility));
}

#[test]
fn sensitive_risks_cross_on_every_loss_bearing_payoff() {
    let schedule = default_schedule();
    let sll: Vec<RiskSpec> = sides().1.into_iter().filter(|r| r.sll().sll).collect();
    assert!(sll.len() >= 6);
    for (k, r) in sll.iter().enumerate() {
        for t in 0..50u64 {
            let mut g = rng::stream(100 + k as u64, t);
            let n = g.random_range(2..=8);
            let mut y: Vec<f64> = (0..n).map(|_| g.random_range(-1.0..3.0)).collect();
            let at = g.random_range(0..n);
            y[at] = -g.random_range(0.01..1.0);
            let raw: Vec<f64> = (0..n).map(|_| g.random_range(0.5..1.5)).collect();
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let trace = scaling_probe(&Functional::Risk(r.clone()), &y, &p, &schedule).unwrap();
            assert!(trace.crossed, "{r:?} on {y:?}");
        }
    }
}

#[test]
fn var_ignores_small_loss_mass() {
    // loss mass 0.04 below the 0.05 level
    let y = [-1.0, 0.5, 2.0];
    let p = [0.04, 0.5, 0.46];
    let t = scaling_probe(
        &Functional::Risk(RiskSpec::var(0.05).unwrap()),
        &y,
        &p,
        &default_schedule(),
    )
    .unwrap();
    assert!(!t.crossed && t.values.iter().all(|v| *v <= 0.0));
}

#[test]
fn bounded_exponential_tends_to_probability_gap() {
    let u = UtilitySpec::expected(utilrisk::UtilityFunction::BoundedExponential);
    let y = [-1.0, 0.3, 2.0];
    let p = [0.3, 0.3, 0.4];
    let v = u.value(&y.map(|v| 50.0 * v), &p).unwrap();
    assert!((v - (0.7 - 0.3)).abs() < 1e-6, "{v}");
}
