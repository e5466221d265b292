mod common;

use proptest::prelude::*;
use utilrisk::optimizer::{
    divergence_probe, grid_oracle, maximize_utility, maximize_utility_shares, minimize_risk,
    uniqueness_probe, SolveOptions, Status,
};
use utilrisk::transform::transformed_risk;
use utilrisk::{
    make_scenario_set, Execution, LossFunction, ProblemFrame, RiskSpec, UtilityFunction,
    UtilitySpec,
};

#[test]
fn solver_agrees_with_grid_on_random_markets() {
    let opts = SolveOptions::default();
    let mut failures = Vec::new();
    for seed in 0..8 {
        for u in common::oracle_utilities() {
            for r in common::oracle_risks() {
                let case = common::oracle_case(seed, &u, &r, &opts);
                if !case.ok {
                    failures.push(format!("{}: {}", case.label, case.detail));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn mean_var_diverges_and_weighted_loss_does_not() {
    let mkt = make_scenario_set(&[vec![2.0], vec![-1.0]], &[0.6, 0.4], 0.0).unwrap();
    let opts = SolveOptions::default();
    let var = RiskSpec::var(0.5).unwrap();
    let frame = ProblemFrame::from_r_tilde(&var, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
    let res = maximize_utility(&UtilitySpec::Mean, &var, &mkt, &frame, &opts).unwrap();
    match &res.status {
        Status::Diverging { direction, trace } => {
            assert!(direction[0] > 0.0);
            assert!(trace.len() >= 10);
            assert!(trace
                .windows(2)
                .all(|w| w[0].utility < w[1].utility && w[1].risk <= 0.0));
        }
        s => panic!("{s:?}"),
    }
    let ew = RiskSpec::ExpectedWeightedLoss {
        loss: LossFunction::exp_minus_one(1.0).unwrap(),
    };
    let frame = ProblemFrame::from_r_tilde(&ew, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
    let res = maximize_utility(&UtilitySpec::Mean, &ew, &mkt, &frame, &opts).unwrap();
    assert!(res.optimum().is_some(), "{res:?}");
}

#[test]
fn risk_minimization_examples() {
    let mkt = make_scenario_set(&[vec![2.0], vec![-1.0]], &[0.5, 0.5], 0.0).unwrap();
    let opts = SolveOptions::default();
    let es = RiskSpec::es(0.5).unwrap();
    let frame = ProblemFrame::from_r_tilde(&es, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
    let res = minimize_risk(&es, &UtilitySpec::Mean, &mkt, &frame, 0.0, &opts).unwrap();
    assert!(res.optimum().unwrap().1 <= 1e-12);
    // the worst case caps utility: mean over the feasible set is bounded
    let wc = RiskSpec::WorstCase;
    let frame = ProblemFrame::from_r_tilde(&wc, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
    let exp = UtilitySpec::expected(UtilityFunction::exponential(1.0).unwrap());
    // E[1 - e^{-πX}] < 1 for every π, so 1.5 is unreachable
    let res = minimize_risk(&wc, &exp, &mkt, &frame, 1.5, &opts).unwrap();
    assert_eq!(res.status, Status::Infeasible);
}

#[test]
fn uniqueness_evidence_examples() {
    let opts = SolveOptions::default();
    let mkt = make_scenario_set(
        &[vec![0.5, -0.2], vec![-0.4, 0.3], vec![-0.1, -0.1]],
        &[0.3, 0.3, 0.4],
        0.0,
    )
    .unwrap();
    let exp = UtilitySpec::expected(UtilityFunction::exponential(1.0).unwrap());
    let es = RiskSpec::es(0.5).unwrap();
    let frame = ProblemFrame::from_r_tilde(&es, mkt.probs(), 1.0, 0.0, 0.2).unwrap();
    let res = maximize_utility(&exp, &es, &mkt, &frame, &opts).unwrap();
    assert!(
        uniqueness_probe(&res, &opts).unwrap().unique_evidence,
        "{res:?}"
    );

    // the first asset has zero mean and the second is absent from the objective: flat
    let flat = make_scenario_set(
        &[vec![1.0, 0.3], vec![-1.0, -0.2], vec![0.0, -0.1]],
        &[0.5, 0.5 - 1e-9, 1e-9],
        0.0,
    );
    if let Ok(flat) = flat {
        let zero = RiskSpec::Zero;
        let frame = ProblemFrame::from_r_tilde(&zero, flat.probs(), 1.0, 0.0, 0.0).unwrap();
        let res = maximize_utility(&UtilitySpec::Mean, &zero, &flat, &frame, &opts).unwrap();
        if res.optimum().is_some() {
            assert!(!uniqueness_probe(&res, &opts).unwrap().unique_evidence);
        }
    }
    let one = make_scenario_set(&[vec![1.0], vec![-1.0]], &[0.5, 0.5], 0.0).unwrap();
    let zero = RiskSpec::Zero;
    let frame = ProblemFrame::from_r_tilde(&zero, one.probs(), 1.0, 0.0, 0.0).unwrap();
    let res = maximize_utility(&UtilitySpec::Mean, &zero, &one, &frame, &opts).unwrap();
    assert!(
        !uniqueness_probe(&res, &opts).unwrap().unique_evidence,
        "{res:?}"
    );
}

#[test]
fn share_space_solve_matches_fraction_space() {
    let mkt = make_scenario_set(&[vec![2.0], vec![-1.0]], &[0.5, 0.5], 0.05).unwrap();
    let es = RiskSpec::es(0.5).unwrap();
    let (w, r) = (2.0, 0.05);
    let base = es.value(&[w * (1.0 + r); 2], mkt.probs()).unwrap();
    let opts = SolveOptions::default();
    let shares =
        maximize_utility_shares(&UtilitySpec::Mean, &es, &mkt, w, r, base + 1.0, &opts).unwrap();
    let frame = ProblemFrame::from_r_max(&es, mkt.probs(), w, r, base + 1.0).unwrap();
    let fractions = maximize_utility(&UtilitySpec::Mean, &es, &mkt, &frame, &opts).unwrap();
    let (theta, v_shares) = shares.optimum().unwrap();
    let (pi, v_frac) = fractions.optimum().unwrap();
    assert!((theta.iter().sum::<f64>() - w).abs() < 1e-12);
    assert!((theta[1] / w - pi[0]).abs() < 1e-9);
    assert!((v_shares - (v_frac + w * (1.0 + r))).abs() < 1e-9);
}

#[test]
fn parallel_and_sequential_runs_are_identical() {
    let seq = SolveOptions {
        execution: Execution::Sequential,
        seed: 3,
        ..SolveOptions::default()
    };
    let par = SolveOptions {
        execution: Execution::Parallel,
        ..seq.clone()
    };
    for seed in 0..4 {
        for u in common::oracle_utilities() {
            for r in common::oracle_risks() {
                let mkt = common::random_market(seed);
                let frame = ProblemFrame::from_r_tilde(&r.1, mkt.probs(), 1.0, 0.0, 0.2).unwrap();
                let a = maximize_utility(&u.1, &r.1, &mkt, &frame, &seq).unwrap();
                let b = maximize_utility(&u.1, &r.1, &mkt, &frame, &par).unwrap();
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn probe_finds_nothing_for_sensitive_pairs() {
    let opts = SolveOptions::default();
    for seed in 0..10 {
        let mkt = common::random_market(seed);
        let s = UtilitySpec::expected(UtilityFunction::s_shaped(0.5, 0.7).unwrap());
        let frame =
            ProblemFrame::from_r_tilde(&RiskSpec::Zero, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
        assert!(divergence_probe(&s, &RiskSpec::Zero, &mkt, &frame, &opts)
            .unwrap()
            .is_none());
        let frame =
            ProblemFrame::from_r_tilde(&RiskSpec::WorstCase, mkt.probs(), 1.0, 0.0, 1.0).unwrap();
        assert!(divergence_probe(
            &UtilitySpec::Mean,
            &RiskSpec::WorstCase,
            &mkt,
            &frame,
            &opts
        )
        .unwrap()
        .is_none());
    }
}

#[test]
fn grid_dimension_limit() {
    let mkt = make_scenario_set(
        &[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![-1.0, -1.0, -1.0],
        ],
        &[0.25; 4],
        0.0,
    )
    .unwrap();
    let frame = ProblemFrame::from_r_tilde(&RiskSpec::Zero, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
    assert!(matches!(
        grid_oracle(&UtilitySpec::Mean, &RiskSpec::Zero, &mkt, &frame, 1.0, 11),
        Err(utilrisk::Error::Dimension(3))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimal_points_are_feasible_and_value_grows_with_threshold(seed in 0u64..1000, a in 0.0f64..0.4, b in 0.0f64..0.4) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mkt = common::random_market(seed);
        let u = UtilitySpec::expected(UtilityFunction::exponential(1.0).unwrap());
        let r = RiskSpec::es(0.3).unwrap();
        let opts = SolveOptions { n_starts: 8, ..SolveOptions::default() };
        let mut values = Vec::new();
        for t in [lo, hi] {
            let frame = ProblemFrame::from_r_tilde(&r, mkt.probs(), 1.0, 0.0, t).unwrap();
            let res = maximize_utility(&u, &r, &mkt, &frame, &opts).unwrap();
            match &res.status {
                Status::Optimal { pi, value, .. } => {
                    let risk = transformed_risk(&r, &frame, &mkt.portfolio(pi), mkt.probs()).unwrap();
                    prop_assert!(risk <= t + 1e-9);
                    values.push(*value);
                }
                Status::Diverging { trace, .. } => {
                    prop_assert!(trace.iter().all(|p| p.risk <= t + 1e-9));
                    values.push(f64::INFINITY);
                }
                Status::Infeasible => prop_assert!(false, "origin is always feasible"),
            }
        }
        prop_assert!(values[1] >= values[0] - 1e-6, "{:?}", values);
    }
}
