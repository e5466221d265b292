//! Shared fixtures for the integration suites.

#![allow(dead_code)]

use rand::Rng;
use utilrisk::optimizer::{
    grid_oracle, grid_oracle_around, maximize_utility, GridResult, SolveOptions, Status,
};
use utilrisk::transform::transformed_risk;
use utilrisk::{
    make_scenario_set, rng, Execution, LossFunction, ProblemFrame, RiskSpec, ScenarioSet,
    UtilityFunction, UtilitySpec,
};

/// Arbitrage-free market with `d ∈ {1, 2}` assets, at most six scenarios
/// and entries in `[-1, 1]`, drawn by rejection.
pub fn random_market(seed: u64) -> ScenarioSet {
    let mut g = rng::stream(seed, 0);
    let d = g.random_range(1..=2);
    loop {
        let n = g.random_range(d + 1..=6);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| g.random_range(-1.0..1.0)).collect())
            .collect();
        let raw: Vec<f64> = (0..n).map(|_| g.random_range(0.5..1.5)).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let head: f64 = probs[..n - 1].iter().sum();
        probs[n - 1] = 1.0 - head;
        if let Ok(m) = make_scenario_set(&rows, &probs, 0.0) {
            return m;
        }
    }
}

pub fn oracle_utilities() -> Vec<(&'static str, UtilitySpec)> {
    vec![
        ("mean", UtilitySpec::Mean),
        (
            "exp(1)",
            UtilitySpec::expected(UtilityFunction::exponential(1.0).unwrap()),
        ),
        (
            "sshaped(0.5,0.7)",
            UtilitySpec::expected(UtilityFunction::s_shaped(0.5, 0.7).unwrap()),
        ),
    ]
}

pub fn oracle_risks() -> Vec<(&'static str, RiskSpec)> {
    vec![
        ("es(0.3)", RiskSpec::es(0.3).unwrap()),
        ("worstcase", RiskSpec::WorstCase),
        (
            "ew(expm1(1))",
            RiskSpec::ExpectedWeightedLoss {
                loss: LossFunction::exp_minus_one(1.0).unwrap(),
            },
        ),
    ]
}

/// Largest box the oracle grows to before accepting a boundary argmax.
const MAX_BOX: f64 = 1048576.0;

#[derive(Debug)]
pub struct OracleCase {
    pub label: String,
    pub ok: bool,
    pub feasible: bool,
    pub detail: String,
}

/// Doubles the box from 2 until the argmax is interior and one more
/// doubling no longer improves the value. Returns the best grid seen and
/// whether the search was still pushing against the box edge at `MAX_BOX`.
fn coarse_grid(
    u: &UtilitySpec,
    r: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    steps: usize,
) -> (GridResult, bool) {
    let mut half = 2.0;
    let mut best = grid_oracle(u, r, mkt, frame, half, steps).unwrap();
    let mut last = best.clone();
    while half < MAX_BOX {
        half *= 2.0;
        let g = grid_oracle(u, r, mkt, frame, half, steps).unwrap();
        let settled = !last.on_boundary && g.value <= last.value;
        if g.value > best.value {
            best = g.clone();
        }
        last = g;
        if settled {
            return (best, false);
        }
    }
    (best, true)
}

/// Walks a fine window uphill from the coarse argmax, recentring while the
/// window argmax improves and shrinking once it stalls, so that optima in
/// narrow corners of the feasible set are resolved.
fn refine(
    u: &UtilitySpec,
    r: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    coarse: GridResult,
) -> GridResult {
    let steps = if mkt.n_assets() == 1 { 401 } else { 81 };
    let mut half = 4.0 * coarse.spacing;
    let mut best = coarse;
    for _ in 0..REFINE_LEVELS {
        for _ in 0..MAX_MOVES {
            let fine = grid_oracle_around(
                u,
                r,
                mkt,
                frame,
                &best.pi,
                half,
                steps,
                Execution::Sequential,
            )
            .unwrap();
            let moved = fine.value > best.value;
            if moved {
                best = fine;
            } else {
                best.spacing = fine.spacing;
                best.lipschitz = best.lipschitz.max(fine.lipschitz);
            }
            if !moved {
                break;
            }
        }
        half /= 4.0;
    }
    best
}

const REFINE_LEVELS: usize = 8;
const MAX_MOVES: usize = 200;

/// Compares the solver with the exhaustive grid on one instance.
///
/// An optimal result must match the refined grid value within
/// `max(1e-4, 2·spacing·lipschitz)` and the coarse search must have settled
/// inside its box. A diverging result must be matched by a coarse search
/// still pressing against the box at `MAX_BOX`.
pub fn oracle_case(
    seed: u64,
    u: &(&str, UtilitySpec),
    r: &(&str, RiskSpec),
    opts: &SolveOptions,
) -> OracleCase {
    let mkt = random_market(seed);
    let d = mkt.n_assets();
    let steps = if d == 1 { 4001 } else { 301 };
    let r_tilde = 0.05 + 0.3 * ((seed % 7) as f64 / 6.0);
    let frame = ProblemFrame::from_r_tilde(&r.1, mkt.probs(), 1.0, 0.0, r_tilde).unwrap();
    let label = format!(
        "seed {seed} d={d} n={} {}/{} r~={r_tilde:.3}",
        mkt.n_scenarios(),
        u.0,
        r.0
    );
    let res = maximize_utility(&u.1, &r.1, &mkt, &frame, opts).unwrap();
    let (coarse, unbounded) = coarse_grid(&u.1, &r.1, &mkt, &frame, steps);

    match &res.status {
        Status::Optimal { pi, value, .. } => {
            let grid = refine(&u.1, &r.1, &mkt, &frame, coarse);
            let x = mkt.portfolio(pi);
            let risk = transformed_risk(&r.1, &frame, &x, mkt.probs()).unwrap();
            let feasible = risk <= frame.r_tilde_max + 1e-9;
            let tol = f64::max(1e-4, 2.0 * grid.spacing * grid.lipschitz);
            let gap = value - grid.value;
            OracleCase {
                label,
                ok: feasible && !unbounded && gap.abs() <= tol,
                feasible,
                detail: format!(
                    "solver {value:.9} at {pi:?}, grid {:.9} at {:?}, tol {tol:.2e}, unbounded {unbounded}",
                    grid.value, grid.pi
                ),
            }
        }
        Status::Diverging { trace, .. } => {
            let feasible = trace.iter().all(|t| t.risk <= frame.r_tilde_max + 1e-9);
            OracleCase {
                label,
                ok: feasible && unbounded,
                feasible,
                detail: format!("diverging; grid unbounded up to box {MAX_BOX}: {unbounded}"),
            }
        }
        Status::Infeasible => OracleCase {
            label,
            ok: false,
            feasible: false,
            detail: "infeasible".into(),
        },
    }
}
