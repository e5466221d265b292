//! Exhaustive grid search over `[-box, box]^d` for `d <= 2`, used as a test
//! oracle for the simplex search.

use serde::{Deserialize, Serialize};

use super::{better, Candidate, Goal, Problem};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::risk::RiskSpec;
use crate::scenarios::ScenarioSet;
use crate::transform::{FrameEvaluator, ProblemFrame};
use crate::utility::UtilitySpec;

pub const MAX_STEPS: usize = 4001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub pi: Vec<f64>,
    pub value: f64,
    pub spacing: f64,
    /// Largest finite difference quotient from the argmax to a feasible
    /// grid neighbour.
    pub lipschitz: f64,
    /// Whether the argmax touches the edge of the box.
    pub on_boundary: bool,
}

pub fn grid_oracle(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    half_width: f64,
    steps: usize,
) -> Result<GridResult> {
    grid_oracle_with(
        utility,
        risk,
        mkt,
        frame,
        half_width,
        steps,
        Execution::default(),
    )
}

pub fn grid_oracle_with(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    half_width: f64,
    steps: usize,
    exec: Execution,
) -> Result<GridResult> {
    let origin = vec![0.0; mkt.n_assets()];
    grid_oracle_around(utility, risk, mkt, frame, &origin, half_width, steps, exec)
}

/// Grid over `center + [-half_width, half_width]^d`, for refining around a
/// coarse argmax. The origin is always a candidate.
#[allow(clippy::too_many_arguments)]
pub fn grid_oracle_around(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    center: &[f64],
    half_width: f64,
    steps: usize,
    exec: Execution,
) -> Result<GridResult> {
    let d = mkt.n_assets();
    if d > 2 {
        return Err(Error::Dimension(d));
    }
    if center.len() != d {
        return Err(Error::Precondition(format!(
            "grid center has {} coordinates for {d} assets",
            center.len()
        )));
    }
    if !(2..=MAX_STEPS).contains(&steps) || !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Precondition(format!(
            "grid needs 2..={MAX_STEPS} steps and a positive box, got {steps} and {half_width}"
        )));
    }
    let ev = FrameEvaluator::new(utility, risk, frame, mkt.probs())?;
    let problem = Problem::fractions(&ev, mkt, Goal::MaxUtility(frame.r_tilde_max));
    let spacing = 2.0 * half_width / (steps - 1) as f64;
    let coord = |k: usize, i: usize| center[k] - half_width + i as f64 * spacing;
    let rows = if d == 1 { 1 } else { steps };

    // one pass per row of the grid; row results come back in order
    let row_values: Vec<Vec<f64>> = exec.map_indices(rows, |i| {
        (0..steps)
            .map(|j| {
                let x = if d == 1 {
                    vec![coord(0, j)]
                } else {
                    vec![coord(0, i), coord(1, j)]
                };
                let p = problem.point(&x);
                if p.feasible() {
                    p.objective
                } else {
                    f64::NAN
                }
            })
            .collect()
    });

    let origin = vec![0.0; d];
    let mut best = Candidate {
        point: problem.point(&origin),
        x: origin,
    };
    let mut best_idx: Option<(usize, usize)> = None;
    for (i, row) in row_values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            let x = if d == 1 {
                vec![coord(0, j)]
            } else {
                vec![coord(0, i), coord(1, j)]
            };
            let mut point = best.point;
            point.objective = v;
            let c = Candidate { x, point };
            if better(&c, &best) {
                best = c;
                best_idx = Some((i, j));
            }
        }
    }

    let value_at = |i: isize, j: isize| -> Option<f64> {
        if i < 0 || j < 0 || i as usize >= rows || j as usize >= steps {
            return None;
        }
        let v = row_values[i as usize][j as usize];
        v.is_finite().then_some(v)
    };
    let (lipschitz, on_boundary) = match best_idx {
        Some((i, j)) => {
            let (i, j) = (i as isize, j as isize);
            let mut neighbours = vec![(i, j - 1), (i, j + 1)];
            if d == 2 {
                neighbours.extend([(i - 1, j), (i + 1, j)]);
            }
            let centre = best.point.objective;
            let l = neighbours
                .into_iter()
                .filter_map(|(a, b)| value_at(a, b))
                .map(|v| (v - centre).abs() / spacing)
                .fold(0.0, f64::max);
            let edge = |k: isize, n: usize| k == 0 || k as usize == n - 1;
            (l, edge(j, steps) || (d == 2 && edge(i, rows)))
        }
        None => (0.0, false),
    };
    Ok(GridResult {
        pi: best.x,
        value: best.point.objective,
        spacing,
        lipschitz,
        on_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::make_scenario_set;
    use crate::utility::UtilityFunction;

    #[test]
    fn mean_es_grid() {
        let mkt = make_scenario_set(&[vec![2.0], vec![-1.0]], &[0.5, 0.5], 0.0).unwrap();
        let es = RiskSpec::es(0.5).unwrap();
        let frame = ProblemFrame::from_r_tilde(&es, mkt.probs(), 1.0, 0.0, 0.5).unwrap();
        let g = grid_oracle(&UtilitySpec::Mean, &es, &mkt, &frame, 4.0, 1601).unwrap();
        assert!((g.value - 0.25).abs() <= g.spacing);
        assert!(!g.on_boundary);
    }

    #[test]
    fn worst_case_zero_threshold_and_dimension_check() {
        let mkt = make_scenario_set(
            &[vec![0.5, -0.2], vec![-0.4, 0.3], vec![-0.1, -0.1]],
            &[0.3, 0.3, 0.4],
            0.0,
        )
        .unwrap();
        let frame =
            ProblemFrame::from_r_tilde(&RiskSpec::WorstCase, mkt.probs(), 1.0, 0.0, 0.0).unwrap();
        let g = grid_oracle(
            &UtilitySpec::Mean,
            &RiskSpec::WorstCase,
            &mkt,
            &frame,
            2.0,
            201,
        )
        .unwrap();
        assert_eq!(g.pi, vec![0.0, 0.0]);
        let wide = make_scenario_set(
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
        let f = ProblemFrame::from_r_tilde(&RiskSpec::Zero, wide.probs(), 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            grid_oracle(&UtilitySpec::Mean, &RiskSpec::Zero, &wide, &f, 1.0, 11),
            Err(Error::Dimension(3))
        ));
    }

    #[test]
    fn reflection_symmetry() {
        // symmetric market, odd utility, symmetric constraint
        let mkt = make_scenario_set(&[vec![1.0], vec![-1.0]], &[0.5, 0.5], 0.0).unwrap();
        let u = UtilitySpec::expected(UtilityFunction::linear(1.0).unwrap());
        let frame =
            ProblemFrame::from_r_tilde(&RiskSpec::WorstCase, mkt.probs(), 1.0, 0.0, 0.7).unwrap();
        let ev = FrameEvaluator::new(&u, &RiskSpec::WorstCase, &frame, mkt.probs()).unwrap();
        for k in 0..50 {
            let pi = -1.0 + 0.04 * k as f64;
            let a = (
                ev.utility(&mkt.portfolio(&[pi])).unwrap(),
                ev.risk(&mkt.portfolio(&[pi])).unwrap(),
            );
            let b = (
                ev.utility(&mkt.portfolio(&[-pi])).unwrap(),
                ev.risk(&mkt.portfolio(&[-pi])).unwrap(),
            );
            assert_eq!(a, b);
        }
        let g = grid_oracle(&u, &RiskSpec::WorstCase, &mkt, &frame, 2.0, 401).unwrap();
        assert_eq!(g.value, 0.0);
    }
}
