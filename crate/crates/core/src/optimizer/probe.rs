//! Ray scans for maximizing sequences that stay feasible while the
//! objective keeps growing.
//!
//! Finding such a ray is evidence of divergence, not proof; finding none
//! says nothing about attainment.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Goal, Problem, SolveOptions};
use crate::error::Result;
use crate::exec::Execution;
use crate::risk::RiskSpec;
use crate::rng;
use crate::scenarios::ScenarioSet;
use crate::transform::{FrameEvaluator, ProblemFrame};
use crate::utility::UtilitySpec;

/// Number of trailing schedule points over which growth must be strict.
pub const TAIL_POINTS: usize = 10;

/// Salt separating probe directions from multistart streams.
const DIRECTION_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub lambda: f64,
    pub utility: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEvidence {
    pub direction: Vec<f64>,
    /// The longest strictly increasing tail of the scan.
    pub trace: Vec<TracePoint>,
}

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n.is_finite() && n > 0.0).then(|| v.into_iter().map(|x| x / n).collect())
}

/// Coordinate axes in both signs, the tangency direction `Σ̂⁻¹ mean` when the
/// sample covariance is invertible, and `n_starts` seeded random unit
/// vectors.
pub fn probe_directions(mkt: &ScenarioSet, opts: &SolveOptions) -> Vec<Vec<f64>> {
    let d = mkt.n_assets();
    let mut dirs = Vec::with_capacity(2 * d + 1 + opts.n_starts);
    for i in 0..d {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = sign;
            dirs.push(e);
        }
    }
    if let Some(chol) = mkt.covariance().cholesky() {
        let mean = DVector::from_vec(mkt.mean_returns());
        if let Some(t) = unit(chol.solve(&mean).iter().copied().collect()) {
            dirs.push(t);
        }
    }
    for k in 0..opts.n_starts {
        let mut g = rng::stream(opts.seed, DIRECTION_STREAM + k as u64);
        if let Some(v) = unit((0..d).map(|_| g.sample::<f64, _>(StandardNormal)).collect()) {
            dirs.push(v);
        }
    }
    dirs
}

/// Scans one ray; returns evidence when every point is feasible, the
/// objective rises strictly over the last [`TAIL_POINTS`] scales, and the
/// final objective beats every earlier one.
pub(crate) fn scan_ray(
    problem: &Problem,
    dir: &[f64],
    lambdas: &[f64],
) -> Option<DivergenceEvidence> {
    let mut objectives = Vec::with_capacity(lambdas.len());
    let mut trace = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let x: Vec<f64> = dir.iter().map(|v| lambda * v).collect();
        let p = problem.point(&x);
        if !p.feasible() || !p.objective.is_finite() {
            return None;
        }
        objectives.push(p.objective);
        trace.push(TracePoint {
            lambda,
            utility: p.utility,
            risk: p.risk,
        });
    }
    let n = objectives.len();
    if n < TAIL_POINTS {
        return None;
    }
    let tail_rising = objectives[n - TAIL_POINTS..]
        .windows(2)
        .all(|w| w[1] > w[0]);
    let last = objectives[n - 1];
    if !tail_rising || objectives[..n - 1].iter().any(|&v| v >= last) {
        return None;
    }
    let mut start = n - 1;
    while start > 0 && objectives[start] > objectives[start - 1] {
        start -= 1;
    }
    Some(DivergenceEvidence {
        direction: dir.to_vec(),
        trace: trace.split_off(start),
    })
}

/// Scans all directions; among rays with evidence, reports the one with the
/// largest final objective (first in direction order on ties).
pub(crate) fn probe(
    problem: &Problem,
    directions: &[Vec<f64>],
    lambdas: &[f64],
    exec: Execution,
) -> (Option<DivergenceEvidence>, usize) {
    let found = exec.map_slice(directions, |d| scan_ray(problem, d, lambdas));
    let evaluations = directions.len() * lambdas.len();
    let final_objective = |e: &DivergenceEvidence| {
        let x: Vec<f64> = e
            .direction
            .iter()
            .map(|v| e.trace.last().map_or(0.0, |t| t.lambda) * v)
            .collect();
        problem.point(&x).objective
    };
    let mut best: Option<(f64, DivergenceEvidence)> = None;
    for e in found.into_iter().flatten() {
        let v = final_objective(&e);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, e));
        }
    }
    (best.map(|(_, e)| e), evaluations)
}

/// Divergence probe for `(U_{w,r}, R_{w,r})` with threshold `R̃_max`.
pub fn divergence_probe(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    opts: &SolveOptions,
) -> Result<Option<DivergenceEvidence>> {
    let ev = FrameEvaluator::new(utility, risk, frame, mkt.probs())?;
    let problem = Problem::fractions(&ev, mkt, Goal::MaxUtility(frame.r_tilde_max));
    Ok(probe(
        &problem,
        &probe_directions(mkt, opts),
        &opts.ray_lambdas,
        opts.execution,
    )
    .0)
}

/// Probe along one caller-supplied direction only.
pub fn divergence_probe_along(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    direction: &[f64],
    opts: &SolveOptions,
) -> Result<Option<DivergenceEvidence>> {
    let ev = FrameEvaluator::new(utility, risk, frame, mkt.probs())?;
    let problem = Problem::fractions(&ev, mkt, Goal::MaxUtility(frame.r_tilde_max));
    Ok(scan_ray(&problem, direction, &opts.ray_lambdas))
}
