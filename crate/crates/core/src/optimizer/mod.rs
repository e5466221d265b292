//! Risk-constrained utility maximization, its risk-minimization counterpart,
//! a divergence probe for unbounded maximizing sequences, and a brute-force
//! grid oracle.
//!
//! All searches run in fraction space on the transformed functionals
//! `U_{w,r}`, `R_{w,r}`; [`maximize_utility_shares`] solves the same problem
//! in share space on the raw functionals.

mod grid;
mod nelder_mead;
mod probe;

pub use grid::{grid_oracle, grid_oracle_around, grid_oracle_with, GridResult};
pub use probe::{
    divergence_probe, divergence_probe_along, probe_directions, DivergenceEvidence, TracePoint,
};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::risk::RiskSpec;
use crate::rng;
use crate::scenarios::ScenarioSet;
use crate::transform::{FrameEvaluator, ProblemFrame};
use crate::utility::UtilitySpec;

/// Distance within which a start counts as agreeing with the optimum.
pub const AGREEMENT_TOL: f64 = 1e-4;
/// Fraction of converged starts that must agree for uniqueness evidence.
pub const AGREEMENT_SHARE: f64 = 0.9;

fn default_lambdas() -> Vec<f64> {
    (0..=40).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub n_starts: usize,
    pub max_iters: usize,
    /// Stopping tolerance on the simplex diameter.
    pub tol: f64,
    pub penalty: f64,
    pub ray_lambdas: Vec<f64>,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            n_starts: 16,
            max_iters: 2000,
            tol: 1e-8,
            penalty: 1e6,
            ray_lambdas: default_lambdas(),
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidSpec(
                "n_starts and max_iters must be positive".into(),
            ));
        }
        if !(self.tol > 0.0) || !(self.penalty >= 0.0) {
            return Err(Error::InvalidSpec(
                "tol must be positive and penalty non-negative".into(),
            ));
        }
        if self.ray_lambdas.len() < 11
            || self
                .ray_lambdas
                .windows(2)
                .any(|w| !(w[0] > 0.0 && w[1] > w[0]))
        {
            return Err(Error::InvalidSpec(
                "ray schedule needs at least 11 increasing positive scales".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Status {
    /// `value` is the utility for maximization and the risk for
    /// minimization.
    Optimal {
        pi: Vec<f64>,
        value: f64,
        utility: f64,
        risk: f64,
    },
    Diverging {
        direction: Vec<f64>,
        trace: Vec<TracePoint>,
    },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    #[serde(flatten)]
    pub status: Status,
    pub evaluations: usize,
    pub starts_agreeing: usize,
    pub starts_converged: usize,
}

impl OptimizationResult {
    pub fn optimum(&self) -> Option<(&[f64], f64)> {
        match &self.status {
            Status::Optimal { pi, value, .. } => Some((pi, *value)),
            _ => None,
        }
    }

    pub fn is_diverging(&self) -> bool {
        matches!(self.status, Status::Diverging { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessEvidence {
    pub unique_evidence: bool,
    pub agreeing: usize,
    pub converged: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Goal {
    /// maximize utility subject to risk <= threshold
    MaxUtility(f64),
    /// maximize -risk subject to utility >= threshold
    MinRisk(f64),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Point {
    pub utility: f64,
    pub risk: f64,
    pub objective: f64,
    pub violation: f64,
}

impl Point {
    pub fn feasible(&self) -> bool {
        self.violation == 0.0 && !self.objective.is_nan()
    }

    fn score(&self, penalty: f64) -> f64 {
        if self.objective.is_nan()
            || self.objective == f64::NEG_INFINITY
            || !self.violation.is_finite()
        {
            return f64::NEG_INFINITY;
        }
        self.objective - penalty * self.violation * self.violation
    }
}

type PairFn<'a> = dyn Fn(&[f64]) -> (f64, f64) + Send + Sync + 'a;

/// An objective/constraint pair over portfolio coordinates.
pub(crate) struct Problem<'a> {
    eval: Box<PairFn<'a>>,
    goal: Goal,
    dim: usize,
}

impl<'a> Problem<'a> {
    /// Fraction-space problem on the transformed functionals. Evaluation
    /// failures (no root, unbounded objective) count as the worst outcome.
    pub fn fractions(ev: &'a FrameEvaluator, mkt: &'a ScenarioSet, goal: Goal) -> Self {
        let eval = move |pi: &[f64]| {
            let y = mkt.portfolio(pi);
            (
                ev.utility(&y).unwrap_or(f64::NEG_INFINITY),
                ev.risk(&y).unwrap_or(f64::INFINITY),
            )
        };
        Problem {
            eval: Box::new(eval),
            goal,
            dim: mkt.n_assets(),
        }
    }

    /// Share-space problem on the raw functionals: wealth `w(1+r) + Σθⁱ Xⁱ`.
    fn shares(
        u: &'a UtilitySpec,
        r: &'a RiskSpec,
        mkt: &'a ScenarioSet,
        base: f64,
        goal: Goal,
    ) -> Self {
        let eval = move |theta: &[f64]| {
            let wealth: Vec<f64> = mkt.portfolio(theta).iter().map(|x| base + x).collect();
            (
                u.value(&wealth, mkt.probs()).unwrap_or(f64::NEG_INFINITY),
                r.value(&wealth, mkt.probs()).unwrap_or(f64::INFINITY),
            )
        };
        Problem {
            eval: Box::new(eval),
            goal,
            dim: mkt.n_assets(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, x: &[f64]) -> Point {
        let (mut utility, mut risk) = (self.eval)(x);
        if utility.is_nan() {
            utility = f64::NEG_INFINITY;
        }
        if risk.is_nan() {
            risk = f64::INFINITY;
        }
        let (objective, violation) = match self.goal {
            Goal::MaxUtility(t) => (utility, if risk <= t { 0.0 } else { risk - t }),
            Goal::MinRisk(t) => (-risk, if utility >= t { 0.0 } else { t - utility }),
        };
        Point {
            utility,
            risk,
            objective,
            violation,
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub x: Vec<f64>,
    pub point: Point,
}

/// Tie-break order: larger objective, then smaller norm, then lexicographic.
pub(crate) fn better(a: &Candidate, b: &Candidate) -> bool {
    let (va, vb) = (a.point.objective, b.point.objective);
    let tol = 1e-12 * (1.0 + va.abs().min(vb.abs()));
    if va.is_finite() && vb.is_finite() && (va - vb).abs() > tol
        || !(va.is_finite() && vb.is_finite()) && va != vb
    {
        return va > vb;
    }
    let (na, nb) = (norm(&a.x), norm(&b.x));
    if (na - nb).abs() > 1e-15 * (1.0 + na) {
        return na < nb;
    }
    a.x.iter()
        .zip(&b.x)
        .find(|(p, q)| p != q)
        .is_some_and(|(p, q)| p < q)
}

struct StartOutcome {
    candidate: Option<Candidate>,
    converged: bool,
    evaluations: usize,
}

/// Start `k`: the origin for `k = 0`, else uniform in a ball whose radius
/// grows with `k`.
fn start_point(seed: u64, k: usize, dim: usize, scale: f64) -> Vec<f64> {
    if k == 0 {
        return vec![0.0; dim];
    }
    let mut g = rng::stream(seed, k as u64);
    let dir: Vec<f64> = (0..dim)
        .map(|_| g.sample::<f64, _>(StandardNormal))
        .collect();
    let n = norm(&dir).max(f64::MIN_POSITIVE);
    let radius = 0.5 * 1.5f64.powf((k - 1) as f64 / 2.0) * g.random::<f64>().powf(1.0 / dim as f64);
    dir.iter().map(|v| scale * radius * v / n).collect()
}

/// Largest feasible point on the segment from the origin to `x`, found by
/// bisection; requires the origin to be feasible.
fn repair(problem: &Problem, x: &[f64], evaluations: &mut usize) -> Option<Candidate> {
    let p = problem.point(x);
    *evaluations += 1;
    if p.feasible() {
        return Some(Candidate {
            x: x.to_vec(),
            point: p,
        });
    }
    let origin = vec![0.0; x.len()];
    let p0 = problem.point(&origin);
    *evaluations += 1;
    if !p0.feasible() {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = Candidate {
        x: origin,
        point: p0,
    };
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let xm: Vec<f64> = x.iter().map(|v| mid * v).collect();
        let pm = problem.point(&xm);
        *evaluations += 1;
        if pm.feasible() {
            lo = mid;
            best = Candidate { x: xm, point: pm };
        } else {
            hi = mid;
        }
    }
    Some(best)
}

fn run_start(problem: &Problem, opts: &SolveOptions, k: usize, scale: f64) -> StartOutcome {
    let x0 = start_point(opts.seed, k, problem.dim(), scale);
    let mut best_feasible: Option<Candidate> = None;
    let mut evaluations = 0usize;
    let mut f = |x: &[f64]| {
        let p = problem.point(x);
        if p.feasible() {
            let c = Candidate {
                x: x.to_vec(),
                point: p,
            };
            if best_feasible.as_ref().is_none_or(|b| better(&c, b)) {
                best_feasible = Some(c);
            }
        }
        -p.score(opts.penalty)
    };
    let mut step = scale * (0.1f64).max(0.25 * norm(&x0) / scale);
    let mut out = nelder_mead::minimize(&mut f, &x0, step, opts.tol, opts.max_iters);
    evaluations += out.evaluations;
    let mut converged = out.converged;
    // restarts recover from premature collapse on kinks
    for _ in 0..3 {
        step *= 0.1;
        let again = nelder_mead::minimize(&mut f, &out.x, step, opts.tol, opts.max_iters);
        evaluations += again.evaluations;
        let improved = again.fx < out.fx - 1e-14 * (1.0 + out.fx.abs());
        converged = again.converged;
        if again.fx <= out.fx {
            out = again;
        }
        if !improved {
            break;
        }
    }
    let repaired = repair(problem, &out.x, &mut evaluations);
    let candidate = match (repaired, best_feasible) {
        (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
        (a, b) => a.or(b),
    };
    StartOutcome {
        candidate,
        converged,
        evaluations,
    }
}

/// Multistart search; `None` when no start produced a feasible point.
fn search(
    problem: &Problem,
    opts: &SolveOptions,
    scale: f64,
) -> (Option<Candidate>, usize, usize, usize) {
    let outcomes = opts
        .execution
        .map_indices(opts.n_starts, |k| run_start(problem, opts, k, scale));
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let mut best: Option<Candidate> = None;
    for c in outcomes.iter().filter_map(|o| o.candidate.as_ref()) {
        if best.as_ref().is_none_or(|b| better(c, b)) {
            best = Some(c.clone());
        }
    }
    let Some(best) = best else {
        return (None, evaluations, 0, 0);
    };
    let converged: Vec<&Candidate> = outcomes
        .iter()
        .filter(|o| o.converged)
        .filter_map(|o| o.candidate.as_ref())
        .collect();
    let agreeing = converged
        .iter()
        .filter(|c| distance(&c.x, &best.x) <= AGREEMENT_TOL * scale)
        .count();
    (Some(best), evaluations, agreeing, converged.len())
}

fn solve(
    problem: &Problem,
    opts: &SolveOptions,
    scale: f64,
    directions: &[Vec<f64>],
    report_risk: bool,
) -> OptimizationResult {
    let (evidence, probe_evals) =
        probe::probe(problem, directions, &opts.ray_lambdas, opts.execution);
    if let Some(ev) = evidence {
        return OptimizationResult {
            status: Status::Diverging {
                direction: ev.direction,
                trace: ev.trace,
            },
            evaluations: probe_evals,
            starts_agreeing: 0,
            starts_converged: 0,
        };
    }
    let (best, evals, agreeing, converged) = search(problem, opts, scale);
    let status = match best {
        Some(c) => Status::Optimal {
            value: if report_risk {
                c.point.risk
            } else {
                c.point.utility
            },
            utility: c.point.utility,
            risk: c.point.risk,
            pi: c.x,
        },
        None => Status::Infeasible,
    };
    OptimizationResult {
        status,
        evaluations: probe_evals + evals,
        starts_agreeing: agreeing,
        starts_converged: converged,
    }
}

/// `sup U_{w,r}(X_π)` subject to `R_{w,r}(X_π) <= R̃_max`.
pub fn maximize_utility(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    opts: &SolveOptions,
) -> Result<OptimizationResult> {
    opts.validate()?;
    let ev = FrameEvaluator::new(utility, risk, frame, mkt.probs())?;
    let problem = Problem::fractions(&ev, mkt, Goal::MaxUtility(frame.r_tilde_max));
    if !problem.point(&vec![0.0; mkt.n_assets()]).feasible() {
        return Err(Error::Infeasible(
            "the riskless portfolio violates the risk constraint".into(),
        ));
    }
    Ok(solve(
        &problem,
        opts,
        1.0,
        &probe_directions(mkt, opts),
        false,
    ))
}

/// `inf R_{w,r}(X_π)` subject to `U_{w,r}(X_π) >= Ũ_min`.
pub fn minimize_risk(
    risk: &RiskSpec,
    utility: &UtilitySpec,
    mkt: &ScenarioSet,
    frame: &ProblemFrame,
    u_tilde_min: f64,
    opts: &SolveOptions,
) -> Result<OptimizationResult> {
    opts.validate()?;
    if !(u_tilde_min >= 0.0) {
        return Err(Error::Precondition(format!(
            "utility threshold must be at least the riskless utility, got offset {u_tilde_min}"
        )));
    }
    let ev = FrameEvaluator::new(utility, risk, frame, mkt.probs())?;
    let problem = Problem::fractions(&ev, mkt, Goal::MinRisk(u_tilde_min));
    Ok(solve(
        &problem,
        opts,
        1.0,
        &probe_directions(mkt, opts),
        true,
    ))
}

/// Share-space solve of `sup U(θ·S₁)` subject to `θ·S₀ = w` and
/// `R(θ·S₁) <= R_max`, with unit prices. The optimum is reported as the full
/// share vector `(θ⁰, θ¹, …, θᵈ)` and the raw utility value.
pub fn maximize_utility_shares(
    utility: &UtilitySpec,
    risk: &RiskSpec,
    mkt: &ScenarioSet,
    w: f64,
    r: f64,
    r_max: f64,
    opts: &SolveOptions,
) -> Result<OptimizationResult> {
    opts.validate()?;
    let frame = ProblemFrame::from_r_max(risk, mkt.probs(), w, r, r_max)?;
    let base = frame.riskless_wealth();
    let problem = Problem::shares(utility, risk, mkt, base, Goal::MaxUtility(r_max));
    let origin = problem.point(&vec![0.0; mkt.n_assets()]);
    if !origin.feasible() || !origin.utility.is_finite() {
        return Err(Error::Infeasible(
            "the riskless portfolio violates the risk constraint".into(),
        ));
    }
    let mut result = solve(&problem, opts, w, &probe_directions(mkt, opts), false);
    if let Status::Optimal { pi, .. } = &mut result.status {
        let theta0 = w - pi.iter().sum::<f64>();
        pi.insert(0, theta0);
    }
    Ok(result)
}

/// Evidence that the reported optimum is the unique maximizer: most
/// converged starts land on it.
pub fn uniqueness_probe(
    result: &OptimizationResult,
    _opts: &SolveOptions,
) -> Result<UniquenessEvidence> {
    if !matches!(result.status, Status::Optimal { .. }) {
        return Err(Error::Precondition(
            "uniqueness needs an optimal result".into(),
        ));
    }
    let converged = result.starts_converged;
    let agreeing = result.starts_agreeing;
    let unique_evidence = converged > 0 && agreeing as f64 >= AGREEMENT_SHARE * converged as f64;
    Ok(UniquenessEvidence {
        unique_evidence,
        agreeing,
        converged,
    })
}
