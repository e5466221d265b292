//! `utilrisk`: evaluate, solve and classify utility/risk portfolio problems
//! from the command line.
//!
//! Results go to stdout as JSON (CSV with `--csv`). Failures print a JSON
//! object `{"error": kind, "message": ...}` to stderr and exit with 2 for
//! usage errors or 3 for domain errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use utilrisk::diagnostics::{
    axiom_harness_with, catalog, classify_wellposedness, gaussian_witness_with_terms, table_matrix,
    Functional, WitnessOutcome, WitnessRisk,
};
use utilrisk::optimizer::{
    maximize_utility, minimize_risk, uniqueness_probe, OptimizationResult, Status,
};
use utilrisk::parse::{load_scenarios, parse_risk, parse_utility, SolveConfig};
use utilrisk::transform::{transformed_risk, transformed_utility};
use utilrisk::{Error, Execution, ProblemFrame, RiskSpec, ScenarioSet, UtilitySpec};

#[derive(Parser)]
#[command(
    name = "utilrisk",
    version,
    about = "Utility maximization under risk constraints on finite scenario markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the utility U and risk R of a portfolio's excess return X_π
    /// (or of a raw payoff), with their transformed values U_{w,r}, R_{w,r}
    /// and catalog metadata.
    Eval(EvalArgs),
    /// Maximize the transformed utility U_{w,r}(X_π) subject to
    /// R_{w,r}(X_π) <= R̃_max (--rmax), reporting an optimal portfolio π*,
    /// a diverging portfolio sequence, or infeasibility.
    Optimize(Shared),
    /// Minimize the transformed risk R_{w,r}(X_π) subject to
    /// U_{w,r}(X_π) >= Ũ_min (--umin).
    Minrisk(Shared),
    /// Classify the market-independent well-posedness of a (U, R) pair from
    /// sensitivity to large losses and the Fatou, cash-convexity and
    /// law-invariance premises.
    Classify(Shared),
    /// Print the two reference well-posedness matrices (utility columns
    /// against risk rows) computed by the classifier.
    Tables(TablesArgs),
    /// Construct a Gaussian market and the portfolio sequence n·π₀ whose mean
    /// grows without bound at non-positive VaR or ES.
    Witness(WitnessArgs),
    /// Sweep the risk threshold R̃_max over start:stop:count and report the
    /// optimal utility and portfolio at each level (the efficient frontier).
    Frontier(FrontierArgs),
    /// Check the functional axioms (monotonicity, normalization,
    /// cash-additivity, homogeneity, star-shapedness, convexity,
    /// law-invariance) on random payoffs against catalog metadata.
    Axioms(AxiomArgs),
}

#[derive(Args, Clone, Default)]
struct Shared {
    /// Scenario file: {"rate", "probs", "returns": [[...], ...]}.
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Utility functional, e.g. mean, exp:1, sshaped:0.5,0.7, power:0.5.
    #[arg(long)]
    utility: Option<String>,
    /// Risk functional, e.g. zero, var:0.05, es:0.05, entropic:1, ew:expm1:1.
    #[arg(long)]
    risk: Option<String>,
    /// Initial wealth w.
    #[arg(long, allow_negative_numbers = true)]
    w: Option<f64>,
    /// Risk-free rate r (defaults to the scenario file's rate).
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Fraction-space risk threshold R̃_max >= 0.
    #[arg(long, allow_negative_numbers = true)]
    rmax: Option<f64>,
    /// Fraction-space utility threshold Ũ_min >= 0.
    #[arg(long, allow_negative_numbers = true)]
    umin: Option<f64>,
    /// Seed for multistart and probe directions.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// JSON solve configuration; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    shared: Shared,
    /// Portfolio fractions π, comma separated (default: the zero portfolio).
    #[arg(long, allow_hyphen_values = true)]
    pi: Option<String>,
    /// Evaluate this payoff instead of a portfolio, comma separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["pi", "scenarios"])]
    payoff: Option<String>,
    /// Scenario probabilities for --payoff (default: uniform).
    #[arg(long, requires = "payoff")]
    probs: Option<String>,
}

#[derive(Args)]
struct TablesArgs {
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Print the ✓/✗ grids as text.
    #[arg(long, conflicts_with = "csv")]
    render: bool,
}

#[derive(Args)]
struct WitnessArgs {
    /// var:ALPHA or es:ALPHA.
    #[arg(long)]
    risk: String,
    /// Target maximal Sharpe ratio of the generated market.
    #[arg(long, allow_negative_numbers = true)]
    sr: f64,
    /// Number of risky assets.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Length of the portfolio sequence.
    #[arg(long, default_value_t = 20)]
    terms: usize,
    /// Emit the sequence as CSV (n, pi_1..pi_d, mean, risk).
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct FrontierArgs {
    #[command(flatten)]
    shared: Shared,
    /// Inclusive linear grid of R̃_max values, start:stop:count.
    #[arg(long)]
    sweep: String,
}

#[derive(Args)]
struct AxiomArgs {
    #[command(flatten)]
    shared: Shared,
    /// Run every catalog entry instead of --utility / --risk.
    #[arg(long, conflicts_with_all = ["utility", "risk"])]
    all: bool,
    /// Random trials per functional.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

/// Failure with its exit code.
enum Failure {
    Usage(&'static str, String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) => Failure::Usage(e.kind(), e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage("UsageError", msg.into())
}

fn numbers(s: &str, what: &str) -> Outcome<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{what}: not a number: {t:?}")))
        })
        .collect()
}

/// Flags merged over the optional config file.
struct Resolved {
    config: SolveConfig,
    base: Option<PathBuf>,
    csv: bool,
}

impl Resolved {
    fn new(shared: &Shared) -> Outcome<Self> {
        let (mut config, base) = match &shared.config {
            Some(p) => (SolveConfig::load(p)?, p.parent().map(Path::to_path_buf)),
            None => (SolveConfig::default(), None),
        };
        let mut base = base;
        if let Some(s) = &shared.scenarios {
            config.scenarios = Some(s.to_string_lossy().into_owned());
            base = None;
        }
        if shared.utility.is_some() {
            config.utility.clone_from(&shared.utility);
        }
        if shared.risk.is_some() {
            config.risk.clone_from(&shared.risk);
        }
        for (slot, flag) in [
            (&mut config.w, shared.w),
            (&mut config.r, shared.r),
            (&mut config.rmax, shared.rmax),
            (&mut config.umin, shared.umin),
        ] {
            if flag.is_some() {
                *slot = flag;
            }
        }
        if let Some(seed) = shared.seed {
            config.options.seed = seed;
        }
        if shared.sequential {
            config.options.execution = Execution::Sequential;
        }
        config.options.validate()?;
        Ok(Resolved {
            config,
            base,
            csv: shared.csv,
        })
    }

    fn utility(&self) -> Outcome<UtilitySpec> {
        let s = self
            .config
            .utility
            .as_deref()
            .ok_or_else(|| usage("--utility is required"))?;
        Ok(parse_utility(s)?)
    }

    fn risk(&self) -> Outcome<RiskSpec> {
        let s = self
            .config
            .risk
            .as_deref()
            .ok_or_else(|| usage("--risk is required"))?;
        Ok(parse_risk(s)?)
    }

    fn market(&self) -> Outcome<ScenarioSet> {
        let s = self
            .config
            .scenarios
            .as_deref()
            .ok_or_else(|| usage("--scenarios is required"))?;
        let path = match &self.base {
            Some(dir) if Path::new(s).is_relative() => dir.join(s),
            _ => PathBuf::from(s),
        };
        Ok(load_scenarios(path)?)
    }

    fn wealth(&self, mkt: &ScenarioSet) -> (f64, f64) {
        (
            self.config.w.unwrap_or(1.0),
            self.config.r.unwrap_or(mkt.rate()),
        )
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("values serialize")
}

fn ext(v: f64) -> Value {
    utilrisk::serde_ext::to_json(v)
}

fn eval(args: &EvalArgs) -> Outcome<String> {
    let res = Resolved::new(&args.shared)?;
    let utility = res
        .config
        .utility
        .as_deref()
        .map(parse_utility)
        .transpose()?;
    let risk = res.config.risk.as_deref().map(parse_risk).transpose()?;
    if utility.is_none() && risk.is_none() {
        return Err(usage("give --utility, --risk or both"));
    }
    let (y, probs, frame_wr, pi) = match &args.payoff {
        Some(p) => {
            let y = numbers(p, "--payoff")?;
            let probs = match &args.probs {
                Some(q) => numbers(q, "--probs")?,
                None => vec![1.0 / y.len() as f64; y.len()],
            };
            (y, probs, None, None)
        }
        None => {
            let mkt = res.market()?;
            let pi = match &args.pi {
                Some(s) => numbers(s, "--pi")?,
                None => vec![0.0; mkt.n_assets()],
            };
            if pi.len() != mkt.n_assets() {
                return Err(Failure::Domain(Error::LengthMismatch {
                    expected: mkt.n_assets(),
                    found: pi.len(),
                }));
            }
            let wr = res.wealth(&mkt);
            (
                mkt.portfolio(&pi).into_inner(),
                mkt.probs().to_vec(),
                Some(wr),
                Some(pi),
            )
        }
    };
    let (w, r) = frame_wr.unwrap_or((res.config.w.unwrap_or(1.0), res.config.r.unwrap_or(0.0)));

    let mut out = serde_json::Map::new();
    if let Some(pi) = &pi {
        out.insert("pi".into(), to_value(pi));
    }
    out.insert("payoff".into(), to_value(&y));
    out.insert("w".into(), json!(w));
    out.insert("r".into(), json!(r));
    let mut row: Vec<(String, f64)> = Vec::new();
    if let Some(u) = &utility {
        let frame = ProblemFrame::from_r_tilde(&RiskSpec::Zero, &probs, w, r, 0.0)?;
        let value = u.value(&y, &probs)?;
        let transformed = transformed_utility(u, &frame, &y, &probs)?;
        row.push(("utility".into(), value));
        row.push(("transformed_utility".into(), transformed));
        out.insert(
            "utility".into(),
            json!({
                "spec": u,
                "value": ext(value),
                "transformed": ext(transformed),
                "metadata": u.metadata(),
                "sll": u.sll(),
            }),
        );
    }
    if let Some(rk) = &risk {
        let frame = ProblemFrame::from_r_tilde(rk, &probs, w, r, 0.0)?;
        let value = rk.value(&y, &probs)?;
        let transformed = transformed_risk(rk, &frame, &y, &probs)?;
        row.push(("risk".into(), value));
        row.push(("transformed_risk".into(), transformed));
        out.insert(
            "risk".into(),
            json!({
                "spec": rk,
                "value": ext(value),
                "transformed": ext(transformed),
                "metadata": rk.metadata(),
                "sll": rk.sll(),
            }),
        );
    }
    if res.csv {
        let header: Vec<&str> = row.iter().map(|(k, _)| k.as_str()).collect();
        let values: Vec<String> = row.iter().map(|(_, v)| v.to_string()).collect();
        return Ok(format!("{}\n{}\n", header.join(","), values.join(",")));
    }
    Ok(pretty(&Value::Object(out)))
}

fn result_row(r: &OptimizationResult) -> (String, String) {
    match &r.status {
        Status::Optimal {
            pi,
            value,
            utility,
            risk,
        } => {
            let pis: Vec<String> = pi.iter().map(f64::to_string).collect();
            (format!("optimal,{value},{utility},{risk}"), pis.join(","))
        }
        Status::Diverging { direction, trace } => {
            let last = trace.last().expect("traces are non-empty");
            let dirs: Vec<String> = direction.iter().map(f64::to_string).collect();
            (
                format!("diverging,{},{},{}", last.utility, last.utility, last.risk),
                dirs.join(","),
            )
        }
        Status::Infeasible => ("infeasible,,,".into(), String::new()),
    }
}

fn solve(shared: &Shared, minimize: bool) -> Outcome<String> {
    let res = Resolved::new(shared)?;
    let utility = res.utility()?;
    let risk = res.risk()?;
    let mkt = res.market()?;
    let (w, r) = res.wealth(&mkt);
    let opts = &res.config.options;
    let (frame, result) = if minimize {
        let umin = res.config.umin.ok_or_else(|| usage("--umin is required"))?;
        let frame = ProblemFrame::from_r_tilde(&risk, mkt.probs(), w, r, 0.0)?;
        (
            frame,
            minimize_risk(&risk, &utility, &mkt, &frame, umin, opts)?,
        )
    } else {
        let rmax = res.config.rmax.ok_or_else(|| usage("--rmax is required"))?;
        let frame = ProblemFrame::from_r_tilde(&risk, mkt.probs(), w, r, rmax)?;
        (
            frame,
            maximize_utility(&utility, &risk, &mkt, &frame, opts)?,
        )
    };
    let uniqueness = uniqueness_probe(&result, opts).ok();
    if res.csv {
        let d = mkt.n_assets();
        let names: Vec<String> = (1..=d).map(|i| format!("pi_{i}")).collect();
        let (head, pis) = result_row(&result);
        return Ok(format!(
            "status,value,utility,risk,{}\n{head},{pis}\n",
            names.join(",")
        ));
    }
    let mut out = json!({
        "problem": if minimize { "minimize_risk" } else { "maximize_utility" },
        "utility": utility,
        "risk": risk,
        "frame": frame,
        "result": result,
    });
    if minimize {
        out["u_tilde_min"] = json!(res.config.umin);
    }
    if let Some(u) = uniqueness {
        out["uniqueness"] = to_value(&u);
    }
    Ok(pretty(&out))
}

fn classify(shared: &Shared) -> Outcome<String> {
    let res = Resolved::new(shared)?;
    let c = classify_wellposedness(&res.utility()?, &res.risk()?);
    if res.csv {
        let v = to_value(&c);
        let reasons: Vec<String> = v["reasons"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|r| r.as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        return Ok(format!(
            "verdict,reasons\n{},{}\n",
            v["verdict"].as_str().unwrap_or(""),
            reasons.join(";")
        ));
    }
    Ok(pretty(&to_value(&c)))
}

fn tables(args: &TablesArgs) -> Outcome<String> {
    let tables = table_matrix();
    if args.render {
        return Ok(tables
            .iter()
            .map(|t| t.render())
            .collect::<Vec<_>>()
            .join("\n"));
    }
    if args.csv {
        let mut out = String::from("table,row,column,well_posed\n");
        for (k, t) in tables.iter().enumerate() {
            for line in t.to_csv().lines().skip(1) {
                let _ = writeln!(out, "{},{line}", k + 1);
            }
        }
        return Ok(out);
    }
    Ok(pretty(&to_value(&tables)))
}

fn witness(args: &WitnessArgs) -> Outcome<String> {
    let (kind, alpha) = args
        .risk
        .split_once(':')
        .ok_or_else(|| usage("--risk must be var:ALPHA or es:ALPHA"))?;
    let alpha: f64 = alpha
        .trim()
        .parse()
        .map_err(|_| usage(format!("not a level: {alpha:?}")))?;
    let risk = match kind.trim() {
        "var" => WitnessRisk::Var { alpha },
        "es" => WitnessRisk::Es { alpha },
        other => {
            return Err(usage(format!(
                "witness risk must be var or es, got {other:?}"
            )))
        }
    };
    let outcome = gaussian_witness_with_terms(risk, args.sr, args.dim, args.seed, args.terms)?;
    match (&outcome, args.csv) {
        (WitnessOutcome::Witness(w), true) => Ok(w.to_csv()),
        (
            WitnessOutcome::NotApplicable {
                threshold,
                sr_max,
                gap,
            },
            true,
        ) => Ok(format!(
            "threshold,sr_max,gap\n{threshold},{sr_max},{gap}\n"
        )),
        _ => Ok(pretty(&to_value(&outcome))),
    }
}

fn sweep(spec: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(usage("--sweep takes start:stop:count"));
    };
    let start: f64 = start
        .parse()
        .map_err(|_| usage(format!("bad sweep start {start:?}")))?;
    let stop: f64 = stop
        .parse()
        .map_err(|_| usage(format!("bad sweep stop {stop:?}")))?;
    let count: usize = count
        .parse()
        .map_err(|_| usage(format!("bad sweep count {count:?}")))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(usage("--sweep needs finite bounds and a positive count"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
        .collect())
}

fn frontier(args: &FrontierArgs) -> Outcome<String> {
    let res = Resolved::new(&args.shared)?;
    let utility = res.utility()?;
    let risk = res.risk()?;
    let mkt = res.market()?;
    let (w, r) = res.wealth(&mkt);
    let levels = sweep(&args.sweep)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &level in &levels {
        let frame = ProblemFrame::from_r_tilde(&risk, mkt.probs(), w, r, level)?;
        rows.push((
            level,
            maximize_utility(&utility, &risk, &mkt, &frame, &res.config.options)?,
        ));
    }
    if res.csv {
        let names: Vec<String> = (1..=mkt.n_assets()).map(|i| format!("pi_{i}")).collect();
        let mut out = format!("rmax,status,value,utility,risk,{}\n", names.join(","));
        for (level, result) in &rows {
            let (head, pis) = result_row(result);
            let _ = writeln!(out, "{level},{head},{pis}");
        }
        return Ok(out);
    }
    let points: Vec<Value> = rows
        .iter()
        .map(|(level, result)| json!({"rmax": level, "result": result}))
        .collect();
    Ok(pretty(
        &json!({"utility": utility, "risk": risk, "w": w, "r": r, "frontier": points}),
    ))
}

fn axioms(args: &AxiomArgs) -> Outcome<String> {
    let res = Resolved::new(&args.shared)?;
    if args.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let targets: Vec<(String, Functional)> = if args.all {
        catalog()
            .into_iter()
            .map(|e| (e.name, e.functional))
            .collect()
    } else {
        let mut t = Vec::new();
        if let Some(u) = &res.config.utility {
            t.push((u.clone(), Functional::Utility(parse_utility(u)?)));
        }
        if let Some(r) = &res.config.risk {
            t.push((r.clone(), Functional::Risk(parse_risk(r)?)));
        }
        if t.is_empty() {
            return Err(usage("give --utility, --risk or --all"));
        }
        t
    };
    let exec = res.config.options.execution;
    let seed = res.config.options.seed;
    let reports: Vec<(String, Functional, _)> = targets
        .into_iter()
        .map(|(name, f)| {
            let rep = axiom_harness_with(&f, args.trials, seed, exec);
            (name, f, rep)
        })
        .collect();
    if res.csv {
        let mut out = String::from("name,axiom,required,passed,failures\n");
        for (name, _, rep) in &reports {
            for c in &rep.checks {
                let axiom = to_value(&c.axiom);
                let _ = writeln!(
                    out,
                    "\"{name}\",{},{},{},{}",
                    axiom.as_str().unwrap_or(""),
                    c.required,
                    c.passed,
                    c.failures
                );
            }
        }
        return Ok(out);
    }
    let list: Vec<Value> = reports
        .iter()
        .map(|(name, f, rep)| json!({"name": name, "functional": f, "mismatches": rep.mismatches(), "report": rep}))
        .collect();
    Ok(pretty(&Value::Array(list)))
}

fn run(cli: &Cli) -> Outcome<String> {
    match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Optimize(s) => solve(s, false),
        Command::Minrisk(s) => solve(s, true),
        Command::Classify(s) => classify(s),
        Command::Tables(a) => tables(a),
        Command::Witness(a) => witness(a),
        Command::Frontier(a) => frontier(a),
        Command::Axioms(a) => axioms(a),
    }
}

fn report(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message}));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return report("UsageError", e.to_string().trim_end(), 2),
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(kind, msg)) => report(kind, &msg, 2),
        Err(Failure::Domain(e)) => report(e.kind(), &e.to_string(), 3),
    }
}
