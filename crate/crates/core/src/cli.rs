//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 numerical failure,
//! 3 relaxation did not converge, 4 method inapplicable to the instance.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{
    apportionment_factor, build_certificate, greedy_factor, prior_factor_at_ratio,
    prior_factor_binary, prior_factor_replicated, sviridenko_factor, wolsey_factor, DesignMethod,
    EfficiencyCertificate,
};
use crate::combinat::{
    greedy, greedy_budgeted_wolsey, sviridenko_budgeted, total_curvature, Curvature, GreedyMode,
    GreedyTrace, GroundSet, SVIRIDENKO_CAP,
};
use crate::error::DesignError;
use crate::instance::{
    generate, load_problem, project_if_rank_deficient, save_problem, BudgetMode, DesignProblem,
    GeneratorKind, GeneratorParams, IntegerDesign,
};
use crate::relax::{solve_continuous, RelaxOptions, RelaxationCertificate};
use crate::rounding::{
    apportionment, budgeted_dp, incremental_rounding, top_n_binary, RoundingResult,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SWEEP_HEADER: &str = "p,N_over_s,F,beats_greedy,beats_apportionment";

#[derive(Debug, Parser)]
#[command(
    name = "optdesign",
    version,
    about = "Discrete phi_p-optimal experimental design"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the continuous relaxation and print its optimality certificate.
    Relax(RelaxArgs),
    /// Greedy design (cost-benefit greedy for budgeted instances).
    Greedy(GreedyArgs),
    /// Round relaxation weights to an integer design.
    Round(RoundArgs),
    /// Prior approximation factors, or a certificate for a given design.
    Bounds(BoundsArgs),
    /// Relaxation, designs and certificates in one report.
    Pipeline(PipelineArgs),
    /// Tabulate the rounding factor F over (p, N/s).
    SweepF(SweepArgs),
    /// Write a random problem document.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relaxation gap tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path, or `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Override the document's exponent p.
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Override the document's replication budget N.
    #[arg(long = "n")]
    pub n: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RelaxArgs {
    pub problem: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GreedyArgs {
    pub problem: PathBuf,
    /// Use each atom at most once.
    #[arg(long)]
    pub binary: bool,
    /// Lazy evaluation of marginal gains.
    #[arg(long)]
    pub lazy: bool,
    /// Budgeted instances: partial enumeration instead of cost-benefit greedy.
    #[arg(long)]
    pub enumerate: bool,
    #[arg(long, default_value_t = SVIRIDENKO_CAP)]
    pub cap_s: usize,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RoundMethod {
    Incremental,
    Topn,
    Apportion,
    Dp,
}

#[derive(Debug, Args)]
pub struct RoundArgs {
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value_t = RoundMethod::Incremental)]
    pub method: RoundMethod,
    /// Comma-separated weights to round instead of solving the relaxation.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Problem document; with `--design`, emits an efficiency certificate.
    pub problem: Option<PathBuf>,
    /// Comma-separated replication counts.
    #[arg(long, value_delimiter = ',')]
    pub design: Option<Vec<u64>>,
    /// How the design was produced (selects the prior bound).
    #[arg(long, default_value = "incremental")]
    pub method: String,
    #[arg(long = "s")]
    pub s: Option<usize>,
    /// Total curvature for the greedy factor.
    #[arg(long)]
    pub curvature: Option<f64>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    pub problem: PathBuf,
    /// Comma-separated from: greedy, greedy-binary, round, topn, apportion, dp, wolsey, sviridenko.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Values of p: `a,b,c` or `start:stop:count`.
    #[arg(long, default_value = "0:1:101")]
    pub p_grid: String,
    /// Values of N/s: `a,b,c` or `start:stop:count`.
    #[arg(long, default_value = "0.1,0.25,0.5,1,2,4")]
    pub ratio_grid: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// coverage, random-psd or rank-one.
    pub kind: String,
    #[arg(long = "s", default_value_t = 6)]
    pub s: usize,
    #[arg(long = "m", default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub rows: usize,
    #[arg(long, default_value_t = 0.4)]
    pub density: f64,
    #[arg(long = "p", default_value_t = 0.5)]
    pub p: f64,
    #[arg(long = "n", default_value_t = 3)]
    pub n: u64,
    /// Emit a budgeted instance with this total budget.
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Design(DesignError),
    Usage(String),
    Io(String),
    NotConverged(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::NotConverged(_) => 3,
            CliError::Design(e) => design_exit_code(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Design(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => write!(f, "{m}"),
            CliError::NotConverged(gap) => write!(f, "relaxation did not converge (gap {gap:e})"),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        CliError::Design(e)
    }
}

pub fn design_exit_code(e: &DesignError) -> i32 {
    use DesignError::*;
    match e {
        NotSymmetric { .. }
        | IndefiniteBeyondTol { .. }
        | NotPsd { .. }
        | DimensionMismatch(_)
        | Parse { .. }
        | Schema(_)
        | BadParams(_)
        | BadBudget { .. }
        | IrrationalCost(_)
        | NotSorted
        | BadSum { .. } => 1,
        SingularInformationMatrix { .. }
        | RankDeficientObservations { .. }
        | SingularIterate { .. }
        | BudgetScaleOverflow { .. } => 2,
        BudgetTooSmall { .. }
        | NothingAffordable { .. }
        | TooLarge { .. }
        | AllAtomsNull
        | Inapplicable(_) => 4,
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    let (out, result) = dispatch(cli.command);
    match result {
        Ok(output) => match emit(&out, &output, stdout) {
            Ok(()) => 0,
            Err(e) => report(stderr, &e),
        },
        Err((partial, e)) => {
            if let Some(output) = partial {
                if let Err(io) = emit(&out, &output, stdout) {
                    return report(stderr, &io);
                }
            }
            report(stderr, &e)
        }
    }
}

fn report(stderr: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

fn emit(out: &str, content: &str, stdout: &mut dyn Write) -> CliResult<()> {
    if out == "-" {
        stdout
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
    } else {
        std::fs::write(out, content).map_err(|e| CliError::Io(format!("cannot write `{out}`: {e}")))
    }
}

/// Output text, or an error optionally preceded by output still worth
/// writing (a report of a run that did not converge).
type Dispatched = std::result::Result<String, (Option<String>, CliError)>;

fn dispatch(command: Command) -> (String, Dispatched) {
    let plain = |r: CliResult<String>| r.map_err(|e| (None, e));
    match command {
        Command::Relax(a) => (a.common.out.clone(), cmd_relax(&a)),
        Command::Greedy(a) => (a.common.out.clone(), plain(cmd_greedy(&a))),
        Command::Round(a) => (a.common.out.clone(), plain(cmd_round(&a))),
        Command::Bounds(a) => (a.common.out.clone(), plain(cmd_bounds(&a))),
        Command::Pipeline(a) => (a.common.out.clone(), cmd_pipeline(&a)),
        Command::SweepF(a) => (a.common.out.clone(), plain(cmd_sweep_f(&a))),
        Command::Gen(a) => (a.common.out.clone(), plain(cmd_gen(&a))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn read_problem(path: &PathBuf, overrides: &Overrides) -> CliResult<DesignProblem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))?;
    let mut problem = load_problem(&text)?;
    if let Some(p) = overrides.p {
        problem = problem.with_p(p)?;
    }
    if let Some(n) = overrides.n {
        if problem.replication().is_none() {
            return Err(CliError::Usage(
                "--n applies only to replication instances".into(),
            ));
        }
        problem = problem.with_mode(BudgetMode::Replication { n })?;
    }
    Ok(problem)
}

fn relax_options(common: &Common) -> CliResult<RelaxOptions> {
    if common.tol.is_nan() || common.tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    Ok(RelaxOptions {
        tol: common.tol,
        max_iter: common.max_iter,
        ..RelaxOptions::default()
    })
}

/// Solves the relaxation on the range of `M_F(1)`; atom indices, weights and
/// `phi_p` values are unchanged by the projection.
fn relax_projected(
    problem: &DesignProblem,
    opts: &RelaxOptions,
) -> CliResult<(DesignProblem, RelaxationCertificate)> {
    let (projected, _) = project_if_rank_deficient(problem)?;
    let cert = solve_continuous(&projected, opts)?;
    Ok((projected, cert))
}

pub fn cmd_relax(a: &RelaxArgs) -> Dispatched {
    let run = || -> CliResult<RelaxationCertificate> {
        let problem = read_problem(&a.problem, &a.overrides)?;
        Ok(relax_projected(&problem, &relax_options(&a.common)?)?.1)
    };
    match run() {
        Ok(cert) if cert.converged => Ok(to_json(&cert)),
        Ok(cert) => Err((Some(to_json(&cert)), CliError::NotConverged(cert.gap))),
        Err(e) => Err((None, e)),
    }
}

#[derive(Debug, Serialize)]
pub struct GreedyReport {
    pub label: String,
    pub method: DesignMethod,
    pub design: IntegerDesign,
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<GreedyTrace>,
    pub guarantee: f64,
    /// Curvature on each ground set, with the refined factor.
    pub curvature: Vec<CurvatureReport>,
}

#[derive(Debug, Serialize)]
pub struct CurvatureReport {
    #[serde(flatten)]
    pub curvature: Curvature,
    pub factor: f64,
}

pub fn cmd_greedy(a: &GreedyArgs) -> CliResult<String> {
    let problem = read_problem(&a.problem, &a.overrides)?;
    let report = match problem.replication() {
        Some(n) => {
            let mode = if a.binary {
                GreedyMode::Binary
            } else {
                GreedyMode::Replicated
            };
            let (design, trace) = greedy(&problem, mode, a.lazy)?;
            let mut curvature = Vec::new();
            for ground in [GroundSet::Binary, GroundSet::Replicated] {
                match total_curvature(&problem, ground) {
                    Ok(c) => curvature.push(CurvatureReport {
                        factor: greedy_factor(n, Some(c.value)),
                        curvature: c,
                    }),
                    Err(DesignError::AllAtomsNull) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            GreedyReport {
                label: problem.label.clone(),
                method: if a.binary {
                    DesignMethod::GreedyBinary
                } else {
                    DesignMethod::Greedy
                },
                objective: problem.phi(&design.as_f64())?,
                design,
                trace: Some(trace),
                guarantee: greedy_factor(n, None),
                curvature,
            }
        }
        None => {
            let (design, method, guarantee) = if a.enumerate {
                (
                    sviridenko_budgeted(&problem, a.cap_s)?,
                    DesignMethod::Sviridenko,
                    sviridenko_factor(),
                )
            } else {
                (
                    greedy_budgeted_wolsey(&problem)?,
                    DesignMethod::Wolsey,
                    wolsey_factor(),
                )
            };
            GreedyReport {
                label: problem.label.clone(),
                method,
                objective: problem.phi(&design.as_f64())?,
                design,
                trace: None,
                guarantee,
                curvature: Vec::new(),
            }
        }
    };
    Ok(to_json(&report))
}

fn round_with(
    problem: &DesignProblem,
    w: &[f64],
    method: RoundMethod,
) -> CliResult<RoundingResult> {
    let p = problem.p();
    if w.len() != problem.s() {
        return Err(DesignError::DimensionMismatch(format!(
            "{} weights for {} atoms",
            w.len(),
            problem.s()
        ))
        .into());
    }
    match (method, problem.mode()) {
        (RoundMethod::Dp, mode) => {
            let (costs, budget) = match mode {
                BudgetMode::Replication { n } => (vec![1.0; problem.s()], *n as f64),
                BudgetMode::Budget { costs, budget } => (costs.clone(), *budget),
            };
            Ok(budgeted_dp(w, &costs, budget, p, None)?)
        }
        (_, BudgetMode::Budget { .. }) => Err(DesignError::Inapplicable(
            "this rounding needs a replication budget N; use dp for budgeted instances".into(),
        )
        .into()),
        (RoundMethod::Incremental, BudgetMode::Replication { n }) => {
            Ok(incremental_rounding(&renormalize(w, *n)?, p)?)
        }
        (RoundMethod::Topn, BudgetMode::Replication { n }) => Ok(top_n_binary(w, *n as usize, p)?),
        (RoundMethod::Apportion, BudgetMode::Replication { n }) => {
            Ok(apportionment(&renormalize(w, *n)?, p)?)
        }
    }
}

/// Rescales weights with positive sum to sum exactly to `N`.
fn renormalize(w: &[f64], n: u64) -> CliResult<Vec<f64>> {
    let sum: f64 = w.iter().sum();
    if sum.is_nan() || sum <= 0.0 || w.iter().any(|x| x.is_nan() || *x < 0.0) {
        return Err(DesignError::BadBudget { sum }.into());
    }
    Ok(w.iter().map(|x| x * n as f64 / sum).collect())
}

pub fn cmd_round(a: &RoundArgs) -> CliResult<String> {
    let problem = read_problem(&a.problem, &a.overrides)?;
    let w = match &a.weights {
        Some(w) => w.clone(),
        None => {
            let (_, cert) = relax_projected(&problem, &relax_options(&a.common)?)?;
            if !cert.converged {
                return Err(CliError::NotConverged(cert.gap));
            }
            cert.weights.w
        }
    };
    Ok(to_json(&round_with(&problem, &w, a.method)?))
}

#[derive(Debug, Serialize)]
pub struct FactorTable {
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub s: usize,
    pub incremental_rounding: f64,
    pub top_n: Option<f64>,
    pub apportionment: Option<f64>,
    pub greedy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy_with_curvature: Option<f64>,
    pub wolsey: f64,
    pub sviridenko: f64,
}

pub fn parse_method(name: &str) -> CliResult<DesignMethod> {
    Ok(match name {
        "greedy" => DesignMethod::Greedy,
        "greedy-binary" => DesignMethod::GreedyBinary,
        "round" | "incremental" => DesignMethod::Incremental,
        "topn" => DesignMethod::TopN,
        "apportion" => DesignMethod::Apportionment,
        "dp" => DesignMethod::BudgetedDp,
        "wolsey" => DesignMethod::Wolsey,
        "sviridenko" => DesignMethod::Sviridenko,
        other => return Err(CliError::Usage(format!("unknown method `{other}`"))),
    })
}

pub fn cmd_bounds(a: &BoundsArgs) -> CliResult<String> {
    if let Some(path) = &a.problem {
        let design = a
            .design
            .clone()
            .ok_or_else(|| CliError::Usage("a problem file needs --design".into()))?;
        let problem = read_problem(path, &a.overrides)?;
        let method = parse_method(&a.method)?;
        let design = match method {
            DesignMethod::TopN | DesignMethod::GreedyBinary => {
                if design.iter().any(|&k| k > 1) {
                    return Err(CliError::Usage("binary methods need a 0/1 design".into()));
                }
                IntegerDesign::binary(design)
            }
            _ => IntegerDesign::new(design),
        };
        if !problem.is_feasible(&design.as_f64()) {
            return Err(CliError::Usage(
                "design is infeasible for the instance".into(),
            ));
        }
        let (projected, cert) = relax_projected(&problem, &relax_options(&a.common)?)?;
        return Ok(to_json(&build_certificate(
            &projected, &design, &cert, method,
        )?));
    }
    let (Some(p), Some(n), Some(s)) = (a.overrides.p, a.overrides.n, a.s) else {
        return Err(CliError::Usage(
            "without a problem file, --p, --n and --s are required".into(),
        ));
    };
    if !(0.0..=1.0).contains(&p) || n == 0 || s == 0 {
        return Err(CliError::Usage("need p in [0, 1] and positive N, s".into()));
    }
    if let Some(c) = a.curvature {
        if !(0.0..=1.0).contains(&c) {
            return Err(CliError::Usage("--curvature must lie in [0, 1]".into()));
        }
    }
    let table = FactorTable {
        p,
        n,
        s,
        incremental_rounding: prior_factor_replicated(p, n, s),
        top_n: prior_factor_binary(p, n, s),
        apportionment: apportionment_factor(p, n, s),
        greedy: greedy_factor(n, None),
        greedy_with_curvature: a.curvature.map(|c| greedy_factor(n, Some(c))),
        wolsey: wolsey_factor(),
        sviridenko: sviridenko_factor(),
    };
    Ok(to_json(&table))
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub label: String,
    pub seed: Option<u64>,
    pub methods: Vec<String>,
    /// Rank of `M_F(1)`; the relaxation runs on this subspace.
    pub rank: usize,
    pub relaxation: RelaxationCertificate,
    pub certificates: Vec<EfficiencyCertificate>,
    /// Wall-clock milliseconds per stage.
    pub timings_ms: BTreeMap<String, f64>,
}

fn default_methods(problem: &DesignProblem) -> Vec<String> {
    let names: &[&str] = match problem.mode() {
        BudgetMode::Replication { .. } => &["greedy", "round"],
        BudgetMode::Budget { .. } => &["greedy", "dp"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

fn design_for(
    problem: &DesignProblem,
    name: &str,
    w: &[f64],
) -> CliResult<(IntegerDesign, DesignMethod)> {
    let budgeted = problem.replication().is_none();
    Ok(match name {
        "greedy" if budgeted => (greedy_budgeted_wolsey(problem)?, DesignMethod::Wolsey),
        "greedy" => (
            greedy(problem, GreedyMode::Replicated, true)?.0,
            DesignMethod::Greedy,
        ),
        "greedy-binary" if !budgeted => (
            greedy(problem, GreedyMode::Binary, true)?.0,
            DesignMethod::GreedyBinary,
        ),
        "wolsey" if budgeted => (greedy_budgeted_wolsey(problem)?, DesignMethod::Wolsey),
        "sviridenko" if budgeted => (
            sviridenko_budgeted(problem, SVIRIDENKO_CAP)?,
            DesignMethod::Sviridenko,
        ),
        "round" => (
            round_with(problem, w, RoundMethod::Incremental)?.design,
            DesignMethod::Incremental,
        ),
        "topn" => (
            round_with(problem, w, RoundMethod::Topn)?.design,
            DesignMethod::TopN,
        ),
        "apportion" => (
            round_with(problem, w, RoundMethod::Apportion)?.design,
            DesignMethod::Apportionment,
        ),
        "dp" => (
            round_with(problem, w, RoundMethod::Dp)?.design,
            DesignMethod::BudgetedDp,
        ),
        "greedy-binary" | "wolsey" | "sviridenko" => {
            return Err(DesignError::Inapplicable(format!(
                "method `{name}` does not apply to this budget mode"
            ))
            .into())
        }
        other => return Err(CliError::Usage(format!("unknown method `{other}`"))),
    })
}

pub fn cmd_pipeline(a: &PipelineArgs) -> Dispatched {
    let fail = |e| (None, e);
    let problem = read_problem(&a.problem, &a.overrides).map_err(fail)?;
    let methods = a
        .methods
        .clone()
        .unwrap_or_else(|| default_methods(&problem));
    for m in &methods {
        parse_method(m).map_err(fail)?;
    }
    let opts = relax_options(&a.common).map_err(fail)?;
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let (projected, relax) = relax_projected(&problem, &opts).map_err(fail)?;
    timings.insert("relax".to_string(), elapsed_ms(start));

    let mut certificates = Vec::with_capacity(methods.len());
    for name in &methods {
        let start = Instant::now();
        let (design, method) = design_for(&projected, name, &relax.weights.w).map_err(fail)?;
        let cert =
            build_certificate(&projected, &design, &relax, method).map_err(|e| fail(e.into()))?;
        timings.insert(name.clone(), elapsed_ms(start));
        certificates.push(cert);
    }
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        label: problem.label.clone(),
        seed: a.common.seed,
        methods,
        rank: projected.dim(),
        relaxation: relax,
        certificates,
        timings_ms: timings,
    };
    let text = to_json(&report);
    if report.relaxation.converged {
        Ok(text)
    } else {
        let gap = report.relaxation.gap;
        Err((Some(text), CliError::NotConverged(gap)))
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Grid from `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("bad grid `{spec}`"));
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(bad());
        };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        match count {
            0 => return Err(bad()),
            1 => vec![start],
            _ => (0..count)
                .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                .collect(),
        }
    } else {
        spec.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?
    };
    if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

pub fn cmd_sweep_f(a: &SweepArgs) -> CliResult<String> {
    let ps = parse_grid(&a.p_grid)?;
    let ratios = parse_grid(&a.ratio_grid)?;
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(CliError::Usage("p values must lie in [0, 1]".into()));
    }
    if ratios.iter().any(|r| *r <= 0.0) {
        return Err(CliError::Usage("N/s values must be positive".into()));
    }
    let greedy_limit = sviridenko_factor();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for &p in &ps {
        for &x in &ratios {
            let f = prior_factor_at_ratio(p, x);
            let beats_apportionment = x >= 1.0 && f > (1.0 - 1.0 / x).powf(p);
            out.push_str(&format!(
                "{p},{x},{f},{},{beats_apportionment}\n",
                f > greedy_limit
            ));
        }
    }
    Ok(out)
}

pub fn cmd_gen(a: &GenArgs) -> CliResult<String> {
    let kind: GeneratorKind = a.kind.parse()?;
    let params = GeneratorParams {
        s: a.s,
        m: a.m,
        rows: a.rows,
        density: a.density,
        p: a.p,
        n: a.n,
        budget: a.budget,
    };
    let problem = generate(kind, &params, a.common.seed.unwrap_or(0))?;
    Ok(save_problem(&problem))
}
