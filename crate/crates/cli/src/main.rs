//! `ucong`: solve congestion games under strict uncertainty from the command
//! line.
//!
//! Exit codes: 0 success, 1 input error, 2 solver did not converge, 3 check
//! failure.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ucong_core::acceptance::{self, Options};
use ucong_core::analytics::{self, SampleConfig, SWEEP_CSV_HEADER};
use ucong_core::equilibrium::{
    best_response_dynamics, solve_optimum, solve_wcc_homogeneous, solve_wcr_rsg, verify_wcc_equilibrium,
    DynamicsConfig, FwOptions, Termination, WcrOptions,
};
use ucong_core::spec_file::parse_spec;
use ucong_core::validation::{self, POISSON_CSV_HEADER};
use ucong_core::{Error, GameSpec, LoadState, UncertaintyVector};

const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(name = "ucong", version, about = "Congestion games with multiplicative load uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an equilibrium of a game spec.
    Solve(SolveArgs),
    /// Equilibrium social cost over optimal social cost.
    Poa(SolveArgs),
    /// Bound curves (and optionally sampled ratios) on a grid of r.
    Sweep(SweepArgs),
    /// Replay the three-type best-response cycle.
    CycleDemo {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Poisson confidence intervals and their multiplicative radius.
    PoissonTable {
        #[arg(long, default_value_t = 6)]
        t_max: u32,
        #[arg(long, default_value_t = validation::DEFAULT_Z)]
        z: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Check {
        /// Run only the named check (name or number); repeatable.
        #[arg(long)]
        only: Vec<String>,
        /// CSV with an `r` column to compare the Poisson table against.
        #[arg(long)]
        poisson_golden: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Base,
    Wcc,
    Wcr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct SolveArgs {
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = Model::Wcc)]
    model: Model,
    /// Common uncertainty for every commodity.
    #[arg(long, conflicts_with = "rvec")]
    r: Option<f64>,
    /// Per-commodity uncertainty, comma separated. Defaults to the spec's.
    #[arg(long, value_delimiter = ',')]
    rvec: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    r_min: f64,
    #[arg(long, default_value_t = 8.0)]
    r_max: f64,
    #[arg(long, default_value_t = 141)]
    steps: usize,
    /// Add the worst measured WCC ratio over random parallel-link games.
    #[arg(long)]
    sample: bool,
    #[arg(long, default_value_t = 20)]
    games: usize,
    /// Sampling seed; falls back to UC_SEED, then 7.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    NonConvergence(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } | Error::NotConverged { .. } | Error::DescentStalled { .. } => {
                Failure::NonConvergence(e.to_string())
            }
            Error::CycleNotReproduced(_) => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Poa(args) => poa(&args),
        Command::Sweep(args) => sweep(&args),
        Command::CycleDemo { format } => cycle_demo(format),
        Command::PoissonTable { t_max, z, out } => poisson_table(t_max, z, out.as_deref()),
        Command::Check { only, poisson_golden } => check(&only, poisson_golden.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::NonConvergence(m)) => {
            eprintln!("not converged: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(3)
        }
    }
}

fn read_spec(path: &Path) -> Result<GameSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn uncertainty(spec: &GameSpec, args: &SolveArgs) -> Result<UncertaintyVector, Failure> {
    let k = spec.commodities().len();
    let rv = match (args.model, args.r, &args.rvec) {
        (Model::Base, _, _) => UncertaintyVector::homogeneous(1.0, k)?,
        (_, Some(r), _) => UncertaintyVector::homogeneous(r, k)?,
        (_, None, Some(v)) => UncertaintyVector::new(v.clone())?,
        (_, None, None) => UncertaintyVector::new(spec.uncertainties())?,
    };
    if rv.len() != k {
        return Err(Failure::Input(format!("--rvec has {} entries for {k} commodities", rv.len())));
    }
    if args.model == Model::Wcr && rv.common().is_none() {
        return Err(Failure::Input("--model wcr needs a common r for all commodities".into()));
    }
    if !(args.tol > 0.0) {
        return Err(Failure::Input("--tol must be positive".into()));
    }
    Ok(rv)
}

struct Solved {
    load: LoadState,
    gap: f64,
    iterations: usize,
    converged: bool,
}

fn equilibrium(spec: &GameSpec, model: Model, rv: &UncertaintyVector, tol: f64) -> Result<Solved, Failure> {
    if model == Model::Wcr {
        let r = rv.common().expect("checked");
        let res = solve_wcr_rsg(spec, r, WcrOptions { tol, ..WcrOptions::default() })?;
        return Ok(Solved { load: res.load, gap: res.gap, iterations: res.iterations, converged: res.converged });
    }
    if let Some(r) = rv.common() {
        let res = solve_wcc_homogeneous(spec, r, FwOptions { tol, ..FwOptions::default() })?;
        return Ok(Solved { load: res.load, gap: res.gap, iterations: res.iterations, converged: res.converged });
    }
    let cfg = DynamicsConfig { eps: tol, ..DynamicsConfig::new(spec.total_mass(), 1_000_000) };
    let trace = best_response_dynamics(spec, rv, cfg)?;
    let v = verify_wcc_equilibrium(spec, rv, &trace.final_flow, tol)?;
    Ok(Solved {
        load: trace.final_load(spec),
        gap: v.worst_violation,
        iterations: trace.steps.len(),
        converged: trace.termination == Termination::Equilibrium && v.ok,
    })
}

fn loads_json(spec: &GameSpec, load: &LoadState) -> Value {
    let map: serde_json::Map<String, Value> =
        spec.edges().iter().enumerate().map(|(e, edge)| (edge.id.clone(), json!(load.get(e)))).collect();
    Value::Object(map)
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Base => "base",
        Model::Wcc => "wcc",
        Model::Wcr => "wcr",
    }
}

fn solve(args: &SolveArgs) -> CliResult {
    let spec = read_spec(&args.spec)?;
    let rv = uncertainty(&spec, args)?;
    let eq = equilibrium(&spec, args.model, &rv, args.tol)?;
    let sc = spec.social_cost(&eq.load)?;
    let phi = spec.potential_r(&eq.load, rv.common().unwrap_or(1.0))?;
    let opt = solve_optimum(&spec, FwOptions { tol: args.tol, ..FwOptions::default() })?;
    let opt_sc = spec.social_cost(&opt.load)?;
    let ratio = sc / opt_sc;
    match args.format {
        Format::Json => {
            let doc = json!({
                "model": model_name(args.model),
                "r": rv.as_slice(),
                "loads": loads_json(&spec, &eq.load),
                "social_cost": sc,
                "potential": phi,
                "gap": eq.gap,
                "iterations": eq.iterations,
                "converged": eq.converged,
                "optimal_social_cost": opt_sc,
                "ratio_to_optimum": ratio,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Text => {
            println!("model        {}", model_name(args.model));
            println!("r            {}", join(rv.as_slice()));
            for (e, edge) in spec.edges().iter().enumerate() {
                println!("load {:<7} {}", edge.id, eq.load.get(e));
            }
            println!("social cost  {sc}");
            println!("potential    {phi}");
            println!("gap          {}", eq.gap);
            println!("iterations   {}", eq.iterations);
            println!("converged    {}", eq.converged);
            println!("ratio to opt {ratio}");
        }
    }
    if eq.converged {
        Ok(())
    } else {
        Err(Failure::NonConvergence(format!("gap {} after {} iterations", eq.gap, eq.iterations)))
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn poa(args: &SolveArgs) -> CliResult {
    let spec = read_spec(&args.spec)?;
    let rv = uncertainty(&spec, args)?;
    let report = match args.model {
        Model::Base => analytics::price_of_anarchy(&spec, args.tol)?,
        Model::Wcc => analytics::c_poa(&spec, &rv, args.tol)?,
        Model::Wcr => analytics::r_poa(&spec, rv.common().expect("checked"), args.tol)?,
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
        Format::Text => {
            println!("model          {}", report.model);
            println!("r              {}", join(&report.r));
            println!("equilibrium SC {}", report.equilibrium_sc);
            println!("optimal SC     {}", report.optimal_sc);
            println!("ratio          {}", report.ratio);
        }
    }
    Ok(())
}

fn seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("UC_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("UC_SEED={v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string())),
    }
}

fn sweep(args: &SweepArgs) -> CliResult {
    if args.jobs == 0 {
        return Err(Failure::Input("--jobs must be at least 1".into()));
    }
    let sample = if args.sample { Some(SampleConfig { games: args.games, seed: seed(args.seed)? }) } else { None };
    let rows = analytics::sweep(args.r_min, args.r_max, args.steps, sample, args.jobs)?;
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    write_output(args.out.as_deref(), &csv)
}

fn cycle_demo(format: Format) -> CliResult {
    let inst = validation::milchtaich_cycle_instance()?;
    let trace = validation::run_cycle_demo()?;
    let labels = validation::trace_labels(&inst.spec, &trace);
    match format {
        Format::Json => {
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .zip(labels.iter().skip(1))
                .map(|(s, label)| json!({"type": s.commodity + 1, "mass": s.mass, "state": label}))
                .collect();
            let doc = json!({"start": labels[0], "steps": steps, "revisits_start": true});
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Text => {
            println!("start   {}", labels[0]);
            for (k, (s, label)) in trace.steps.iter().zip(labels.iter().skip(1)).enumerate() {
                let name = |p: &ucong_core::Path| inst.spec.edges()[p.edges()[1]].id.clone();
                println!("move {}  type {} {} -> {}  {}", k + 1, s.commodity + 1, name(&s.from), name(&s.to), label);
            }
            println!("start state revisited after {} moves", trace.steps.len());
        }
    }
    Ok(())
}

fn poisson_table(t_max: u32, z: f64, out: Option<&Path>) -> CliResult {
    let rows = validation::poisson_table(t_max, z)?;
    let mut csv = String::from(POISSON_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    write_output(out, &csv)
}

/// Reads the `r` column of a CSV with a header row.
fn read_golden(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Failure::Input(format!("{}: empty file", path.display())))?;
    let col = header
        .split(',')
        .position(|h| h.trim() == "r")
        .ok_or_else(|| Failure::Input(format!("{}: no `r` column", path.display())))?;
    lines
        .enumerate()
        .map(|(k, line)| {
            line.split(',')
                .nth(col)
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| Failure::Input(format!("{}: row {}: bad r value", path.display(), k + 1)))
        })
        .collect()
}

fn check(only: &[String], golden: Option<&Path>) -> CliResult {
    let mut opts = Options::default();
    if let Some(p) = golden {
        opts.poisson_reference = read_golden(p)?;
    }
    let selected = if only.is_empty() {
        acceptance::criteria()
    } else {
        only.iter()
            .map(|name| acceptance::find(name).ok_or_else(|| Failure::Input(format!("unknown check {name:?}"))))
            .collect::<Result<_, _>>()?
    };
    let mut failed = Vec::new();
    for c in selected {
        let outcome = c.run(&opts);
        println!("{}", outcome.line());
        if !outcome.passed {
            failed.push(outcome.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join(", ")))
    }
}
