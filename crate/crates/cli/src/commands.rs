//! Subcommands, flag handling, and exit codes.
//!
//! Exit codes: 0 success, 1 usage, 2 validation failure, 3 runtime error.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use toad_core::baselines::{self, BatchLayout};
use toad_core::engine::{EngineConfig, ToadEngine};
use toad_core::policy::{self, PolicyViolation};
use toad_core::simgen::{self, Scale};
use toad_core::{Deadline, DeadlineSchedule, DecisionTrace, HypothesisStream, Mode};

use crate::campaign::{self, CampaignOptions};
use crate::io::{self, TraceRow};
use crate::scenario;
use crate::spec;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
    pub fn runtime(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<toad_core::Error> for Failure {
    fn from(e: toad_core::Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "toad",
    version,
    about = "Streaming FDR control under decision deadlines",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one procedure on a p-value stream (CSV file or live stdin).
    Run(RunArgs),
    /// Run a Monte Carlo campaign over a simulation grid.
    Simulate(SimulateArgs),
    /// Run a named demonstration scenario.
    Scenario(ScenarioArgs),
    /// Validate a weight policy and/or shape specification.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Procedure: toad | lond | lond_reshaped | bh | naive_bh | batch_bh | batch_prds.
    #[arg(long)]
    proc: Option<String>,
    /// Stream CSV path, or `-` for live stdin (one p-value per line).
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// batch:<n> | file:<path> | open | immediate.
    #[arg(long)]
    deadlines: Option<String>,
    /// identity | harmonic:<n> | nu:<path>.
    #[arg(long)]
    beta: Option<String>,
    /// const | const:<w> | file:<path>.
    #[arg(long)]
    weights: Option<String>,
    /// standard | recent.
    #[arg(long)]
    mode: Option<String>,
    /// Weight commitment: upfront | late.
    #[arg(long)]
    commit: Option<String>,
    /// Declared horizon; required in stdin mode.
    #[arg(long)]
    horizon: Option<usize>,
    /// Trace CSV destination (stdout when omitted in file mode).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file supplying defaults for any of the above keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Grid preset: desk | paper.
    #[arg(long)]
    scale: Option<String>,
    /// Comma-separated method list.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the preset's stream length.
    #[arg(long, value_name = "N")]
    t_max: Option<usize>,
    /// Override the preset's iteration count.
    #[arg(long)]
    iterations: Option<usize>,
    /// Output directory for summary.csv (and dominance_audit.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump trial N of the first grid cell to trial_<N>.csv.
    #[arg(long, value_name = "N")]
    dump_trial: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// One of: reorder-table1, stop-early, recent-mode.
    name: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    deadlines: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    commit: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parses and dispatches; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Scenario(args) => {
            match scenario::run_scenario(&args.name, &mut std::io::stdout().lock()) {
                Ok(()) => Ok(()),
                // A closed pipe (e.g. `| head`) is not a failure.
                Err(e)
                    if e.downcast_ref::<std::io::Error>()
                        .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
                {
                    Ok(())
                }
                Err(e) => Err(Failure::usage(e.to_string())),
            }
        }
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn load_config_map(path: &Option<PathBuf>) -> Result<HashMap<String, String>, Failure> {
    match path {
        Some(p) => spec::load_config(p).map_err(|e| Failure::usage(e.to_string())),
        None => Ok(HashMap::new()),
    }
}

/// Flag value, else config value, else default.
fn pick<T: FromStr + Clone>(
    flag: &Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v.clone());
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|e| Failure::usage(format!("config key `{key}` value {raw:?}: {e}"))),
        None => Ok(default),
    }
}

fn pick_opt<T: FromStr + Clone>(
    flag: &Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag.clone());
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| Failure::usage(format!("config key `{key}` value {raw:?}: {e}"))),
        None => Ok(None),
    }
}

fn parse_mode(raw: &str) -> Result<Mode, Failure> {
    match raw {
        "standard" => Ok(Mode::Standard),
        "recent" => Ok(Mode::Recent),
        other => Err(Failure::usage(format!("unknown mode {other:?}"))),
    }
}

fn parse_commit(raw: &str) -> Result<bool, Failure> {
    match raw {
        "upfront" => Ok(false),
        "late" => Ok(true),
        other => Err(Failure::usage(format!("unknown commit timing {other:?}"))),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let cfg = load_config_map(&args.config)?;
    let proc_name = pick(&args.proc, &cfg, "proc", "toad".to_string())?;
    let input = pick(&args.input, &cfg, "input", String::new())?;
    if input.is_empty() {
        return Err(Failure::usage("--input is required (path or `-` for stdin)"));
    }
    let alpha = pick(&args.alpha, &cfg, "alpha", 0.05)?;
    let beta_spec = pick(&args.beta, &cfg, "beta", "identity".to_string())?;
    let weights_spec = pick(&args.weights, &cfg, "weights", "const".to_string())?;
    let mode = parse_mode(&pick(&args.mode, &cfg, "mode", "standard".to_string())?)?;
    let late_commit = parse_commit(&pick(&args.commit, &cfg, "commit", "upfront".to_string())?)?;
    let deadline_spec = pick_opt(&args.deadlines, &cfg, "deadlines")?;
    let out = pick_opt(&args.out, &cfg, "out")?;
    let base = std::env::current_dir().map_err(|e| Failure::runtime(e.to_string()))?;

    if input == "-" {
        let horizon = pick_opt(&args.horizon, &cfg, "horizon")?
            .ok_or_else(|| Failure::usage("stdin mode requires --horizon"))?;
        return run_streaming(
            &proc_name,
            horizon,
            alpha,
            &beta_spec,
            &weights_spec,
            deadline_spec.as_deref(),
            mode,
            late_commit,
            out.as_deref(),
            &base,
        );
    }

    let loaded = io::load_stream(Path::new(&input)).map_err(|e| Failure::runtime(e.to_string()))?;
    let horizon = loaded.stream.len();
    let schedule = match deadline_spec.as_deref() {
        Some(spec_str) => spec::parse_deadlines(spec_str, &base)
            .map_err(|e| Failure::invalid(e.to_string()))?,
        None => match loaded.deadlines {
            Some(deadlines) => DeadlineSchedule::from_deadlines(deadlines)?,
            None => DeadlineSchedule::open(),
        },
    };

    let (trace, rows) = run_procedure(
        &proc_name,
        &loaded.stream,
        alpha,
        &beta_spec,
        &weights_spec,
        &schedule,
        mode,
        late_commit,
        &base,
    )?;

    let mut rendered = Vec::new();
    io::write_trace(&mut rendered, &rows).map_err(|e| Failure::runtime(e.to_string()))?;
    match out {
        Some(path) => {
            io::write_file(&path, &String::from_utf8_lossy(&rendered))
                .map_err(|e| Failure::runtime(e.to_string()))?;
        }
        None => {
            std::io::stdout()
                .write_all(&rendered)
                .map_err(|e| Failure::runtime(e.to_string()))?;
        }
    }
    eprintln!(
        "{}: {} of {} hypotheses rejected over {} stages",
        proc_name,
        trace.final_rejections().len(),
        horizon,
        trace.stages()
    );
    Ok(())
}

/// Runs a file-mode procedure, producing the trace and its export rows.
#[allow(clippy::too_many_arguments)]
fn run_procedure(
    proc_name: &str,
    stream: &HypothesisStream,
    alpha: f64,
    beta_spec: &str,
    weights_spec: &str,
    schedule: &DeadlineSchedule,
    mode: Mode,
    late_commit: bool,
    base: &Path,
) -> Result<(DecisionTrace, Vec<TraceRow>), Failure> {
    let n = stream.len();
    let p = stream.p_values();
    let invalid = |e: anyhow::Error| Failure::invalid(e.to_string());

    let make_rows = |trace: &DecisionTrace,
                     deadlines: &dyn Fn(usize) -> Deadline,
                     weight: &dyn Fn(usize) -> Option<f64>| {
        (1..=n)
            .map(|i| TraceRow {
                index: i,
                rejected_at: trace.rejected_at(i),
                deadline: deadlines(i),
                weight: weight(i),
                p_value: stream.p_value(i),
            })
            .collect::<Vec<_>>()
    };

    match proc_name {
        "toad" => {
            let beta = spec::parse_shape(beta_spec, n, base).map_err(invalid)?;
            let policy = spec::parse_policy(weights_spec, n, late_commit, base).map_err(invalid)?;
            let config = EngineConfig::new(alpha, beta, policy, schedule.clone()).with_mode(mode);
            let mut engine = ToadEngine::new(config, n)?;
            for i in 1..=n {
                engine.step(stream.p_value(i))?;
            }
            let rows = make_rows(
                engine.trace(),
                &|i| schedule.deadline(i),
                &|i| engine.committed_weight(i),
            );
            Ok((engine.into_trace(), rows))
        }
        "lond" | "lond_reshaped" => {
            let weights = spec::parse_weight_sequence(weights_spec, n, base).map_err(invalid)?;
            let trace = if proc_name == "lond" {
                baselines::lond(p, &weights, alpha)?
            } else {
                let shape = spec::parse_shape(beta_spec, n, base).map_err(invalid)?;
                let shapes = vec![shape; n];
                baselines::lond_reshaped(p, &weights, alpha, &shapes)?
            };
            let rows = make_rows(&trace, &|i| Deadline::At(i), &|i| Some(weights[i - 1]));
            Ok((trace, rows))
        }
        "bh" => {
            let rejected = baselines::bh(p, alpha)?;
            let trace = DecisionTrace::single_final_stage(n, rejected);
            let rows = make_rows(&trace, &|_| Deadline::At(n), &|_| None);
            Ok((trace, rows))
        }
        "naive_bh" | "batch_bh" | "batch_prds" | "batch_bh_prds" => {
            let layout = layout_from_schedule(schedule, n)?;
            let gamma = vec![1.0 / layout.count() as f64; layout.count()];
            let trace = match proc_name {
                "naive_bh" => baselines::naive_bh(p, &layout, alpha)?,
                "batch_bh" => baselines::batch_bh(p, &layout, alpha, &gamma)?,
                _ => baselines::batch_bh_prds(p, &layout, alpha, &gamma)?,
            };
            let rows = make_rows(&trace, &|i| schedule.deadline(i), &|_| None);
            Ok((trace, rows))
        }
        other => Err(Failure::usage(format!("unknown procedure {other:?}"))),
    }
}

/// Batch procedures need a batch layout; stages whose deadline is their own
/// index are the batch ends. A trailing run without such a stage becomes one
/// final (possibly short) batch.
fn layout_from_schedule(schedule: &DeadlineSchedule, n: usize) -> Result<BatchLayout, Failure> {
    let mut bounds = Vec::new();
    let mut start = 1usize;
    for i in 1..=n {
        if schedule.deadline(i) == Deadline::At(i) {
            bounds.push((start, i));
            start = i + 1;
        }
    }
    if start <= n {
        bounds.push((start, n));
    }
    BatchLayout::from_bounds(bounds)
        .map_err(|_| Failure::invalid("batch procedures need a batch:<n> deadline schedule"))
}

/// Live mode: one p-value per line on stdin; each stage's decisions are
/// flushed before the next line is read. Output lines are
/// `stage<TAB>S_t<TAB>comma-separated newly rejected indices`.
#[allow(clippy::too_many_arguments)]
fn run_streaming(
    proc_name: &str,
    horizon: usize,
    alpha: f64,
    beta_spec: &str,
    weights_spec: &str,
    deadline_spec: Option<&str>,
    mode: Mode,
    late_commit: bool,
    out: Option<&Path>,
    base: &Path,
) -> Result<(), Failure> {
    let invalid = |e: anyhow::Error| Failure::invalid(e.to_string());
    let schedule = match deadline_spec {
        Some(s) => spec::parse_deadlines(s, base).map_err(invalid)?,
        None => DeadlineSchedule::open(),
    };

    enum Live {
        Toad(Box<ToadEngine>),
        Lond { weights: Vec<f64>, rejections: usize, stage: usize },
    }

    let mut live = match proc_name {
        "toad" => {
            let beta = spec::parse_shape(beta_spec, horizon, base).map_err(invalid)?;
            let policy =
                spec::parse_policy(weights_spec, horizon, late_commit, base).map_err(invalid)?;
            let config = EngineConfig::new(alpha, beta, policy, schedule.clone()).with_mode(mode);
            Live::Toad(Box::new(ToadEngine::new(config, horizon)?))
        }
        "lond" => {
            let weights =
                spec::parse_weight_sequence(weights_spec, horizon, base).map_err(invalid)?;
            Live::Lond { weights, rejections: 0, stage: 0 }
        }
        other => {
            return Err(Failure::usage(format!(
                "streaming mode supports toad and lond, not {other:?}"
            )))
        }
    };

    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    let mut observed: Vec<f64> = Vec::new();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| Failure::runtime(e.to_string()))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let p: f64 = text
            .parse()
            .map_err(|e| Failure::runtime(format!("bad p-value {text:?}: {e}")))?;
        observed.push(p);

        let (stage, rank, added) = match &mut live {
            Live::Toad(engine) => {
                let report = engine.step(p)?;
                (report.stage, report.step_up_rank, report.newly_rejected)
            }
            Live::Lond { weights, rejections, stage } => {
                *stage += 1;
                if *stage > horizon {
                    return Err(Failure::invalid(
                        toad_core::Error::PastHorizon { stage: *stage, horizon }.to_string(),
                    ));
                }
                let a = weights[*stage - 1];
                let threshold = (*rejections + 1) as f64 * a * alpha;
                if a > 0.0 && p <= threshold {
                    *rejections += 1;
                    (*stage, 1, vec![*stage])
                } else {
                    (*stage, 0, vec![])
                }
            }
        };
        let joined: Vec<String> = added.iter().map(|i| i.to_string()).collect();
        writeln!(stdout, "{}\t{}\t{}", stage, rank, joined.join(","))
            .map_err(|e| Failure::runtime(e.to_string()))?;
        stdout.flush().map_err(|e| Failure::runtime(e.to_string()))?;
        if stage == horizon {
            break;
        }
    }

    if let Some(path) = out {
        let rows: Vec<TraceRow> = match &live {
            Live::Toad(engine) => (1..=engine.stage())
                .map(|i| TraceRow {
                    index: i,
                    rejected_at: engine.first_rejected_at(i),
                    deadline: schedule.deadline(i),
                    weight: engine.committed_weight(i),
                    p_value: observed[i - 1],
                })
                .collect(),
            Live::Lond { weights, stage, .. } => (1..=*stage)
                .map(|i| TraceRow {
                    index: i,
                    rejected_at: None,
                    deadline: Deadline::At(i),
                    weight: Some(weights[i - 1]),
                    p_value: observed[i - 1],
                })
                .collect(),
        };
        let mut rendered = Vec::new();
        io::write_trace(&mut rendered, &rows).map_err(|e| Failure::runtime(e.to_string()))?;
        io::write_file(path, &String::from_utf8_lossy(&rendered))
            .map_err(|e| Failure::runtime(e.to_string()))?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let cfg = load_config_map(&args.config)?;
    let scale_name = pick(&args.scale, &cfg, "scale", "desk".to_string())?;
    let scale = match scale_name.as_str() {
        "desk" => Scale::Desk,
        "paper" => Scale::Paper,
        other => return Err(Failure::usage(format!("unknown scale {other:?}"))),
    };
    let methods_list = pick(
        &args.methods,
        &cfg,
        "methods",
        "toad,batch_bh,batch_prds,naive_bh".to_string(),
    )?;
    let methods =
        campaign::parse_methods(&methods_list).map_err(|e| Failure::usage(e.to_string()))?;
    let alpha = pick(&args.alpha, &cfg, "alpha", 0.05)?;
    let seed = pick(&args.seed, &cfg, "seed", 0u64)?;
    let jobs = pick(&args.jobs, &cfg, "jobs", 0usize)?;
    let t_max = pick_opt(&args.t_max, &cfg, "t_max")?;
    let iterations = pick_opt(&args.iterations, &cfg, "iterations")?;
    let out_dir = pick(&args.out, &cfg, "out", PathBuf::from("."))?;

    let mut grid = simgen::param_grid(scale, seed);
    for cell in &mut grid {
        if let Some(t) = t_max {
            cell.t_max = t;
        }
        if let Some(iters) = iterations {
            cell.iterations = iters;
        }
    }

    let options = CampaignOptions { alpha, seed, jobs, methods };
    let result =
        campaign::run_campaign(&grid, &options).map_err(|e| Failure::invalid(e.to_string()))?;
    for (cell, reason) in &result.failures {
        eprintln!(
            "cell rho={} n_batch={} pi1={} failed: {reason}",
            cell.rho, cell.n_batch, cell.pi1
        );
    }

    std::fs::create_dir_all(&out_dir).map_err(|e| Failure::runtime(e.to_string()))?;
    let summary_path = out_dir.join("summary.csv");
    io::write_file(&summary_path, &result.summary_csv())
        .map_err(|e| Failure::runtime(e.to_string()))?;
    eprintln!("wrote {}", summary_path.display());

    if let Some(audit) = result.audit_csv() {
        let audit_path = out_dir.join("dominance_audit.csv");
        io::write_file(&audit_path, &audit).map_err(|e| Failure::runtime(e.to_string()))?;
        let violations = result.total_dominance_violations().unwrap_or(0);
        eprintln!("wrote {} (total violations: {})", audit_path.display(), violations);
    }

    if let Some(trial) = args.dump_trial {
        let mut cell = grid[0].clone();
        cell.seed = seed;
        let draw = simgen::gen_trial_draw(&cell, trial)?;
        let mut rendered = Vec::new();
        io::write_trial_dump(&mut rendered, &draw.z, &draw.stream)
            .map_err(|e| Failure::runtime(e.to_string()))?;
        let dump_path = out_dir.join(format!("trial_{trial}.csv"));
        io::write_file(&dump_path, &String::from_utf8_lossy(&rendered))
            .map_err(|e| Failure::runtime(e.to_string()))?;
        eprintln!("wrote {}", dump_path.display());
    }

    if result.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{} cell(s) failed", result.failures.len())))
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let cfg = load_config_map(&args.config)?;
    let horizon = pick_opt(&args.horizon, &cfg, "horizon")?
        .ok_or_else(|| Failure::usage("--horizon is required"))?;
    let weights_spec = pick(&args.weights, &cfg, "weights", "const".to_string())?;
    let beta_spec = pick_opt(&args.beta, &cfg, "beta")?;
    let deadline_spec = pick_opt(&args.deadlines, &cfg, "deadlines")?;
    let mode = parse_mode(&pick(&args.mode, &cfg, "mode", "standard".to_string())?)?;
    let late_commit = parse_commit(&pick(&args.commit, &cfg, "commit", "upfront".to_string())?)?;
    let base = std::env::current_dir().map_err(|e| Failure::runtime(e.to_string()))?;

    let mut problems: Vec<String> = Vec::new();

    let policy = spec::parse_policy(&weights_spec, horizon, late_commit, &base)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let history = policy::dry_run_history(horizon);
    let report = policy::validate_policy(policy.as_ref(), horizon, &history);
    println!("policy: budget sum {:.12} over horizon {}", report.budget, horizon);
    for violation in &report.violations {
        problems.push(describe_violation(violation));
    }

    if mode == Mode::Recent {
        let schedule = match deadline_spec.as_deref() {
            Some(s) => spec::parse_deadlines(s, &base).map_err(|e| Failure::invalid(e.to_string()))?,
            None => return Err(Failure::usage("recent-mode validation needs --deadlines")),
        };
        for violation in
            policy::validate_recycled_budget(policy.as_ref(), horizon, &schedule, &history)
        {
            problems.push(describe_violation(&violation));
        }
    } else if let Some(s) = deadline_spec.as_deref() {
        spec::parse_deadlines(s, &base).map_err(|e| Failure::invalid(e.to_string()))?;
        println!("deadlines: ok");
    }

    if let Some(beta) = beta_spec.as_deref() {
        match spec::parse_shape(beta, horizon, &base) {
            Ok(shape) => {
                println!(
                    "shape: ok ({}, beta(1) = {})",
                    if shape.is_identity() { "identity" } else { "nu-induced" },
                    shape.at_rank(1)
                );
            }
            Err(e) => problems.push(format!("shape: {e}")),
        }
    }

    if problems.is_empty() {
        println!("valid");
        Ok(())
    } else {
        for p in &problems {
            println!("violation: {p}");
        }
        Err(Failure::invalid(format!("{} constraint(s) failed", problems.len())))
    }
}

fn describe_violation(violation: &PolicyViolation) -> String {
    match violation {
        PolicyViolation::InvalidWeight { index, weight } => {
            format!("weight A_{index} = {weight} is invalid")
        }
        PolicyViolation::BudgetExceeded { sum } => {
            format!("budget exceeded: sum of weights {sum} > 1")
        }
        PolicyViolation::Lookahead { index } => {
            format!("rule for A_{index} reads history past its commit stage")
        }
        PolicyViolation::CommitStageOutOfRange { index, commit_stage } => {
            format!("commit stage {commit_stage} for index {index} out of range")
        }
        PolicyViolation::WindowBudgetExceeded { stage, sum } => {
            format!("active-window budget at stage {stage} is {sum} > 1")
        }
    }
}
