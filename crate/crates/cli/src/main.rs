//! `gitstar`: world generation, planning, benchmarking and training.
//!
//! Exit codes: 0 ok, 2 usage, 3 I/O, 4 internal invariant breach.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gitstar_core::harness::{run_benchmark, write_improvement_csv, write_jsonl, write_metrics_csv};
use gitstar_core::reward::{train_rgp, TrainOptions};
use gitstar_core::{
    generate_scenario, Budget, BenchmarkSet, Error, ExprIndividual, GpParams, PlannerConfig, PlannerKey,
    ProblemInstance, RewardConfig, RunRecord, ScenarioKind, ScenarioParams,
};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "gitstar", version, about = "Anytime path planning with evolved edge-ordering heuristics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem instance and write it as JSON.
    Worldgen(WorldgenArgs),
    /// Solve one problem and write its run record.
    Plan(PlanArgs),
    /// Run planners over a benchmark and summarise.
    Bench(BenchArgs),
    /// Evolve a heuristic on a benchmark.
    Train(TrainArgs),
}

#[derive(Args)]
struct WorldgenArgs {
    /// dw, rr or ge (or the full scenario name).
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, env = "GITSTAR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// JSON file with generator parameters; missing fields keep defaults.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
#[group(multiple = false)]
struct BudgetArgs {
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Number of sampling batches; makes runs machine independent.
    #[arg(long)]
    batch_budget: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Option<Budget> {
        match (self.time_limit, self.batch_budget) {
            (Some(t), _) => Some(Budget::Seconds(t)),
            (_, Some(b)) => Some(Budget::Batches(b)),
            _ => None,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    problem: PathBuf,
    /// git, baseline or file:PATH to a heuristic file.
    #[arg(long, default_value = "git")]
    key: String,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, env = "GITSTAR_SEED", default_value_t = 0)]
    seed: u64,
    /// Receives the run record as one JSON line.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Receives the final path as JSON when one was found.
    #[arg(long)]
    path_out: Option<PathBuf>,
    /// Planner configuration JSON; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    benchmark: PathBuf,
    /// Comma-separated keys: git, baseline, file:PATH.
    #[arg(long, value_delimiter = ',', default_value = "git,baseline")]
    keys: Vec<String>,
    /// Replaces every problem's own budget.
    #[command(flatten)]
    budget: BudgetArgs,
    /// First seed; run r uses seed + r.
    #[arg(long, env = "GITSTAR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Benchmark JSON; with `--preset desk` the built-in desk benchmark is
    /// used when omitted.
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// `desk` shrinks the defaults to population 30 and 8 generations.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    pc: Option<f64>,
    #[arg(long)]
    pm: Option<f64>,
    #[arg(long)]
    tourn: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    abort_margin: Option<f64>,
    /// Seeds the genetic operators and the evaluation runs.
    #[arg(long, env = "GITSTAR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "train-out")]
    out_dir: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = std::result::Result<T, Failure>;

fn fail(code: u8) -> impl Fn(Error) -> Failure {
    move |e| Failure { code, message: e.to_string() }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

/// Library errors raised while reading inputs: malformed content is an
/// I/O failure, everything else a usage error.
fn input(e: Error) -> Failure {
    let code = match e {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Expression(_) => EXIT_IO,
        _ => EXIT_USAGE,
    };
    Failure { code, message: e.to_string() }
}

fn io_err(path: &FsPath) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn parse_key(spec: &str) -> CliResult<PlannerKey> {
    match spec {
        "git" => Ok(PlannerKey::GitStar),
        "baseline" => Ok(PlannerKey::Baseline),
        _ => match spec.strip_prefix("file:") {
            Some(path) => Ok(PlannerKey::Evolved(ExprIndividual::load(path).map_err(fail(EXIT_IO))?)),
            None => Err(usage(format!("unknown key '{spec}'; expected git, baseline or file:PATH"))),
        },
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &FsPath) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) })
}

fn planner_config(path: Option<&PathBuf>, budget: Option<Budget>) -> CliResult<PlannerConfig> {
    let mut config: PlannerConfig = match path {
        Some(p) => read_json(p)?,
        None => PlannerConfig::default(),
    };
    if let Some(b) = budget {
        config.budget = b;
    }
    config.validate().map_err(fail(EXIT_USAGE))?;
    Ok(config)
}

fn create(path: &FsPath) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn worldgen(args: WorldgenArgs) -> CliResult<()> {
    let kind: ScenarioKind = args.kind.parse().map_err(|e: Error| usage(e.to_string()))?;
    let params: ScenarioParams = match &args.params {
        Some(p) => read_json(p)?,
        None => ScenarioParams::default(),
    };
    let problem = generate_scenario(kind, args.dim, args.seed, &params).map_err(fail(EXIT_USAGE))?;
    problem.save(&args.out).map_err(fail(EXIT_IO))?;
    println!("wrote {} to {}", problem.label(), args.out.display());
    Ok(())
}

fn plan(args: PlanArgs) -> CliResult<()> {
    let problem = ProblemInstance::load(&args.problem).map_err(input)?;
    let key = parse_key(&args.key)?;
    let config = planner_config(args.config.as_ref(), args.budget.budget())?;
    let outcome = gitstar_core::plan(&problem, config, key.clone(), args.seed).map_err(fail(EXIT_INTERNAL))?;
    let record = RunRecord::from_outcome(key.label(), &problem.label(), args.seed, &outcome);
    record.validate().map_err(fail(EXIT_INTERNAL))?;
    if let Some(out) = &args.out {
        write_jsonl(out, std::slice::from_ref(&record)).map_err(fail(EXIT_IO))?;
    }
    if let (Some(path_out), Some(path)) = (&args.path_out, &outcome.path) {
        let text = serde_json::to_string_pretty(path).map_err(|e| fail(EXIT_INTERNAL)(e.into()))?;
        let mut w = create(path_out)?;
        w.write_all(text.as_bytes()).map_err(io_err(path_out))?;
        w.flush().map_err(io_err(path_out))?;
    }
    println!("{}", record.summary());
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let set = BenchmarkSet::load(&args.benchmark).map_err(input)?;
    if args.keys.is_empty() {
        return Err(usage("at least one key is required"));
    }
    let planners = args
        .keys
        .iter()
        .map(|spec| Ok((spec.clone(), parse_key(spec)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let config = planner_config(args.config.as_ref(), None)?;
    let report = run_benchmark(&set, &planners, &config, args.budget.budget(), args.seed, args.jobs)
        .map_err(fail(EXIT_INTERNAL))?;
    for r in &report.records {
        r.validate().map_err(fail(EXIT_INTERNAL))?;
    }
    std::fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;
    write_jsonl(args.out_dir.join("runs.jsonl"), &report.records).map_err(fail(EXIT_IO))?;
    let metrics_path = args.out_dir.join("metrics.csv");
    write_metrics_csv(create(&metrics_path)?, &report.rows).map_err(fail(EXIT_IO))?;
    if planners.iter().any(|(l, _)| l == "baseline") {
        let path = args.out_dir.join("improvement.csv");
        write_improvement_csv(create(&path)?, &report.rows, "baseline").map_err(fail(EXIT_IO))?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{} runs, {} rows, {} warnings; results in {}",
        report.records.len(),
        report.rows.len(),
        report.warnings.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn train(args: TrainArgs) -> CliResult<()> {
    let mut params = match args.preset.as_deref() {
        None => GpParams::default(),
        Some("desk") => GpParams::desk(),
        Some(other) => return Err(usage(format!("unknown preset '{other}'"))),
    };
    let set = match (&args.benchmark, args.preset.as_deref()) {
        (Some(path), _) => BenchmarkSet::load(path).map_err(input)?,
        (None, Some("desk")) => BenchmarkSet::desk(),
        (None, _) => return Err(usage("--benchmark is required without --preset desk")),
    };
    params.population = args.pop.unwrap_or(params.population);
    params.generations = args.gens.unwrap_or(params.generations);
    params.crossover_rate = args.pc.unwrap_or(params.crossover_rate);
    params.mutation_rate = args.pm.unwrap_or(params.mutation_rate);
    params.tournament_size = args.tourn.unwrap_or(params.tournament_size);
    params.max_depth = args.depth.unwrap_or(params.max_depth);
    params.validate().map_err(fail(EXIT_USAGE))?;

    let defaults = RewardConfig::default();
    let reward = RewardConfig {
        delta: args.delta.unwrap_or(defaults.delta),
        c1: args.c1.unwrap_or(defaults.c1),
        c2: args.c2.unwrap_or(defaults.c2),
        abort_margin: args.abort_margin.unwrap_or(defaults.abort_margin),
        ..defaults
    };
    reward.validate().map_err(fail(EXIT_USAGE))?;

    let opts = TrainOptions {
        seed: args.seed,
        eval_seed_base: args.seed,
        jobs: args.jobs,
        inject: Vec::new(),
        out_dir: Some(args.out_dir.clone()),
        planner: planner_config(args.config.as_ref(), None)?,
    };
    let out = train_rgp(&set, &params, &reward, &opts).map_err(fail(EXIT_INTERNAL))?;
    for g in &out.generations {
        println!(
            "gen {} min {:.4} mean {:.4} max {:.4} evaluated {} aborted {} clamped {}",
            g.generation, g.min_rho, g.mean_rho, g.max_rho, g.evaluated, g.aborted, g.clamped
        );
    }
    let clamped: usize = out.generations.iter().map(|g| g.clamped).sum();
    if clamped > 0 {
        eprintln!("warning: {clamped} totals were clamped at the fitness floor");
    }
    println!(
        "best rho {:.4} (baseline {:.4}); winner in {}",
        out.best.fitness.unwrap_or(f64::INFINITY),
        out.baseline_rho,
        args.out_dir.join("winner.heuristic").display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Worldgen(a) => worldgen(a),
        Command::Plan(a) => plan(a),
        Command::Bench(a) => bench(a),
        Command::Train(a) => train(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
