//! `lrip`: generate instances, run the solvers, compare fronts, tune and test.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lrip::decoder::{default_n_max, DecodeOptions};
use lrip::doe::{tune, LevelGrid, SnrForm, TuneOptions};
use lrip::evaluation::{Evaluator, DEFAULT_PENALTY_RATE};
use lrip::exact::enumerate::{enumerate_space, EnumerationBackend, EnumerationOptions};
use lrip::exact::epsilon::{augmented_eps_constraint, EpsilonOptions, DEFAULT_DELTA, DEFAULT_GRID_POINTS};
use lrip::exact::lp::to_lp_string;
use lrip::exact::milp::{build_milp, DEFAULT_SUBSET_CAP};
use lrip::exact::ExactError;
use lrip::front::Front;
use lrip::instance::{Instance, SizeSpec};
use lrip::metrics::{compare_fronts, read_metrics_csv, write_metrics_csv, MetricsRow};
use lrip::moea::runlog::RunLog;
use lrip::moea::{run_with, Algorithm, AlgorithmConfig, DEFAULT_FE_BUDGET};
use lrip::stats::{kruskal_wallis, pairwise_dunn, write_dunn_csv, SampleGroups, DEFAULT_ALPHA};
use output::{Artifacts, Manifest};
use rayon::prelude::*;

/// Wall-clock limit of the exact methods when none is given.
const EXACT_TIME_LIMIT_SECS: f64 = 3.0 * 3600.0;
const DEFAULT_MULTIPLIERS: [f64; 6] = [0.5, 0.75, 1.0, 1.25, 1.5, 2.0];

#[derive(Parser, Debug)]
#[command(name = "lrip", version, about = "Bi-objective location-routing-inventory experiments")]
struct Cli {
    /// Base seed; every derived run seed is a function of it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write instance files (the twelve standard sizes unless --sizes is given).
    Gen {
        /// Counts `DCS,RETAILERS,INBOUND,OUTBOUND`; repeatable.
        #[arg(long = "sizes")]
        sizes: Vec<SizeSpec>,
    },
    /// Run an evolutionary algorithm several times.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        algorithm: Option<Algorithm>,
        /// Algorithm configuration JSON, for example a tuning result.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        runs: u64,
        #[arg(long)]
        fe_budget: Option<u64>,
        #[command(flatten)]
        decode: DecodeArgs,
    },
    /// Exact methods on small instances.
    Exact {
        #[command(subcommand)]
        mode: ExactMode,
    },
    /// Metrics table for a set of fronts of one instance.
    Compare {
        /// Front JSON files.
        #[arg(required = true)]
        fronts: Vec<PathBuf>,
        #[arg(long, default_value = "metrics.csv")]
        name: String,
    },
    /// Taguchi tuning of one algorithm's parameters.
    Tune {
        #[arg(long)]
        algorithm: Algorithm,
        /// Level grid JSON (default: the standard grid of the algorithm).
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long = "instance", required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long, default_value_t = DEFAULT_FE_BUDGET)]
        fe_budget: u64,
        #[arg(long, value_enum, default_value_t = SnrArg::SmallerIsBetter)]
        snr_form: SnrArg,
    },
    /// Kruskal-Wallis and pairwise tests over a metrics table.
    Stats {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Re-solve with scaled mean demand and write one front per multiplier.
    SweepDemand {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_MULTIPLIERS)]
        multipliers: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Method::Nsga2)]
        method: Method,
        #[arg(long)]
        fe_budget: Option<u64>,
        #[command(flatten)]
        decode: DecodeArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ExactMode {
    /// Pareto front of every decodable plan.
    Enumerate {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        decode: DecodeArgs,
    },
    /// Augmented epsilon-constraint over the enumeration backend.
    Epsc {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[command(flatten)]
        decode: DecodeArgs,
    },
    /// Write the linearized model as an LP file.
    ExportLp {
        #[arg(long)]
        instance: PathBuf,
        /// Optional upper bound on emissions.
        #[arg(long)]
        emission_cap: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        subset_cap: usize,
        #[command(flatten)]
        decode: DecodeArgs,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct DecodeArgs {
    /// Largest order frequency per DC (default from the instance).
    #[arg(long)]
    n_max: Option<u32>,
}

impl DecodeArgs {
    fn n_max(&self, instance: &Instance) -> u32 {
        self.n_max.unwrap_or_else(|| default_n_max(instance))
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SnrArg {
    SmallerIsBetter,
    LargerIsBetter,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Enumerate,
    Epsc,
    Nsga2,
    Nrga,
    Spea2,
    Pesa2,
}

/// How a command ended, mapped onto the exit code.
#[derive(Debug)]
enum Failure {
    Invalid(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Infeasible(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

fn exact_failure(e: ExactError) -> Failure {
    match e {
        ExactError::Infeasible => Failure::Infeasible(anyhow!(e)),
        other => Failure::Invalid(anyhow!(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Done,
    Partial,
    NoFeasible,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Done => 0,
            Status::NoFeasible => 3,
            Status::Partial => 4,
        }
    }

    fn of_fronts<'a>(fronts: impl IntoIterator<Item = &'a Front>) -> Status {
        let (mut partial, mut empty, mut any) = (false, true, false);
        for f in fronts {
            any = true;
            partial |= f.incomplete;
            empty &= f.is_empty();
        }
        if partial {
            Status::Partial
        } else if any && empty {
            Status::NoFeasible
        } else {
            Status::Done
        }
    }
}

struct Context<'a> {
    cli: &'a Cli,
    files: Artifacts,
    started: Instant,
}

impl Context<'_> {
    fn deadline(&self, default_secs: Option<f64>) -> Result<Option<Instant>, Failure> {
        match self.cli.time_limit.or(default_secs) {
            None => Ok(None),
            Some(s) if s.is_finite() && s > 0.0 => Ok(Some(self.started + Duration::from_secs_f64(s))),
            Some(s) => Err(Failure::Invalid(anyhow!("time limit must be positive, got {s}"))),
        }
    }

    fn load_instance(&mut self, path: &Path) -> Result<Instance, Failure> {
        let text = self.files.read(path)?;
        Instance::from_json(&text)
            .with_context(|| format!("invalid instance {}", path.display()))
            .map_err(Failure::Invalid)
    }

    fn write_front(&mut self, name: &str, front: &Front) -> Result<(), Failure> {
        self.files.write(name, front.to_json().as_bytes())?;
        Ok(())
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".to_string(), |s| s.to_string_lossy().into_owned())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen { .. } => "gen",
        Command::Solve { .. } => "solve",
        Command::Exact { mode } => match mode {
            ExactMode::Enumerate { .. } => "exact-enumerate",
            ExactMode::Epsc { .. } => "exact-epsc",
            ExactMode::ExportLp { .. } => "exact-export-lp",
        },
        Command::Compare { .. } => "compare",
        Command::Tune { .. } => "tune",
        Command::Stats { .. } => "stats",
        Command::SweepDemand { .. } => "sweep-demand",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let files = match Artifacts::new(&cli.out) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut ctx = Context {
        cli: &cli,
        files,
        started: Instant::now(),
    };
    let result = dispatch(&mut ctx);
    let code = match &result {
        Ok(status) => status.code(),
        Err(f) => f.code(),
    };
    match &result {
        Ok(Status::Partial) => eprintln!("warning: time limit reached, results are partial"),
        Ok(Status::NoFeasible) => eprintln!("error: no feasible plan found"),
        Ok(Status::Done) => {}
        Err(Failure::Invalid(e) | Failure::Infeasible(e)) => eprintln!("error: {e:#}"),
    }
    let manifest = Manifest {
        tool: "lrip",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command).to_string(),
        args: std::env::args().collect(),
        seed: cli.seed,
        threads: cli.threads,
        time_limit_secs: cli.time_limit,
        inputs: Vec::new(),
        outputs: Vec::new(),
        exit_code: code,
    };
    if let Err(e) = ctx.files.finish(manifest) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn dispatch(ctx: &mut Context) -> Result<Status, Failure> {
    let cli = ctx.cli;
    match &cli.command {
        Command::Gen { sizes } => cmd_gen(ctx, sizes),
        Command::Solve {
            instance,
            algorithm,
            config,
            runs,
            fe_budget,
            decode,
        } => cmd_solve(ctx, instance, *algorithm, config.as_deref(), *runs, *fe_budget, *decode),
        Command::Exact { mode } => cmd_exact(ctx, mode),
        Command::Compare { fronts, name } => cmd_compare(ctx, fronts, name),
        Command::Tune {
            algorithm,
            grid,
            instances,
            repetitions,
            fe_budget,
            snr_form,
        } => cmd_tune(ctx, *algorithm, grid.as_deref(), instances, *repetitions, *fe_budget, *snr_form),
        Command::Stats { metrics, alpha } => cmd_stats(ctx, metrics, *alpha),
        Command::SweepDemand {
            instance,
            multipliers,
            method,
            fe_budget,
            decode,
        } => cmd_sweep_demand(ctx, instance, multipliers, *method, *fe_budget, *decode),
    }
}

fn cmd_gen(ctx: &mut Context, sizes: &[SizeSpec]) -> Result<Status, Failure> {
    let seed = ctx.cli.seed;
    let named: Vec<(String, SizeSpec)> = if sizes.is_empty() {
        SizeSpec::STANDARD_SUITE
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("test{:02}", i + 1), *s))
            .collect()
    } else {
        sizes
            .iter()
            .map(|s| (format!("test-{}-{}-{}-{}", s.dcs, s.retailers, s.vehicles_in, s.vehicles_out), *s))
            .collect()
    };
    for (i, (name, size)) in named.iter().enumerate() {
        let inst = Instance::generate(*size, seed.wrapping_add(i as u64)).map_err(|e| Failure::Invalid(anyhow!(e)))?;
        ctx.files.write(&format!("{name}.json"), inst.to_json().as_bytes())?;
    }
    Ok(Status::Done)
}

fn algorithm_config(
    ctx: &mut Context,
    algorithm: Option<Algorithm>,
    config: Option<&Path>,
    fe_budget: Option<u64>,
) -> Result<AlgorithmConfig, Failure> {
    let mut cfg = match (config, algorithm) {
        (Some(path), _) => {
            let text = ctx.files.read(path)?;
            let cfg = AlgorithmConfig::from_json(&text).map_err(|e| Failure::Invalid(anyhow!(e)))?;
            if algorithm.is_some_and(|a| a != cfg.algorithm) {
                return Err(Failure::Invalid(anyhow!(
                    "--algorithm {} disagrees with the config's {}",
                    algorithm.unwrap(),
                    cfg.algorithm
                )));
            }
            cfg
        }
        (None, Some(a)) => AlgorithmConfig::defaults(a),
        (None, None) => return Err(Failure::Invalid(anyhow!("give --algorithm or --config"))),
    };
    if let Some(b) = fe_budget {
        cfg.fe_budget = b;
    }
    cfg.validate().map_err(|e| Failure::Invalid(anyhow!(e)))?;
    Ok(cfg)
}

struct SolvedRun {
    front: Front,
    log: Vec<u8>,
}

fn solve_runs(
    instance: &Instance,
    cfg: &AlgorithmConfig,
    seeds: &[u64],
    n_max: u32,
    deadline: Option<Instant>,
) -> Result<Vec<SolvedRun>, Failure> {
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = cfg.clone().with_seed(seed);
            let ev = Evaluator::new(instance, DecodeOptions::new(n_max), DEFAULT_PENALTY_RATE);
            let mut log = RunLog::new();
            let outcome =
                run_with(&ev, &cfg, deadline, &mut |r| log.record(r)).map_err(|e| Failure::Invalid(anyhow!(e)))?;
            let mut bytes = Vec::new();
            log.write_csv(&mut bytes).map_err(|e| Failure::Invalid(anyhow!(e)))?;
            Ok(SolvedRun {
                front: outcome.front,
                log: bytes,
            })
        })
        .collect()
}

fn cmd_solve(
    ctx: &mut Context,
    instance_path: &Path,
    algorithm: Option<Algorithm>,
    config: Option<&Path>,
    runs: u64,
    fe_budget: Option<u64>,
    decode: DecodeArgs,
) -> Result<Status, Failure> {
    if runs == 0 {
        return Err(Failure::Invalid(anyhow!("--runs must be at least 1")));
    }
    let instance = ctx.load_instance(instance_path)?;
    let cfg = algorithm_config(ctx, algorithm, config, fe_budget)?;
    let deadline = ctx.deadline(None)?;
    let test = stem(instance_path);
    let seeds: Vec<u64> = (0..runs).map(|r| ctx.cli.seed.wrapping_add(r)).collect();
    let results = solve_runs(&instance, &cfg, &seeds, decode.n_max(&instance), deadline)?;
    let status = Status::of_fronts(results.iter().map(|r| &r.front));
    for (r, mut run) in results.into_iter().enumerate() {
        run.front.instance_id = Some(test.clone());
        let base = format!("{test}-{}-run{}", cfg.algorithm, r + 1);
        ctx.write_front(&format!("{base}.front.json"), &run.front)?;
        ctx.files.write(&format!("{base}.log.csv"), &run.log)?;
    }
    Ok(status)
}

fn cmd_exact(ctx: &mut Context, mode: &ExactMode) -> Result<Status, Failure> {
    match mode {
        ExactMode::Enumerate { instance, decode } => {
            let inst = ctx.load_instance(instance)?;
            let mut opts = EnumerationOptions::new(decode.n_max(&inst));
            opts.deadline = ctx.deadline(Some(EXACT_TIME_LIMIT_SECS))?;
            let space = enumerate_space(&inst, &opts).map_err(exact_failure)?;
            let mut front = space.front(ctx.cli.seed);
            front.instance_id = Some(stem(instance));
            ctx.write_front(&format!("{}-enumerate.front.json", stem(instance)), &front)?;
            Ok(Status::of_fronts([&front]))
        }
        ExactMode::Epsc {
            instance,
            grid_points,
            delta,
            decode,
        } => {
            let inst = ctx.load_instance(instance)?;
            let mut opts = EnumerationOptions::new(decode.n_max(&inst));
            opts.deadline = ctx.deadline(Some(EXACT_TIME_LIMIT_SECS))?;
            let space = enumerate_space(&inst, &opts).map_err(exact_failure)?;
            let incomplete = space.incomplete;
            let backend = EnumerationBackend::new(space);
            let eps = EpsilonOptions {
                grid_points: *grid_points,
                delta: *delta,
            };
            if !(delta.is_finite() && *delta > 0.0) {
                return Err(Failure::Invalid(anyhow!("--delta must be positive")));
            }
            let result = augmented_eps_constraint(&backend, &eps).map_err(exact_failure)?;
            let mut front = result.front(ctx.cli.seed);
            front.instance_id = Some(stem(instance));
            front.incomplete = incomplete;
            ctx.write_front(&format!("{}-epsc.front.json", stem(instance)), &front)?;
            Ok(Status::of_fronts([&front]))
        }
        ExactMode::ExportLp {
            instance,
            emission_cap,
            subset_cap,
            decode,
        } => {
            let inst = ctx.load_instance(instance)?;
            let model = build_milp(&inst, *subset_cap, decode.n_max(&inst)).map_err(exact_failure)?;
            let text = to_lp_string(&model, *emission_cap);
            ctx.files.write(&format!("{}.lp", stem(instance)), text.as_bytes())?;
            Ok(Status::Done)
        }
    }
}

fn cmd_compare(ctx: &mut Context, paths: &[PathBuf], name: &str) -> Result<Status, Failure> {
    let mut fronts = Vec::with_capacity(paths.len());
    for p in paths {
        let text = ctx.files.read(p)?;
        let front = Front::from_json(&text).with_context(|| format!("invalid front {}", p.display()))?;
        fronts.push(front);
    }
    let test = fronts[0].instance_id.clone();
    if let Some(other) = fronts.iter().find(|f| f.instance_id != test) {
        return Err(Failure::Invalid(anyhow!(
            "fronts from different instances: {:?} and {:?}",
            test,
            other.instance_id
        )));
    }
    let test = test.unwrap_or_default();
    // Runs of each algorithm are numbered by ascending seed.
    let mut algorithms: Vec<String> = fronts.iter().map(|f| f.algorithm.clone()).collect();
    algorithms.sort();
    algorithms.dedup();
    let by_algorithm: Vec<Vec<&Front>> = algorithms
        .iter()
        .map(|a| {
            let mut runs: Vec<&Front> = fronts.iter().filter(|f| &f.algorithm == a).collect();
            runs.sort_by_key(|f| f.seed);
            runs
        })
        .collect();
    let most = by_algorithm.iter().map(Vec::len).max().unwrap_or(0);
    let mut rows: Vec<MetricsRow> = Vec::new();
    for r in 0..most {
        let group: Vec<(&str, &[lrip::evaluation::ObjectivePair])> = algorithms
            .iter()
            .zip(&by_algorithm)
            .filter_map(|(a, runs)| runs.get(r).map(|f| (a.as_str(), f.points.as_slice())))
            .collect();
        rows.extend(compare_fronts(&test, r as u64 + 1, &group));
    }
    let mut bytes = Vec::new();
    write_metrics_csv(&rows, &mut bytes).map_err(|e| Failure::Invalid(anyhow!(e)))?;
    ctx.files.write(name, &bytes)?;
    Ok(Status::Done)
}

fn cmd_tune(
    ctx: &mut Context,
    algorithm: Algorithm,
    grid: Option<&Path>,
    instance_paths: &[PathBuf],
    repetitions: usize,
    fe_budget: u64,
    snr_form: SnrArg,
) -> Result<Status, Failure> {
    let grid = match grid {
        Some(p) => {
            let text = ctx.files.read(p)?;
            let g = LevelGrid::from_json(&text).map_err(|e| Failure::Invalid(anyhow!(e)))?;
            if g.algorithm != algorithm {
                return Err(Failure::Invalid(anyhow!(
                    "grid is for {} but --algorithm is {algorithm}",
                    g.algorithm
                )));
            }
            g
        }
        None => LevelGrid::standard(algorithm),
    };
    let mut instances = Vec::new();
    for p in instance_paths {
        instances.push(ctx.load_instance(p)?);
    }
    let opts = TuneOptions {
        repetitions,
        fe_budget,
        seed: ctx.cli.seed,
        snr_form: match snr_form {
            SnrArg::SmallerIsBetter => SnrForm::SmallerIsBetter,
            SnrArg::LargerIsBetter => SnrForm::LargerIsBetter,
        },
    };
    let report = tune(&grid, &instances, &opts).map_err(|e| Failure::Invalid(anyhow!(e)))?;
    let mut csv_bytes = Vec::new();
    report.write_csv(&mut csv_bytes).map_err(|e| Failure::Invalid(anyhow!(e)))?;
    ctx.files.write(&format!("{algorithm}-tuning.csv"), &csv_bytes)?;
    let config = serde_json::to_string_pretty(&report.config).context("config serializes")?;
    ctx.files.write(&format!("{algorithm}-config.json"), config.as_bytes())?;
    let levels = serde_json::to_string_pretty(&report.chosen_levels).context("levels serialize")?;
    ctx.files.write(&format!("{algorithm}-levels.json"), levels.as_bytes())?;
    Ok(Status::Done)
}

fn cmd_stats(ctx: &mut Context, metrics: &Path, alpha: f64) -> Result<Status, Failure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::Invalid(anyhow!("--alpha must lie in (0, 1)")));
    }
    let text = ctx.files.read(metrics)?;
    let rows = read_metrics_csv(text.as_bytes()).map_err(|e| Failure::Invalid(anyhow!(e)))?;
    let mut algorithms: Vec<String> = rows.iter().map(|r| r.algorithm.clone()).collect();
    algorithms.sort();
    algorithms.dedup();
    if algorithms.len() < 2 {
        return Err(Failure::Invalid(anyhow!(
            "need at least two algorithms, found {}",
            algorithms.len()
        )));
    }
    type Pick = fn(&MetricsRow) -> Option<f64>;
    let columns: [(&str, Pick); 4] = [
        ("QM", |r| Some(r.qm)),
        ("SM", |r| r.sm),
        ("MID", |r| r.mid),
        ("DM", |r| Some(r.dm)),
    ];
    let mut omnibus = csv::Writer::from_writer(Vec::new());
    omnibus
        .write_record(["metric", "H", "df", "p_value", "significant"])
        .context("csv")?;
    for (metric, pick) in columns {
        let groups: Vec<(String, Vec<f64>)> = algorithms
            .iter()
            .map(|a| {
                let values = rows.iter().filter(|r| &r.algorithm == a).filter_map(pick).collect();
                (a.clone(), values)
            })
            .filter(|(_, v): &(String, Vec<f64>)| !v.is_empty())
            .collect();
        let Ok(groups) = SampleGroups::new(groups) else {
            eprintln!("skipping {metric}: fewer than two algorithms with values");
            continue;
        };
        let kw = kruskal_wallis(&groups);
        omnibus
            .write_record([
                metric.to_string(),
                kw.h.to_string(),
                kw.df.to_string(),
                kw.p_value.to_string(),
                (kw.p_value < alpha).to_string(),
            ])
            .context("csv")?;
        let mut bytes = Vec::new();
        write_dunn_csv(metric, &pairwise_dunn(&groups, alpha), &mut bytes).context("csv")?;
        ctx.files.write(&format!("stats-pairwise-{metric}.csv"), &bytes)?;
    }
    let bytes = omnibus.into_inner().map_err(|e| anyhow!(e.to_string()))?;
    ctx.files.write("stats-omnibus.csv", &bytes)?;
    Ok(Status::Done)
}

fn cmd_sweep_demand(
    ctx: &mut Context,
    instance_path: &Path,
    multipliers: &[f64],
    method: Method,
    fe_budget: Option<u64>,
    decode: DecodeArgs,
) -> Result<Status, Failure> {
    if let Some(m) = multipliers.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(Failure::Invalid(anyhow!("demand multipliers must be positive, got {m}")));
    }
    let base = ctx.load_instance(instance_path)?;
    let test = stem(instance_path);
    let seed = ctx.cli.seed;
    let deadline = ctx.deadline(matches!(method, Method::Enumerate | Method::Epsc).then_some(EXACT_TIME_LIMIT_SECS))?;
    let mut fronts = Vec::with_capacity(multipliers.len());
    for &m in multipliers {
        let inst = base.with_demand_scaled(m);
        let n_max = decode.n_max(&base);
        let mut front = match method {
            Method::Enumerate | Method::Epsc => {
                let mut opts = EnumerationOptions::new(n_max);
                opts.deadline = deadline;
                let space = enumerate_space(&inst, &opts).map_err(exact_failure)?;
                if method == Method::Enumerate {
                    space.front(seed)
                } else {
                    let incomplete = space.incomplete;
                    let result = match augmented_eps_constraint(&EnumerationBackend::new(space), &EpsilonOptions::default()) {
                        Ok(r) => r.front(seed),
                        Err(ExactError::Infeasible) => Front::empty("EPSC", seed),
                        Err(e) => return Err(exact_failure(e)),
                    };
                    Front { incomplete, ..result }
                }
            }
            _ => {
                let algorithm = match method {
                    Method::Nsga2 => Algorithm::Nsga2,
                    Method::Nrga => Algorithm::Nrga,
                    Method::Spea2 => Algorithm::Spea2,
                    _ => Algorithm::Pesa2,
                };
                let cfg = algorithm_config(ctx, Some(algorithm), None, fe_budget)?;
                let mut runs = solve_runs(&inst, &cfg, &[seed], n_max, deadline)?;
                runs.remove(0).front
            }
        };
        front.instance_id = Some(test.clone());
        ctx.write_front(&format!("{test}-demand-{m}.front.json"), &front)?;
        fronts.push((m, front));
    }
    let mut table = csv::Writer::from_writer(Vec::new());
    table.write_record(["multiplier", "point", "z1", "z2"]).context("csv")?;
    for (m, front) in &fronts {
        for (i, p) in front.points.iter().enumerate() {
            table
                .write_record([m.to_string(), (i + 1).to_string(), p.z1.to_string(), p.z2.to_string()])
                .context("csv")?;
        }
    }
    let bytes = table.into_inner().map_err(|e| anyhow!(e.to_string()))?;
    ctx.files.write(&format!("{test}-demand.csv"), &bytes)?;
    if fronts.iter().any(|(_, f)| f.incomplete) {
        return Ok(Status::Partial);
    }
    if fronts.iter().any(|(_, f)| f.is_empty()) {
        return Err(Failure::Infeasible(anyhow!("some demand scenarios have no feasible plan")));
    }
    Ok(Status::Done)
}
