//! `arcbench`: corpus checks, experiment runs, statistics, reports and the
//! workbench server.
//!
//! Exit codes: 0 success, 1 invalid input, 2 execution error.

mod config;
mod stats;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use arcbench_core::task::{load_corpus, load_task_file, TaskError, TaskSource};
use arcbench_harness::gateway::{Gateway, HeuristicMock, LiveBackend, ReplayBackend};
use arcbench_harness::plan::{ExperimentPlan, PlanError};
use arcbench_harness::report::{render_text, write_reports, ReportError};
use arcbench_harness::run::{execute_plan, experiment_dir, RunError, EXCHANGES, PLAN};
use arcbench_service::{App, ServiceConfig, SystemClock, DEFAULT_LEASE};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Config;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit 1.
    Invalid(String),
    /// Something failed while running: exit 2.
    Exec(String),
}

impl CliError {
    pub fn invalid(m: impl Into<String>) -> CliError {
        CliError::Invalid(m.into())
    }

    pub fn exec(m: impl Into<String>) -> CliError {
        CliError::Exec(m.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Exec(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Exec(m) => f.write_str(m),
        }
    }
}

impl From<TaskError> for CliError {
    fn from(e: TaskError) -> Self {
        match e {
            TaskError::Io { .. } => CliError::exec(e.to_string()),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Syntax(_) | PlanError::Invalid(_) => CliError::invalid(e.to_string()),
            PlanError::Task(t) => t.into(),
            _ => CliError::exec(e.to_string()),
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Plan(p) => p.into(),
            e => CliError::exec(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::exec(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "arcbench", version, about = "ARC reasoning workbench")]
struct Cli {
    /// TOML file with prices, live endpoint settings and the review lease.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Task corpus checks.
    #[command(subcommand)]
    Tasks(TasksCommand),
    /// Run experiment plans.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Statistics over result files.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Inverse transformation prompting.
    #[command(subcommand)]
    Itp(ItpCommand),
    /// Serve the workbench HTTP API.
    Serve(ServeArgs),
    /// Rebuild summary.json and report.txt for a finished run.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum TasksCommand {
    /// Load every task in a directory and check its grids.
    Validate {
        dir: PathBuf,
        #[arg(long, default_value = "arc-train")]
        source: TaskSource,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Live,
    Replay,
    Mock,
}

#[derive(Args)]
struct BackendArgs {
    #[arg(long, value_enum, default_value = "mock")]
    backend: BackendKind,
    /// Exchange log to answer from, for `--backend replay`.
    #[arg(long)]
    replay_log: Option<PathBuf>,
    /// Chat-completions base URL, for `--backend live`.
    #[arg(long)]
    base_url: Option<String>,
    /// Price table for cost figures.
    #[arg(long)]
    prices: Option<PathBuf>,
    /// Root for experiment directories.
    #[arg(long, default_value = "./reports")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Cronbach's alpha; rows are subjects, columns raters.
    Alpha {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Per-task accuracy histogram from records.jsonl.
    Distribution {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Weighted single-step accuracy and the ideal-accuracy estimate.
    Composition {
        /// JSON list of {n, w, a} buckets, or records.jsonl.
        #[arg(long = "in")]
        input: PathBuf,
        /// Observed sequence success rate; adds the inverse estimate.
        #[arg(long)]
        y: Option<f64>,
    },
    /// Validity ratios from generations.jsonl.
    Validity {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum ItpCommand {
    /// Generate candidate inputs for every task of one category.
    Generate {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        category: String,
        #[arg(long, default_value = "concept-arc")]
        source: TaskSource,
        #[arg(long, default_value_t = 2)]
        answers: usize,
        #[arg(long, default_value = "mock")]
        model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[command(flatten)]
        backend: BackendArgs,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
    #[arg(long)]
    tasks: PathBuf,
    #[arg(long, default_value = "arc-train")]
    source: TaskSource,
    /// Session logs.
    #[arg(long, default_value = "./data")]
    data: PathBuf,
    /// Experiment directories feeding the review queue and /reports.
    #[arg(long, default_value = "./reports")]
    reports: PathBuf,
    #[arg(long)]
    lease_minutes: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    experiment: String,
    #[arg(long, default_value = "./reports")]
    out: PathBuf,
    #[arg(long)]
    prices: Option<PathBuf>,
}

fn gateway(args: &BackendArgs, config: &Config, dir: &Path, workers: usize) -> Result<Gateway, CliError> {
    let log = dir.join(EXCHANGES);
    let gw = match args.backend {
        BackendKind::Mock => Gateway::new(Box::new(HeuristicMock::new())),
        BackendKind::Live => {
            let backend = LiveBackend::new(config.live(args.base_url.clone())).map_err(|e| CliError::exec(e.to_string()))?;
            Gateway::with_limit(Box::new(backend), workers)
        }
        BackendKind::Replay => {
            let source = args.replay_log.as_deref().ok_or_else(|| CliError::invalid("--backend replay needs --replay-log"))?;
            let backend = ReplayBackend::from_log(source).map_err(|e| CliError::exec(e.to_string()))?;
            let gw = Gateway::new(Box::new(backend));
            // Never append to the log being replayed.
            let same = fs::canonicalize(source).ok().zip(fs::canonicalize(&log).ok()).is_some_and(|(a, b)| a == b);
            if same {
                return Ok(gw);
            }
            gw
        }
    };
    fs::create_dir_all(dir).map_err(|e| CliError::exec(format!("{}: {e}", dir.display())))?;
    gw.log_to(&log).map_err(|e| CliError::exec(e.to_string()))
}

fn run_plan(plan: &ExperimentPlan, args: &BackendArgs, config: &Config) -> Result<String, CliError> {
    let prices = config.prices(args.prices.as_deref())?;
    let dir = experiment_dir(&args.out, plan);
    let gw = gateway(args, config, &dir, plan.workers)?;
    let run = execute_plan(plan, &gw, &args.out)?;
    let summary = write_reports(plan, &run.dir, prices.as_ref())?;
    log::info!("{} units run, {} skipped, {} records", run.units_run, run.units_skipped, run.records_written);
    Ok(format!("{}\nwritten to {}\n", render_text(&summary).trim_end(), run.dir.display()))
}

fn itp_plan(tasks: &Path, category: &str, source: TaskSource, answers: usize, model: &str, seed: u64, workers: usize) -> Result<ExperimentPlan, CliError> {
    let ids: Vec<String> = load_corpus(tasks, source)?.into_iter().filter(|t| t.category.as_deref() == Some(category)).map(|t| t.id).collect();
    if ids.is_empty() {
        return Err(CliError::invalid(format!("no tasks in category {category} under {}", tasks.display())));
    }
    let tasks_dir = std::path::absolute(tasks).map_err(|e| CliError::exec(e.to_string()))?;
    let text = toml::to_string(&toml::toml! {
        name = (format!("itp-{category}"))
        seed = (seed as i64)
        tasks_dir = (tasks_dir.to_string_lossy().into_owned())
        source = (source.as_str())
        task_ids = ids
        pipelines = ["itp"]
        itp_answers = (answers as i64)
        workers = (workers as i64)
        [generation]
        model = model
    })
    .map_err(|e| CliError::exec(e.to_string()))?;
    Ok(ExperimentPlan::from_toml(&text, Path::new("."))?)
}

fn report(args: &ReportArgs, config: &Config) -> Result<String, CliError> {
    let dir = args.out.join(&args.experiment);
    let plan_path = dir.join(PLAN);
    if !plan_path.is_file() {
        return Err(CliError::invalid(format!("{} has no {PLAN}; run the experiment first", dir.display())));
    }
    let plan = ExperimentPlan::load(&plan_path)?;
    let summary = write_reports(&plan, &dir, config.prices(args.prices.as_deref())?.as_ref())?;
    Ok(render_text(&summary))
}

fn serve(args: &ServeArgs, config: &Config) -> Result<String, CliError> {
    let lease = args.lease_minutes.or(config.review_lease_minutes).map_or(DEFAULT_LEASE, |m| Duration::from_secs(m * 60));
    let service = ServiceConfig {
        tasks_dir: args.tasks.clone(),
        source: args.source,
        data_dir: args.data.clone(),
        reports_dir: args.reports.clone(),
        review_lease: lease,
    };
    let app = App::open(&service, Arc::new(SystemClock)).map_err(|e| CliError::exec(e.to_string()))?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::exec(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.addr).await.map_err(|e| CliError::exec(format!("{}: {e}", args.addr)))?;
        eprintln!("serving on http://{}", listener.local_addr().map_err(|e| CliError::exec(e.to_string()))?);
        arcbench_service::serve(listener, app).await.map_err(|e| CliError::exec(e.to_string()))
    })?;
    Ok(String::new())
}

fn task_files(dir: &Path, source: TaskSource) -> Result<Vec<PathBuf>, CliError> {
    let list = |d: &Path| -> Result<Vec<PathBuf>, CliError> {
        let mut v: Vec<PathBuf> = fs::read_dir(d)
            .map_err(|e| CliError::exec(format!("{}: {e}", d.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        v.sort();
        Ok(v)
    };
    let mut files = Vec::new();
    for p in list(dir)? {
        if p.is_dir() && source == TaskSource::ConceptArc {
            files.extend(list(&p)?.into_iter().filter(|f| f.extension().is_some_and(|x| x == "json")));
        } else if p.is_file() && p.extension().is_some_and(|x| x == "json") {
            files.push(p);
        }
    }
    Ok(files)
}

/// Checks every task file and reports each bad one, not just the first.
fn validate_tasks(dir: &Path, source: TaskSource) -> Result<String, CliError> {
    let files = task_files(dir, source)?;
    if files.is_empty() {
        return Err(CliError::invalid(format!("no task files under {}", dir.display())));
    }
    let (mut resizing, mut bad) = (0, Vec::new());
    for f in &files {
        match load_task_file(f, source) {
            Ok(t) => resizing += usize::from(!t.preserves_dims()),
            Err(e) => bad.push(format!("{}: {e}", f.display())),
        }
    }
    if !bad.is_empty() {
        return Err(CliError::invalid(format!("{} of {} tasks invalid\n{}", bad.len(), files.len(), bad.join("\n"))));
    }
    Ok(format!("{} tasks valid ({resizing} change grid size)\n", files.len()))
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Tasks(TasksCommand::Validate { dir, source }) => validate_tasks(&dir, source),
        Command::Experiment(ExperimentCommand::Run { plan, backend }) => run_plan(&ExperimentPlan::load(&plan)?, &backend, &config),
        Command::Stats(s) => match s {
            StatsCommand::Alpha { input } => stats::alpha(&input),
            StatsCommand::Distribution { input } => stats::distribution(&input),
            StatsCommand::Composition { input, y } => stats::composition(&input, y),
            StatsCommand::Validity { input } => stats::validity(&input),
        },
        Command::Itp(ItpCommand::Generate { tasks, category, source, answers, model, seed, workers, backend }) => {
            let plan = itp_plan(&tasks, &category, source, answers, &model, seed, workers)?;
            run_plan(&plan, &backend, &config)
        }
        Command::Serve(args) => serve(&args, &config),
        Command::Report(args) => report(&args, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
