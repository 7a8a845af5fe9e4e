//! Plan execution. Tasks are processed concurrently, but every output file
//! is written by one thread in the seeded task order, so a replayed run
//! produces the same bytes as the original.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use arcbench_core::dsl::Trajectory;
use arcbench_core::record::{parse_records, EvalRecord, RecordError, RecordKey};
use arcbench_core::Task;
use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::Gateway;
use crate::pipelines::{
    run_cot, run_dsl_composition, run_dsl_understanding, run_inferential_coherence, run_itp, run_ltm, run_tot, GenerationRecord, HarnessError, Runner,
};
use crate::plan::{ExperimentPlan, PlanError, PlanPipeline};

pub const RECORDS: &str = "records.jsonl";
pub const GENERATIONS: &str = "generations.jsonl";
pub const UNITS: &str = "units.jsonl";
pub const EXCHANGES: &str = "exchanges.jsonl";
pub const TRAJECTORIES: &str = "trajectories";
/// The resolved plan of the latest run in this directory.
pub const PLAN: &str = "plan.toml";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Records(#[from] RecordError),
    #[error("duplicate record for {0:?}")]
    DuplicateRecord(RecordKey),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

/// Everything one task contributes to the experiment directory.
#[derive(Debug, Default)]
struct UnitOutput {
    records: Vec<EvalRecord>,
    trajectories: Vec<(String, Trajectory)>,
    generations: Vec<GenerationRecord>,
}

#[derive(Serialize, Deserialize)]
struct UnitLine {
    task_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub units_run: usize,
    pub units_skipped: usize,
    pub records_written: usize,
}

pub fn experiment_dir(out_root: &Path, plan: &ExperimentPlan) -> PathBuf {
    out_root.join(&plan.name)
}

fn condition_slug(label: &str) -> String {
    label.trim_start_matches('+').replace('+', "-")
}

struct Context<'a> {
    plan: &'a ExperimentPlan,
    runner: Runner<'a>,
    descriptions: BTreeMap<String, String>,
}

fn run_unit(ctx: &Context<'_>, task: &Task) -> Result<UnitOutput, HarnessError> {
    let plan = ctx.plan;
    let runner = &ctx.runner;
    let mut out = UnitOutput::default();
    for &pipeline in &plan.pipelines {
        match pipeline {
            PlanPipeline::Cot => {
                for i in 0..plan.repeats {
                    out.records.push(run_cot(task, runner, i)?);
                }
            }
            PlanPipeline::Ltm => {
                for i in 0..plan.repeats {
                    out.records.push(run_ltm(task, runner, i)?);
                }
            }
            PlanPipeline::Tot => {
                for i in 0..plan.repeats {
                    out.records.push(run_tot(task, runner, plan.tot, i)?);
                }
            }
            PlanPipeline::DslComposition => {
                if !task.preserves_dims() {
                    warn!("{}: skipping DSL composition, grid size changes", task.id);
                    continue;
                }
                for &condition in &plan.conditions {
                    let description = ctx.descriptions.get(&task.id).map(String::as_str);
                    for i in 0..plan.repeats {
                        let (record, trajectory) = run_dsl_composition(task, runner, condition, description, i)?;
                        let name = format!("{}.{}.{}.jsonl", task.id, condition_slug(&condition.label()), i);
                        out.records.push(record);
                        out.trajectories.push((name, trajectory));
                    }
                }
            }
            PlanPipeline::DslUnderstanding => {
                let dir = plan.resolve(plan.solutions.as_deref().expect("validated"));
                let path = dir.join(format!("{}.jsonl", task.id));
                let Ok(text) = fs::read_to_string(&path) else {
                    warn!("{}: no reference solution at {}", task.id, path.display());
                    continue;
                };
                let trajectory = Trajectory::from_jsonl(&text)
                    .map_err(|e| HarnessError::InvalidInput { task_id: task.id.clone(), reason: format!("{}: {e}", path.display()) })?;
                let calls: Vec<String> = trajectory.calls().map(str::to_string).collect();
                for i in 0..plan.repeats {
                    out.records.push(run_dsl_understanding(&task.id, &task.primary_test().input, &calls, runner, i)?.record);
                }
            }
            PlanPipeline::InferentialCoherence => {
                let root = plan.resolve(plan.augmented_dir.as_deref().expect("validated"));
                let c = run_inferential_coherence(std::slice::from_ref(task), &root, runner, plan.repeats)?;
                out.records.extend(c.phase1);
                out.records.extend(c.phase2);
            }
            PlanPipeline::Itp => {
                let o = run_itp(task, runner, plan.itp_answers)?;
                for w in &o.warnings {
                    warn!("{w}");
                }
                out.generations.extend(o.records);
            }
        }
    }
    Ok(out)
}

fn completed_units(path: &Path) -> Result<HashSet<String>, RunError> {
    let Ok(f) = File::open(path) else { return Ok(HashSet::new()) };
    let mut done = HashSet::new();
    for line in BufReader::new(f).lines() {
        let line = line.map_err(io_err(path))?;
        if let Ok(u) = serde_json::from_str::<UnitLine>(&line) {
            done.insert(u.task_id);
        }
    }
    Ok(done)
}

fn append(path: &Path) -> Result<File, RunError> {
    OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))
}

fn jsonl<T: Serialize>(items: &[T]) -> String {
    items.iter().map(|i| serde_json::to_string(i).expect("serializes") + "\n").collect()
}

struct Writer {
    dir: PathBuf,
    keys: HashSet<RecordKey>,
    records: File,
    generations: File,
    units: File,
    written: usize,
}

impl Writer {
    fn open(dir: &Path) -> Result<Writer, RunError> {
        fs::create_dir_all(dir.join(TRAJECTORIES)).map_err(io_err(dir))?;
        let rec_path = dir.join(RECORDS);
        let keys = match fs::read_to_string(&rec_path) {
            Ok(text) => parse_records(&text)?.iter().map(EvalRecord::key).collect(),
            Err(_) => HashSet::new(),
        };
        Ok(Writer {
            records: append(&rec_path)?,
            generations: append(&dir.join(GENERATIONS))?,
            units: append(&dir.join(UNITS))?,
            dir: dir.to_path_buf(),
            keys,
            written: 0,
        })
    }

    /// Side files first, the unit marker last, so an interrupted commit is
    /// redone on restart.
    fn commit(&mut self, task_id: &str, out: UnitOutput) -> Result<(), RunError> {
        for r in &out.records {
            if !self.keys.insert(r.key()) {
                return Err(RunError::DuplicateRecord(r.key()));
            }
        }
        for (name, t) in &out.trajectories {
            let p = self.dir.join(TRAJECTORIES).join(name);
            fs::write(&p, t.to_jsonl()).map_err(io_err(&p))?;
        }
        let dir = self.dir.clone();
        self.generations.write_all(jsonl(&out.generations).as_bytes()).map_err(io_err(&dir.join(GENERATIONS)))?;
        self.records.write_all(jsonl(&out.records).as_bytes()).map_err(io_err(&dir.join(RECORDS)))?;
        self.records.flush().map_err(io_err(&dir.join(RECORDS)))?;
        self.units
            .write_all(jsonl(&[UnitLine { task_id: task_id.to_string() }]).as_bytes())
            .map_err(io_err(&dir.join(UNITS)))?;
        self.written += out.records.len();
        Ok(())
    }
}

/// Runs every task of `plan` not already recorded under
/// `<out_root>/<plan name>/`, appending to its logs.
pub fn execute_plan(plan: &ExperimentPlan, gateway: &Gateway, out_root: &Path) -> Result<RunSummary, RunError> {
    let dir = experiment_dir(out_root, plan);
    let mut tasks = plan.load_tasks()?;
    tasks.shuffle(&mut ChaCha8Rng::seed_from_u64(plan.seed));

    let done = completed_units(&dir.join(UNITS))?;
    let total = tasks.len();
    tasks.retain(|t| !done.contains(&t.id));
    let skipped = total - tasks.len();
    info!("{}: {} tasks to run, {} already done", plan.name, tasks.len(), skipped);

    let mut writer = Writer::open(&dir)?;
    let plan_copy = dir.join(PLAN);
    fs::write(&plan_copy, plan.to_resolved_toml()?).map_err(|source| RunError::Io { path: plan_copy, source })?;
    let ctx = Context { plan, runner: Runner::new(gateway, plan.gen_params()), descriptions: plan.load_descriptions()? };
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let workers = plan.workers.min(tasks.len()).max(1);

    let mut first_error: Option<RunError> = None;
    let mut committed = 0usize;
    std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel::<(usize, Result<UnitOutput, HarnessError>)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (ctx, tasks, next, abort) = (&ctx, &tasks, &next, &abort);
            s.spawn(move || loop {
                if abort.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(task) = tasks.get(i) else { break };
                if tx.send((i, run_unit(ctx, task))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending: BTreeMap<usize, Result<UnitOutput, HarnessError>> = BTreeMap::new();
        for (i, result) in rx {
            pending.insert(i, result);
            while let Some(result) = pending.remove(&committed) {
                if first_error.is_some() {
                    break;
                }
                let outcome = result.map_err(RunError::from).and_then(|out| writer.commit(&tasks[committed].id, out));
                match outcome {
                    Ok(()) => committed += 1,
                    Err(e) => {
                        abort.store(true, Ordering::SeqCst);
                        first_error = Some(e);
                    }
                }
            }
        }
    });

    if let Some(e) = first_error {
        return Err(e);
    }
    Ok(RunSummary { dir, units_run: committed, units_skipped: skipped, records_written: writer.written })
}
