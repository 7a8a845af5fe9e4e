//! Participant solving sessions. Each session is an append-only event log
//! under `<data>/sessions/<id>.jsonl`; the in-memory engine state is always
//! the replay of that log.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use arcbench_core::dsl::MAX_STEPS;
use arcbench_core::{grids_equal, Grid, Session, SessionStatus, StepResult, Task};
use axum::http::StatusCode;
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, ServiceError};
use crate::jsonl;
use crate::tasks::TaskCatalog;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created { session_id: String, task_id: String, participant_id: String, attempt: u32, at_ms: u64 },
    Stepped { step: usize, call: String, at_ms: u64 },
    Finalized { solved: bool, steps_used: usize, at_ms: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub solved: bool,
    pub steps_used: usize,
}

#[derive(Debug)]
pub struct SessionEntry {
    pub session_id: String,
    pub task_id: String,
    pub participant_id: String,
    /// 1 for the participant's first session on this task.
    pub attempt: u32,
    pub engine: Session,
    pub outcome: Option<Outcome>,
    pub created_ms: u64,
    pub updated_ms: u64,
    log: PathBuf,
}

impl SessionEntry {
    fn apply(&mut self, event: &SessionEvent) -> Result<(), String> {
        match event {
            SessionEvent::Created { .. } => return Err("second created event".into()),
            SessionEvent::Stepped { step, call, at_ms } => {
                if self.outcome.is_some() {
                    return Err("step after finalize".into());
                }
                let r = self.engine.step(call).map_err(|e| e.to_string())?;
                if r.step != *step {
                    return Err(format!("step {step} replayed as {}", r.step));
                }
                self.updated_ms = *at_ms;
            }
            SessionEvent::Finalized { solved, steps_used, at_ms } => {
                if self.outcome.is_some() {
                    return Err("finalized twice".into());
                }
                self.outcome = Some(Outcome { solved: *solved, steps_used: *steps_used });
                self.updated_ms = *at_ms;
            }
        }
        Ok(())
    }

    /// `finalized` once an outcome is recorded, else the engine status.
    pub fn status_label(&self) -> &'static str {
        match (self.outcome, self.engine.status()) {
            (Some(_), _) => "finalized",
            (None, SessionStatus::Active) => "active",
            (None, SessionStatus::Completed) => "completed",
            (None, SessionStatus::Exhausted) => "exhausted",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepResponse {
    #[serde(flatten)]
    pub result: StepResult,
    pub max_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AttemptStats {
    /// Participant and task pairs.
    pub pairs: usize,
    pub solved: usize,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SessionStats {
    pub sessions: usize,
    pub finalized: usize,
    pub solved: usize,
    pub participants: usize,
    pub tasks: usize,
    /// Outcome of each pair's first finalized attempt.
    pub first_attempt: AttemptStats,
    /// Pair solved in any finalized attempt.
    pub any_attempt: AttemptStats,
}

pub struct SessionStore {
    dir: PathBuf,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<SessionEntry>>>>,
    next_id: Mutex<u64>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ServiceError + '_ {
    move |source| ServiceError::Io { path: path.to_path_buf(), source }
}

fn session_file_ids(dir: &Path) -> Result<Vec<PathBuf>, ServiceError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    Ok(paths)
}

fn replay_file(path: &Path, tasks: &TaskCatalog) -> Result<SessionEntry, ServiceError> {
    let bad = |line: usize, reason: String| ServiceError::Log { path: path.to_path_buf(), line, reason };
    let events: Vec<SessionEvent> = jsonl::read(path)?;
    let Some(SessionEvent::Created { session_id, task_id, participant_id, attempt, at_ms }) = events.first().cloned() else {
        return Err(bad(1, "log does not start with a created event".into()));
    };
    let task = tasks.get(&task_id).ok_or_else(|| bad(1, format!("unknown task {task_id}")))?;
    let mut entry = SessionEntry {
        session_id,
        task_id,
        participant_id,
        attempt,
        engine: Session::new(task.primary_test().input.clone()),
        outcome: None,
        created_ms: at_ms,
        updated_ms: at_ms,
        log: path.to_path_buf(),
    };
    for (i, e) in events.iter().enumerate().skip(1) {
        entry.apply(e).map_err(|reason| bad(i + 1, reason))?;
    }
    Ok(entry)
}

impl SessionStore {
    /// Opens `dir`, replaying every session log found there.
    pub fn open(dir: &Path, tasks: &TaskCatalog) -> Result<SessionStore, ServiceError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut sessions = BTreeMap::new();
        let mut max_id = 0;
        for path in session_file_ids(dir)? {
            let entry = replay_file(&path, tasks)?;
            if let Some(n) = entry.session_id.strip_prefix('s').and_then(|n| n.parse::<u64>().ok()) {
                max_id = max_id.max(n);
            }
            sessions.insert(entry.session_id.clone(), Arc::new(Mutex::new(entry)));
        }
        Ok(SessionStore { dir: dir.to_path_buf(), sessions: RwLock::new(sessions), next_id: Mutex::new(max_id + 1) })
    }

    pub fn create(&self, task: &Task, participant_id: &str, now_ms: u64) -> Result<Arc<Mutex<SessionEntry>>, ApiError> {
        if !task.primary_test().same_dims() {
            return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "SizeChangingTask", format!("task {} changes grid size", task.id)));
        }
        if participant_id.trim().is_empty() {
            return Err(ApiError::invalid("participant_id must not be empty"));
        }
        let mut sessions = self.sessions.write().expect("session map poisoned");
        let prior = sessions
            .values()
            .filter(|e| {
                let e = e.lock().expect("session poisoned");
                e.task_id == task.id && e.participant_id == participant_id
            })
            .count();
        let mut next = self.next_id.lock().expect("id counter poisoned");
        let session_id = format!("s{:06}", *next);
        let created = SessionEvent::Created {
            session_id: session_id.clone(),
            task_id: task.id.clone(),
            participant_id: participant_id.to_string(),
            attempt: prior as u32 + 1,
            at_ms: now_ms,
        };
        let log = self.dir.join(format!("{session_id}.jsonl"));
        jsonl::append(&log, &created).map_err(|e| ApiError::internal(format!("{}: {e}", log.display())))?;
        *next += 1;
        let entry = SessionEntry {
            session_id: session_id.clone(),
            task_id: task.id.clone(),
            participant_id: participant_id.to_string(),
            attempt: prior as u32 + 1,
            engine: Session::new(task.primary_test().input.clone()),
            outcome: None,
            created_ms: now_ms,
            updated_ms: now_ms,
            log,
        };
        let entry = Arc::new(Mutex::new(entry));
        sessions.insert(session_id, entry.clone());
        Ok(entry)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<SessionEntry>>, ApiError> {
        self.sessions.read().expect("session map poisoned").get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }

    /// Submits one call. With `expected_step`, the call is rejected unless
    /// exactly that many steps have been taken so far.
    pub fn step(&self, id: &str, call: &str, expected_step: Option<usize>, now_ms: u64) -> Result<(StepResponse, Arc<Mutex<SessionEntry>>), ApiError> {
        let handle = self.get(id)?;
        let mut entry = handle.lock().expect("session poisoned");
        if entry.outcome.is_some() || !entry.engine.is_active() {
            return Err(ApiError::new(StatusCode::CONFLICT, "SessionNotActive", format!("session {id} is {}", entry.status_label())));
        }
        let taken = entry.engine.step_count();
        if let Some(expected) = expected_step {
            if expected != taken {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "StepConflict",
                    format!("session {id} has taken {taken} steps, not {expected}; refresh and retry"),
                ));
            }
        }
        let event = SessionEvent::Stepped { step: taken + 1, call: call.to_string(), at_ms: now_ms };
        jsonl::append(&entry.log, &event).map_err(|e| ApiError::internal(format!("{}: {e}", entry.log.display())))?;
        let result = entry.engine.step(call).map_err(|e| ApiError::internal(e.to_string()))?;
        entry.updated_ms = now_ms;
        let reason = entry.engine.trajectory().entries.last().and_then(|t| t.reason.clone());
        drop(entry);
        Ok((StepResponse { result, max_steps: MAX_STEPS, reason }, handle))
    }

    /// Scores the session against the hidden target and closes it.
    pub fn finalize(&self, id: &str, target: &Grid, now_ms: u64) -> Result<(Outcome, Arc<Mutex<SessionEntry>>), ApiError> {
        let handle = self.get(id)?;
        let mut entry = handle.lock().expect("session poisoned");
        if entry.outcome.is_some() {
            return Err(ApiError::new(StatusCode::CONFLICT, "AlreadyFinalized", format!("session {id} is already finalized")));
        }
        let outcome = Outcome { solved: grids_equal(entry.engine.current(), target), steps_used: entry.engine.step_count() };
        let event = SessionEvent::Finalized { solved: outcome.solved, steps_used: outcome.steps_used, at_ms: now_ms };
        jsonl::append(&entry.log, &event).map_err(|e| ApiError::internal(format!("{}: {e}", entry.log.display())))?;
        entry.outcome = Some(outcome);
        entry.updated_ms = now_ms;
        drop(entry);
        Ok((outcome, handle))
    }

    /// Aggregates outcomes straight from the logs on disk.
    pub fn stats(&self) -> Result<SessionStats, ServiceError> {
        #[derive(Default)]
        struct Pair {
            first: Option<(u32, bool)>,
            any: bool,
        }
        let mut stats = SessionStats::default();
        let mut pairs: BTreeMap<(String, String), Pair> = BTreeMap::new();
        for path in session_file_ids(&self.dir)? {
            let events: Vec<SessionEvent> = jsonl::read(&path)?;
            let Some(SessionEvent::Created { task_id, participant_id, attempt, .. }) = events.first() else { continue };
            stats.sessions += 1;
            let solved = events.iter().find_map(|e| match e {
                SessionEvent::Finalized { solved, .. } => Some(*solved),
                _ => None,
            });
            let Some(solved) = solved else { continue };
            stats.finalized += 1;
            stats.solved += usize::from(solved);
            let pair = pairs.entry((participant_id.clone(), task_id.clone())).or_default();
            if pair.first.is_none_or(|(a, _)| *attempt < a) {
                pair.first = Some((*attempt, solved));
            }
            pair.any |= solved;
        }
        let ratio = |ok: usize, n: usize| (n > 0).then(|| ok as f64 / n as f64);
        let n = pairs.len();
        let first = pairs.values().filter(|p| p.first.is_some_and(|(_, s)| s)).count();
        let any = pairs.values().filter(|p| p.any).count();
        stats.first_attempt = AttemptStats { pairs: n, solved: first, accuracy: ratio(first, n) };
        stats.any_attempt = AttemptStats { pairs: n, solved: any, accuracy: ratio(any, n) };
        stats.participants = pairs.keys().map(|(p, _)| p).collect::<std::collections::BTreeSet<_>>().len();
        stats.tasks = pairs.keys().map(|(_, t)| t).collect::<std::collections::BTreeSet<_>>().len();
        Ok(stats)
    }
}
