//! Review queue over the ITP candidates of every experiment directory under
//! the reports root. Assignments and verdicts are appended to that
//! experiment's `reviews.jsonl`, which reports replay as well.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use arcbench_core::stats::{validity_ratio, ValidityReport};
use arcbench_core::{ExamplePair, Grid};
use arcbench_harness::pipelines::{validity_ledger, GenerationRecord, Verdict};
use arcbench_harness::report::read_generations;
use arcbench_harness::review::{apply_reviews, read_review_events, ReviewEvent, REVIEWS};
use arcbench_harness::run::GENERATIONS;
use axum::http::StatusCode;
use serde::Serialize;

use crate::error::{ApiError, ServiceError};
use crate::jsonl;
use crate::tasks::TaskCatalog;

pub const DEFAULT_LEASE: Duration = Duration::from_secs(15 * 60);

struct Lease {
    reviewer: String,
    expires_ms: u64,
}

struct Experiment {
    dir: PathBuf,
    records: Vec<GenerationRecord>,
    leases: HashMap<String, Lease>,
}

/// One candidate as shown to a reviewer.
#[derive(Debug, Clone, Serialize)]
pub struct ReviewItem {
    /// `<experiment>:<generation id>`.
    pub review_id: String,
    pub experiment: String,
    pub task_id: String,
    pub category: String,
    pub target_index: usize,
    pub target_output: Grid,
    pub candidate_input: Grid,
    /// Training pairs of the source task, when it is in the catalog.
    pub examples: Vec<ExamplePair>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reviewer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lease_expires_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Ledger {
    pub experiment: String,
    pub pending: usize,
    pub report: Option<ValidityReport>,
}

pub struct ReviewQueue {
    lease_ms: u64,
    experiments: Mutex<BTreeMap<String, Experiment>>,
}

fn split_id(review_id: &str) -> Result<(&str, &str), ApiError> {
    review_id.split_once(':').ok_or_else(|| unknown_review(review_id))
}

fn unknown_review(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "UnknownReview", format!("no review item {id}"))
}

pub fn unknown_experiment(name: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "UnknownExperiment", format!("no experiment {name}"))
}

impl ReviewQueue {
    /// Loads every `<root>/<experiment>/generations.jsonl`, replaying its
    /// review log. Leases that were live when the log was written stay live.
    pub fn open(root: &Path, lease: Duration) -> Result<ReviewQueue, ServiceError> {
        let mut experiments = BTreeMap::new();
        let entries = match fs::read_dir(root) {
            Ok(e) => e.filter_map(|e| e.ok().map(|e| e.path())).collect::<Vec<_>>(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(source) => return Err(ServiceError::Io { path: root.to_path_buf(), source }),
        };
        for dir in entries {
            if !dir.join(GENERATIONS).is_file() {
                continue;
            }
            let Some(name) = dir.file_name().and_then(|n| n.to_str()).map(str::to_string) else { continue };
            let mut records = read_generations(&dir.join(GENERATIONS))?;
            let events = read_review_events(&dir.join(REVIEWS))?;
            apply_reviews(&mut records, &events)?;
            let mut leases = HashMap::new();
            for e in &events {
                match e {
                    ReviewEvent::Assigned { id, reviewer, expires_ms, .. } => {
                        leases.insert(id.clone(), Lease { reviewer: reviewer.clone(), expires_ms: *expires_ms });
                    }
                    ReviewEvent::Judged { id, .. } => {
                        leases.remove(id);
                    }
                }
            }
            experiments.insert(name, Experiment { dir, records, leases });
        }
        Ok(ReviewQueue { lease_ms: lease.as_millis() as u64, experiments: Mutex::new(experiments) })
    }

    fn item(experiment: &str, r: &GenerationRecord, lease: Option<&Lease>, tasks: &TaskCatalog) -> ReviewItem {
        ReviewItem {
            review_id: format!("{experiment}:{}", r.id),
            experiment: experiment.to_string(),
            task_id: r.task_id.clone(),
            category: r.category.clone(),
            target_index: r.target_index,
            target_output: r.target_output.clone(),
            candidate_input: r.candidate_input.clone(),
            examples: tasks.get(&r.task_id).map(|t| t.train.clone()).unwrap_or_default(),
            verdict: r.verdict,
            reviewer: r.reviewer.clone().or_else(|| lease.map(|l| l.reviewer.clone())),
            note: r.note.clone(),
            lease_expires_ms: lease.filter(|_| r.verdict == Verdict::Pending).map(|l| l.expires_ms),
        }
    }

    /// The reviewer's current assignment, or else the first pending item
    /// nobody holds a live lease on, which is then leased to them.
    pub fn next(&self, reviewer: &str, now_ms: u64, tasks: &TaskCatalog) -> Result<ReviewItem, ApiError> {
        if reviewer.trim().is_empty() {
            return Err(ApiError::invalid("reviewer must not be empty"));
        }
        let mut experiments = self.experiments.lock().expect("review queue poisoned");
        let pending = |e: &Experiment| e.records.iter().filter(|r| r.verdict == Verdict::Pending).map(|r| r.id.clone()).collect::<Vec<_>>();

        for (name, e) in experiments.iter() {
            for id in pending(e) {
                if let Some(l) = e.leases.get(&id).filter(|l| l.reviewer == reviewer && l.expires_ms > now_ms) {
                    let r = e.records.iter().find(|r| r.id == id).expect("pending id exists");
                    return Ok(Self::item(name, r, Some(l), tasks));
                }
            }
        }
        for (name, e) in experiments.iter_mut() {
            let Some(id) = pending(e).into_iter().find(|id| e.leases.get(id).is_none_or(|l| l.expires_ms <= now_ms)) else { continue };
            let expires_ms = now_ms + self.lease_ms;
            let event = ReviewEvent::Assigned { id: id.clone(), reviewer: reviewer.to_string(), at_ms: now_ms, expires_ms };
            let log = e.dir.join(REVIEWS);
            jsonl::append(&log, &event).map_err(|err| ApiError::internal(format!("{}: {err}", log.display())))?;
            e.leases.insert(id.clone(), Lease { reviewer: reviewer.to_string(), expires_ms });
            let r = e.records.iter().find(|r| r.id == id).expect("pending id exists");
            return Ok(Self::item(name, r, e.leases.get(&id), tasks));
        }
        Err(ApiError::new(StatusCode::NOT_FOUND, "NoPending", "no pending review items"))
    }

    pub fn verdict(&self, review_id: &str, reviewer: &str, verdict: Verdict, note: Option<String>, now_ms: u64, tasks: &TaskCatalog) -> Result<ReviewItem, ApiError> {
        if verdict == Verdict::Pending {
            return Err(ApiError::invalid("verdict must be valid or invalid"));
        }
        if reviewer.trim().is_empty() {
            return Err(ApiError::invalid("reviewer must not be empty"));
        }
        let (name, id) = split_id(review_id)?;
        let mut experiments = self.experiments.lock().expect("review queue poisoned");
        let e = experiments.get_mut(name).ok_or_else(|| unknown_review(review_id))?;
        let idx = e.records.iter().position(|r| r.id == id).ok_or_else(|| unknown_review(review_id))?;
        if e.records[idx].verdict != Verdict::Pending {
            return Err(ApiError::new(StatusCode::CONFLICT, "AlreadyJudged", format!("{review_id} is already {}", e.records[idx].verdict)));
        }
        if let Some(l) = e.leases.get(id).filter(|l| l.reviewer != reviewer && l.expires_ms > now_ms) {
            return Err(ApiError::new(StatusCode::CONFLICT, "AssignedElsewhere", format!("{review_id} is leased to {} until {}", l.reviewer, l.expires_ms)));
        }
        let event = ReviewEvent::Judged { id: id.to_string(), verdict, reviewer: reviewer.to_string(), note: note.clone(), at_ms: now_ms };
        let log = e.dir.join(REVIEWS);
        jsonl::append(&log, &event).map_err(|err| ApiError::internal(format!("{}: {err}", log.display())))?;
        e.leases.remove(id);
        let r = &mut e.records[idx];
        r.verdict = verdict;
        r.reviewer = Some(reviewer.to_string());
        r.note = note;
        Ok(Self::item(name, r, None, tasks))
    }

    pub fn ledger(&self, experiment: &str) -> Option<Ledger> {
        let experiments = self.experiments.lock().expect("review queue poisoned");
        let e = experiments.get(experiment)?;
        Some(Ledger {
            experiment: experiment.to_string(),
            pending: e.records.iter().filter(|r| r.verdict == Verdict::Pending).count(),
            report: validity_ratio(&validity_ledger(&e.records)).ok(),
        })
    }
}
