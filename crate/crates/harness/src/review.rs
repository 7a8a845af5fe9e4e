//! Human review log for generated ITP candidates. The serving process
//! appends to `reviews.jsonl` in the experiment directory; reports replay
//! it over `generations.jsonl`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipelines::{GenerationRecord, Verdict};

pub const REVIEWS: &str = "reviews.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ReviewEvent {
    /// Exclusive lease on a pending candidate until `expires_ms`.
    Assigned { id: String, reviewer: String, at_ms: u64, expires_ms: u64 },
    Judged {
        id: String,
        verdict: Verdict,
        reviewer: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
        at_ms: u64,
    },
}

impl ReviewEvent {
    pub fn id(&self) -> &str {
        match self {
            ReviewEvent::Assigned { id, .. } | ReviewEvent::Judged { id, .. } => id,
        }
    }
}

#[derive(Debug, Error)]
pub enum ReviewLogError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} line {line}: {source}")]
    Syntax { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("review of {id}: no such generation record")]
    UnknownRecord { id: String },
    #[error("review of {id}: {reason}")]
    Conflict { id: String, reason: &'static str },
}

/// Reads a review log; a missing file is an empty log.
pub fn read_review_events(path: &Path) -> Result<Vec<ReviewEvent>, ReviewLogError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(ReviewLogError::Io { path: path.to_path_buf(), source }),
    };
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| ReviewLogError::Syntax { path: path.to_path_buf(), line: i + 1, source }))
        .collect()
}

/// Writes human verdicts into the records. Only pending records can be
/// judged, once, and never back to pending.
pub fn apply_reviews(records: &mut [GenerationRecord], events: &[ReviewEvent]) -> Result<(), ReviewLogError> {
    let index: HashMap<String, usize> = records.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
    for e in events {
        let ReviewEvent::Judged { id, verdict, reviewer, note, .. } = e else { continue };
        let &i = index.get(id).ok_or_else(|| ReviewLogError::UnknownRecord { id: id.clone() })?;
        let r = &mut records[i];
        if *verdict == Verdict::Pending {
            return Err(ReviewLogError::Conflict { id: id.clone(), reason: "verdict cannot be pending" });
        }
        if r.verdict != Verdict::Pending {
            return Err(ReviewLogError::Conflict { id: id.clone(), reason: "already judged" });
        }
        r.verdict = *verdict;
        r.reviewer = Some(reviewer.clone());
        r.note = note.clone();
    }
    Ok(())
}
