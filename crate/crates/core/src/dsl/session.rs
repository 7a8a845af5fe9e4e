//! Step-limited solving sessions.
//!
//! Every submitted call consumes a step, whether or not it changes the
//! grid. A call that fails to parse, names a missing object, or is
//! rejected by its operation's guard is logged with `applied = false` and
//! leaves the state untouched. `complete` ends the session early; the
//! tenth step ends it regardless.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;
use crate::objects::{extract_objects, ColorMode, Connectivity, ObjectSet};

use super::{execute_call, parse_dsl_call, DslOp};

pub const MAX_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    Completed,
    Exhausted,
}

impl fmt::Display for SessionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionStatus::Active => "active",
            SessionStatus::Completed => "completed",
            SessionStatus::Exhausted => "exhausted",
        })
    }
}

/// When object coordinates are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectPolicy {
    /// Extract once from the initial grid.
    #[default]
    Fixed,
    /// Re-extract from the current grid before every step.
    RecomputeEachStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("session is {0}; no further steps are accepted")]
    NotActive(SessionStatus),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub applied: bool,
    pub state: Grid,
    pub step: usize,
    pub status: SessionStatus,
}

/// One logged step: `{step, dsl, applied, state}`, plus the reason when
/// the call was not applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub step: usize,
    /// The submitted call text, verbatim.
    pub dsl: String,
    pub applied: bool,
    pub state: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trajectory {
    pub entries: Vec<TrajectoryEntry>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Call texts in order.
    pub fn calls(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.dsl.as_str())
    }

    /// One JSON record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trajectory, serde_json::Error> {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Trajectory { entries })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    initial: Grid,
    current: Grid,
    objects: ObjectSet,
    policy: ObjectPolicy,
    status: SessionStatus,
    log: Trajectory,
}

impl Session {
    /// A fresh session on `initial` with four-connected, same-color objects
    /// extracted once.
    pub fn new(initial: Grid) -> Session {
        Session::with_options(initial, Connectivity::Four, ColorMode::SameColor, ObjectPolicy::Fixed)
    }

    pub fn with_options(initial: Grid, connectivity: Connectivity, color_mode: ColorMode, policy: ObjectPolicy) -> Session {
        let objects = extract_objects(&initial, connectivity, color_mode);
        Session { current: initial.clone(), initial, objects, policy, status: SessionStatus::Active, log: Trajectory::default() }
    }

    /// Rebuilds a session by submitting `calls` in order.
    pub fn replay<'a>(initial: Grid, calls: impl IntoIterator<Item = &'a str>) -> Result<Session, SessionError> {
        let mut session = Session::new(initial);
        for call in calls {
            session.step(call)?;
        }
        Ok(session)
    }

    pub fn initial(&self) -> &Grid {
        &self.initial
    }

    pub fn current(&self) -> &Grid {
        &self.current
    }

    pub fn objects(&self) -> &ObjectSet {
        &self.objects
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn step_count(&self) -> usize {
        self.log.len()
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.log
    }

    pub fn is_active(&self) -> bool {
        self.status == SessionStatus::Active
    }

    /// Submits one call and consumes one step.
    pub fn step(&mut self, call_text: &str) -> Result<StepResult, SessionError> {
        if !self.is_active() {
            return Err(SessionError::NotActive(self.status));
        }
        if self.policy == ObjectPolicy::RecomputeEachStep {
            self.objects = extract_objects(&self.current, self.objects.connectivity, self.objects.color_mode);
        }

        let (applied, reason, completes) = match parse_dsl_call(call_text, self.objects.len(), self.current.dims()) {
            Ok(call) => {
                let outcome = execute_call(&self.current, &self.objects, &call);
                if outcome.executed {
                    self.current = outcome.grid;
                    (true, None, call.op == DslOp::Complete)
                } else {
                    (false, Some(format!("{} rejected its arguments", call.op)), false)
                }
            }
            Err(e) => (false, Some(e.to_string()), false),
        };

        let step = self.log.len() + 1;
        self.log.entries.push(TrajectoryEntry {
            step,
            dsl: call_text.to_string(),
            applied,
            state: self.current.clone(),
            reason,
        });
        if completes {
            self.status = SessionStatus::Completed;
        } else if step >= MAX_STEPS {
            self.status = SessionStatus::Exhausted;
        }
        Ok(StepResult { applied, state: self.current.clone(), step, status: self.status })
    }
}
