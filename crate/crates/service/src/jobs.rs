//! Job records and the append-only event log that tracks their states.

use biblio_core::AnalysisKind;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    /// Forward transitions only: queued → running → done | failed.
    pub fn can_become(self, next: JobState) -> bool {
        matches!(
            (self, next),
            (Self::Queued, Self::Running) | (Self::Running, Self::Done) | (Self::Running, Self::Failed)
        )
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Self::Done | Self::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisJob {
    pub id: String,
    pub dataset_id: String,
    pub analysis: AnalysisKind,
    pub params: Value,
    pub state: JobState,
    /// Submission order, used to rebuild the FIFO queue after a restart.
    pub seq: u64,
    pub submitted_at: DateTime<Utc>,
    pub started_at: Option<DateTime<Utc>>,
    pub finished_at: Option<DateTime<Utc>>,
    pub error: Option<String>,
    /// Result directory relative to the data directory, set when done.
    pub result: Option<String>,
    /// Names of the files in the result directory.
    #[serde(default)]
    pub files: Vec<String>,
}

impl AnalysisJob {
    /// `done` exactly when a result exists, `failed` exactly when an error does.
    pub fn is_consistent(&self) -> bool {
        (self.state == JobState::Done) == self.result.is_some()
            && (self.state == JobState::Failed) == self.error.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Queued,
    Running,
    /// A running job picked up again after a restart. Not a state change.
    Recovered,
    Done,
    Failed,
}

impl EventKind {
    pub fn state(self) -> JobState {
        match self {
            Self::Queued => JobState::Queued,
            Self::Running | Self::Recovered => JobState::Running,
            Self::Done => JobState::Done,
            Self::Failed => JobState::Failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobEvent {
    pub job_id: String,
    pub seq: u64,
    pub at: DateTime<Utc>,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Checks that an event log starts queued, never skips or reverses a
/// state, and only repeats `running` through recovery events.
pub fn check_event_log(events: &[JobEvent]) -> Result<(), String> {
    let Some(first) = events.first() else {
        return Err("empty event log".into());
    };
    if first.kind != EventKind::Queued {
        return Err(format!("log starts with {:?}", first.kind));
    }
    for pair in events.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.seq <= prev.seq {
            return Err(format!("sequence goes from {} to {}", prev.seq, next.seq));
        }
        let ok = if next.kind == EventKind::Recovered {
            prev.kind.state() == JobState::Running
        } else {
            prev.kind.state().can_become(next.kind.state())
        };
        if !ok {
            return Err(format!("illegal transition {:?} -> {:?}", prev.kind, next.kind));
        }
    }
    Ok(())
}
