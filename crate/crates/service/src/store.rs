//! On-disk persistence under the data directory:
//!
//! ```text
//! <data>/store.redb            dataset metadata, jobs, job events
//! <data>/datasets/<sha256>     uploaded files, content addressed
//! <data>/results/<job id>/     result.json plus the analysis's CSVs
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use biblio_core::{CapabilityReport, ColumnInfo, RowWarning, SourceKind};
use chrono::{DateTime, Utc};
use redb::{Database, ReadableTable, TableDefinition};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jobs::{AnalysisJob, EventKind, JobEvent};

const DATASETS: TableDefinition<&str, &str> = TableDefinition::new("datasets");
const JOBS: TableDefinition<&str, &str> = TableDefinition::new("jobs");
const EVENTS: TableDefinition<(&str, u64), &str> = TableDefinition::new("events");
const COUNTERS: TableDefinition<&str, u64> = TableDefinition::new("counters");

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("database: {0}")]
    Db(#[from] redb::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt record: {0}")]
    Corrupt(#[from] serde_json::Error),
    #[error("job `{0}` not found")]
    UnknownJob(String),
    #[error("job `{job}`: {message}")]
    IllegalTransition { job: String, message: String },
}

fn db(e: impl Into<redb::Error>) -> StoreError {
    StoreError::Db(e.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub id: String,
    pub filename: String,
    pub source: SourceKind,
    pub row_count: usize,
    pub size_bytes: u64,
    pub uploaded_at: DateTime<Utc>,
    pub columns: Vec<ColumnInfo>,
    pub warnings: Vec<RowWarning>,
    pub capabilities: CapabilityReport,
}

pub struct Store {
    db: Database,
    root: PathBuf,
}

impl Store {
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        fs::create_dir_all(root.join("datasets"))?;
        fs::create_dir_all(root.join("results"))?;
        let database = Database::create(root.join("store.redb")).map_err(db)?;
        let txn = database.begin_write().map_err(db)?;
        {
            txn.open_table(DATASETS).map_err(db)?;
            txn.open_table(JOBS).map_err(db)?;
            txn.open_table(EVENTS).map_err(db)?;
            txn.open_table(COUNTERS).map_err(db)?;
        }
        txn.commit().map_err(db)?;
        Ok(Self {
            db: database,
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dataset_path(&self, id: &str) -> PathBuf {
        self.root.join("datasets").join(id)
    }

    pub fn result_dir(&self, job_id: &str) -> PathBuf {
        self.root.join("results").join(job_id)
    }

    /// Writes the raw upload (once per content hash) and its metadata.
    pub fn put_dataset(&self, meta: &DatasetMeta, raw: &[u8]) -> Result<(), StoreError> {
        let path = self.dataset_path(&meta.id);
        if !path.exists() {
            let tmp = path.with_extension("part");
            fs::write(&tmp, raw)?;
            fs::rename(&tmp, &path)?;
        }
        let json = serde_json::to_string(meta)?;
        let txn = self.db.begin_write().map_err(db)?;
        txn.open_table(DATASETS).map_err(db)?.insert(meta.id.as_str(), json.as_str()).map_err(db)?;
        txn.commit().map_err(db)?;
        Ok(())
    }

    pub fn dataset(&self, id: &str) -> Result<Option<DatasetMeta>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let table = txn.open_table(DATASETS).map_err(db)?;
        let Some(v) = table.get(id).map_err(db)? else { return Ok(None) };
        Ok(Some(serde_json::from_str(v.value())?))
    }

    /// Removes metadata and the stored file. Jobs and their results stay.
    pub fn delete_dataset(&self, id: &str) -> Result<bool, StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        let existed = txn.open_table(DATASETS).map_err(db)?.remove(id).map_err(db)?.is_some();
        txn.commit().map_err(db)?;
        match fs::remove_file(self.dataset_path(id)) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(e.into()),
            _ => {}
        }
        Ok(existed)
    }

    /// Persists a new queued job with the next submission number and logs
    /// its `queued` event. Returns the stored job.
    pub fn create_job(&self, mut job: AnalysisJob) -> Result<AnalysisJob, StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        {
            job.seq = next_counter(&txn, "job_seq")?;
            let json = serde_json::to_string(&job)?;
            txn.open_table(JOBS).map_err(db)?.insert(job.id.as_str(), json.as_str()).map_err(db)?;
            append_event(&txn, &job.id, EventKind::Queued, None)?;
        }
        txn.commit().map_err(db)?;
        Ok(job)
    }

    pub fn job(&self, id: &str) -> Result<Option<AnalysisJob>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let table = txn.open_table(JOBS).map_err(db)?;
        let Some(v) = table.get(id).map_err(db)? else { return Ok(None) };
        Ok(Some(serde_json::from_str(v.value())?))
    }

    /// All jobs in submission order.
    pub fn jobs(&self) -> Result<Vec<AnalysisJob>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let table = txn.open_table(JOBS).map_err(db)?;
        let mut out = Vec::new();
        for entry in table.iter().map_err(db)? {
            let (_, v) = entry.map_err(db)?;
            out.push(serde_json::from_str::<AnalysisJob>(v.value())?);
        }
        out.sort_by_key(|j| j.seq);
        Ok(out)
    }

    /// Applies `update` to a job and logs `kind` in one transaction. The
    /// state implied by `kind` must be a legal successor of the current one
    /// (or, for recovery, equal to it).
    pub fn record(
        &self,
        id: &str,
        kind: EventKind,
        message: Option<String>,
        update: impl FnOnce(&mut AnalysisJob),
    ) -> Result<AnalysisJob, StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        let job = {
            let mut jobs = txn.open_table(JOBS).map_err(db)?;
            let mut job: AnalysisJob = match jobs.get(id).map_err(db)? {
                Some(v) => serde_json::from_str(v.value())?,
                None => return Err(StoreError::UnknownJob(id.to_string())),
            };
            let next = kind.state();
            let legal = if kind == EventKind::Recovered {
                job.state == next
            } else {
                job.state.can_become(next)
            };
            if !legal {
                return Err(StoreError::IllegalTransition {
                    job: id.to_string(),
                    message: format!("{:?} -> {:?}", job.state, kind),
                });
            }
            job.state = next;
            update(&mut job);
            let json = serde_json::to_string(&job)?;
            jobs.insert(id, json.as_str()).map_err(db)?;
            append_event(&txn, id, kind, message)?;
            job
        };
        txn.commit().map_err(db)?;
        Ok(job)
    }

    pub fn events(&self, job_id: &str) -> Result<Vec<JobEvent>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let table = txn.open_table(EVENTS).map_err(db)?;
        let mut out = Vec::new();
        for entry in table.range((job_id, 0)..=(job_id, u64::MAX)).map_err(db)? {
            let (_, v) = entry.map_err(db)?;
            out.push(serde_json::from_str(v.value())?);
        }
        Ok(out)
    }
}

/// Returns the counter's current value and increments it.
fn next_counter(txn: &redb::WriteTransaction, name: &str) -> Result<u64, StoreError> {
    let mut counters = txn.open_table(COUNTERS).map_err(db)?;
    let value = counters.get(name).map_err(db)?.map_or(0, |v| v.value());
    counters.insert(name, value + 1).map_err(db)?;
    Ok(value)
}

fn append_event(
    txn: &redb::WriteTransaction,
    job_id: &str,
    kind: EventKind,
    message: Option<String>,
) -> Result<(), StoreError> {
    let seq = next_counter(txn, "event_seq")?;
    let event = JobEvent {
        job_id: job_id.to_string(),
        seq,
        at: Utc::now(),
        kind,
        message,
    };
    let json = serde_json::to_string(&event)?;
    txn.open_table(EVENTS)
        .map_err(db)?
        .insert((job_id, seq), json.as_str())
        .map_err(db)?;
    Ok(())
}
