//! Dataset registry and the job queue. HTTP handlers call into
//! [`Service`]; analysis work runs on a fixed pool of worker tasks, each
//! handing one job at a time to the blocking thread pool.

use std::collections::HashMap;
use std::fs;
use std::sync::{Arc, Mutex};

use biblio_core::analysis::check_eligible;
use biblio_core::{check_capabilities, load_dataset, AnalysisKind, AnalysisParams, Dataset, IngestError, MappingSet};
use chrono::Utc;
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;
use tokio::sync::mpsc;

use crate::config::Config;
use crate::jobs::{AnalysisJob, EventKind, JobState};
use crate::store::{DatasetMeta, Store, StoreError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("dataset `{0}` not found")]
    UnknownDataset(String),
    #[error("dataset is not eligible for {analysis}; missing: {}", .missing_fields.join(", "))]
    NotEligible {
        analysis: AnalysisKind,
        missing_fields: Vec<String>,
    },
    #[error("{0}")]
    InvalidParams(String),
    #[error("mapping config: {0}")]
    Config(String),
}

pub struct Service {
    store: Store,
    mappings: MappingSet,
    /// Taken on shutdown, which closes the queue.
    queue: Mutex<Option<mpsc::UnboundedSender<String>>>,
    workers: Mutex<Vec<tokio::task::JoinHandle<()>>>,
    datasets: Mutex<HashMap<String, Arc<Dataset>>>,
}

impl Service {
    /// Opens the store, re-queues unfinished jobs in submission order and
    /// starts `config.workers` workers. Must run inside a Tokio runtime.
    pub fn start(config: &Config) -> Result<Arc<Self>, ServiceError> {
        let mappings = match &config.mappings_dir {
            Some(dir) => MappingSet::load_dir(dir).map_err(|e| ServiceError::Config(e.to_string()))?,
            None => MappingSet::bundled(),
        };
        let store = Store::open(&config.data_dir)?;
        let (tx, rx) = mpsc::unbounded_channel();
        let svc = Arc::new(Self {
            store,
            mappings,
            queue: Mutex::new(Some(tx)),
            workers: Mutex::new(Vec::new()),
            datasets: Mutex::new(HashMap::new()),
        });
        svc.recover()?;
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        let handles = (0..config.workers.max(1))
            .map(|_| tokio::spawn(worker(Arc::clone(&svc), Arc::clone(&rx))))
            .collect();
        *svc.workers.lock().expect("worker list") = handles;
        Ok(svc)
    }

    /// Stops accepting work, lets the workers drain the queue and waits for
    /// them. Afterwards the store is released once the caller drops its
    /// handles.
    pub async fn shutdown(&self) {
        self.queue.lock().expect("queue").take();
        let handles = std::mem::take(&mut *self.workers.lock().expect("worker list"));
        for h in handles {
            let _ = h.await;
        }
    }

    fn enqueue(&self, job_id: String) {
        if let Some(tx) = self.queue.lock().expect("queue").as_ref() {
            let _ = tx.send(job_id);
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    fn recover(&self) -> Result<(), ServiceError> {
        for job in self.store.jobs()? {
            match job.state {
                JobState::Queued => {}
                JobState::Running => {
                    self.store.record(
                        &job.id,
                        EventKind::Recovered,
                        Some("re-queued after restart".into()),
                        |_| {},
                    )?;
                }
                JobState::Done | JobState::Failed => continue,
            }
            self.enqueue(job.id);
        }
        Ok(())
    }

    /// Parses, stores and checks an upload. Blocking.
    pub fn upload(&self, filename: &str, raw: &[u8]) -> Result<DatasetMeta, ServiceError> {
        let ds = load_dataset(raw, filename, &self.mappings)?;
        let id = hex::encode(Sha256::digest(raw));
        let meta = DatasetMeta {
            id: id.clone(),
            filename: filename.to_string(),
            source: ds.source,
            row_count: ds.row_count,
            size_bytes: raw.len() as u64,
            uploaded_at: Utc::now(),
            columns: ds.column_catalog.clone(),
            warnings: ds.warnings.clone(),
            capabilities: check_capabilities(&ds),
        };
        self.store.put_dataset(&meta, raw)?;
        self.datasets.lock().expect("dataset cache").insert(id, Arc::new(ds));
        Ok(meta)
    }

    pub fn dataset_meta(&self, id: &str) -> Result<DatasetMeta, ServiceError> {
        self.store
            .dataset(id)?
            .ok_or_else(|| ServiceError::UnknownDataset(id.to_string()))
    }

    pub fn delete_dataset(&self, id: &str) -> Result<(), ServiceError> {
        self.datasets.lock().expect("dataset cache").remove(id);
        if self.store.delete_dataset(id)? {
            Ok(())
        } else {
            Err(ServiceError::UnknownDataset(id.to_string()))
        }
    }

    fn dataset(&self, id: &str) -> Result<Arc<Dataset>, ServiceError> {
        if let Some(ds) = self.datasets.lock().expect("dataset cache").get(id) {
            return Ok(Arc::clone(ds));
        }
        let meta = self.dataset_meta(id)?;
        let raw = fs::read(self.store.dataset_path(id)).map_err(StoreError::from)?;
        let ds = Arc::new(load_dataset(&raw, &meta.filename, &self.mappings)?);
        self.datasets
            .lock()
            .expect("dataset cache")
            .insert(id.to_string(), Arc::clone(&ds));
        Ok(ds)
    }

    /// Validates and queues a job.
    pub fn submit(&self, dataset_id: &str, analysis: AnalysisKind, params: Value) -> Result<AnalysisJob, ServiceError> {
        let meta = self.dataset_meta(dataset_id)?;
        let cap = meta.capabilities.get(analysis.capability());
        if !cap.eligible {
            return Err(ServiceError::NotEligible {
                analysis,
                missing_fields: cap.missing_fields.clone(),
            });
        }
        AnalysisParams::from_json(analysis, &params).map_err(|e| ServiceError::InvalidParams(e.to_string()))?;
        let job = self.store.create_job(AnalysisJob {
            id: uuid::Uuid::new_v4().simple().to_string(),
            dataset_id: dataset_id.to_string(),
            analysis,
            params,
            state: JobState::Queued,
            seq: 0,
            submitted_at: Utc::now(),
            started_at: None,
            finished_at: None,
            error: None,
            result: None,
            files: Vec::new(),
        })?;
        self.enqueue(job.id.clone());
        Ok(job)
    }

    /// Runs one job to completion. Blocking; called from the worker pool.
    pub fn execute(&self, job_id: &str) -> Result<(), ServiceError> {
        let Some(job) = self.store.job(job_id)? else { return Ok(()) };
        let job = match job.state {
            JobState::Queued => self
                .store
                .record(job_id, EventKind::Running, None, |j| j.started_at = Some(Utc::now()))?,
            JobState::Running => job,
            JobState::Done | JobState::Failed => return Ok(()),
        };
        match self.run_job(&job) {
            Ok(files) => {
                self.store.record(job_id, EventKind::Done, None, |j| {
                    j.finished_at = Some(Utc::now());
                    j.result = Some(format!("results/{job_id}"));
                    j.files = files;
                })?;
            }
            Err(message) => {
                self.store
                    .record(job_id, EventKind::Failed, Some(message.clone()), |j| {
                        j.finished_at = Some(Utc::now());
                        j.error = Some(message);
                    })?;
            }
        }
        Ok(())
    }

    fn run_job(&self, job: &AnalysisJob) -> Result<Vec<String>, String> {
        let ds = self.dataset(&job.dataset_id).map_err(|e| e.to_string())?;
        check_eligible(&ds, job.analysis).map_err(|e| e.to_string())?;
        let params = AnalysisParams::from_json(job.analysis, &job.params).map_err(|e| e.to_string())?;
        let output = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| biblio_core::run(&ds, &params)))
            .map_err(|_| "analysis panicked".to_string())?
            .map_err(|e| e.to_string())?;
        let dir = self.store.result_dir(&job.id);
        // Re-runs after a restart overwrite whatever a previous attempt left.
        fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        for (name, content) in &output.files {
            fs::write(dir.join(name), content).map_err(|e| e.to_string())?;
        }
        Ok(output.files.into_iter().map(|(name, _)| name).collect())
    }

    pub fn job(&self, id: &str) -> Result<Option<AnalysisJob>, ServiceError> {
        Ok(self.store.job(id)?)
    }

    /// Contents of one result file of a finished job.
    pub fn result_file(&self, job: &AnalysisJob, name: &str) -> Result<Option<Vec<u8>>, ServiceError> {
        if job.state != JobState::Done || !job.files.iter().any(|f| f == name) {
            return Ok(None);
        }
        Ok(Some(fs::read(self.store.result_dir(&job.id).join(name)).map_err(StoreError::from)?))
    }
}

async fn worker(svc: Arc<Service>, rx: Arc<tokio::sync::Mutex<mpsc::UnboundedReceiver<String>>>) {
    loop {
        let next = rx.lock().await.recv().await;
        let Some(job_id) = next else { break };
        let svc = Arc::clone(&svc);
        let id = job_id.clone();
        match tokio::task::spawn_blocking(move || svc.execute(&id)).await {
            Ok(Ok(())) => {}
            Ok(Err(e)) => tracing::error!(job = %job_id, error = %e, "job bookkeeping failed"),
            Err(e) => tracing::error!(job = %job_id, error = %e, "job panicked"),
        }
    }
}
