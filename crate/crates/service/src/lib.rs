//! Annotation service: sentence tagging in corpus-frequency order and
//! per-finding study rating for evaluation sets.
//!
//! All writes go through one append-only JSONL event log. On start the log
//! is replayed to rebuild the effective state, so a restarted service
//! answers exactly as before it stopped.

mod api;
mod log;
mod sets;
mod state;

use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use cxrlabel_core::classify::{FilterRuleSet, Ontology};
use cxrlabel_core::sentence::{PoolEntry, SentencePool};
use serde::{Deserialize, Serialize};

pub use api::router;
pub use log::EventLog;
pub use sets::{EvalSet, EvalSets, EvalStudy};
pub use state::{serving_order, Progress, RaterProgress, SentenceProgress, SetProgress};

use state::State;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("event log: {0}")]
    Log(String),
}

/// Whether a sentence leaves the tagging queue once anyone tags it, or only
/// for the rater who tagged it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueCoverage {
    #[default]
    Single,
    PerRater,
}

impl std::fmt::Display for QueueCoverage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QueueCoverage::Single => "single",
            QueueCoverage::PerRater => "per_rater",
        })
    }
}

impl std::str::FromStr for QueueCoverage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(QueueCoverage::Single),
            "per_rater" => Ok(QueueCoverage::PerRater),
            other => Err(format!("unknown queue coverage {other:?}")),
        }
    }
}

pub struct ServiceConfig {
    pub ontology: Ontology,
    pub rules: FilterRuleSet,
    /// Without a pool the sentence endpoints answer 503.
    pub pool: Option<SentencePool>,
    pub eval_sets: EvalSets,
    pub log_path: PathBuf,
    pub seed: u64,
    pub queue_coverage: QueueCoverage,
    /// Served under `/images` when set.
    pub image_dir: Option<PathBuf>,
}

pub(crate) struct Inner {
    ontology: Ontology,
    queue: Option<Vec<(usize, PoolEntry)>>,
    sets: EvalSets,
    seed: u64,
    coverage: QueueCoverage,
    image_dir: Option<PathBuf>,
    state: RwLock<State>,
    log: tokio::sync::Mutex<EventLog>,
}

/// Shared handle to the running service.
#[derive(Clone)]
pub struct App {
    inner: Arc<Inner>,
}

impl App {
    /// Open the event log, replay it and build the service state.
    pub fn open(config: ServiceConfig) -> Result<Self, ServiceError> {
        let (log, events) = EventLog::open(&config.log_path)?;
        let mut state = State::default();
        for e in &events {
            state.apply(e);
        }
        tracing::info!(events = events.len(), path = %config.log_path.display(), "replayed event log");
        let queue = config.pool.as_ref().map(|p| state::candidate_queue(p, &config.rules));
        Ok(App {
            inner: Arc::new(Inner {
                ontology: config.ontology,
                queue,
                sets: config.eval_sets,
                seed: config.seed,
                coverage: config.queue_coverage,
                image_dir: config.image_dir,
                state: RwLock::new(state),
                log: tokio::sync::Mutex::new(log),
            }),
        })
    }

    pub fn progress(&self) -> Progress {
        let inner = &self.inner;
        let state = inner.state.read().expect("state lock");
        state.progress(inner.queue.as_deref(), &inner.sets, |s| inner.finding_names(s))
    }
}

impl Inner {
    fn finding_names(&self, set: &EvalSet) -> Vec<String> {
        set.findings.iter().map(|&f| self.ontology.name(f).to_string()).collect()
    }
}

/// Serve the API on `listener` until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, app: App) -> std::io::Result<()> {
    axum::serve(listener, router(app)).await
}
