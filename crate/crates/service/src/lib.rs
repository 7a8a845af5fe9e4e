//! HTTP workbench: task browsing, step-by-step solving sessions for human
//! participants, and the review queue for generated examples.
//!
//! All state lives in append-only JSONL logs; restarting the service
//! replays them.

pub mod clock;
pub mod error;
mod jsonl;
pub mod reviews;
mod routes;
pub mod sessions;
pub mod tasks;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use arcbench_core::TaskSource;

pub use clock::{Clock, ManualClock, SystemClock};
pub use error::{ApiError, ServiceError};
pub use reviews::{ReviewQueue, DEFAULT_LEASE};
pub use routes::{router, SessionView};
pub use sessions::SessionStore;
pub use tasks::TaskCatalog;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub tasks_dir: PathBuf,
    pub source: TaskSource,
    /// Session logs go under `<data_dir>/sessions`.
    pub data_dir: PathBuf,
    /// Experiment directories whose ITP candidates feed the review queue.
    pub reports_dir: PathBuf,
    pub review_lease: Duration,
}

impl ServiceConfig {
    pub fn new(tasks_dir: impl Into<PathBuf>, data_dir: impl Into<PathBuf>, reports_dir: impl Into<PathBuf>) -> ServiceConfig {
        ServiceConfig {
            tasks_dir: tasks_dir.into(),
            source: TaskSource::ArcTrain,
            data_dir: data_dir.into(),
            reports_dir: reports_dir.into(),
            review_lease: DEFAULT_LEASE,
        }
    }
}

pub struct App {
    pub tasks: TaskCatalog,
    pub sessions: SessionStore,
    pub reviews: ReviewQueue,
    pub reports_dir: PathBuf,
    pub clock: Arc<dyn Clock>,
}

impl App {
    pub fn open(config: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<App, ServiceError> {
        let tasks = TaskCatalog::load(&config.tasks_dir, config.source)?;
        App::with_tasks(tasks, config, clock)
    }

    pub fn with_tasks(tasks: TaskCatalog, config: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<App, ServiceError> {
        let sessions = SessionStore::open(&sessions_dir(&config.data_dir), &tasks)?;
        let reviews = ReviewQueue::open(&config.reports_dir, config.review_lease)?;
        Ok(App { tasks, sessions, reviews, reports_dir: config.reports_dir.clone(), clock })
    }
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, app: App) -> std::io::Result<()> {
    let addr = listener.local_addr()?;
    log::info!("listening on {addr}");
    axum::serve(listener, router(Arc::new(app))).await
}

pub fn sessions_dir(data_dir: &Path) -> PathBuf {
    data_dir.join("sessions")
}
