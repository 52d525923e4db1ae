//! HTTP job service: persistent queue of layout requests solved by a pool of
//! worker threads.
//!
//! | method | path | |
//! |---|---|---|
//! | `POST` | `/jobs` | submit a job request, `201 {"id": ...}` |
//! | `GET` | `/jobs/{id}` | full record |
//! | `GET` | `/jobs?status=&cursor=&limit=` | summaries in id order |
//! | `DELETE` | `/jobs/{id}` | cancel |
//! | `GET` | `/health` | liveness and queue depth |

mod api;
pub mod record;
pub mod store;
mod worker;

use std::collections::{HashMap, VecDeque};
use std::future::Future;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use linlayout::{Backend, CancelToken};
use thiserror::Error;

pub use record::{JobRecord, JobStatus};
pub use store::{JobSummary, Store};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("job store: {0}")]
    Db(#[from] rusqlite::Error),
    #[error("job record encoding: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("job store is inconsistent: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub store: PathBuf,
    pub workers: usize,
    pub solver: Backend,
    /// Upper bound on any job's solver time; also the default.
    pub timeout_cap: Duration,
    /// Finished records older than this are deleted.
    pub ttl: Option<Duration>,
    /// Re-run the independent checker on every sat record served.
    pub verify_on_read: bool,
    pub max_body_bytes: usize,
}

impl ServiceConfig {
    pub fn new(store: impl Into<PathBuf>) -> Self {
        Self {
            store: store.into(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            solver: Backend::Builtin,
            timeout_cap: Duration::from_secs(300),
            ttl: None,
            verify_on_read: false,
            max_body_bytes: 8 << 20,
        }
    }
}

pub(crate) struct Inner {
    pub(crate) cfg: ServiceConfig,
    pub(crate) store: Store,
    queue: Mutex<VecDeque<String>>,
    wake: Condvar,
    /// Tokens of jobs a worker has claimed.
    pub(crate) running: Mutex<HashMap<String, CancelToken>>,
    stopping: AtomicBool,
}

impl Inner {
    pub(crate) fn enqueue(&self, id: String) {
        self.queue.lock().unwrap().push_back(id);
        self.wake.notify_one();
    }

    fn next(&self) -> Option<String> {
        let mut q = self.queue.lock().unwrap();
        loop {
            if self.stopping.load(Ordering::SeqCst) {
                return None;
            }
            if let Some(id) = q.pop_front() {
                return Some(id);
            }
            q = self.wake.wait(q).unwrap();
        }
    }

    pub(crate) fn is_stopping(&self) -> bool {
        self.stopping.load(Ordering::SeqCst)
    }
}

pub(crate) fn now_ms() -> i64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as i64)
}

pub(crate) fn timestamp() -> String {
    humantime::format_rfc3339_millis(SystemTime::now()).to_string()
}

pub struct Service {
    inner: Arc<Inner>,
    workers: Vec<JoinHandle<()>>,
}

impl Service {
    /// Opens the store, puts interrupted jobs back in the queue, starts workers.
    pub fn start(cfg: ServiceConfig) -> Result<Self, ServiceError> {
        let store = Store::open(&cfg.store)?;
        for id in store.ids_with_status(JobStatus::Running)? {
            if let Some(mut rec) = store.get(&id)? {
                rec.status = JobStatus::Queued;
                store.update_if(&rec, &[JobStatus::Running], None)?;
            }
        }
        if let Some(ttl) = cfg.ttl {
            store.purge_finished_before(now_ms() - ttl.as_millis() as i64)?;
        }
        let queue = store.ids_with_status(JobStatus::Queued)?.into_iter().collect();
        let inner = Arc::new(Inner {
            store,
            queue: Mutex::new(queue),
            wake: Condvar::new(),
            running: Mutex::new(HashMap::new()),
            stopping: AtomicBool::new(false),
            cfg,
        });
        let workers = (0..inner.cfg.workers.max(1))
            .map(|i| {
                let inner = inner.clone();
                std::thread::Builder::new()
                    .name(format!("layout-worker-{i}"))
                    .spawn(move || {
                        while let Some(id) = inner.next() {
                            worker::run_job(&inner, &id);
                        }
                    })
                    .expect("spawn worker thread")
            })
            .collect();
        Ok(Self { inner, workers })
    }

    pub fn router(&self) -> axum::Router {
        api::router(self.inner.clone())
    }

    /// Serves until `shutdown` resolves, then stops the workers. Jobs that
    /// were running go back to `queued` for the next start.
    pub async fn serve(
        self,
        listener: tokio::net::TcpListener,
        shutdown: impl Future<Output = ()> + Send + 'static,
    ) -> Result<(), ServiceError> {
        let sweeper = self.inner.cfg.ttl.map(|ttl| {
            let inner = self.inner.clone();
            tokio::spawn(async move {
                let mut tick = tokio::time::interval((ttl / 4).clamp(Duration::from_secs(1), Duration::from_secs(60)));
                loop {
                    tick.tick().await;
                    let inner = inner.clone();
                    let _ = tokio::task::spawn_blocking(move || {
                        inner.store.purge_finished_before(now_ms() - ttl.as_millis() as i64)
                    })
                    .await;
                }
            })
        });
        let served = axum::serve(listener, self.router()).with_graceful_shutdown(shutdown).await;
        if let Some(s) = sweeper {
            s.abort();
        }
        tokio::task::spawn_blocking(move || self.stop()).await.ok();
        Ok(served?)
    }

    pub fn stop(mut self) {
        self.halt();
    }

    fn halt(&mut self) {
        self.inner.stopping.store(true, Ordering::SeqCst);
        for token in self.inner.running.lock().unwrap().values() {
            token.cancel();
        }
        self.inner.wake.notify_all();
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        self.halt();
    }
}
