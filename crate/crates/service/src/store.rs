//! SQLite-backed job table.
//!
//! Each row keeps the full record as serialized JSON; reads hand those bytes
//! back untouched, so a record looks the same before and after a restart.

use std::path::Path;
use std::sync::Mutex;

use rusqlite::{params, Connection, OptionalExtension};

use crate::record::{JobRecord, JobStatus};
use crate::ServiceError;

pub struct Store {
    conn: Mutex<Connection>,
}

/// One row of a listing: columns only, no bodies.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct JobSummary {
    pub id: String,
    pub status: JobStatus,
    pub submitted_at: String,
}

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS jobs (
    id           TEXT PRIMARY KEY,
    status       TEXT NOT NULL,
    submitted_at TEXT NOT NULL,
    finished_ms  INTEGER,
    body         BLOB NOT NULL
);
CREATE INDEX IF NOT EXISTS jobs_status ON jobs (status, id);
";

impl Store {
    pub fn open(path: &Path) -> Result<Self, ServiceError> {
        let conn = Connection::open(path)?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        conn.pragma_update(None, "synchronous", "FULL")?;
        conn.busy_timeout(std::time::Duration::from_secs(5))?;
        conn.execute_batch(SCHEMA)?;
        Ok(Self { conn: Mutex::new(conn) })
    }

    pub fn in_memory() -> Result<Self, ServiceError> {
        let conn = Connection::open_in_memory()?;
        conn.execute_batch(SCHEMA)?;
        Ok(Self { conn: Mutex::new(conn) })
    }

    fn conn(&self) -> std::sync::MutexGuard<'_, Connection> {
        self.conn.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn insert(&self, rec: &JobRecord) -> Result<(), ServiceError> {
        let body = serde_json::to_vec(rec)?;
        self.conn().execute(
            "INSERT INTO jobs (id, status, submitted_at, body) VALUES (?1, ?2, ?3, ?4)",
            params![rec.id, rec.status.as_str(), rec.submitted_at, body],
        )?;
        Ok(())
    }

    pub fn get_raw(&self, id: &str) -> Result<Option<Vec<u8>>, ServiceError> {
        Ok(self
            .conn()
            .query_row("SELECT body FROM jobs WHERE id = ?1", [id], |r| r.get(0))
            .optional()?)
    }

    pub fn get(&self, id: &str) -> Result<Option<JobRecord>, ServiceError> {
        match self.get_raw(id)? {
            Some(body) => Ok(Some(serde_json::from_slice(&body)?)),
            None => Ok(None),
        }
    }

    /// Replaces the record if its stored status is one of `from`.
    /// Returns whether a row changed.
    pub fn update_if(&self, rec: &JobRecord, from: &[JobStatus], finished_ms: Option<i64>) -> Result<bool, ServiceError> {
        let body = serde_json::to_vec(rec)?;
        let mut conn = self.conn();
        let tx = conn.transaction()?;
        let current: Option<String> =
            tx.query_row("SELECT status FROM jobs WHERE id = ?1", [&rec.id], |r| r.get(0)).optional()?;
        let allowed = current.is_some_and(|s| from.iter().any(|f| f.as_str() == s));
        if allowed {
            tx.execute(
                "UPDATE jobs SET status = ?2, finished_ms = ?3, body = ?4 WHERE id = ?1",
                params![rec.id, rec.status.as_str(), finished_ms, body],
            )?;
        }
        tx.commit()?;
        Ok(allowed)
    }

    pub fn ids_with_status(&self, status: JobStatus) -> Result<Vec<String>, ServiceError> {
        let conn = self.conn();
        let mut stmt = conn.prepare("SELECT id FROM jobs WHERE status = ?1 ORDER BY id")?;
        let ids = stmt.query_map([status.as_str()], |r| r.get(0))?.collect::<Result<_, _>>()?;
        Ok(ids)
    }

    pub fn count(&self, status: JobStatus) -> Result<u64, ServiceError> {
        Ok(self
            .conn()
            .query_row("SELECT COUNT(*) FROM jobs WHERE status = ?1", [status.as_str()], |r| r.get(0))?)
    }

    /// Records with id greater than `after`, in id order.
    pub fn list(&self, status: Option<JobStatus>, after: Option<&str>, limit: usize) -> Result<Vec<JobSummary>, ServiceError> {
        let conn = self.conn();
        let mut stmt = conn.prepare(
            "SELECT id, status, submitted_at FROM jobs
             WHERE (?1 IS NULL OR status = ?1) AND (?2 IS NULL OR id > ?2)
             ORDER BY id LIMIT ?3",
        )?;
        let rows = stmt.query_map(params![status.map(|s| s.as_str()), after, limit as i64], |r| {
            Ok((r.get::<_, String>(0)?, r.get::<_, String>(1)?, r.get::<_, String>(2)?))
        })?;
        let mut out = Vec::new();
        for row in rows {
            let (id, status, submitted_at) = row?;
            let status = status.parse().map_err(|_| ServiceError::Corrupt(format!("job {id} has status {status}")))?;
            out.push(JobSummary { id, status, submitted_at });
        }
        Ok(out)
    }

    /// Deletes finished records that completed before `cutoff_ms`.
    pub fn purge_finished_before(&self, cutoff_ms: i64) -> Result<usize, ServiceError> {
        Ok(self
            .conn()
            .execute("DELETE FROM jobs WHERE finished_ms IS NOT NULL AND finished_ms < ?1", [cutoff_ms])?)
    }
}
