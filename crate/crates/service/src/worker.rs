use std::time::Duration;

use linlayout::{compute_layout_cancellable, CancelToken, SolveStatus, SolverConfig};

use crate::record::JobStatus;
use crate::{now_ms, Inner};

pub(crate) fn run_job(inner: &Inner, id: &str) {
    if let Err(e) = try_run(inner, id) {
        eprintln!("job {id}: {e}");
    }
}

fn try_run(inner: &Inner, id: &str) -> Result<(), crate::ServiceError> {
    let Some(mut rec) = inner.store.get(id)? else { return Ok(()) };
    if rec.status != JobStatus::Queued {
        return Ok(());
    }
    // Register before claiming so a cancel that sees `running` finds the token.
    let token = CancelToken::new();
    inner.running.lock().unwrap().insert(id.to_string(), token.clone());
    rec.status = JobStatus::Running;
    if !inner.store.update_if(&rec, &[JobStatus::Queued], None)? {
        inner.running.lock().unwrap().remove(id);
        return Ok(());
    }

    let cfg = SolverConfig {
        backend: inner.cfg.solver.clone(),
        time_limit: Duration::from_secs_f64(rec.timeout_s),
        ..SolverConfig::default()
    };
    let outcome = compute_layout_cancellable(&rec.graph, &rec.spec, &cfg, &token);
    inner.running.lock().unwrap().remove(id);

    match outcome {
        Ok(out) if out.stats.cancelled && inner.is_stopping() => {
            rec.status = JobStatus::Queued;
            inner.store.update_if(&rec, &[JobStatus::Running], None)?;
            return Ok(());
        }
        Ok(out) => {
            rec.status = match out.status {
                _ if out.stats.cancelled => JobStatus::Cancelled,
                SolveStatus::Sat => JobStatus::Sat,
                SolveStatus::Unsat => JobStatus::Unsat,
                SolveStatus::Unknown => JobStatus::Unknown,
            };
            rec.result = out.layout.filter(|_| rec.status == JobStatus::Sat);
            rec.stats = Some(out.stats);
        }
        Err(e) => {
            rec.status = JobStatus::Error;
            rec.error = Some(e.to_string());
        }
    }
    inner.store.update_if(&rec, &[JobStatus::Running], Some(now_ms()))?;
    Ok(())
}
