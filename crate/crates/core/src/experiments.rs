//! The three constrained 3-stack experiments on skeleton-type graphs.
//!
//! * step 1: skeleton path, odd path vertices between A and B, even ones
//!   outside.
//! * step 2: stellated pairs between A and B, with `y_{2i-1} a_i b_i y_{2i}`
//!   (and the `b_i a_i` variant) forbidden as orders.
//! * step 3: random framed triangulations, s a t and s b t in order, and
//!   every edge from s or t into the interval between them on pages 0 and 1.
//!   `unsat` would mean the candidate has the sought property.
//!
//! Each run writes `<id>.job.json` (graph + spec) and, when sat,
//! `<id>.layout.json` and `<id>.svg` into the output directory.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{generate_skeleton, generate_step2_gadget, random_triangulated_quad, ConstructionError};
use crate::graph::{Graph, VertexId};
use crate::job::JobRequest;
use crate::layout::{Constraint, IncidenceScope, LayoutSpec, LinearLayout};
use crate::pipeline::{compute_layout, LayoutOutcome, PipelineError};
use crate::solver::{SolveStats, SolveStatus, SolverConfig};
use crate::svg::{render_arc_diagram, SvgOptions};

/// Sizes at which the experiments are normally run.
pub const STEP1_DEFAULT_N: usize = 100;
pub const STEP2_DEFAULT_K: usize = 25;
pub const STEP3_DEFAULT_N: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub id: String,
    pub params: serde_json::Value,
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout_path: Option<PathBuf>,
    pub wall_ms: u64,
    pub stats: SolveStats,
    /// Observations about the layout found, e.g. whether A precedes B.
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub notes: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("writing experiment output: {0}")]
    Io(#[from] std::io::Error),
}

/// A finished run: the report plus what it was computed from.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub graph: Graph,
    pub spec: LayoutSpec,
    pub layout: Option<LinearLayout>,
}

pub fn step1_constraints(path: &[VertexId], a: &VertexId, b: &VertexId) -> Vec<Constraint> {
    // Linear rotation of the cyclic pattern A, odd vertices, B, even vertices.
    let mut cs = Vec::with_capacity(2 * path.len());
    for (i, x) in path.iter().enumerate() {
        if i % 2 == 0 {
            cs.push(Constraint::precedes(a.clone(), x.clone()));
            cs.push(Constraint::precedes(x.clone(), b.clone()));
        } else {
            cs.push(Constraint::precedes(b.clone(), x.clone()));
            cs.push(Constraint::precedes(a.clone(), x.clone()));
        }
    }
    cs
}

pub fn step1_instance(n: usize) -> Result<(Graph, LayoutSpec), ConstructionError> {
    let (g, l) = generate_skeleton(n)?;
    let spec = LayoutSpec::stacks(3).with_constraints(step1_constraints(&l.path, &l.a, &l.b));
    Ok((g, spec))
}

pub fn step2_instance(k: usize) -> Result<(Graph, LayoutSpec), ConstructionError> {
    let (g, l) = generate_step2_gadget(k)?;
    let mut cs = Vec::new();
    for v in g.vertices() {
        if *v != l.a {
            cs.push(Constraint::precedes(l.a.clone(), v.clone()));
        }
        if *v != l.a && *v != l.b {
            cs.push(Constraint::precedes(v.clone(), l.b.clone()));
        }
    }
    for i in 0..k {
        let (y1, y2) = (&l.y[2 * i], &l.y[2 * i + 1]);
        let (ai, bi) = (&l.stellators_a[i], &l.stellators_b[i]);
        cs.push(Constraint::forbidden_order([y1, ai, bi, y2].map(Clone::clone)));
        cs.push(Constraint::forbidden_order([y1, bi, ai, y2].map(Clone::clone)));
    }
    Ok((g, LayoutSpec::stacks(3).with_constraints(cs)))
}

pub fn step3_instance(n: usize, seed: u64) -> Result<(Graph, LayoutSpec), ConstructionError> {
    let (g, f) = random_triangulated_quad(n, seed)?;
    let spec = LayoutSpec::stacks(3).with_constraints([
        Constraint::required_order([f.s.clone(), f.a.clone(), f.t.clone()]),
        Constraint::required_order([f.s.clone(), f.b.clone(), f.t.clone()]),
        Constraint::incident_pages([f.s, f.t], [0, 1], IncidenceScope::Between),
    ]);
    Ok((g, spec))
}

fn run(
    experiment: &str,
    id: String,
    params: serde_json::Value,
    (g, spec): (Graph, LayoutSpec),
    cfg: &SolverConfig,
    out_dir: &Path,
) -> Result<ExperimentRun, ExperimentError> {
    fs::create_dir_all(out_dir)?;
    let job = JobRequest::new(g.clone(), spec.clone());
    fs::write(out_dir.join(format!("{id}.job.json")), serde_json::to_vec_pretty(&job).expect("job serializes"))?;

    let LayoutOutcome { status, layout, stats } = compute_layout(&g, &spec, cfg)?;
    let mut report = ExperimentReport {
        experiment: experiment.to_string(),
        id: id.clone(),
        params,
        status,
        layout_path: None,
        wall_ms: stats.wall_ms,
        stats,
        notes: Default::default(),
    };
    if let Some(l) = &layout {
        let path = out_dir.join(format!("{id}.layout.json"));
        fs::write(&path, serde_json::to_vec_pretty(l).expect("layout serializes"))?;
        fs::write(out_dir.join(format!("{id}.svg")), render_arc_diagram(&g, l, &SvgOptions::default()))?;
        report.layout_path = Some(path);
    }
    Ok(ExperimentRun {
        report,
        graph: g,
        spec,
        layout,
    })
}

pub fn run_step1(n: usize, cfg: &SolverConfig, out_dir: &Path) -> Result<ExperimentRun, ExperimentError> {
    let mut r = run("step1", format!("step1-n{n}"), serde_json::json!({ "n": n }), step1_instance(n)?, cfg, out_dir)?;
    if let Some(l) = &r.layout {
        let sigma = l.sigma();
        r.report
            .notes
            .insert("a_before_b".into(), sigma.before(&"A".into(), &"B".into()).into());
    }
    Ok(r)
}

pub fn run_step2(k: usize, cfg: &SolverConfig, out_dir: &Path) -> Result<ExperimentRun, ExperimentError> {
    run("step2", format!("step2-k{k}"), serde_json::json!({ "k": k }), step2_instance(k)?, cfg, out_dir)
}

pub fn run_step3(n: usize, seed: u64, cfg: &SolverConfig, out_dir: &Path) -> Result<ExperimentRun, ExperimentError> {
    let mut r = run(
        "step3",
        format!("step3-n{n}-s{seed}"),
        serde_json::json!({ "n": n, "seed": seed }),
        step3_instance(n, seed)?,
        cfg,
        out_dir,
    )?;
    if let Some(l) = &r.layout {
        // How many vertices besides a and b ended up between s and t.
        let sigma = l.sigma();
        let (s, t) = (sigma.position(&"s".into()), sigma.position(&"t".into()));
        if let (Some(s), Some(t)) = (s, t) {
            r.report
                .notes
                .insert("between_s_t".into(), (t.abs_diff(s) - 1).saturating_sub(2).into());
        }
    }
    Ok(r)
}

/// Step 3 over many seeds with up to `workers` candidates in flight.
/// Reports come back in seed order.
pub fn run_step3_batch(
    n: usize,
    seeds: &[u64],
    cfg: &SolverConfig,
    workers: usize,
    out_dir: &Path,
) -> Result<Vec<ExperimentReport>, ExperimentError> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<ExperimentReport, ExperimentError>>>> =
        Mutex::new((0..seeds.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, seeds.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= seeds.len() {
                    break;
                }
                let r = run_step3(n, seeds[i], cfg, out_dir).map(|r| r.report);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every seed was run"))
        .collect()
}

/// Appends one JSON line per report.
pub fn append_reports(path: &Path, reports: &[ExperimentReport]) -> std::io::Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    for r in reports {
        let line = serde_json::to_string(r).expect("report serializes");
        writeln!(f, "{line}")?;
    }
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::ConstraintKind;

    #[test]
    fn constraint_counts() {
        let (_, spec) = step1_instance(10).unwrap();
        assert_eq!(spec.constraints.len(), 20);
        assert!(spec.constraints.iter().all(|c| c.kind() == ConstraintKind::R1));
        let k = 4;
        let (g, spec) = step2_instance(k).unwrap();
        let count = |kind| spec.constraints.iter().filter(|c| c.kind() == kind).count();
        assert_eq!(count(ConstraintKind::R1), 8 * k + 1);
        assert_eq!(count(ConstraintKind::R3Forbidden), 2 * k);
        spec.validate(&g).unwrap();
        let (g, spec) = step3_instance(5, 1).unwrap();
        spec.validate(&g).unwrap();
    }

    #[test]
    fn small_runs_are_sat() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SolverConfig::builtin();
        let r = run_step1(2, &cfg, dir.path()).unwrap();
        assert_eq!(r.report.status, SolveStatus::Sat);
        assert!(r.report.layout_path.as_ref().unwrap().exists());
        assert_eq!(run_step2(1, &cfg, dir.path()).unwrap().report.status, SolveStatus::Sat);
        let batch = run_step3_batch(1, &[0, 1, 2], &cfg, 2, dir.path()).unwrap();
        assert_eq!(batch.len(), 3);
        assert!(batch.iter().all(|r| r.status == SolveStatus::Sat));
        let log = dir.path().join("reports.jsonl");
        append_reports(&log, &batch).unwrap();
        append_reports(&log, &batch[..1]).unwrap();
        assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 4);
    }
}
