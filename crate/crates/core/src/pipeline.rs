//! Graph + spec in, verified layout out.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode::{decode, encode, DecodeError, EncodeError};
use crate::graph::Graph;
use crate::layout::{fundamental_cycles, LayoutSpec, LinearLayout, PageRestriction};
use crate::solver::{run_backend, Budget, CancelToken, Interrupt, SolveStats, SolveStatus, SolverConfig, SolverError, Verdict};
use crate::verify::{verify, Violation, VerifyError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutOutcome {
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<LinearLayout>,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("could not decode solver model: {0}")]
    Decode(#[from] DecodeError),
    #[error("decoded layout failed verification: {0}")]
    Verify(#[from] VerifyError),
    #[error("decoded layout violates {} rule(s), first: {}", .0.len(), .0[0])]
    Unsound(Vec<Violation>),
}

pub fn compute_layout(g: &Graph, spec: &LayoutSpec, config: &SolverConfig) -> Result<LayoutOutcome, PipelineError> {
    compute_layout_cancellable(g, spec, config, &CancelToken::new())
}

/// Encodes once, then solves repeatedly: each round takes the cycles lying
/// on forest pages, widens them to every cycle among the same vertices, and
/// forbids each of those on every forest page. The returned layout has
/// passed [`verify`].
pub fn compute_layout_cancellable(
    g: &Graph,
    spec: &LayoutSpec,
    config: &SolverConfig,
    cancel: &CancelToken,
) -> Result<LayoutOutcome, PipelineError> {
    let start = Instant::now();
    let budget = Budget {
        deadline: start + config.time_limit,
        cancel,
    };
    let (mut cnf, vm) = encode(g, spec)?;
    let forest_pages: Vec<usize> = (0..spec.page_count())
        .filter(|&p| spec.pages[p].restriction == PageRestriction::Forest)
        .collect();
    let ig = g.indexed();
    let mut stats = SolveStats::default();
    let finish = |mut stats: SolveStats, status, layout| {
        stats.wall_ms = start.elapsed().as_millis() as u64;
        LayoutOutcome { status, layout, stats }
    };

    loop {
        if stats.rounds >= config.max_rounds.max(1) {
            return Ok(finish(stats, SolveStatus::Unknown, None));
        }
        stats.rounds += 1;
        let model = match run_backend(&config.backend, &cnf, &budget)? {
            Verdict::Sat(m) => m,
            Verdict::Unsat => return Ok(finish(stats, SolveStatus::Unsat, None)),
            Verdict::Stopped(why) => {
                stats.cancelled = why == Interrupt::Cancelled;
                return Ok(finish(stats, SolveStatus::Unknown, None));
            }
        };
        let layout = decode(&model, &vm)?;

        let mut cycles = BTreeSet::new();
        for &p in &forest_pages {
            let on_page: Vec<usize> = (0..ig.edge_count()).filter(|&e| layout.assignment[&ig.edges[e]] == p).collect();
            let basis = fundamental_cycles(ig.vertex_count(), &ig.endpoints, on_page.iter().copied());
            if basis.is_empty() {
                continue;
            }
            // Every cycle of the graph induced on the found cycles' vertices
            // and their neighbours. Those would otherwise surface one round
            // at a time as the solver shuffles edges between pages.
            let mut span = vec![false; ig.vertex_count()];
            for &e in basis.iter().flatten() {
                let (u, v) = ig.endpoints[e];
                span[u] = true;
                span[v] = true;
            }
            let core = span.clone();
            for &(u, v) in &ig.endpoints {
                if core[u] || core[v] {
                    span[u] = true;
                    span[v] = true;
                }
            }
            let induced: Vec<usize> =
                (0..ig.edge_count()).filter(|&e| span[ig.endpoints[e].0] && span[ig.endpoints[e].1]).collect();
            let mut found = simple_cycles(ig.vertex_count(), &ig.endpoints, &induced, CYCLES_PER_ROUND);
            found.extend(basis);
            cycles.extend(found.into_iter().map(|mut c| {
                c.sort_unstable();
                c
            }));
        }
        if !cycles.is_empty() {
            for cycle in &cycles {
                for &p in &forest_pages {
                    let clause: Vec<i32> = cycle.iter().map(|&e| -vm.phi(e, p)).collect();
                    cnf.add_clause(&clause);
                    stats.clauses_added += 1;
                }
            }
            continue;
        }

        let violations = verify(g, spec, &layout)?;
        if !violations.is_empty() {
            return Err(PipelineError::Unsound(violations));
        }
        return Ok(finish(stats, SolveStatus::Sat, Some(layout)));
    }
}

/// Bound on the cycles enumerated from one page per round.
const CYCLES_PER_ROUND: usize = 512;

/// Simple cycles (as edge indices) of the subgraph formed by `edges`, at most
/// `cap` of them. Each cycle is reported once, from its smallest vertex.
fn simple_cycles(n: usize, endpoints: &[(usize, usize)], edges: &[usize], cap: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &e in edges {
        let (u, v) = endpoints[e];
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path_edges = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn walk(
        start: usize,
        at: usize,
        first: usize,
        adj: &[Vec<(usize, usize)>],
        on_path: &mut [bool],
        path_edges: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        for &(w, e) in &adj[at] {
            if out.len() >= cap {
                return;
            }
            if w == start && path_edges.len() >= 2 && at > first {
                // Closing edge; `at > first` keeps one of the two directions.
                let mut c = path_edges.clone();
                c.push(e);
                out.push(c);
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path_edges.push(e);
                let first = if path_edges.len() == 1 { w } else { first };
                walk(start, w, first, adj, on_path, path_edges, out, cap);
                path_edges.pop();
                on_path[w] = false;
            }
        }
    }
    for s in 0..n {
        on_path[s] = true;
        walk(s, s, usize::MAX, &adj, &mut on_path, &mut path_edges, &mut out, cap);
        on_path[s] = false;
    }
    out
}
