//! Exhaustive layout search for small graphs.
//!
//! Tries every vertex order and backtracks over page assignments. Shares no
//! code with the SAT route beyond the crossing/nesting predicates, which makes
//! it usable as an equivalence oracle for the encoder.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, IndexedGraph};
use crate::layout::{
    spans_cross, spans_nest, Constraint, GroupMode, IncidenceScope, LayoutSpec, LinearLayout,
    OrderMode, PageRestriction, PageType, SpecError,
};

pub const MAX_VERTICES: usize = 8;
pub const MAX_PAGES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteForceError {
    #[error("brute force is limited to {MAX_VERTICES} vertices and {MAX_PAGES} pages (got {vertices} vertices, {pages} pages)")]
    TooLarge { vertices: usize, pages: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

enum OrderRule {
    Before(usize, usize),
    Adjacent(usize, usize),
    Chain(Vec<usize>, OrderMode),
}

enum PageRule {
    Same(Vec<usize>),
    Different(Vec<usize>),
    Allowed(Vec<usize>, u32),
    Incident(Vec<usize>, u32, IncidenceScope),
}

/// Finds some valid layout, or `None` if there is none.
pub fn brute_force_solve(g: &Graph, spec: &LayoutSpec) -> Result<Option<LinearLayout>, BruteForceError> {
    spec.validate(g)?;
    let n = g.vertex_count();
    if n > MAX_VERTICES || spec.page_count() > MAX_PAGES {
        return Err(BruteForceError::TooLarge {
            vertices: n,
            pages: spec.page_count(),
        });
    }
    let ig = g.indexed();
    let (order_rules, page_rules) = compile(&ig, spec);
    let mut search = Search {
        ig: &ig,
        spec,
        page_rules: &page_rules,
        pos: vec![0; n],
        page: vec![usize::MAX; ig.edge_count()],
        allowed: vec![0; ig.edge_count()],
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let found = permute(&mut perm, 0, &mut |perm| {
        for (i, &v) in perm.iter().enumerate() {
            search.pos[v] = i;
        }
        if !order_rules.iter().all(|r| order_holds(r, &search.pos)) {
            return false;
        }
        search.prepare_allowed();
        search.assign(0)
    });
    Ok(found.then(|| LinearLayout {
        order: perm.iter().map(|&v| ig.vertices[v].clone()).collect(),
        assignment: ig
            .edges
            .iter()
            .cloned()
            .zip(search.page.iter().copied())
            .collect::<BTreeMap<_, _>>(),
    }))
}

fn compile(ig: &IndexedGraph, spec: &LayoutSpec) -> (Vec<OrderRule>, Vec<PageRule>) {
    let v = |id| ig.vertex_index[id];
    let e = |id| ig.edge_index[id];
    let mask = |pages: &std::collections::BTreeSet<usize>| pages.iter().fold(0u32, |m, &p| m | 1 << p);
    let mut order_rules = Vec::new();
    let mut page_rules = Vec::new();
    for c in &spec.constraints {
        match c {
            Constraint::Precedes { pred, succ } => order_rules.push(OrderRule::Before(v(pred), v(succ))),
            Constraint::Consecutive { u, v: w } => order_rules.push(OrderRule::Adjacent(v(u), v(w))),
            Constraint::Order { vertices, mode } => {
                order_rules.push(OrderRule::Chain(vertices.iter().map(v).collect(), *mode))
            }
            Constraint::EdgeGroup { edges, mode } => {
                let es = edges.iter().map(e).collect();
                page_rules.push(match mode {
                    GroupMode::Same => PageRule::Same(es),
                    GroupMode::Different => PageRule::Different(es),
                });
            }
            Constraint::EdgePages { edges, pages } => {
                page_rules.push(PageRule::Allowed(edges.iter().map(e).collect(), mask(pages)))
            }
            Constraint::IncidentPages { vertices, pages, scope } => page_rules.push(PageRule::Incident(
                vertices.iter().map(v).collect(),
                mask(pages),
                *scope,
            )),
        }
    }
    (order_rules, page_rules)
}

fn order_holds(rule: &OrderRule, pos: &[usize]) -> bool {
    match rule {
        OrderRule::Before(a, b) => pos[*a] < pos[*b],
        OrderRule::Adjacent(a, b) => pos[*a].abs_diff(pos[*b]) == 1,
        OrderRule::Chain(vs, mode) => {
            let in_order = vs.windows(2).all(|w| pos[w[0]] < pos[w[1]]);
            in_order == (*mode == OrderMode::Required)
        }
    }
}

/// Swap-based permutation walk; stops at the first permutation
/// for which `visit` returns true, leaving it in `perm`.
fn permute(perm: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == perm.len() {
        return visit(perm);
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        if permute(perm, k + 1, visit) {
            return true;
        }
        perm.swap(k, i);
    }
    false
}

struct Search<'a> {
    ig: &'a IndexedGraph,
    spec: &'a LayoutSpec,
    page_rules: &'a [PageRule],
    pos: Vec<usize>,
    page: Vec<usize>,
    /// Bitmask of pages each edge may use under the current order.
    allowed: Vec<u32>,
}

impl Search<'_> {
    fn prepare_allowed(&mut self) {
        let all = (1u32 << self.spec.page_count()) - 1;
        self.allowed.iter_mut().for_each(|m| *m = all);
        for rule in self.page_rules {
            match rule {
                PageRule::Allowed(es, mask) => {
                    for &e in es {
                        self.allowed[e] &= mask;
                    }
                }
                PageRule::Incident(vs, mask, scope) => {
                    for (e, &(a, b)) in self.ig.endpoints.iter().enumerate() {
                        let hit = vs.iter().any(|&v| {
                            let other = if a == v {
                                b
                            } else if b == v {
                                a
                            } else {
                                return false;
                            };
                            match scope {
                                IncidenceScope::All => true,
                                _ => {
                                    let (lo, hi) = {
                                        let (p, q) = (self.pos[vs[0]], self.pos[vs[1]]);
                                        (p.min(q), p.max(q))
                                    };
                                    let x = self.pos[other];
                                    if *scope == IncidenceScope::Between {
                                        lo < x && x < hi
                                    } else {
                                        x < lo || x > hi
                                    }
                                }
                            }
                        });
                        if hit {
                            self.allowed[e] &= mask;
                        }
                    }
                }
                _ => {}
            }
        }
    }

    fn span(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.ig.endpoints[e];
        (self.pos[u], self.pos[v])
    }

    fn assign(&mut self, e: usize) -> bool {
        if e == self.ig.edge_count() {
            return true;
        }
        for p in 0..self.spec.page_count() {
            if self.allowed[e] & (1 << p) != 0 && self.fits(e, p) {
                self.page[e] = p;
                if self.assign(e + 1) {
                    return true;
                }
            }
        }
        self.page[e] = usize::MAX;
        false
    }

    /// Can edge `e` go on page `p`, given the pages of edges `0..e`?
    fn fits(&self, e: usize, p: usize) -> bool {
        let page = self.spec.pages[p];
        let se = self.span(e);
        for f in 0..e {
            if self.page[f] != p {
                continue;
            }
            let sf = self.span(f);
            let clash = match page.kind {
                PageType::Stack => spans_cross(se, sf),
                PageType::Queue => spans_nest(se, sf),
            };
            if clash || (page.restriction == PageRestriction::Matching && !self.ig.independent(e, f)) {
                return false;
            }
        }
        if page.restriction == PageRestriction::Forest && self.closes_cycle(e, p) {
            return false;
        }
        self.page_rules.iter().all(|rule| match rule {
            PageRule::Same(es) if es.contains(&e) => es
                .iter()
                .all(|&f| f >= e || !es.contains(&f) || self.page[f] == p),
            PageRule::Different(es) if es.contains(&e) => es.iter().all(|&f| f >= e || self.page[f] != p),
            _ => true,
        })
    }

    fn closes_cycle(&self, e: usize, p: usize) -> bool {
        let (start, goal) = self.ig.endpoints[e];
        let mut seen = vec![false; self.ig.vertex_count()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            if x == goal {
                return true;
            }
            for f in 0..e {
                if self.page[f] != p {
                    continue;
                }
                let (a, b) = self.ig.endpoints[f];
                let y = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }
}
