//! Independent validity check of a concrete layout.
//!
//! Nothing here touches the SAT encoding: every rule is evaluated directly on
//! vertex positions and page numbers, so the checker doubles as the oracle for
//! the encoder tests.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, IndexedGraph, VertexId};
use crate::layout::{
    fundamental_cycles, spans_cross, spans_nest, Constraint, GroupMode, IncidenceScope,
    LayoutSpec, LinearLayout, OrderMode, PageRestriction, PageType, SpecError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCode {
    StackCrossing,
    QueueNesting,
    MatchingDegree,
    ForestCycle,
    R1Predecessor,
    R2Consecutive,
    R3Required,
    R3Forbidden,
    R4Same,
    R4Different,
    R5Pages,
    R6Pages,
}

/// One broken rule, with the ids that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page: Option<usize>,
    /// Index into the spec's constraint list, for constraint violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub vertices: Vec<VertexId>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub edges: Vec<EdgeId>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.code)?;
        if let Some(p) = self.page {
            write!(f, " page={p}")?;
        }
        if let Some(c) = self.constraint {
            write!(f, " constraint={c}")?;
        }
        if !self.vertices.is_empty() {
            let vs: Vec<&str> = self.vertices.iter().map(|v| v.as_str()).collect();
            write!(f, " vertices=[{}]", vs.join(","))?;
        }
        if !self.edges.is_empty() {
            let es: Vec<&str> = self.edges.iter().map(|e| e.as_str()).collect();
            write!(f, " edges=[{}]", es.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("vertex `{0}` is missing from the order")]
    MissingVertex(VertexId),
    #[error("order names unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("vertex `{0}` appears more than once in the order")]
    RepeatedVertex(VertexId),
    #[error("edge `{0}` has no page")]
    UnassignedEdge(EdgeId),
    #[error("assignment names unknown edge `{0}`")]
    UnknownEdge(EdgeId),
    #[error("edge `{edge}` is on page {page}, but the layout has {pages} pages")]
    PageOutOfRange {
        edge: EdgeId,
        page: usize,
        pages: usize,
    },
}

/// Dense view of a layout: position of each vertex and page of each edge,
/// indexed like [`IndexedGraph`].
pub(crate) struct DenseLayout {
    pub pos: Vec<usize>,
    pub page: Vec<usize>,
}

impl DenseLayout {
    fn build(
        ig: &IndexedGraph,
        spec: &LayoutSpec,
        layout: &LinearLayout,
    ) -> Result<Self, VerifyError> {
        let n = ig.vertex_count();
        let mut pos = vec![usize::MAX; n];
        for (i, v) in layout.order.iter().enumerate() {
            let idx = *ig
                .vertex_index
                .get(v)
                .ok_or_else(|| VerifyError::UnknownVertex(v.clone()))?;
            if pos[idx] != usize::MAX {
                return Err(VerifyError::RepeatedVertex(v.clone()));
            }
            pos[idx] = i;
        }
        if let Some(i) = pos.iter().position(|&p| p == usize::MAX) {
            return Err(VerifyError::MissingVertex(ig.vertices[i].clone()));
        }
        for e in layout.assignment.keys() {
            if !ig.edge_index.contains_key(e) {
                return Err(VerifyError::UnknownEdge(e.clone()));
            }
        }
        let mut page = Vec::with_capacity(ig.edge_count());
        for e in &ig.edges {
            let p = *layout
                .assignment
                .get(e)
                .ok_or_else(|| VerifyError::UnassignedEdge(e.clone()))?;
            if p >= spec.page_count() {
                return Err(VerifyError::PageOutOfRange {
                    edge: e.clone(),
                    page: p,
                    pages: spec.page_count(),
                });
            }
            page.push(p);
        }
        Ok(Self { pos, page })
    }

    fn span(&self, ig: &IndexedGraph, e: usize) -> (usize, usize) {
        let (u, v) = ig.endpoints[e];
        (self.pos[u], self.pos[v])
    }
}

/// Lists every rule the layout breaks. An empty list means the layout is valid.
pub fn verify(
    g: &Graph,
    spec: &LayoutSpec,
    layout: &LinearLayout,
) -> Result<Vec<Violation>, VerifyError> {
    spec.validate(g)?;
    let ig = g.indexed();
    let dense = DenseLayout::build(&ig, spec, layout)?;
    let mut out = Vec::new();
    page_violations(&ig, spec, &dense, &mut out);
    for (index, c) in spec.constraints.iter().enumerate() {
        constraint_violations(g, &ig, &dense, index, c, &mut out);
    }
    Ok(out)
}

fn page_violations(ig: &IndexedGraph, spec: &LayoutSpec, d: &DenseLayout, out: &mut Vec<Violation>) {
    let m = ig.edge_count();
    for (p, page) in spec.pages.iter().enumerate() {
        let on_page: Vec<usize> = (0..m).filter(|&e| d.page[e] == p).collect();
        for (i, &a) in on_page.iter().enumerate() {
            for &b in &on_page[i + 1..] {
                let (sa, sb) = (d.span(ig, a), d.span(ig, b));
                let bad = match page.kind {
                    PageType::Stack => spans_cross(sa, sb).then_some(ViolationCode::StackCrossing),
                    PageType::Queue => spans_nest(sa, sb).then_some(ViolationCode::QueueNesting),
                };
                if let Some(code) = bad {
                    out.push(Violation {
                        code,
                        page: Some(p),
                        constraint: None,
                        vertices: Vec::new(),
                        edges: vec![ig.edges[a].clone(), ig.edges[b].clone()],
                    });
                }
            }
        }
        match page.restriction {
            PageRestriction::None => {}
            PageRestriction::Matching => {
                let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &e in &on_page {
                    let (u, v) = ig.endpoints[e];
                    incident.entry(u).or_default().push(e);
                    incident.entry(v).or_default().push(e);
                }
                for (v, es) in incident.into_iter().filter(|(_, es)| es.len() > 1) {
                    out.push(Violation {
                        code: ViolationCode::MatchingDegree,
                        page: Some(p),
                        constraint: None,
                        vertices: vec![ig.vertices[v].clone()],
                        edges: es.iter().map(|&e| ig.edges[e].clone()).collect(),
                    });
                }
            }
            PageRestriction::Forest => {
                for cycle in fundamental_cycles(ig.vertex_count(), &ig.endpoints, on_page.iter().copied()) {
                    let mut edges: Vec<EdgeId> = cycle.iter().map(|&e| ig.edges[e].clone()).collect();
                    edges.sort();
                    out.push(Violation {
                        code: ViolationCode::ForestCycle,
                        page: Some(p),
                        constraint: None,
                        vertices: Vec::new(),
                        edges,
                    });
                }
            }
        }
    }
}

fn constraint_violations(
    g: &Graph,
    ig: &IndexedGraph,
    d: &DenseLayout,
    index: usize,
    c: &Constraint,
    out: &mut Vec<Violation>,
) {
    let pos = |v: &VertexId| d.pos[ig.vertex_index[v]];
    let page = |e: &EdgeId| d.page[ig.edge_index[e]];
    let violation = |code, vertices: Vec<VertexId>, edges: Vec<EdgeId>| Violation {
        code,
        page: None,
        constraint: Some(index),
        vertices,
        edges,
    };
    match c {
        Constraint::Precedes { pred, succ } => {
            if pos(pred) > pos(succ) {
                out.push(violation(
                    ViolationCode::R1Predecessor,
                    vec![pred.clone(), succ.clone()],
                    vec![],
                ));
            }
        }
        Constraint::Consecutive { u, v } => {
            if pos(u).abs_diff(pos(v)) != 1 {
                out.push(violation(
                    ViolationCode::R2Consecutive,
                    vec![u.clone(), v.clone()],
                    vec![],
                ));
            }
        }
        Constraint::Order { vertices, mode } => {
            let in_order = vertices.windows(2).all(|w| pos(&w[0]) < pos(&w[1]));
            match (mode, in_order) {
                (OrderMode::Required, false) => {
                    out.push(violation(ViolationCode::R3Required, vertices.clone(), vec![]))
                }
                (OrderMode::Forbidden, true) => {
                    out.push(violation(ViolationCode::R3Forbidden, vertices.clone(), vec![]))
                }
                _ => {}
            }
        }
        Constraint::EdgeGroup { edges, mode } => {
            let pages: Vec<usize> = edges.iter().map(page).collect();
            let ok = match mode {
                GroupMode::Same => pages.iter().all(|&p| p == pages[0]),
                GroupMode::Different => pages.iter().collect::<HashSet<_>>().len() == pages.len(),
            };
            if !ok {
                let code = match mode {
                    GroupMode::Same => ViolationCode::R4Same,
                    GroupMode::Different => ViolationCode::R4Different,
                };
                out.push(violation(code, vec![], edges.clone()));
            }
        }
        Constraint::EdgePages { edges, pages } => {
            let bad: Vec<EdgeId> = edges
                .iter()
                .filter(|e| !pages.contains(&page(e)))
                .cloned()
                .collect();
            if !bad.is_empty() {
                out.push(violation(ViolationCode::R5Pages, vec![], bad));
            }
        }
        Constraint::IncidentPages {
            vertices,
            pages,
            scope,
        } => {
            let applies = |x: &VertexId| -> bool {
                match scope {
                    IncidenceScope::All => true,
                    IncidenceScope::Between | IncidenceScope::Outside => {
                        let (a, b) = (pos(&vertices[0]), pos(&vertices[1]));
                        let (lo, hi) = (a.min(b), a.max(b));
                        let px = pos(x);
                        let strictly_inside = lo < px && px < hi;
                        let outside = px < lo || px > hi;
                        if *scope == IncidenceScope::Between {
                            strictly_inside
                        } else {
                            outside
                        }
                    }
                }
            };
            let mut bad = Vec::new();
            for (id, e) in g.edges() {
                let hit = vertices
                    .iter()
                    .filter_map(|v| e.other(v))
                    .any(applies);
                if hit && !pages.contains(&page(id)) {
                    bad.push(id.clone());
                }
            }
            if !bad.is_empty() {
                out.push(violation(ViolationCode::R6Pages, vertices.clone(), bad));
            }
        }
    }
}
