//! Layout specifications, constraints and concrete linear layouts.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PageType {
    Stack,
    Queue,
}

impl std::str::FromStr for PageType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "stack" | "s" => Ok(PageType::Stack),
            "queue" | "q" => Ok(PageType::Queue),
            other => Err(format!("unknown page type `{other}` (expected stack or queue)")),
        }
    }
}

/// Structural restriction on the subgraph formed by one page's edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PageRestriction {
    #[default]
    None,
    /// Page edges are pairwise non-adjacent.
    Matching,
    /// Page edges form an acyclic subgraph.
    Forest,
}

impl std::str::FromStr for PageRestriction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "none" => Ok(PageRestriction::None),
            "matching" => Ok(PageRestriction::Matching),
            "forest" | "tree" => Ok(PageRestriction::Forest),
            other => Err(format!(
                "unknown restriction `{other}` (expected none, matching or forest)"
            )),
        }
    }
}

/// One page of a layout. Its index is its position in [`LayoutSpec::pages`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Page {
    #[serde(rename = "type")]
    pub kind: PageType,
    #[serde(default)]
    pub restriction: PageRestriction,
}

impl Page {
    pub fn stack() -> Self {
        Self {
            kind: PageType::Stack,
            restriction: PageRestriction::None,
        }
    }

    pub fn queue() -> Self {
        Self {
            kind: PageType::Queue,
            restriction: PageRestriction::None,
        }
    }

    pub fn restricted(mut self, restriction: PageRestriction) -> Self {
        self.restriction = restriction;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderMode {
    Required,
    Forbidden,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupMode {
    Same,
    Different,
}

/// Which incident edges an R6 restriction applies to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncidenceScope {
    /// Every edge incident to a listed vertex.
    #[default]
    All,
    /// Edges from either of the two listed vertices to a vertex strictly
    /// between them in the order.
    Between,
    /// Edges from either of the two listed vertices to a vertex outside the
    /// closed interval they span.
    Outside,
}

/// A user restriction on the layout (R1 to R6).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Constraint {
    /// `pred` precedes `succ`.
    #[serde(rename = "R1")]
    Precedes { pred: VertexId, succ: VertexId },
    /// `u` and `v` are adjacent in the order, either way round.
    #[serde(rename = "R2")]
    Consecutive { u: VertexId, v: VertexId },
    /// The listed vertices appear (or must not appear) in exactly this relative order.
    #[serde(rename = "R3")]
    Order {
        vertices: Vec<VertexId>,
        mode: OrderMode,
    },
    /// The listed edges share one page, or lie on pairwise different pages.
    #[serde(rename = "R4")]
    EdgeGroup { edges: Vec<EdgeId>, mode: GroupMode },
    /// Every listed edge goes to one of the allowed pages.
    #[serde(rename = "R5")]
    EdgePages {
        edges: Vec<EdgeId>,
        pages: BTreeSet<usize>,
    },
    /// Edges incident to the listed vertices go to one of the allowed pages.
    #[serde(rename = "R6")]
    IncidentPages {
        vertices: Vec<VertexId>,
        pages: BTreeSet<usize>,
        #[serde(default)]
        scope: IncidenceScope,
    },
}

/// Finer-grained constraint classification, used for violation codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    R1,
    R2,
    R3Required,
    R3Forbidden,
    R4Same,
    R4Different,
    R5,
    R6,
}

impl Constraint {
    pub fn precedes(pred: impl Into<VertexId>, succ: impl Into<VertexId>) -> Self {
        Constraint::Precedes {
            pred: pred.into(),
            succ: succ.into(),
        }
    }

    pub fn consecutive(u: impl Into<VertexId>, v: impl Into<VertexId>) -> Self {
        Constraint::Consecutive {
            u: u.into(),
            v: v.into(),
        }
    }

    pub fn required_order<V: Into<VertexId>>(vertices: impl IntoIterator<Item = V>) -> Self {
        Constraint::Order {
            vertices: vertices.into_iter().map(Into::into).collect(),
            mode: OrderMode::Required,
        }
    }

    pub fn forbidden_order<V: Into<VertexId>>(vertices: impl IntoIterator<Item = V>) -> Self {
        Constraint::Order {
            vertices: vertices.into_iter().map(Into::into).collect(),
            mode: OrderMode::Forbidden,
        }
    }

    pub fn same_page<E: Into<EdgeId>>(edges: impl IntoIterator<Item = E>) -> Self {
        Constraint::EdgeGroup {
            edges: edges.into_iter().map(Into::into).collect(),
            mode: GroupMode::Same,
        }
    }

    pub fn different_pages<E: Into<EdgeId>>(edges: impl IntoIterator<Item = E>) -> Self {
        Constraint::EdgeGroup {
            edges: edges.into_iter().map(Into::into).collect(),
            mode: GroupMode::Different,
        }
    }

    pub fn edge_pages<E: Into<EdgeId>>(
        edges: impl IntoIterator<Item = E>,
        pages: impl IntoIterator<Item = usize>,
    ) -> Self {
        Constraint::EdgePages {
            edges: edges.into_iter().map(Into::into).collect(),
            pages: pages.into_iter().collect(),
        }
    }

    pub fn incident_pages<V: Into<VertexId>>(
        vertices: impl IntoIterator<Item = V>,
        pages: impl IntoIterator<Item = usize>,
        scope: IncidenceScope,
    ) -> Self {
        Constraint::IncidentPages {
            vertices: vertices.into_iter().map(Into::into).collect(),
            pages: pages.into_iter().collect(),
            scope,
        }
    }

    pub fn kind(&self) -> ConstraintKind {
        match self {
            Constraint::Precedes { .. } => ConstraintKind::R1,
            Constraint::Consecutive { .. } => ConstraintKind::R2,
            Constraint::Order {
                mode: OrderMode::Required,
                ..
            } => ConstraintKind::R3Required,
            Constraint::Order {
                mode: OrderMode::Forbidden,
                ..
            } => ConstraintKind::R3Forbidden,
            Constraint::EdgeGroup {
                mode: GroupMode::Same,
                ..
            } => ConstraintKind::R4Same,
            Constraint::EdgeGroup {
                mode: GroupMode::Different,
                ..
            } => ConstraintKind::R4Different,
            Constraint::EdgePages { .. } => ConstraintKind::R5,
            Constraint::IncidentPages { .. } => ConstraintKind::R6,
        }
    }

    /// Vertex ids named by the constraint.
    pub fn vertex_refs(&self) -> Vec<&VertexId> {
        match self {
            Constraint::Precedes { pred, succ } => vec![pred, succ],
            Constraint::Consecutive { u, v } => vec![u, v],
            Constraint::Order { vertices, .. } | Constraint::IncidentPages { vertices, .. } => {
                vertices.iter().collect()
            }
            Constraint::EdgeGroup { .. } | Constraint::EdgePages { .. } => Vec::new(),
        }
    }

    /// Edge ids named by the constraint.
    pub fn edge_refs(&self) -> Vec<&EdgeId> {
        match self {
            Constraint::EdgeGroup { edges, .. } | Constraint::EdgePages { edges, .. } => {
                edges.iter().collect()
            }
            _ => Vec::new(),
        }
    }

    /// Checks the constraint's shape against a graph and a page count.
    pub fn validate(&self, g: &Graph, page_count: usize) -> Result<(), ConstraintError> {
        for v in self.vertex_refs() {
            if !g.contains_vertex(v) {
                return Err(ConstraintError::UnknownVertex(v.clone()));
            }
        }
        for e in self.edge_refs() {
            if !g.contains_edge(e) {
                return Err(ConstraintError::UnknownEdge(e.clone()));
            }
        }
        let distinct_vertices = |vs: &[&VertexId]| vs.iter().collect::<HashSet<_>>().len() == vs.len();
        match self {
            Constraint::Precedes { pred: u, succ: v } | Constraint::Consecutive { u, v } => {
                if u == v {
                    return Err(ConstraintError::RepeatedVertex(u.clone()));
                }
            }
            Constraint::Order { vertices, .. } => {
                if vertices.len() < 2 {
                    return Err(ConstraintError::TooShort { min: 2, got: vertices.len() });
                }
                if !distinct_vertices(&self.vertex_refs()) {
                    return Err(ConstraintError::RepeatedVertex(first_repeat(vertices)));
                }
            }
            Constraint::EdgeGroup { edges, mode } => {
                if edges.len() < 2 {
                    return Err(ConstraintError::TooShort { min: 2, got: edges.len() });
                }
                if edges.iter().collect::<HashSet<_>>().len() != edges.len() {
                    return Err(ConstraintError::RepeatedEdge(first_repeat(edges)));
                }
                if *mode == GroupMode::Different && edges.len() > page_count {
                    return Err(ConstraintError::TooManyForDifferentPages {
                        edges: edges.len(),
                        pages: page_count,
                    });
                }
            }
            Constraint::EdgePages { edges, pages } => {
                if edges.is_empty() {
                    return Err(ConstraintError::TooShort { min: 1, got: 0 });
                }
                check_page_set(pages, page_count)?;
            }
            Constraint::IncidentPages {
                vertices,
                pages,
                scope,
            } => {
                if vertices.is_empty() {
                    return Err(ConstraintError::TooShort { min: 1, got: 0 });
                }
                if !distinct_vertices(&self.vertex_refs()) {
                    return Err(ConstraintError::RepeatedVertex(first_repeat(vertices)));
                }
                if *scope != IncidenceScope::All && vertices.len() != 2 {
                    return Err(ConstraintError::ScopeNeedsTwoVertices(vertices.len()));
                }
                check_page_set(pages, page_count)?;
            }
        }
        Ok(())
    }
}

fn first_repeat<T: Clone + Eq + std::hash::Hash>(items: &[T]) -> T {
    let mut seen = HashSet::new();
    items
        .iter()
        .find(|x| !seen.insert(*x))
        .cloned()
        .expect("caller established a repeat exists")
}

fn check_page_set(pages: &BTreeSet<usize>, page_count: usize) -> Result<(), ConstraintError> {
    if pages.is_empty() {
        return Err(ConstraintError::EmptyPageSet);
    }
    if let Some(&p) = pages.iter().find(|&&p| p >= page_count) {
        return Err(ConstraintError::PageOutOfRange { page: p, pages: page_count });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
    #[error("vertex `{0}` is listed more than once")]
    RepeatedVertex(VertexId),
    #[error("edge `{0}` is listed more than once")]
    RepeatedEdge(EdgeId),
    #[error("needs at least {min} entries, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("{edges} edges cannot lie on pairwise different pages with only {pages} pages")]
    TooManyForDifferentPages { edges: usize, pages: usize },
    #[error("allowed page set is empty")]
    EmptyPageSet,
    #[error("page {page} does not exist (layout has {pages} pages)")]
    PageOutOfRange { page: usize, pages: usize },
    #[error("scope between/outside needs exactly two vertices, got {0}")]
    ScopeNeedsTwoVertices(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("a layout needs at least one page")]
    NoPages,
    #[error("constraint {index} ({kind:?}): {source}")]
    Constraint {
        index: usize,
        kind: ConstraintKind,
        #[source]
        source: ConstraintError,
    },
}

/// Page configuration plus constraints for a layout computation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutSpec {
    pub pages: Vec<Page>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
}

impl LayoutSpec {
    pub fn new(pages: Vec<Page>) -> Self {
        Self {
            pages,
            constraints: Vec::new(),
        }
    }

    pub fn stacks(k: usize) -> Self {
        Self::new(vec![Page::stack(); k])
    }

    pub fn queues(k: usize) -> Self {
        Self::new(vec![Page::queue(); k])
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_constraints(mut self, cs: impl IntoIterator<Item = Constraint>) -> Self {
        self.constraints.extend(cs);
        self
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    pub fn validate(&self, g: &Graph) -> Result<(), SpecError> {
        if self.pages.is_empty() {
            return Err(SpecError::NoPages);
        }
        for (index, c) in self.constraints.iter().enumerate() {
            c.validate(g, self.pages.len())
                .map_err(|source| SpecError::Constraint { index, kind: c.kind(), source })?;
        }
        Ok(())
    }
}

/// A vertex order plus an edge-to-page assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearLayout {
    /// Vertices from first to last.
    pub order: Vec<VertexId>,
    pub assignment: BTreeMap<EdgeId, usize>,
}

impl LinearLayout {
    /// Position lookup (0-based) for the order.
    pub fn sigma(&self) -> VertexOrder {
        VertexOrder::from_order(&self.order)
    }
}

/// Position of each vertex in a linear order, 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexOrder(HashMap<VertexId, usize>);

impl VertexOrder {
    pub fn from_order(order: &[VertexId]) -> Self {
        Self(order.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect())
    }

    pub fn position(&self, v: &VertexId) -> Option<usize> {
        self.0.get(v).copied()
    }

    /// True iff `a` comes before `b`. Unknown vertices compare false.
    pub fn before(&self, a: &VertexId, b: &VertexId) -> bool {
        matches!((self.position(a), self.position(b)), (Some(x), Some(y)) if x < y)
    }

    fn span(&self, e: &Edge) -> Option<(usize, usize)> {
        Some((self.position(&e.source)?, self.position(&e.target)?))
    }
}

fn oriented((a, b): (usize, usize)) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn pairwise_distinct((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    a != c && a != d && b != c && b != d
}

/// True iff the two position intervals interleave. Intervals sharing an
/// endpoint never cross.
pub fn spans_cross(e: (usize, usize), f: (usize, usize)) -> bool {
    if !pairwise_distinct(e, f) {
        return false;
    }
    let ((u, v), (w, z)) = (oriented(e), oriented(f));
    (u < w && w < v && v < z) || (w < u && u < z && z < v)
}

/// True iff one position interval strictly contains the other. Intervals
/// sharing an endpoint never nest.
pub fn spans_nest(e: (usize, usize), f: (usize, usize)) -> bool {
    if !pairwise_distinct(e, f) {
        return false;
    }
    let ((u, v), (w, z)) = (oriented(e), oriented(f));
    (u < w && z < v) || (w < u && v < z)
}

/// True iff edges `e` and `f` cross under `sigma`.
pub fn crosses(e: &Edge, f: &Edge, sigma: &VertexOrder) -> bool {
    match (sigma.span(e), sigma.span(f)) {
        (Some(a), Some(b)) => spans_cross(a, b),
        _ => false,
    }
}

/// True iff edges `e` and `f` nest under `sigma`.
pub fn nests(e: &Edge, f: &Edge, sigma: &VertexOrder) -> bool {
    match (sigma.span(e), sigma.span(f)) {
        (Some(a), Some(b)) => spans_nest(a, b),
        _ => false,
    }
}

/// Fundamental cycles of the subgraph formed by `edges` (indices into
/// `endpoints`): one cycle per edge that closes a cycle against the spanning
/// forest grown from the preceding edges. Each cycle lists edge indices.
pub(crate) fn fundamental_cycles(
    vertex_count: usize,
    endpoints: &[(usize, usize)],
    edges: impl IntoIterator<Item = usize>,
) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
    let mut uf = crate::graph::UnionFind::new(vertex_count);
    let mut cycles = Vec::new();
    for e in edges {
        let (u, v) = endpoints[e];
        if uf.union(u, v) {
            adj[u].push((v, e));
            adj[v].push((u, e));
            continue;
        }
        // Path from u to v in the forest.
        let mut via: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut stack = vec![u];
        via.insert(u, (u, usize::MAX));
        while let Some(x) = stack.pop() {
            if x == v {
                break;
            }
            for &(y, edge) in &adj[x] {
                if let std::collections::hash_map::Entry::Vacant(slot) = via.entry(y) {
                    slot.insert((x, edge));
                    stack.push(y);
                }
            }
        }
        let mut cycle = vec![e];
        let mut x = v;
        while x != u {
            let (prev, edge) = via[&x];
            cycle.push(edge);
            x = prev;
        }
        cycles.push(cycle);
    }
    cycles
}
