//! Simple undirected graphs with opaque string identifiers.
//!
//! Vertices and edges are keyed by the ids an editor (or a generator)
//! assigned to them, so a graph read from GraphML and written back keeps its
//! identifiers verbatim. Solver-facing code works on dense indices obtained
//! through [`Graph::indexed`], which numbers vertices and edges in
//! lexicographic id order.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use rustworkx_core::petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a vertex, unique within its graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

/// Identifier of an edge, unique within its graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(String);

macro_rules! string_id {
    ($ty:ident) => {
        impl $ty {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $ty {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $ty {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(VertexId);
string_id!(EdgeId);

/// Drawing position of a vertex. Has no effect on solving.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Endpoints of an edge. Stored as given; the edge itself is undirected.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
}

impl Edge {
    pub fn touches(&self, v: &VertexId) -> bool {
        &self.source == v || &self.target == v
    }

    /// The endpoint that is not `v`. Returns `None` if `v` is not an endpoint.
    pub fn other(&self, v: &VertexId) -> Option<&VertexId> {
        if &self.source == v {
            Some(&self.target)
        } else if &self.target == v {
            Some(&self.source)
        } else {
            None
        }
    }

    fn key(&self) -> (VertexId, VertexId) {
        if self.source <= self.target {
            (self.source.clone(), self.target.clone())
        } else {
            (self.target.clone(), self.source.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("identifiers must be non-empty")]
    EmptyId,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(EdgeId),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("edge `{0}` is a self-loop")]
    SelfLoop(EdgeId),
    #[error("edge `{edge}` duplicates edge `{existing}`")]
    DuplicateEdge { edge: EdgeId, existing: EdgeId },
}

/// A simple undirected graph.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Graph {
    vertices: BTreeMap<VertexId, Option<Point>>,
    edges: BTreeMap<EdgeId, Edge>,
    pairs: HashMap<(VertexId, VertexId), EdgeId>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from a list of vertex-id pairs. Edge ids are `u-v`.
    pub fn from_edges(edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut g = Graph::new();
        for (u, v) in edges {
            for id in [u, v] {
                if !g.contains_vertex(&VertexId::from(*id)) {
                    g.add_vertex(*id)?;
                }
            }
            g.add_edge(format!("{u}-{v}"), *u, *v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, id: impl Into<VertexId>) -> Result<(), GraphError> {
        self.insert_vertex(id.into(), None)
    }

    pub fn add_vertex_at(&mut self, id: impl Into<VertexId>, at: Point) -> Result<(), GraphError> {
        self.insert_vertex(id.into(), Some(at))
    }

    fn insert_vertex(&mut self, id: VertexId, at: Option<Point>) -> Result<(), GraphError> {
        if id.as_str().is_empty() {
            return Err(GraphError::EmptyId);
        }
        if self.vertices.contains_key(&id) {
            return Err(GraphError::DuplicateVertex(id));
        }
        self.vertices.insert(id, at);
        Ok(())
    }

    /// Sets or clears the position of an existing vertex. Returns false if the
    /// vertex does not exist.
    pub fn set_position(&mut self, v: &VertexId, at: Option<Point>) -> bool {
        match self.vertices.get_mut(v) {
            Some(slot) => {
                *slot = at;
                true
            }
            None => false,
        }
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        source: impl Into<VertexId>,
        target: impl Into<VertexId>,
    ) -> Result<(), GraphError> {
        let id = id.into();
        let edge = Edge {
            source: source.into(),
            target: target.into(),
        };
        if id.as_str().is_empty() {
            return Err(GraphError::EmptyId);
        }
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdgeId(id));
        }
        for v in [&edge.source, &edge.target] {
            if !self.vertices.contains_key(v) {
                return Err(GraphError::UnknownVertex {
                    edge: id,
                    vertex: v.clone(),
                });
            }
        }
        if edge.source == edge.target {
            return Err(GraphError::SelfLoop(id));
        }
        let key = edge.key();
        if let Some(existing) = self.pairs.get(&key) {
            return Err(GraphError::DuplicateEdge {
                edge: id,
                existing: existing.clone(),
            });
        }
        self.pairs.insert(key, id.clone());
        self.edges.insert(id, edge);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex ids in lexicographic order.
    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.keys()
    }

    pub fn vertices_with_positions(&self) -> impl Iterator<Item = (&VertexId, Option<Point>)> {
        self.vertices.iter().map(|(v, p)| (v, *p))
    }

    /// Edges in lexicographic id order.
    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &Edge)> {
        self.edges.iter()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
        self.edges.keys()
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn position(&self, v: &VertexId) -> Option<Point> {
        self.vertices.get(v).copied().flatten()
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains_key(v)
    }

    pub fn contains_edge(&self, e: &EdgeId) -> bool {
        self.edges.contains_key(e)
    }

    /// The edge joining `u` and `v`, in either orientation.
    pub fn edge_between(&self, u: &VertexId, v: &VertexId) -> Option<&EdgeId> {
        let key = if u <= v {
            (u.clone(), v.clone())
        } else {
            (v.clone(), u.clone())
        };
        self.pairs.get(&key)
    }

    /// Edges incident to `v`, in id order.
    pub fn incident_edges<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a EdgeId> + 'a {
        self.edges
            .iter()
            .filter(move |(_, e)| e.touches(v))
            .map(|(id, _)| id)
    }

    /// Dense-index view of the graph: vertices and edges numbered by id order.
    pub fn indexed(&self) -> IndexedGraph {
        let vertices: Vec<VertexId> = self.vertices.keys().cloned().collect();
        let vertex_index: HashMap<VertexId, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let edges: Vec<EdgeId> = self.edges.keys().cloned().collect();
        let endpoints = self
            .edges
            .values()
            .map(|e| (vertex_index[&e.source], vertex_index[&e.target]))
            .collect();
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        IndexedGraph {
            vertices,
            edges,
            endpoints,
            vertex_index,
            edge_index,
        }
    }

    /// True iff every pair of vertices is joined by a path. Graphs with fewer
    /// than two vertices are connected.
    pub fn is_connected(&self) -> bool {
        let ig = self.indexed();
        let n = ig.vertex_count();
        if n <= 1 {
            return true;
        }
        let adj = ig.adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == n
    }

    /// True iff the graph contains no cycle.
    pub fn is_acyclic(&self) -> bool {
        let ig = self.indexed();
        let mut uf = UnionFind::new(ig.vertex_count());
        ig.endpoints.iter().all(|&(u, v)| uf.union(u, v))
    }

    /// True iff the graph admits a planar embedding (left-right planarity test).
    pub fn is_planar(&self) -> bool {
        let ig = self.indexed();
        let n = ig.vertex_count();
        if n >= 3 && ig.edge_count() > 3 * n - 6 {
            return false;
        }
        let mut pg = UnGraph::<(), ()>::with_capacity(n, ig.edge_count());
        let nodes: Vec<_> = (0..n).map(|_| pg.add_node(())).collect();
        for &(u, v) in &ig.endpoints {
            pg.add_edge(nodes[u], nodes[v], ());
        }
        rustworkx_core::planar::is_planar(&pg)
    }
}

/// Dense-index view of a [`Graph`].
#[derive(Clone, Debug)]
pub struct IndexedGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    /// Endpoints of each edge as vertex indices, in stored orientation.
    pub endpoints: Vec<(usize, usize)>,
    pub vertex_index: HashMap<VertexId, usize>,
    pub edge_index: HashMap<EdgeId, usize>,
}

impl IndexedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(u, v) in &self.endpoints {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// True iff edges `a` and `b` have no endpoint in common.
    pub fn independent(&self, a: usize, b: usize) -> bool {
        let (u, v) = self.endpoints[a];
        let (w, z) = self.endpoints[b];
        u != w && u != z && v != w && v != z
    }
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// JSON shape of a graph: `{"vertices": [{"id", "x"?, "y"?}], "edges": [{"id", "source", "target"}]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    id: VertexId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: EdgeId,
    source: VertexId,
    target: VertexId,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            vertices: self
                .vertices
                .iter()
                .map(|(id, p)| VertexJson {
                    id: id.clone(),
                    x: p.map(|p| p.x),
                    y: p.map(|p| p.y),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(id, e)| EdgeJson {
                    id: id.clone(),
                    source: e.source.clone(),
                    target: e.target.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = GraphJson::deserialize(d)?;
        let mut g = Graph::new();
        for v in raw.vertices {
            let res = match (v.x, v.y) {
                (Some(x), Some(y)) => g.add_vertex_at(v.id, Point::new(x, y)),
                (None, None) => g.add_vertex(v.id),
                _ => return Err(D::Error::custom(format!("vertex `{}` has only one coordinate", v.id))),
            };
            res.map_err(D::Error::custom)?;
        }
        for e in raw.edges {
            g.add_edge(e.id, e.source, e.target).map_err(D::Error::custom)?;
        }
        Ok(g)
    }
}
