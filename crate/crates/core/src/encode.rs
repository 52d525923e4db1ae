//! CNF encoding of linear layouts.
//!
//! Three variable families, numbered in this order:
//!
//! * `sigma(u, v)`: one variable per unordered vertex pair `u < v` (lexicographic
//!   id order), true iff `u` precedes `v`; the reverse direction is its negation.
//! * `phi(e, p)`: edge `e` is on page `p`.
//! * `chi(e, f)`: one variable per unordered edge pair, true iff both edges share
//!   a page.
//!
//! so an instance over `n` vertices, `m` edges and `p` pages has exactly
//! `n(n-1)/2 + p*m + m(m-1)/2` variables. The forest page restriction is not
//! encoded here; [`crate::pipeline`] enforces it by adding blocking clauses.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, IndexedGraph, VertexId};
use crate::layout::{
    Constraint, GroupMode, IncidenceScope, LayoutSpec, LinearLayout, OrderMode, PageRestriction,
    PageType, SpecError,
};

pub type Lit = i32;

/// A clause set over variables `1..=variable_count`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfInstance {
    variable_count: u32,
    lits: Vec<Lit>,
    /// `ends[i]` is one past the last literal of clause `i`.
    ends: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {clause} contains literal {lit} outside 1..={vars}")]
    LiteralOutOfRange { clause: usize, lit: Lit, vars: u32 },
}

impl CnfInstance {
    pub fn new(variable_count: u32) -> Self {
        Self {
            variable_count,
            ..Self::default()
        }
    }

    /// Builds an instance from explicit clauses, checking literal ranges.
    pub fn from_clauses(variable_count: u32, clauses: &[Vec<Lit>]) -> Result<Self, CnfError> {
        let mut cnf = Self::new(variable_count);
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(CnfError::EmptyClause(i));
            }
            if let Some(&lit) = c
                .iter()
                .find(|l| **l == 0 || l.unsigned_abs() > variable_count)
            {
                return Err(CnfError::LiteralOutOfRange {
                    clause: i,
                    lit,
                    vars: variable_count,
                });
            }
            cnf.add_clause(c);
        }
        Ok(cnf)
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn clause_count(&self) -> usize {
        self.ends.len()
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        (0..self.ends.len()).map(move |i| self.clause(i))
    }

    pub fn clause(&self, i: usize) -> &[Lit] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.lits[start..self.ends[i]]
    }

    /// Appends a clause, dropping repeated literals. Tautologies are skipped.
    ///
    /// Panics on an empty clause or an out-of-range literal.
    pub fn add_clause(&mut self, clause: &[Lit]) {
        assert!(!clause.is_empty(), "empty clause");
        let start = self.lits.len();
        for &lit in clause {
            assert!(
                lit != 0 && lit.unsigned_abs() <= self.variable_count,
                "literal {lit} out of range 1..={}",
                self.variable_count
            );
            let current = &self.lits[start..];
            if current.contains(&-lit) {
                self.lits.truncate(start);
                return;
            }
            if !current.contains(&lit) {
                self.lits.push(lit);
            }
        }
        self.ends.push(self.lits.len());
    }

    /// Index of the first clause not satisfied by `model`, if any.
    pub fn first_falsified(&self, model: &Model) -> Option<usize> {
        (0..self.clause_count()).find(|&i| !self.clause(i).iter().any(|&l| model.lit(l)))
    }

    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "p cnf {} {}", self.variable_count, self.clause_count())?;
        for c in self.clauses() {
            for l in c {
                write!(out, "{l} ")?;
            }
            out.write_all(b"0\n")?;
        }
        out.flush()
    }
}

/// DIMACS CNF text for `c`.
pub fn emit_dimacs(c: &CnfInstance) -> Vec<u8> {
    let mut out = Vec::new();
    c.write_dimacs(&mut out).expect("writing to a Vec cannot fail");
    out
}

/// Truth assignment to variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    /// Builds a model from signed literals (as in a solver's `v` lines).
    /// Unmentioned variables are false.
    pub fn from_literals(variable_count: u32, lits: &[Lit]) -> Self {
        let mut values = vec![false; variable_count as usize];
        for &l in lits {
            let v = l.unsigned_abs() as usize;
            if (1..=values.len()).contains(&v) {
                values[v - 1] = l > 0;
            }
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.value(l.unsigned_abs()) == (l > 0)
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// Numbering of the sigma, phi and chi variables for one encoded instance.
#[derive(Clone, Debug)]
pub struct VarMap {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    pages: usize,
}

impl VarMap {
    fn new(ig: &IndexedGraph, pages: usize) -> Self {
        Self {
            vertices: ig.vertices.clone(),
            edges: ig.edges.clone(),
            pages,
        }
    }

    fn n(&self) -> usize {
        self.vertices.len()
    }

    fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn sigma_count(&self) -> usize {
        self.n() * self.n().saturating_sub(1) / 2
    }

    pub fn phi_count(&self) -> usize {
        self.pages * self.m()
    }

    pub fn chi_count(&self) -> usize {
        self.m() * self.m().saturating_sub(1) / 2
    }

    pub fn variable_count(&self) -> u32 {
        (self.sigma_count() + self.phi_count() + self.chi_count()) as u32
    }

    fn pair_offset(i: usize, j: usize, size: usize) -> usize {
        debug_assert!(i < j && j < size);
        i * size - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Literal for "vertex `i` precedes vertex `j`" (dense indices, `i != j`).
    pub fn sigma(&self, i: usize, j: usize) -> Lit {
        assert_ne!(i, j);
        if i < j {
            (Self::pair_offset(i, j, self.n()) + 1) as Lit
        } else {
            -self.sigma(j, i)
        }
    }

    /// Variable for "edge `e` is on page `p`".
    pub fn phi(&self, e: usize, p: usize) -> Lit {
        debug_assert!(e < self.m() && p < self.pages);
        (self.sigma_count() + e * self.pages + p + 1) as Lit
    }

    /// Variable for "edges `a` and `b` share a page" (`a != b`, either order).
    pub fn chi(&self, a: usize, b: usize) -> Lit {
        assert_ne!(a, b);
        let (a, b) = (a.min(b), a.max(b));
        (self.sigma_count() + self.phi_count() + Self::pair_offset(a, b, self.m()) + 1) as Lit
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn page_count(&self) -> usize {
        self.pages
    }

    /// Debug view: `{"sigma": {"u|v": var}, "phi": {"e|p": var}, "chi": {"e|f": var}}`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct View {
            sigma: BTreeMap<String, Lit>,
            phi: BTreeMap<String, Lit>,
            chi: BTreeMap<String, Lit>,
        }
        let mut view = View {
            sigma: BTreeMap::new(),
            phi: BTreeMap::new(),
            chi: BTreeMap::new(),
        };
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                view.sigma
                    .insert(format!("{}|{}", self.vertices[i], self.vertices[j]), self.sigma(i, j));
            }
        }
        for e in 0..self.m() {
            for p in 0..self.pages {
                view.phi.insert(format!("{}|{p}", self.edges[e]), self.phi(e, p));
            }
            for f in e + 1..self.m() {
                view.chi
                    .insert(format!("{}|{}", self.edges[e], self.edges[f]), self.chi(e, f));
            }
        }
        serde_json::to_value(view).expect("string-keyed maps serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("model has {got} variables, instance needs {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("edge `{edge}` is on {count} pages in the model")]
    PageCount { edge: EdgeId, count: usize },
    #[error("precedence variables do not form a linear order")]
    NotAnOrder,
}

/// Encodes `spec` for `g` as CNF.
pub fn encode(g: &Graph, spec: &LayoutSpec) -> Result<(CnfInstance, VarMap), EncodeError> {
    spec.validate(g)?;
    let ig = g.indexed();
    let vm = VarMap::new(&ig, spec.page_count());
    let mut cnf = CnfInstance::new(vm.variable_count());
    order_clauses(&ig, &vm, &mut cnf);
    page_clauses(&ig, &vm, &mut cnf);
    validity_clauses(&ig, spec, &vm, &mut cnf);
    for c in &spec.constraints {
        constraint_clauses(g, &ig, spec, &vm, c, &mut cnf);
    }
    Ok((cnf, vm))
}

/// Transitivity: no directed 3-cycle among any vertex triple.
fn order_clauses(ig: &IndexedGraph, vm: &VarMap, cnf: &mut CnfInstance) {
    let n = ig.vertex_count();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                cnf.add_clause(&[-vm.sigma(i, j), -vm.sigma(j, k), -vm.sigma(k, i)]);
                cnf.add_clause(&[-vm.sigma(i, k), -vm.sigma(k, j), -vm.sigma(j, i)]);
            }
        }
    }
}

/// Exactly one page per edge, and chi tied to page equality.
fn page_clauses(ig: &IndexedGraph, vm: &VarMap, cnf: &mut CnfInstance) {
    let (m, p) = (ig.edge_count(), vm.page_count());
    for e in 0..m {
        let at_least: Vec<Lit> = (0..p).map(|r| vm.phi(e, r)).collect();
        cnf.add_clause(&at_least);
        for r in 0..p {
            for s in r + 1..p {
                cnf.add_clause(&[-vm.phi(e, r), -vm.phi(e, s)]);
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            let chi = vm.chi(a, b);
            for r in 0..p {
                let (pa, pb) = (vm.phi(a, r), vm.phi(b, r));
                cnf.add_clause(&[-pa, -pb, chi]);
                cnf.add_clause(&[-chi, -pa, pb]);
                cnf.add_clause(&[-chi, -pb, pa]);
            }
        }
    }
}

/// Vertex sequences in which edges (u,v) and (w,z) interleave.
fn crossing_patterns((u, v): (usize, usize), (w, z): (usize, usize)) -> [[usize; 4]; 8] {
    [
        [u, w, v, z],
        [u, z, v, w],
        [v, w, u, z],
        [v, z, u, w],
        [w, u, z, v],
        [w, v, z, u],
        [z, u, w, v],
        [z, v, w, u],
    ]
}

/// Vertex sequences in which one of (u,v), (w,z) strictly contains the other.
fn nesting_patterns((u, v): (usize, usize), (w, z): (usize, usize)) -> [[usize; 4]; 8] {
    [
        [u, z, w, v],
        [u, w, z, v],
        [v, z, w, u],
        [v, w, z, u],
        [w, v, u, z],
        [w, u, v, z],
        [z, v, u, w],
        [z, u, v, w],
    ]
}

fn forbid_sequence(vm: &VarMap, guard: &[Lit], seq: [usize; 4], cnf: &mut CnfInstance) {
    let mut clause: Vec<Lit> = guard.iter().map(|l| -l).collect();
    clause.extend(seq.windows(2).map(|w| -vm.sigma(w[0], w[1])));
    cnf.add_clause(&clause);
}

/// No crossings on stack pages, no nestings on queue pages, matching pages.
fn validity_clauses(ig: &IndexedGraph, spec: &LayoutSpec, vm: &VarMap, cnf: &mut CnfInstance) {
    let m = ig.edge_count();
    let all_stacks = spec.pages.iter().all(|p| p.kind == PageType::Stack);
    for a in 0..m {
        for b in a + 1..m {
            let (ea, eb) = (ig.endpoints[a], ig.endpoints[b]);
            if !ig.independent(a, b) {
                for (r, page) in spec.pages.iter().enumerate() {
                    if page.restriction == PageRestriction::Matching {
                        cnf.add_clause(&[-vm.phi(a, r), -vm.phi(b, r)]);
                    }
                }
                continue;
            }
            if all_stacks {
                let chi = vm.chi(a, b);
                for seq in crossing_patterns(ea, eb) {
                    forbid_sequence(vm, &[chi], seq, cnf);
                }
            }
            for (r, page) in spec.pages.iter().enumerate() {
                let guard = [vm.phi(a, r), vm.phi(b, r)];
                match page.kind {
                    PageType::Stack if !all_stacks => {
                        for seq in crossing_patterns(ea, eb) {
                            forbid_sequence(vm, &guard, seq, cnf);
                        }
                    }
                    PageType::Stack => {}
                    PageType::Queue => {
                        for seq in nesting_patterns(ea, eb) {
                            forbid_sequence(vm, &guard, seq, cnf);
                        }
                    }
                }
            }
        }
    }
}

fn constraint_clauses(
    g: &Graph,
    ig: &IndexedGraph,
    spec: &LayoutSpec,
    vm: &VarMap,
    c: &Constraint,
    cnf: &mut CnfInstance,
) {
    let v = |id: &VertexId| ig.vertex_index[id];
    let e = |id: &EdgeId| ig.edge_index[id];
    let n = ig.vertex_count();
    let excluded = |allowed: &std::collections::BTreeSet<usize>| -> Vec<usize> {
        (0..spec.page_count()).filter(|r| !allowed.contains(r)).collect()
    };
    match c {
        Constraint::Precedes { pred, succ } => cnf.add_clause(&[vm.sigma(v(pred), v(succ))]),
        Constraint::Consecutive { u, v: w } => {
            let (u, w) = (v(u), v(w));
            // Nothing may sit between u and w, whichever comes first.
            for x in (0..n).filter(|&x| x != u && x != w) {
                cnf.add_clause(&[vm.sigma(x, u), vm.sigma(w, x)]);
                cnf.add_clause(&[vm.sigma(x, w), vm.sigma(u, x)]);
            }
        }
        Constraint::Order { vertices, mode } => {
            let steps: Vec<Lit> = vertices
                .windows(2)
                .map(|pair| vm.sigma(v(&pair[0]), v(&pair[1])))
                .collect();
            match mode {
                OrderMode::Required => steps.iter().for_each(|&l| cnf.add_clause(&[l])),
                OrderMode::Forbidden => {
                    cnf.add_clause(&steps.iter().map(|l| -l).collect::<Vec<_>>())
                }
            }
        }
        Constraint::EdgeGroup { edges, mode } => {
            for (i, a) in edges.iter().enumerate() {
                for b in &edges[i + 1..] {
                    let chi = vm.chi(e(a), e(b));
                    cnf.add_clause(&[if *mode == GroupMode::Same { chi } else { -chi }]);
                }
            }
        }
        Constraint::EdgePages { edges, pages } => {
            for id in edges {
                for r in excluded(pages) {
                    cnf.add_clause(&[-vm.phi(e(id), r)]);
                }
            }
        }
        Constraint::IncidentPages {
            vertices,
            pages,
            scope,
        } => {
            let listed: Vec<usize> = vertices.iter().map(v).collect();
            for (id, edge) in g.edges() {
                let ei = e(id);
                for vid in vertices {
                    let Some(other) = edge.other(vid) else { continue };
                    let x = v(other);
                    for r in excluded(pages) {
                        let off = -vm.phi(ei, r);
                        match scope {
                            IncidenceScope::All => cnf.add_clause(&[off]),
                            IncidenceScope::Between | IncidenceScope::Outside => {
                                let (s, t) = (listed[0], listed[1]);
                                if x == s || x == t {
                                    continue;
                                }
                                if *scope == IncidenceScope::Between {
                                    cnf.add_clause(&[-vm.sigma(s, x), -vm.sigma(x, t), off]);
                                    cnf.add_clause(&[-vm.sigma(t, x), -vm.sigma(x, s), off]);
                                } else {
                                    cnf.add_clause(&[-vm.sigma(x, s), -vm.sigma(x, t), off]);
                                    cnf.add_clause(&[-vm.sigma(s, x), -vm.sigma(t, x), off]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Reads a layout back out of a satisfying model.
pub fn decode(model: &Model, vm: &VarMap) -> Result<LinearLayout, DecodeError> {
    let expected = vm.variable_count() as usize;
    if model.len() != expected {
        return Err(DecodeError::WrongSize {
            expected,
            got: model.len(),
        });
    }
    let n = vm.n();
    let mut ahead = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if model.lit(vm.sigma(i, j)) {
                ahead[i] += 1;
            } else {
                ahead[j] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(ahead[i]));
    if order.iter().enumerate().any(|(rank, &i)| ahead[i] != n - 1 - rank) {
        return Err(DecodeError::NotAnOrder);
    }
    let mut assignment = BTreeMap::new();
    for (ei, id) in vm.edges.iter().enumerate() {
        let on: Vec<usize> = (0..vm.pages)
            .filter(|&r| model.lit(vm.phi(ei, r)))
            .collect();
        if on.len() != 1 {
            return Err(DecodeError::PageCount {
                edge: id.clone(),
                count: on.len(),
            });
        }
        assignment.insert(id.clone(), on[0]);
    }
    Ok(LinearLayout {
        order: order.into_iter().map(|i| vm.vertices[i].clone()).collect(),
        assignment,
    })
}

/// The model a concrete layout induces on the instance's variables.
pub fn layout_model(layout: &LinearLayout, vm: &VarMap) -> Model {
    let sigma = layout.sigma();
    let pos: Vec<usize> = vm
        .vertices
        .iter()
        .map(|v| sigma.position(v).expect("layout covers every vertex"))
        .collect();
    let page: Vec<usize> = vm.edges.iter().map(|e| layout.assignment[e]).collect();
    let mut values = vec![false; vm.variable_count() as usize];
    let mut set = |lit: Lit, value: bool| values[lit as usize - 1] = value;
    for i in 0..vm.n() {
        for j in i + 1..vm.n() {
            set(vm.sigma(i, j), pos[i] < pos[j]);
        }
    }
    for e in 0..vm.m() {
        for r in 0..vm.pages {
            set(vm.phi(e, r), page[e] == r);
        }
        for f in e + 1..vm.m() {
            set(vm.chi(e, f), page[e] == page[f]);
        }
    }
    Model::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Page;

    fn k(n: usize) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(format!("v{i}")).unwrap();
        }
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(format!("v{i}v{j}"), format!("v{i}"), format!("v{j}")).unwrap();
            }
        }
        g
    }

    #[test]
    fn single_edge_counts() {
        let g = Graph::from_edges(&[("a", "b")]).unwrap();
        let (cnf, vm) = encode(&g, &LayoutSpec::stacks(1)).unwrap();
        assert_eq!(cnf.variable_count(), 2);
        assert_eq!(vm.sigma(0, 1), 1);
        assert_eq!(vm.sigma(1, 0), -1);
        assert_eq!(vm.phi(0, 0), 2);
    }

    #[test]
    fn k4_two_pages_counts() {
        let (cnf, vm) = encode(&k(4), &LayoutSpec::stacks(2)).unwrap();
        assert_eq!((vm.sigma_count(), vm.phi_count(), vm.chi_count()), (6, 12, 15));
        assert_eq!(cnf.variable_count(), 33);
        let json = vm.to_json();
        assert_eq!(json["sigma"].as_object().unwrap().len(), 6);
        assert_eq!(json["phi"].as_object().unwrap().len(), 12);
        assert_eq!(json["chi"]["v0v1|v0v2"], 6 + 12 + 1);
    }

    #[test]
    fn variable_numbering_is_dense_and_injective() {
        let g = k(5);
        let (_, vm) = encode(&g, &LayoutSpec::stacks(3)).unwrap();
        let mut seen = std::collections::HashSet::new();
        for i in 0..5 {
            for j in i + 1..5 {
                assert!(seen.insert(vm.sigma(i, j)));
            }
        }
        for e in 0..10 {
            for r in 0..3 {
                assert!(seen.insert(vm.phi(e, r)));
            }
            for f in e + 1..10 {
                assert!(seen.insert(vm.chi(e, f)));
            }
        }
        let mut all: Vec<Lit> = seen.into_iter().collect();
        all.sort();
        assert_eq!(all, (1..=vm.variable_count() as Lit).collect::<Vec<_>>());
    }

    #[test]
    fn dimacs_format() {
        assert_eq!(emit_dimacs(&CnfInstance::new(0)), b"p cnf 0 0\n");
        let c = CnfInstance::from_clauses(1, &[vec![1]]).unwrap();
        assert_eq!(emit_dimacs(&c), b"p cnf 1 1\n1 0\n");
        let c = CnfInstance::from_clauses(3, &[vec![1, -3], vec![2]]).unwrap();
        assert_eq!(emit_dimacs(&c), b"p cnf 3 2\n1 -3 0\n2 0\n");
    }

    #[test]
    fn dimacs_header_matches_k4_instance() {
        let (cnf, _) = encode(&k(4), &LayoutSpec::stacks(2)).unwrap();
        let text = String::from_utf8(emit_dimacs(&cnf)).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            format!("p cnf {} {}", cnf.variable_count(), cnf.clause_count())
        );
        assert_eq!(lines.count(), cnf.clause_count());
        assert!(text.lines().skip(1).all(|l| l.ends_with(" 0")));
        // Deterministic.
        assert_eq!(emit_dimacs(&encode(&k(4), &LayoutSpec::stacks(2)).unwrap().0), text.as_bytes());
    }

    #[test]
    fn clause_hygiene() {
        let mut c = CnfInstance::new(3);
        c.add_clause(&[1, 1, -2]);
        c.add_clause(&[1, -1]);
        assert_eq!(c.clause_count(), 1);
        assert_eq!(c.clause(0), &[1, -2]);
        assert_eq!(
            CnfInstance::from_clauses(2, &[vec![3]]),
            Err(CnfError::LiteralOutOfRange { clause: 0, lit: 3, vars: 2 })
        );
        assert_eq!(CnfInstance::from_clauses(2, &[vec![]]), Err(CnfError::EmptyClause(0)));
    }

    #[test]
    fn decode_two_vertices() {
        let g = Graph::from_edges(&[("u", "v")]).unwrap();
        let (_, vm) = encode(&g, &LayoutSpec::stacks(2)).unwrap();
        let model = Model::from_literals(vm.variable_count(), &[1, -2, 3]);
        let l = decode(&model, &vm).unwrap();
        assert_eq!(l.order, vec![VertexId::from("u"), VertexId::from("v")]);
        assert_eq!(l.assignment[&EdgeId::from("u-v")], 1);
        let model = Model::from_literals(vm.variable_count(), &[1, 2, 3]);
        assert_eq!(
            decode(&model, &vm),
            Err(DecodeError::PageCount { edge: "u-v".into(), count: 2 })
        );
    }

    #[test]
    fn decode_edgeless_graph() {
        let mut g = Graph::new();
        for v in ["a", "b", "c"] {
            g.add_vertex(v).unwrap();
        }
        let (cnf, vm) = encode(&g, &LayoutSpec::queues(1)).unwrap();
        assert_eq!(cnf.variable_count(), 3);
        // a<b, a<c, c<b
        let model = Model::from_literals(3, &[1, 2, -3]);
        assert!(cnf.first_falsified(&model).is_none());
        let l = decode(&model, &vm).unwrap();
        assert_eq!(l.order, vec!["a".into(), "c".into(), "b".into()]);
        assert!(l.assignment.is_empty());
        // a<b, b<c, c<a is cyclic.
        let cyclic = Model::from_literals(3, &[1, -2, 3]);
        assert!(cnf.first_falsified(&cyclic).is_some());
        assert_eq!(decode(&cyclic, &vm), Err(DecodeError::NotAnOrder));
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let spec = LayoutSpec::stacks(1).with_constraint(Constraint::precedes("v0", "nope"));
        assert!(matches!(encode(&k(3), &spec), Err(EncodeError::Spec(_))));
        let spec = LayoutSpec::new(vec![Page::stack(); 2])
            .with_constraint(Constraint::different_pages(["v0v1", "v0v2", "v1v2"]));
        assert!(encode(&k(3), &spec).is_err());
    }
}
