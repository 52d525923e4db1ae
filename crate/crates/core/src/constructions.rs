//! Graph families used by the experiments.
//!
//! Everything here is a pure function of its arguments. Random instances use
//! ChaCha8 seeded with [`rand::SeedableRng::seed_from_u64`], so a given
//! `(n, seed)` yields the same graph on every platform.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{DelaunayTriangulation, Point2, Triangulation};
use thiserror::Error;

use crate::graph::{Graph, Point, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall { what: &'static str, min: usize, got: usize },
    #[error("could not draw a non-degenerate point set in {attempts} attempts")]
    Degenerate { attempts: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonLabels {
    pub a: VertexId,
    pub b: VertexId,
    pub path: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step2Labels {
    pub a: VertexId,
    pub b: VertexId,
    /// y1..y2k
    pub y: Vec<VertexId>,
    /// a_i stellates ⟨A, y_{2i-1}, y_{2i}⟩.
    pub stellators_a: Vec<VertexId>,
    /// b_i stellates ⟨B, y_{2i-1}, y_{2i}⟩.
    pub stellators_b: Vec<VertexId>,
}

/// Corners of the outer 4-cycle, in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadFrame {
    pub s: VertexId,
    pub a: VertexId,
    pub t: VertexId,
    pub b: VertexId,
}

fn link(g: &mut Graph, u: &str, v: &str) {
    g.add_edge(format!("{u}-{v}"), u, v)
        .expect("generators only emit simple graphs");
}

fn vertex(g: &mut Graph, id: &str) -> VertexId {
    g.add_vertex(id).expect("generators emit unique ids");
    VertexId::from(id)
}

fn at_least(what: &'static str, min: usize, got: usize) -> Result<(), ConstructionError> {
    if got < min {
        Err(ConstructionError::TooSmall { what, min, got })
    } else {
        Ok(())
    }
}

/// A and B joined to every vertex of the path x1..xn.
pub fn generate_skeleton(n: usize) -> Result<(Graph, SkeletonLabels), ConstructionError> {
    at_least("path length", 2, n)?;
    let mut g = Graph::new();
    let a = vertex(&mut g, "A");
    let b = vertex(&mut g, "B");
    let path: Vec<VertexId> = (1..=n).map(|i| vertex(&mut g, &format!("x{i}"))).collect();
    for (i, x) in path.iter().enumerate() {
        link(&mut g, "A", x.as_str());
        link(&mut g, "B", x.as_str());
        if i + 1 < n {
            link(&mut g, x.as_str(), path[i + 1].as_str());
        }
    }
    Ok((g, SkeletonLabels { a, b, path }))
}

pub type Stellators = BTreeMap<[VertexId; 3], VertexId>;

/// The skeleton with every bounded triangle ⟨A|B, xi, xi+1⟩ stellated. The
/// stellator of ⟨A, xi, xi+1⟩ is `ai`, that of ⟨B, xi, xi+1⟩ is `bi`.
pub fn generate_stellated_skeleton(n: usize) -> Result<(Graph, SkeletonLabels, Stellators), ConstructionError> {
    let (mut g, labels) = generate_skeleton(n)?;
    let mut stellators = BTreeMap::new();
    for i in 0..n - 1 {
        let (x, y) = (labels.path[i].as_str(), labels.path[i + 1].as_str());
        for (apex, prefix) in [("A", "a"), ("B", "b")] {
            let s = vertex(&mut g, &format!("{prefix}{}", i + 1));
            for corner in [apex, x, y] {
                link(&mut g, corner, s.as_str());
            }
            stellators.insert([apex.into(), x.into(), y.into()], s);
        }
    }
    Ok((g, labels, stellators))
}

/// A, B, the pairs (y_{2i-1}, y_{2i}) and their stellators a_i, b_i.
pub fn generate_step2_gadget(k: usize) -> Result<(Graph, Step2Labels), ConstructionError> {
    at_least("pair count", 1, k)?;
    let mut g = Graph::new();
    let a = vertex(&mut g, "A");
    let b = vertex(&mut g, "B");
    let mut labels = Step2Labels {
        a,
        b,
        y: Vec::new(),
        stellators_a: Vec::new(),
        stellators_b: Vec::new(),
    };
    for i in 1..=k {
        let y1 = vertex(&mut g, &format!("y{}", 2 * i - 1));
        let y2 = vertex(&mut g, &format!("y{}", 2 * i));
        for y in [&y1, &y2] {
            link(&mut g, "A", y.as_str());
            link(&mut g, "B", y.as_str());
        }
        link(&mut g, y1.as_str(), y2.as_str());
        let ai = vertex(&mut g, &format!("a{i}"));
        let bi = vertex(&mut g, &format!("b{i}"));
        for (s, apex) in [(&ai, "A"), (&bi, "B")] {
            for corner in [apex, y1.as_str(), y2.as_str()] {
                link(&mut g, corner, s.as_str());
            }
        }
        labels.y.extend([y1, y2]);
        labels.stellators_a.push(ai);
        labels.stellators_b.push(bi);
    }
    Ok((g, labels))
}

/// The 11-vertex maximal planar graph obtained by stellating all six faces of
/// the triangular bipyramid.
pub fn goldner_harary() -> Graph {
    let mut g = Graph::new();
    for v in ["u1", "u2", "u3", "p", "q"] {
        vertex(&mut g, v);
    }
    for (u, v) in [("u1", "u2"), ("u2", "u3"), ("u1", "u3")] {
        link(&mut g, u, v);
    }
    for apex in ["p", "q"] {
        for u in ["u1", "u2", "u3"] {
            link(&mut g, apex, u);
        }
    }
    let faces = [
        ["p", "u1", "u2"],
        ["p", "u2", "u3"],
        ["p", "u1", "u3"],
        ["q", "u1", "u2"],
        ["q", "u2", "u3"],
        ["q", "u1", "u3"],
    ];
    for (i, face) in faces.iter().enumerate() {
        let s = format!("f{}", i + 1);
        vertex(&mut g, &s);
        for c in face {
            link(&mut g, c, &s);
        }
    }
    g
}

const MAX_DRAWS: u32 = 64;

/// `n` uniform points in the open unit square, Delaunay-triangulated, framed
/// by corners s=(0,0), a=(1,0), t=(1,1), b=(0,1) joined to the hull without
/// crossings. Interior points are `p0..p{n-1}`; every vertex has a position.
pub fn random_triangulated_quad(n: usize, seed: u64) -> Result<(Graph, QuadFrame), ConstructionError> {
    at_least("interior point count", 1, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        if degenerate(&pts) {
            continue;
        }
        if let Some(g) = frame_triangulation(&pts) {
            let frame = QuadFrame {
                s: "s".into(),
                a: "a".into(),
                t: "t".into(),
                b: "b".into(),
            };
            return Ok((g, frame));
        }
    }
    Err(ConstructionError::Degenerate { attempts: MAX_DRAWS })
}

fn cross(o: (f64, f64), p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0)
}

/// Points on the square's boundary, repeated points and collinear triples.
fn degenerate(pts: &[(f64, f64)]) -> bool {
    if pts.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0 || x >= 1.0 || y >= 1.0) {
        return true;
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                return true;
            }
            for k in j + 1..pts.len() {
                if cross(pts[i], pts[j], pts[k]) == 0.0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Counter-clockwise convex hull (monotone chain), as indices into `pts`.
fn convex_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].partial_cmp(&pts[b]).expect("finite coordinates"));
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &p in seq {
            while hull.len() >= start + 2
                && cross(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[p]) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn frame_triangulation(pts: &[(f64, f64)]) -> Option<Graph> {
    let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        let h = dt.insert(Point2::new(x, y)).ok()?;
        if h.index() != i {
            return None;
        }
    }
    let mut g = Graph::new();
    let corners = [("s", (0.0, 0.0)), ("a", (1.0, 0.0)), ("t", (1.0, 1.0)), ("b", (0.0, 1.0))];
    for (id, (x, y)) in corners {
        g.add_vertex_at(id, Point::new(x, y)).ok()?;
    }
    let name = |i: usize| format!("p{i}");
    for (i, &(x, y)) in pts.iter().enumerate() {
        g.add_vertex_at(name(i), Point::new(x, y)).ok()?;
    }
    for e in dt.undirected_edges() {
        let [u, v] = e.vertices();
        let (u, v) = (u.fix().index(), v.fix().index());
        g.add_edge(format!("{}-{}", name(u.min(v)), name(u.max(v))), name(u), name(v)).ok()?;
    }
    for (i, (u, _)) in corners.iter().enumerate() {
        let v = corners[(i + 1) % 4].0;
        g.add_edge(format!("{u}-{v}"), *u, v).ok()?;
    }

    // Hull vertices extreme towards each side: bottom, right, top, left. Going
    // counter-clockwise around the hull they appear in this order, and corner
    // i (s, a, t, b) sees exactly the hull chain between the extremes of the
    // two sides meeting at it.
    let hull = convex_hull(pts);
    let pick = |key: &dyn Fn(usize) -> f64| -> usize {
        (0..hull.len())
            .max_by(|&x, &y| key(hull[x]).partial_cmp(&key(hull[y])).expect("finite"))
            .expect("hull is non-empty")
    };
    let bottom = pick(&|p| -pts[p].1);
    let right = pick(&|p| pts[p].0);
    let top = pick(&|p| pts[p].1);
    let left = pick(&|p| -pts[p].0);
    let chains = [(left, bottom), (bottom, right), (right, top), (top, left)];
    for (c, &(from, to)) in chains.iter().enumerate() {
        let corner = corners[c].0;
        let mut h = from;
        loop {
            let p = name(hull[h]);
            g.add_edge(format!("{corner}-{p}"), corner, p.as_str()).ok()?;
            if h == to {
                break;
            }
            h = (h + 1) % hull.len();
        }
    }
    Some(g)
}

/// Faces of the straight-line drawing given by the vertex positions, each as
/// a vertex cycle. `None` if any vertex lacks a position.
pub fn faces_from_positions(g: &Graph) -> Option<Vec<Vec<VertexId>>> {
    let ig = g.indexed();
    let pos: Vec<Point> = ig
        .vertices
        .iter()
        .map(|v| g.position(v))
        .collect::<Option<_>>()?;
    let mut rot = ig.adjacency();
    for (v, nbrs) in rot.iter_mut().enumerate() {
        let angle = |w: &usize| (pos[*w].y - pos[v].y).atan2(pos[*w].x - pos[v].x);
        nbrs.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).expect("finite coordinates"));
    }
    let slot: Vec<HashMap<usize, usize>> = rot
        .iter()
        .map(|nbrs| nbrs.iter().enumerate().map(|(i, &w)| (w, i)).collect())
        .collect();
    let mut used: Vec<Vec<bool>> = rot.iter().map(|n| vec![false; n.len()]).collect();
    let mut faces = Vec::new();
    for u in 0..rot.len() {
        for i in 0..rot[u].len() {
            if used[u][i] {
                continue;
            }
            // Walk with the face on the left of each dart.
            let mut face = Vec::new();
            let (mut x, mut k) = (u, i);
            while !used[x][k] {
                used[x][k] = true;
                face.push(ig.vertices[x].clone());
                let y = rot[x][k];
                let back = slot[y][&x];
                let deg = rot[y].len();
                k = (back + deg - 1) % deg;
                x = y;
            }
            faces.push(face);
        }
    }
    Some(faces)
}

/// All connected simple graphs on `n` vertices up to isomorphism, vertices
/// `v0..`. Exhaustive over labelled graphs, so only sensible for `n <= 7`.
pub fn small_connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "enumeration is exponential in n^2");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permutations(&mut p, 0, &mut perms);
    // Bit of pair (i, j) after relabelling by each permutation.
    let bit_of = |i: usize, j: usize| pairs.iter().position(|&q| q == (i.min(j), i.max(j))).expect("pair exists");
    let relabel: Vec<Vec<u32>> = perms
        .iter()
        .map(|perm| pairs.iter().map(|&(i, j)| bit_of(perm[i], perm[j]) as u32).collect())
        .collect();

    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        if !mask_connected(n, &pairs, mask) {
            continue;
        }
        let canon = relabel
            .iter()
            .map(|r| {
                (0..pairs.len())
                    .filter(|&b| mask >> b & 1 == 1)
                    .fold(0u32, |m, b| m | 1 << r[b])
            })
            .min()
            .expect("at least one permutation");
        if !seen.insert(canon) {
            continue;
        }
        let mut g = Graph::new();
        for v in 0..n {
            g.add_vertex(format!("v{v}")).expect("fresh id");
        }
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                g.add_edge(format!("v{i}-v{j}"), format!("v{i}"), format!("v{j}")).expect("simple");
            }
        }
        out.push(g);
    }
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

fn mask_connected(n: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    if n == 0 {
        return true;
    }
    let mut reached = 1u32;
    loop {
        let before = reached;
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 && (reached >> i & 1 == 1 || reached >> j & 1 == 1) {
                reached |= 1 << i | 1 << j;
            }
        }
        if reached == before {
            return reached.count_ones() as usize == n;
        }
    }
}
