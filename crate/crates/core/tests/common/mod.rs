#![allow(dead_code)]

use linlayout::{
    Constraint, Graph, IncidenceScope, LayoutSpec, Page, PageRestriction, PageType, VertexId,
};
use proptest::prelude::*;

/// Graph on `n` vertices `v0..` with the pairs selected by `bits`.
pub fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let mut g = Graph::new();
    for v in 0..n {
        g.add_vertex(format!("v{v}")).unwrap();
    }
    let mut b = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits >> b & 1 == 1 {
                g.add_edge(format!("v{i}-v{j}"), format!("v{i}"), format!("v{j}")).unwrap();
            }
            b += 1;
        }
    }
    g
}

pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>()).prop_map(|(n, bits)| graph_from_bits(n, bits))
}

pub fn arb_page() -> impl Strategy<Value = Page> {
    (prop_oneof![Just(PageType::Stack), Just(PageType::Queue)], 0u8..5).prop_map(|(kind, r)| Page {
        kind,
        restriction: match r {
            0 => PageRestriction::Matching,
            1 => PageRestriction::Forest,
            _ => PageRestriction::None,
        },
    })
}

pub fn arb_pages(max: usize) -> impl Strategy<Value = Vec<Page>> {
    prop::collection::vec(arb_page(), 1..=max)
}

/// A valid constraint for `g` with `pages` pages, chosen by `pick`.
pub fn constraint_for(g: &Graph, pages: usize, pick: &[u32]) -> Option<Constraint> {
    let vs: Vec<VertexId> = g.vertices().cloned().collect();
    let es: Vec<_> = g.edge_ids().cloned().collect();
    let mut k = 0;
    let mut next = |modulo: usize| {
        let v = pick[k % pick.len()] as usize % modulo.max(1);
        k += 1;
        v
    };
    let distinct = |n: usize, len: usize, next: &mut dyn FnMut(usize) -> usize| -> Option<Vec<usize>> {
        if len > n {
            return None;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        Some((0..len).map(|_| pool.remove(next(pool.len()))).collect())
    };
    let page_set = |next: &mut dyn FnMut(usize) -> usize| -> Vec<usize> {
        let mask = 1 + next((1 << pages) - 1);
        (0..pages).filter(|p| mask >> p & 1 == 1).collect()
    };
    Some(match next(8) {
        0 => {
            let ix = distinct(vs.len(), 2, &mut next)?;
            Constraint::precedes(vs[ix[0]].clone(), vs[ix[1]].clone())
        }
        1 => {
            let ix = distinct(vs.len(), 2, &mut next)?;
            Constraint::consecutive(vs[ix[0]].clone(), vs[ix[1]].clone())
        }
        2 | 3 => {
            let len = 2 + next(3);
            let ix = distinct(vs.len(), len, &mut next)?;
            let chain: Vec<VertexId> = ix.iter().map(|&i| vs[i].clone()).collect();
            if k % 2 == 0 {
                Constraint::required_order(chain)
            } else {
                Constraint::forbidden_order(chain)
            }
        }
        4 => {
            let len = 2 + next(2);
            let ix = distinct(es.len(), len, &mut next)?;
            Constraint::same_page(ix.iter().map(|&i| es[i].clone()))
        }
        5 => {
            let len = 2 + next(pages.saturating_sub(1).max(1));
            if len > pages {
                return None;
            }
            let ix = distinct(es.len(), len, &mut next)?;
            Constraint::different_pages(ix.iter().map(|&i| es[i].clone()))
        }
        6 => {
            let len = 1 + next(2);
            let ix = distinct(es.len(), len, &mut next)?;
            Constraint::edge_pages(ix.iter().map(|&i| es[i].clone()), page_set(&mut next))
        }
        _ => {
            let scope = match next(3) {
                0 => IncidenceScope::All,
                1 => IncidenceScope::Between,
                _ => IncidenceScope::Outside,
            };
            let len = if scope == IncidenceScope::All { 1 + next(2) } else { 2 };
            let ix = distinct(vs.len(), len, &mut next)?;
            Constraint::incident_pages(ix.iter().map(|&i| vs[i].clone()), page_set(&mut next), scope)
        }
    })
}

pub fn spec_with(pages: Vec<Page>, cs: impl IntoIterator<Item = Constraint>) -> LayoutSpec {
    LayoutSpec::new(pages).with_constraints(cs)
}

/// The fixed page grid: {1 stack; 2 stacks; 1 queue; 2 queues; stack + queue},
/// each with and without a matching restriction on page 0.
pub fn page_grid() -> Vec<Vec<Page>> {
    let bases = [
        vec![Page::stack()],
        vec![Page::stack(), Page::stack()],
        vec![Page::queue()],
        vec![Page::queue(), Page::queue()],
        vec![Page::stack(), Page::queue()],
    ];
    let mut out = Vec::new();
    for b in bases {
        out.push(b.clone());
        let mut m = b;
        m[0] = m[0].restricted(PageRestriction::Matching);
        out.push(m);
    }
    out
}

pub fn complete(n: usize) -> Graph {
    graph_from_bits(n, u64::MAX)
}
