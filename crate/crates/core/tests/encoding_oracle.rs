mod common;

use common::*;
use linlayout::constructions::small_connected_graphs;
use linlayout::encode::layout_model;
use linlayout::{
    brute_force_solve, compute_layout, decode, emit_dimacs, encode, goldner_harary, verify, Constraint, Graph,
    LayoutSpec, LinearLayout, Page, PageRestriction, SolveStatus, SolverConfig,
};
use proptest::prelude::*;

fn pipeline_sat(g: &Graph, spec: &LayoutSpec) -> bool {
    let out = compute_layout(g, spec, &SolverConfig::builtin()).unwrap();
    match out.status {
        SolveStatus::Sat => {
            let layout = out.layout.unwrap();
            assert_eq!(verify(g, spec, &layout).unwrap(), vec![]);
            true
        }
        SolveStatus::Unsat => false,
        SolveStatus::Unknown => panic!("builtin solver gave up on a tiny instance"),
    }
}

fn brute_sat(g: &Graph, spec: &LayoutSpec) -> bool {
    brute_force_solve(g, spec).unwrap().is_some()
}

#[test]
fn pipeline_matches_brute_force_on_connected_graphs_up_to_five_vertices() {
    for n in 1..=5 {
        for g in small_connected_graphs(n) {
            for pages in page_grid() {
                let spec = LayoutSpec::new(pages);
                assert_eq!(pipeline_sat(&g, &spec), brute_sat(&g, &spec), "{g:?} {spec:?}");
            }
        }
    }
}

/// Every order and page assignment of small graphs: the induced assignment
/// satisfies the CNF exactly when verify accepts the layout.
#[test]
fn cnf_models_are_exactly_the_valid_layouts() {
    let specs = [
        LayoutSpec::stacks(2),
        LayoutSpec::new(vec![Page::stack(), Page::queue()]),
        LayoutSpec::new(vec![Page::queue().restricted(PageRestriction::Matching), Page::queue()]),
        LayoutSpec::stacks(2)
            .with_constraint(Constraint::consecutive("v0", "v2"))
            .with_constraint(Constraint::forbidden_order(["v1", "v0", "v3"])),
        LayoutSpec::new(vec![Page::stack(), Page::queue()])
            .with_constraint(Constraint::incident_pages(["v0", "v3"], [1], linlayout::IncidenceScope::Between))
            .with_constraint(Constraint::incident_pages(["v1", "v2"], [0], linlayout::IncidenceScope::Outside)),
    ];
    let mut checked = 0;
    for bits in [0b111111u64, 0b101101, 0b011011, 0b110110, 0b100111] {
        let g = graph_from_bits(4, bits);
        let ids: Vec<_> = g.edge_ids().cloned().collect();
        for spec in &specs {
            let (cnf, vm) = encode(&g, spec).unwrap();
            let mut order: Vec<_> = g.vertices().cloned().collect();
            for_each_permutation(&mut order, 0, &mut |order| {
                for code in 0..2usize.pow(ids.len() as u32) {
                    let layout = LinearLayout {
                        order: order.to_vec(),
                        assignment: ids.iter().enumerate().map(|(i, e)| (e.clone(), code >> i & 1)).collect(),
                    };
                    let valid = verify(&g, spec, &layout).unwrap().is_empty();
                    let model = layout_model(&layout, &vm);
                    assert_eq!(cnf.first_falsified(&model).is_none(), valid, "{layout:?} {spec:?}");
                    assert_eq!(decode(&model, &vm).unwrap(), layout);
                    checked += 1;
                }
            });
        }
    }
    assert!(checked > 10_000);
}

fn for_each_permutation<T>(v: &mut [T], k: usize, f: &mut impl FnMut(&[T])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        for_each_permutation(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn variable_count_law() {
    let mut graphs: Vec<Graph> = (1..=6).flat_map(small_connected_graphs).collect();
    graphs.push(goldner_harary());
    graphs.push(linlayout::generate_skeleton(20).unwrap().0);
    graphs.push(linlayout::generate_step2_gadget(5).unwrap().0);
    graphs.push(Graph::new());
    for g in &graphs {
        let (n, m) = (g.vertex_count(), g.edge_count());
        for p in 1..=4 {
            let (cnf, vm) = encode(g, &LayoutSpec::stacks(p)).unwrap();
            let expected = n * n.saturating_sub(1) / 2 + p * m + m * m.saturating_sub(1) / 2;
            assert_eq!(cnf.variable_count() as usize, expected);
            assert_eq!(vm.variable_count() as usize, expected);
        }
    }
}

#[test]
fn encoding_is_deterministic() {
    let g = goldner_harary();
    let spec = LayoutSpec::new(vec![Page::stack(), Page::queue(), Page::stack().restricted(PageRestriction::Matching)])
        .with_constraint(Constraint::precedes("p", "q"));
    let a = emit_dimacs(&encode(&g, &spec).unwrap().0);
    let b = emit_dimacs(&encode(&g.clone(), &spec.clone()).unwrap().0);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let header = text.lines().next().unwrap();
    let (cnf, _) = encode(&g, &spec).unwrap();
    assert_eq!(header, format!("p cnf {} {}", cnf.variable_count(), cnf.clause_count()));
}

#[test]
fn small_known_answers() {
    let c4 = Graph::from_edges(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
    assert!(pipeline_sat(&c4, &LayoutSpec::queues(1)));
    let edge = Graph::from_edges(&[("a", "b")]).unwrap();
    let (cnf, _) = encode(&edge, &LayoutSpec::stacks(1)).unwrap();
    assert_eq!(cnf.variable_count(), 2);
    assert!(pipeline_sat(&edge, &LayoutSpec::stacks(1)));
    let k4 = complete(4);
    assert!(!pipeline_sat(&k4, &LayoutSpec::stacks(1)));
    assert!(pipeline_sat(&k4, &LayoutSpec::stacks(2)));
    assert!(!pipeline_sat(&k4, &LayoutSpec::queues(1)));
    assert!(pipeline_sat(&k4, &LayoutSpec::queues(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pipeline_agrees_with_brute_force(
        g in arb_graph(6),
        pages in arb_pages(2),
        picks in prop::collection::vec(prop::collection::vec(any::<u32>(), 8), 0..3),
    ) {
        let cs: Vec<Constraint> = picks.iter().filter_map(|p| constraint_for(&g, pages.len(), p)).collect();
        let spec = spec_with(pages, cs);
        prop_assert_eq!(pipeline_sat(&g, &spec), brute_sat(&g, &spec));
    }

    #[test]
    fn adding_a_constraint_never_adds_layouts(
        g in arb_graph(6),
        pages in arb_pages(2),
        pick in prop::collection::vec(any::<u32>(), 8),
    ) {
        if let Some(c) = constraint_for(&g, pages.len(), &pick) {
            let base = LayoutSpec::new(pages);
            let more = base.clone().with_constraint(c);
            if let Some(layout) = brute_force_solve(&g, &more).unwrap() {
                prop_assert!(verify(&g, &base, &layout).unwrap().is_empty());
                prop_assert!(pipeline_sat(&g, &base));
            }
            prop_assert!(pipeline_sat(&g, &more) <= pipeline_sat(&g, &base));
        }
    }

    #[test]
    fn verify_ignores_constraint_order(
        g in arb_graph(6),
        pages in arb_pages(3),
        picks in prop::collection::vec(prop::collection::vec(any::<u32>(), 8), 0..5),
        seed in any::<u64>(),
    ) {
        let cs: Vec<Constraint> = picks.iter().filter_map(|p| constraint_for(&g, pages.len(), p)).collect();
        let mut order: Vec<_> = g.vertices().cloned().collect();
        let rot = (seed as usize) % order.len().max(1);
        order.rotate_left(rot);
        let layout = LinearLayout {
            order,
            assignment: g.edge_ids().enumerate().map(|(i, e)| (e.clone(), (seed as usize >> i) % pages.len())).collect(),
        };
        let forward = spec_with(pages.clone(), cs.iter().cloned());
        let backward = spec_with(pages, cs.iter().rev().cloned());
        let key = |v: &linlayout::Violation| (v.code, v.page, v.vertices.clone(), v.edges.clone());
        let mut a: Vec<_> = verify(&g, &forward, &layout).unwrap().iter().map(key).collect();
        let mut b: Vec<_> = verify(&g, &backward, &layout).unwrap().iter().map(key).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn consecutive_holds_iff_adjacent(perm_seed in any::<u64>(), n in 2usize..7, u in 0usize..6, w in 0usize..6) {
        let (u, w) = (u % n, w % n);
        prop_assume!(u != w);
        let g = graph_from_bits(n, 0);
        let mut order: Vec<_> = g.vertices().cloned().collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            order.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let (vu, vw) = (format!("v{u}"), format!("v{w}"));
        let pos = |id: &str| order.iter().position(|v| v.as_str() == id).unwrap();
        let adjacent = pos(&vu).abs_diff(pos(&vw)) == 1;
        let layout = LinearLayout { order: order.clone(), assignment: Default::default() };
        let spec = LayoutSpec::stacks(1).with_constraint(Constraint::consecutive(vu.as_str(), vw.as_str()));
        prop_assert_eq!(verify(&g, &spec, &layout).unwrap().is_empty(), adjacent);
    }
}
