//! Forest-restricted pages are enforced lazily: watch the rounds.

use linlayout::{compute_layout, Graph, LayoutSpec, Page, PageRestriction, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Graph::from_edges(&[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e"), ("e", "c")])?;
    for pages in 1..=3 {
        let spec = LayoutSpec::new(vec![Page::stack().restricted(PageRestriction::Forest); pages]);
        let out = compute_layout(&g, &spec, &SolverConfig::builtin())?;
        println!(
            "{pages} forest page(s): {:?} after {} round(s), {} cycle clause(s)",
            out.status, out.stats.rounds, out.stats.clauses_added
        );
    }
    Ok(())
}
