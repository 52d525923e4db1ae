//! Solve a GraphML file, or the Goldner-Harary graph when no path is given.
//!
//! cargo run --example solve_graphml -- [graph.graphml] [stacks]

use linlayout::{compute_layout, goldner_harary, read_graphml, LayoutSpec, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let (graph, spec) = match args.next() {
        Some(path) => {
            let doc = read_graphml(&std::fs::read(&path)?)?;
            let stacks = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
            let spec = doc.spec().unwrap_or_else(|| LayoutSpec::stacks(stacks).with_constraints(doc.constraints.clone()));
            (doc.graph, spec)
        }
        None => (goldner_harary(), LayoutSpec::stacks(3)),
    };
    let out = compute_layout(&graph, &spec, &SolverConfig::builtin())?;
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}
