//! Run the same instance through the builtin solver and an external one.
//!
//! Set LINLAYOUT_SOLVER_CMD (e.g. "kissat -q {input}") or put a known solver on PATH.

use std::time::Instant;

use linlayout::{compute_layout, goldner_harary, Backend, LayoutSpec, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = goldner_harary();
    let mut configs = vec![("builtin", SolverConfig::builtin())];
    match Backend::discover_external() {
        Some(backend) => configs.push(("external", SolverConfig { backend, ..SolverConfig::default() })),
        None => eprintln!("no external solver found"),
    }
    for (name, cfg) in &configs {
        for stacks in [2, 3] {
            let t = Instant::now();
            let out = compute_layout(&g, &LayoutSpec::stacks(stacks), cfg)?;
            println!("{name:8} {stacks} stacks: {:?} in {:?}", out.status, t.elapsed());
        }
    }
    Ok(())
}
