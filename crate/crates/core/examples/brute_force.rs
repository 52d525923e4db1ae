//! Compare exhaustive search with the SAT pipeline on every connected graph
//! with up to five vertices.

use linlayout::constructions::small_connected_graphs;
use linlayout::{brute_force_solve, compute_layout, LayoutSpec, SolveStatus, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = [LayoutSpec::stacks(1), LayoutSpec::queues(1), LayoutSpec::stacks(2)];
    let mut mismatches = 0;
    for n in 1..=5 {
        let graphs = small_connected_graphs(n);
        let mut feasible = [0; 3];
        for g in &graphs {
            for (i, spec) in specs.iter().enumerate() {
                let brute = brute_force_solve(g, spec)?.is_some();
                let sat = compute_layout(g, spec, &SolverConfig::builtin())?.status == SolveStatus::Sat;
                mismatches += usize::from(brute != sat);
                feasible[i] += usize::from(brute);
            }
        }
        println!("n={n}: {} graphs, 1 stack {}, 1 queue {}, 2 stacks {}", graphs.len(), feasible[0], feasible[1], feasible[2]);
    }
    println!("mismatches: {mismatches}");
    Ok(())
}
