//! Write the CNF for K5 on three stacks in DIMACS form, plus the variable map.

use linlayout::{emit_dimacs, encode, Graph, LayoutSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names = ["a", "b", "c", "d", "e"];
    let pairs: Vec<(&str, &str)> =
        (0..5).flat_map(|i| (i + 1..5).map(move |j| (names[i], names[j]))).collect();
    let g = Graph::from_edges(&pairs)?;
    let (cnf, vars) = encode(&g, &LayoutSpec::stacks(3))?;
    eprintln!(
        "{} variables ({} order, {} page, {} pair), {} clauses",
        cnf.variable_count(),
        vars.sigma_count(),
        vars.phi_count(),
        vars.chi_count(),
        cnf.clause_count()
    );
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("k5.cnf"), emit_dimacs(&cnf))?;
    std::fs::write(dir.join("k5.vars.json"), serde_json::to_vec_pretty(&vars.to_json())?)?;
    println!("{}", dir.join("k5.cnf").display());
    Ok(())
}
