//! Check a hand-written layout and print every violation.

use linlayout::{verify, Constraint, Graph, LayoutSpec, LinearLayout};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Graph::from_edges(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c"), ("b", "d")])?;
    let spec = LayoutSpec::stacks(2)
        .with_constraint(Constraint::precedes("d", "a"))
        .with_constraint(Constraint::same_page(["a-c", "b-d"]));
    // a-c and b-d cross on page 0.
    let layout = LinearLayout {
        order: ["a", "b", "c", "d"].map(Into::into).to_vec(),
        assignment: [("a-b", 0), ("b-c", 0), ("c-d", 0), ("d-a", 1), ("a-c", 0), ("b-d", 0)]
            .into_iter()
            .map(|(e, p)| (e.into(), p))
            .collect(),
    };
    let violations = verify(&g, &spec, &layout)?;
    for v in &violations {
        println!("{v}");
    }
    println!("{} violation(s)", violations.len());
    Ok(())
}
