//! Render a three-stack layout of the Goldner-Harary graph as SVG.
//!
//! cargo run --example arc_diagram -- out.svg [sides]

use linlayout::{compute_layout, goldner_harary, render_arc_diagram, LayoutSpec, SolverConfig, SvgOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "goldner_harary.svg".into());
    let opts = match args.next() {
        Some(s) => SvgOptions::parse_sides(&s)?,
        None => SvgOptions::default(),
    };
    let g = goldner_harary();
    let out = compute_layout(&g, &LayoutSpec::stacks(3), &SolverConfig::builtin())?;
    let layout = out.layout.ok_or("no layout")?;
    std::fs::write(&path, render_arc_diagram(&g, &layout, &opts))?;
    println!("wrote {path}");
    Ok(())
}
