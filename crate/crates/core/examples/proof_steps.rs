//! Runs the three skeleton experiments at small sizes with the builtin solver.
//!
//! cargo run --example proof_steps -- [n1] [k2] [n3] [seeds]

use std::time::Instant;

use linlayout::experiments::{run_step1, run_step2, run_step3_batch};
use linlayout::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let arg = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let cfg = SolverConfig::builtin();
    let out = std::env::temp_dir().join("linlayout-proof-steps");

    let t = Instant::now();
    let r = run_step1(arg(0, 20) as usize, &cfg, &out)?;
    println!("{} {:?} in {:?} notes={:?}", r.report.id, r.report.status, t.elapsed(), r.report.notes);

    let t = Instant::now();
    let r = run_step2(arg(1, 5) as usize, &cfg, &out)?;
    println!("{} {:?} in {:?}", r.report.id, r.report.status, t.elapsed());

    let seeds: Vec<u64> = (0..arg(3, 5)).collect();
    let t = Instant::now();
    let reports = run_step3_batch(arg(2, 30) as usize, &seeds, &cfg, 1, &out)?;
    for r in &reports {
        println!("{} {:?} {} ms notes={:?}", r.id, r.status, r.wall_ms, r.notes);
    }
    println!("step3 batch in {:?}; output in {}", t.elapsed(), out.display());
    Ok(())
}
