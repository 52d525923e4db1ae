//! Print the size of each graph family and check planarity.

use linlayout::{
    generate_skeleton, generate_stellated_skeleton, generate_step2_gadget, goldner_harary, random_triangulated_quad,
    Graph,
};

fn report(name: &str, g: &Graph) {
    println!("{name:28} n={:4} m={:5} planar={}", g.vertex_count(), g.edge_count(), g.is_planar());
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    report("goldner_harary", &goldner_harary());
    report("skeleton(20)", &generate_skeleton(20)?.0);
    report("stellated_skeleton(20)", &generate_stellated_skeleton(20)?.0);
    report("step2_gadget(5)", &generate_step2_gadget(5)?.0);
    let (quad, frame) = random_triangulated_quad(30, 7)?;
    report("random_triangulated_quad(30)", &quad);
    println!("quad corners s={} a={} t={} b={}", frame.s, frame.a, frame.t, frame.b);
    Ok(())
}
