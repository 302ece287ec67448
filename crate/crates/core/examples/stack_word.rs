//! Build a good stacking of a primitive word on a rose by climbing a tower
//! of cyclic covers, then draw it.
//!
//! ```text
//! cargo run --example stack_word -- aabbb /tmp/aabbb.svg
//! ```

use wcycles::render::stacking_svg;
use wcycles::stacking::{construct_stacking, Side};
use wcycles::{Graph, Loop};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let word = args.next().unwrap_or_else(|| "aabbb".into());
    let svg = args.next();

    let base = Graph::rose(2);
    let w = Loop::from_word(&base, &word)?;
    let (stacking, trace) = construct_stacking(&base, &w)?;

    println!("{word}: tower depth {}", trace.depth());
    for (k, stage) in trace.stages.iter().enumerate() {
        let z = stage.cocycle.as_ref().map(|c| c.weights.values().copied().collect::<Vec<_>>());
        println!("  stage {k}: E = {}, V = {}, cocycle {z:?}", stage.edge_count, stage.vertex_count);
    }
    for (e, order) in &stacking.edge_orders {
        let pos: Vec<usize> = order.iter().map(|p| p.pos()).collect();
        println!("  edge {} bottom to top: {pos:?}", e.0);
    }
    println!(
        "good: {}, open arcs above {}, below {}",
        stacking.is_good()?,
        stacking.count_open_arcs(Side::Above)?,
        stacking.count_open_arcs(Side::Below)?
    );
    if let Some(path) = svg {
        std::fs::write(&path, stacking_svg(&stacking))?;
        println!("wrote {path}");
    }
    Ok(())
}
