//! Fold a finite generating set of a subgroup of a free group into its
//! Stallings graph.
//!
//! ```text
//! cargo run --example fold_subgroup -- aa b abAB
//! ```

use wcycles::fold_words;

fn main() -> wcycles::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let gens: Vec<&str> = if args.is_empty() { vec!["aa", "b", "abAB"] } else { args.iter().map(String::as_str).collect() };
    let rank = gens
        .iter()
        .flat_map(|w| w.chars())
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_lowercase() as u32 - 'a' as u32 + 1)
        .max()
        .unwrap_or(1);

    let folded = fold_words(rank, &gens, true)?;
    let g = &folded.immersion.domain;
    println!("generators {gens:?} over the rank-{rank} rose");
    println!("Stallings graph: {} vertices, {} edges", g.num_vertices(), g.num_edges());
    println!("χ = {}, rank of the subgroup = {}", g.euler_characteristic()?, g.rank()?);
    println!("immersion: {}", folded.immersion.is_immersion()?);
    for (id, e) in g.edges() {
        let label = folded.immersion.map_signed(wcycles::SignedEdge::forward(id))?;
        println!("  {id}: {} -> {} reads {}", e.src, e.dst, wcycles::Word(vec![label]));
    }
    Ok(())
}
