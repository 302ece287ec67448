//! Lower bound on the genus of a surface whose boundary maps to a power
//! of a primitive word.

use wcycles::theorems::genus_lower_bound;
use wcycles::{Graph, Loop};

fn main() -> wcycles::Result<()> {
    let w = Loop::from_word(&Graph::rose(2), "abAB")?;
    for m in 1..=4 {
        let g = genus_lower_bound(&w, m)?;
        println!("w^{m}: genus ≥ {}", g.bound);
    }
    for step in genus_lower_bound(&w, 3)?.chain {
        println!("  {step}");
    }
    Ok(())
}
