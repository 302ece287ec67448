//! Emit Graphviz for a Stallings graph and its labelling.
//!
//! ```text
//! cargo run --example export_dot | dot -Tsvg > fold.svg
//! ```

use wcycles::fold_words;
use wcycles::render::{graph_dot, morphism_dot};

fn main() -> wcycles::Result<()> {
    let folded = fold_words(2, &["aa", "bab", "abAb"], true)?;
    if std::env::args().any(|a| a == "--plain") {
        print!("{}", graph_dot(&folded.immersion.domain, "core"));
    } else {
        print!("{}", morphism_dot(&folded.immersion, "core"));
    }
    Ok(())
}
