//! Pull a word back along an immersion and read off the circles lying
//! over it and their covering degrees.

use wcycles::fold_words;
use wcycles::pullback::{is_reducible, pullback_loop};
use wcycles::{Graph, Loop};

fn main() -> wcycles::Result<()> {
    let rho = fold_words(2, &["aa", "bb", "abab"], true)?.immersion;
    for word in ["a", "ab", "aab", "abAB"] {
        let w = Loop::from_word(&Graph::rose(2), word)?;
        let pb = pullback_loop(&rho, &w)?;
        let degrees: Vec<usize> = pb.lifts.iter().map(|l| l.degree).collect();
        let red = is_reducible(&pb.circles);
        println!(
            "{word:>5}: deg σ = {}, {} circles with degrees {degrees:?}, reducible {}",
            pb.covering_degree(),
            pb.circles.loops.len(),
            red.reducible
        );
    }
    Ok(())
}
