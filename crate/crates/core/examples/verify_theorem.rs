//! Check the degree bound deg σ ≤ −χ(Γ′) for a few immersions, and show
//! which branch each instance lands on.

use wcycles::fold_words;
use wcycles::theorems::verify_main_theorem;
use wcycles::{Graph, Loop};

fn main() -> wcycles::Result<()> {
    let cases: [(&[&str], &str); 4] =
        [(&["a", "b"], "abAB"), (&["aa", "b"], "a"), (&["b"], "a"), (&["aa", "bb", "abab", "baBA"], "aab")];
    for (gens, word) in cases {
        let rho = fold_words(2, gens, true)?.immersion;
        let w = Loop::from_word(&Graph::rose(2), word)?;
        let v = verify_main_theorem(&format!("{gens:?}"), &rho, &w)?;
        println!(
            "{:<28} w = {word:<5} {:?}: deg σ = {}, −χ = {}, pass {}",
            v.instance, v.branch, v.deg_sigma, v.neg_chi, v.pass
        );
    }
    Ok(())
}
