//! Certify χ ≤ 0 or contractibility for complexes built from an
//! immersion and some of the lifts of the relator, then replay the
//! certificate independently.

use wcycles::fold_words;
use wcycles::theorems::{npi_check, relator_lifts, replay_certificate, OneRelatorComplex};
use wcycles::{Graph, GraphMorphism, Loop};

fn report(name: &str, y: &OneRelatorComplex, rho: &GraphMorphism, w: &Loop) -> wcycles::Result<()> {
    let v = npi_check(y, rho, w)?;
    let replay = replay_certificate(&v.certificate);
    println!("{name}: χ = {}, trivial π₁ {}, pass {}, replay {replay:?}", v.chi, v.trivial_pi1, v.pass);
    println!("  {}", serde_json::to_string(&v.certificate.step).unwrap_or_default());
    Ok(())
}

fn main() -> wcycles::Result<()> {
    let torus = Loop::from_word(&Graph::rose(2), "abAB")?;
    let id = GraphMorphism::identity(&Graph::rose(2));
    let y = OneRelatorComplex { graph: Graph::rose(2), attachments: vec![torus.clone()] };
    report("torus", &y, &id, &torus)?;

    let w = Loop::from_word(&Graph::rose(2), "ab")?;
    let rho = fold_words(2, &["ab", "ba", "aa"], true)?.immersion;
    let lifts = relator_lifts(&rho, &w)?;
    let y = OneRelatorComplex { graph: rho.domain.clone(), attachments: lifts };
    report("lifts of ab", &y, &rho, &w)?;
    Ok(())
}
