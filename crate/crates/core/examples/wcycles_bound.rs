//! Count the w-cycles of an immersion against its rank over random
//! finite covers of the rose.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcycles::harness::{random_cover, random_primitive_word};
use wcycles::theorems::wcycles_check;
use wcycles::Loop;

fn main() -> wcycles::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tightest = 0.0f64;
    for k in 0..50 {
        let rho = random_cover(&mut rng, 2, 5)?;
        let w = Loop::new(random_primitive_word(&mut rng, 2, 10).0);
        let v = wcycles_check(&k.to_string(), &rho, &w)?;
        assert!(v.pass, "{v:?}");
        tightest = tightest.max(v.circles as f64 / v.rank as f64);
        if k < 5 {
            println!("cover {k}: {} w-cycles, rank {}", v.circles, v.rank);
        }
    }
    println!("50 covers checked; largest circles/rank ratio {tightest:.2}");
    Ok(())
}
