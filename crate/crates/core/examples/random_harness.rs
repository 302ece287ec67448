//! Run the randomized harness and print its summary.
//!
//! ```text
//! cargo run --release --example random_harness -- 42 1000
//! ```

use wcycles::harness::{run_harness, Bounds};

fn main() -> wcycles::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);

    let (summary, reports) = run_harness(seed, count, &Bounds::default())?;
    println!("seed {seed}: {}/{} passed", summary.passed, summary.count);
    println!("branches {:?}", summary.branches);
    println!("deepest tower {}, subdivided bases {}", summary.max_depth, summary.subdivided);
    if let Some(r) = reports.iter().find(|r| !r.pass()) {
        println!("first failure: {r:?}");
    }
    Ok(())
}
