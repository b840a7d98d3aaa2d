// Paths that keep density a at every prefix (up to slack c), a liminf-style
// counterpart of the best path search.

use treedense::density::barrier_survival;
use treedense::samplers::SamplerSpec;
use treedense::{Seed, TreeParams};

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    for p in [0.2, 0.3, 0.4] {
        let spec = SamplerSpec::bernoulli(p)?;
        print!("p = {p}:");
        for a in [0.6, 0.75, 0.9] {
            let alive = (0..100)
                .filter(|&s| {
                    barrier_survival(&spec, params, Seed::new(s), 60, a, 2.0, 1)
                        .map(|o| o.survivors > 0)
                        .unwrap_or(false)
                })
                .count();
            print!("  a = {a}: {alive:>3}%");
        }
        println!();
    }
    let out = barrier_survival(&SamplerSpec::bernoulli(0.4)?, params, Seed::new(1), 12, 0.75, 1.0, 50)?;
    println!(
        "seed 1, n = 12: {} survivors (capped: {}), e.g. {:?}",
        out.survivors,
        out.capped,
        out.example.map(|r| r.path)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
