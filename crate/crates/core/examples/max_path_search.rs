// Branch-and-bound search for the best path in one sampled configuration.

use treedense::density::{max_path_dfs, max_path_profile};
use treedense::samplers::parse_sampler;
use treedense::{Seed, TreeParams};

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    let spec = parse_sampler("bernoulli(0.5)")?;
    let seed = Seed::new(2024);
    let best = max_path_dfs(&spec, params, seed, 16, true)?;
    println!("{spec}, seed 2024, n = 16");
    println!("  best path {:?}", best.path);
    println!(
        "  open edges {} (average {:.4}), endpoint {}",
        best.open_count,
        best.average(),
        best.endpoint()
    );

    let horizons = [4, 8, 16, 24];
    let profile = max_path_profile(&spec, params, seed, &horizons)?;
    for (h, m) in horizons.iter().zip(&profile) {
        println!("  M_{h:<2} = {m:>2}  ({:.4})", f64::from(*m) / f64::from(*h));
    }

    let unpruned = max_path_dfs(&spec, params, seed, 12, false)?;
    let pruned = max_path_dfs(&spec, params, seed, 12, true)?;
    println!("  n = 12 with and without pruning agree: {}", pruned == unpruned);
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
