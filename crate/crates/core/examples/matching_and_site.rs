// Two laws with small path density: the mutual-choice matching (no two open
// edges touch) and the two-colouring site process (density exactly 1/2).

use treedense::density::{max_path_dfs, site_path_density, site_path_extremes};
use treedense::samplers::SamplerSpec;
use treedense::{Seed, TreeParams};

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    let matching = SamplerSpec::MutualChoiceMatching;
    for n in [4u32, 8, 12] {
        let best: Vec<u32> = (0..20)
            .map(|s| max_path_dfs(&matching, params, Seed::new(s), n, true).map(|r| r.open_count))
            .collect::<treedense::Result<_>>()?;
        let top = best.iter().max().copied().unwrap_or(0);
        println!(
            "matching n = {n:>2}: best open count over 20 seeds {top} (ceil(n/2) = {})",
            n.div_ceil(2)
        );
    }
    let site = SamplerSpec::BipartiteSite;
    for s in 0..2 {
        let (lo, hi) = site_path_extremes(&site, params, Seed::new(s), 12)?;
        let long = site_path_density(&site, params, Seed::new(s), 1001)?;
        println!(
            "bipartite-site seed {s}: n = 12 counts in [{lo}, {hi}], n = 1001 density {:.4}",
            long.value
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
