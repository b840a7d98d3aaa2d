// Max of two independent copies at the threshold a(3,2): whenever the union
// has a fully open path, one copy alone is open on at least half of it.

use treedense::bounds::a_threshold;
use treedense::density::best_copy_density;
use treedense::samplers::SamplerSpec;
use treedense::{Seed, TreeParams};

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    let a = a_threshold(params, 2)?;
    let spec = SamplerSpec::max_of_k(SamplerSpec::bernoulli(a)?, 2)?;
    println!("{spec}: marginal of the max is 2/3");
    let n = 24;
    let (mut open, mut worst) = (0, 1.0f64);
    for s in 0..200 {
        let c = best_copy_density(&spec, params, Seed::new(s), n)?;
        if c.fully_open {
            open += 1;
            worst = worst.min(c.best_copy_average);
        }
        if s < 5 {
            let counts = c.record.copy_counts.as_deref().unwrap_or_default();
            println!(
                "  seed {s}: union {}/{n}, copies {counts:?}, pigeonhole {:.3}",
                c.record.open_count, c.pigeonhole_bound
            );
        }
    }
    println!("fully open in {open}/200 seeds; smallest best-copy average there: {worst:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
