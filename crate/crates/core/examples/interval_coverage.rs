// Which marginals are covered by some k-copies interval `[a(d,k), 1/k)`.

use treedense::bounds::{interval_coverage, overlap_criterion};
use treedense::TreeParams;

pub fn run_example() -> treedense::Result<()> {
    for d in 3..=6 {
        let params = TreeParams::new(d)?;
        let report = interval_coverage(params, 64, 1e-4)?;
        let first_fail = (1..=64).find(|&k| !overlap_criterion(params, k));
        println!(
            "d = {d}: {} intervals listed, {} gaps, first k failing a(d,k) <= 1/(k+1): {}",
            report.intervals.len(),
            report.gaps.len(),
            first_fail.map_or("none".to_string(), |k| k.to_string()),
        );
        for g in &report.gaps {
            println!("    gap [{:.4}, {:.4})", g.lo, g.hi);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
