// Lower bounds on the best path density over a grid of marginals, next to
// the Bernoulli upper bounds.

use treedense::bounds::{a_threshold, f_bound, lower_bound_curve, sharp_bernoulli_density_bound};
use treedense::TreeParams;

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    println!("a(3,k) for k = 1..6:");
    for k in 1..=6 {
        println!(
            "  k = {k}: {:.10}  (1/k = {:.4})",
            a_threshold(params, k)?,
            1.0 / f64::from(k)
        );
    }
    println!(
        "\n{:>6} {:>8} {:>12} {:>10} {:>10}",
        "p", "lower", "source", "sharp", "f_3(p)"
    );
    for i in 1..20 {
        let p = f64::from(i) * 0.05;
        let point = lower_bound_curve(params, p)?;
        let sharp = sharp_bernoulli_density_bound(params, p)?;
        let f = f_bound(params, p)?.min(1.0);
        println!(
            "{p:>6.2} {:>8.4} {:>12} {sharp:>10.4} {f:>10.4}",
            point.lower,
            point.source.tag()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
