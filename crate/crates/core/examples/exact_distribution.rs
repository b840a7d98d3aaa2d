// Exact law of the best open count under Bernoulli percolation, checked
// against brute force on a small ball, plus the fully-open survival limit.

use treedense::density::{enumerate_oracle, exact_bernoulli_distribution, survival_fully_open};
use treedense::TreeParams;

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    let exact = exact_bernoulli_distribution(params, 0.5, 2)?;
    let brute = enumerate_oracle(params, 0.5, 2)?;
    println!(
        "E[M_2] at p = 1/2: recursion {} / enumeration {} (449/256 = {})",
        exact.expectation(),
        brute.expectation(),
        449.0 / 256.0
    );

    println!("\nE[M_n]/n, d = 3");
    print!("{:>6}", "n");
    let ps = [0.05, 0.3, 0.5, 0.7];
    for p in ps {
        print!("{:>10}", format!("p={p}"));
    }
    println!();
    for n in [1u32, 4, 16, 64, 256, 1024] {
        print!("{n:>6}");
        for p in ps {
            print!("{:>10.5}", exact_bernoulli_distribution(params, p, n)?.mean_density());
        }
        println!();
    }

    println!("\nP(M_n = n) at p = 2/3:");
    for n in [1u32, 10, 50, 200] {
        let s = survival_fully_open(params, 2.0 / 3.0, n)?;
        println!(
            "  n = {n:>3}: {:.8}  (limit {:.8}, theta {:.6})",
            s.at_horizon, s.limit, s.theta
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
