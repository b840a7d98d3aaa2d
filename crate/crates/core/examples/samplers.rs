// Sampler text forms, lazily evaluated edge states, and marginals.

use treedense::samplers::{edge_state, empirical_marginal, exact_marginal, parse_sampler};
use treedense::tree::children;
use treedense::{EdgeId, Seed, TreeParams, VertexId};

pub fn run_example() -> treedense::Result<()> {
    let params = TreeParams::new(3)?;
    let seed = Seed::new(11);
    for text in [
        "bernoulli(0.5)",
        "max( bernoulli(0.25), k=3 )",
        "complement(matching)",
        "matching",
    ] {
        let spec = parse_sampler(text)?;
        let mut states = String::new();
        let mut frontier = vec![VertexId::root()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for v in &frontier {
                for c in children(v, params)? {
                    let open = edge_state(&spec, params, seed, &EdgeId::new(c.clone())?)?;
                    states.push(if open { '1' } else { '0' });
                    next.push(c);
                }
            }
            states.push(' ');
            frontier = next;
        }
        let est = empirical_marginal(&spec, params, 0, 20_000)?;
        println!(
            "{:<28} depths 1-3: {states} marginal {:.4} (exact {:.4})",
            spec.render(),
            est.fixed.mean,
            exact_marginal(&spec, params)
        );
    }
    match parse_sampler("max(bernoulli(0.5),j=2)") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
