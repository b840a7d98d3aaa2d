// A full experiment through the harness: config in, CSV/JSON out. The same
// config gives the same bytes at any thread count.

use treedense::harness::{render, run, ExperimentConfig, ExperimentKind, Format};

pub fn run_example() -> treedense::Result<()> {
    let config = ExperimentConfig::from_json_str(
        r#"{
            "kind": "density-sweep",
            "sampler": "max(bernoulli(0.3),k=2)",
            "d": 3,
            "horizons": [4, 8, 16],
            "seed": 100,
            "trials": 300
        }"#,
    )?;
    let mut bytes = Vec::new();
    for threads in [1, 4] {
        let mut c = config.clone();
        c.threads = Some(threads);
        bytes.push(render(c.kind, &run(&c)?, Format::Csv)?);
    }
    print!("{}", String::from_utf8_lossy(&bytes[0]));
    println!("identical at 1 and 4 threads: {}", bytes[0] == bytes[1]);

    let mut survival = ExperimentConfig::new(ExperimentKind::Survival);
    survival.p = 0.6;
    survival.horizons = vec![1, 10, 100];
    let json = render(survival.kind, &run(&survival)?, Format::Json)?;
    print!("{}", String::from_utf8_lossy(&json));
    Ok(())
}

#[allow(dead_code)]
fn main() -> treedense::Result<()> {
    run_example()
}
