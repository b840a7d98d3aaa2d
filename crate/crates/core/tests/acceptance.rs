//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints a PASS/FAIL line regardless of capture settings.

use std::process::ExitCode;
use std::time::Instant;

use treedense::bounds::{a_threshold, f_bound, haggstrom_threshold, interval_coverage, sharp_bernoulli_density_bound};
use treedense::density::{
    best_copy_density, enumerate_oracle, exact_bernoulli_distribution, max_path_dfs, site_path_extremes,
    survival_fully_open,
};
use treedense::harness::{run_and_emit, ExperimentConfig, ExperimentKind, Format, Grid};
use treedense::samplers::{edge_state, SamplerSpec};
use treedense::tree::{children, EdgeId, Seed, TreeParams, VertexId};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn t(d: u32) -> TreeParams {
    TreeParams::new(d).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn formulas() -> Outcome {
    let checks = [
        ("a(3,2)", a_threshold(t(3), 2).unwrap(), 0.422_649_730_8),
        ("a(3,1)", a_threshold(t(3), 1).unwrap(), 2.0 / 3.0),
        ("a(4,3)", a_threshold(t(4), 3).unwrap(), 0.206_299_474_0),
        ("f_3(1/4)", f_bound(t(3), 0.25).unwrap(), 1.0),
        ("f_3(0.01)", f_bound(t(3), 0.01).unwrap(), std::f64::consts::LOG10_2),
        ("haggstrom(3)", haggstrom_threshold(t(3)), 2.0 / 3.0),
    ];
    let mut worst = 0.0f64;
    for (name, got, want) in checks {
        let err = (got - want).abs();
        ensure(err <= 1e-9, || format!("{name} = {got}, expected {want}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max error {worst:.1e}"))
}

fn coverage() -> Outcome {
    for d in 4..=10 {
        let r = interval_coverage(t(d), 64, 1e-4).map_err(|e| e.to_string())?;
        ensure(r.gaps.is_empty(), || format!("d = {d}: gaps {:?}", r.gaps))?;
    }
    let r = interval_coverage(t(3), 64, 1e-4).map_err(|e| e.to_string())?;
    let hit = r
        .gaps
        .iter()
        .find(|g| (g.lo - 0.5).abs() <= 1e-4 && (g.hi - 2.0 / 3.0).abs() <= 1e-4)
        .ok_or_else(|| format!("d = 3: no gap (1/2, 2/3) among {:?}", r.gaps))?;
    Ok(format!(
        "d = 4..10 gap-free; d = 3 has {} gaps incl. [{:.6}, {:.6}]",
        r.gaps.len(),
        hit.lo,
        hit.hi
    ))
}

fn k_regime() -> Outcome {
    let mut margin = f64::INFINITY;
    for k in 2..=64u32 {
        let diff = a_threshold(t(3), k).unwrap() - 1.0 / f64::from(k);
        let below = k <= 5;
        ensure(if below { diff < -1e-6 } else { diff > 1e-6 }, || {
            format!("k = {k}: a(3,k) - 1/k = {diff:e}")
        })?;
        margin = margin.min(diff.abs());
    }
    Ok(format!("smallest margin {margin:.3e}"))
}

fn oracle() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for p in [0.1, 0.5, 0.9] {
            let exact = exact_bernoulli_distribution(t(3), p, n).map_err(|e| e.to_string())?;
            let brute = enumerate_oracle(t(3), p, n).map_err(|e| e.to_string())?;
            ensure(exact.cdf.len() == brute.cdf.len(), || {
                format!("n = {n}: cdf lengths differ")
            })?;
            for (a, b) in exact.cdf.iter().zip(&brute.cdf) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("cdf difference {worst:e}"))?;
    let e2 = exact_bernoulli_distribution(t(3), 0.5, 2).unwrap().expectation();
    ensure((e2 - 449.0 / 256.0).abs() <= 1e-12, || format!("E[M_2] = {e2}"))?;
    Ok(format!("max cdf difference {worst:.1e}; E[M_2] = {e2}"))
}

fn dfs_vs_exact() -> Outcome {
    let spec = SamplerSpec::Bernoulli { p: 0.5 };
    let n = 10;
    let seeds = 10_000u64;
    let exact = exact_bernoulli_distribution(t(3), 0.5, n).unwrap();
    let mut xs = Vec::with_capacity(seeds as usize);
    for s in 0..seeds {
        let pruned = max_path_dfs(&spec, t(3), Seed::new(s), n, true).unwrap();
        let full = max_path_dfs(&spec, t(3), Seed::new(s), n, false).unwrap();
        ensure(pruned == full, || format!("seed {s}: pruning changed the result"))?;
        xs.push(f64::from(pruned.open_count));
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let ex = exact.expectation();
    let ex2: f64 = (0..=n as usize).map(|m| (m * m) as f64 * exact.pmf(m)).sum();
    let sigma = ((ex2 - ex * ex) / seeds as f64).sqrt();
    let z = (mean - ex) / sigma;
    ensure(z.abs() <= 4.0, || format!("mean {mean}, exact {ex}, z = {z:.2}"))?;
    Ok(format!(
        "mean {mean:.5} vs exact {ex:.5} (z = {z:+.2}); prune on/off identical"
    ))
}

fn survival() -> Outcome {
    let s = survival_fully_open(t(3), 2.0 / 3.0, 200).map_err(|e| e.to_string())?;
    let err = (s.at_horizon - 7.0 / 8.0).abs();
    ensure(err <= 1e-6, || format!("P(M_200 = 200) = {}", s.at_horizon))?;
    let sub = survival_fully_open(t(3), 0.4, 200).map_err(|e| e.to_string())?;
    ensure(sub.at_horizon <= 1e-6, || format!("p = 0.4: {}", sub.at_horizon))?;
    Ok(format!("|P - 7/8| = {err:.1e}; p = 0.4 gives {:.1e}", sub.at_horizon))
}

fn bernoulli_bounds() -> Outcome {
    let mut parts = Vec::new();
    for (d, p) in [(3, 0.01), (3, 0.05), (4, 0.01)] {
        let est = exact_bernoulli_distribution(t(d), p, 512).unwrap().mean_density();
        let upper = f_bound(t(d), p).unwrap().min(1.0);
        let sharp = sharp_bernoulli_density_bound(t(d), p).unwrap();
        ensure(est >= p && est <= upper, || {
            format!("(d={d}, p={p}): {est} outside [{p}, {upper}]")
        })?;
        ensure(est <= sharp + 0.02, || {
            format!("(d={d}, p={p}): {est} > sharp {sharp} + 0.02")
        })?;
        parts.push(format!("({d},{p}) {est:.4} <= {sharp:.4}"));
    }
    Ok(parts.join("; "))
}

fn pigeonhole() -> Outcome {
    let base = SamplerSpec::Bernoulli {
        p: a_threshold(t(3), 2).unwrap(),
    };
    let spec = SamplerSpec::max_of_k(base, 2).unwrap();
    let mut open = 0;
    for s in 0..1000 {
        let c = best_copy_density(&spec, t(3), Seed::new(s), 24).map_err(|e| e.to_string())?;
        if c.fully_open {
            open += 1;
            ensure(c.best_copy_average >= 0.5, || {
                format!("seed {s}: best copy {}", c.best_copy_average)
            })?;
        }
        ensure(c.best_copy_average >= c.pigeonhole_bound, || {
            format!("seed {s}: below pigeonhole bound")
        })?;
    }
    Ok(format!("{open} fully open trials, 0 violations"))
}

fn matching_and_site() -> Outcome {
    let params = t(3);
    let spec = SamplerSpec::MutualChoiceMatching;
    let mut open_edges = 0u64;
    for s in 0..1000 {
        let seed = Seed::new(s);
        let mut frontier = vec![VertexId::root()];
        for _ in 0..8 {
            let mut next = Vec::new();
            for v in &frontier {
                let up = match v.edge() {
                    Some(e) => edge_state(&spec, params, seed, &e).unwrap(),
                    None => false,
                };
                let mut incident = u32::from(up);
                for c in children(v, params).unwrap() {
                    let e = EdgeId::new(c.clone()).unwrap();
                    if edge_state(&spec, params, seed, &e).unwrap() {
                        incident += 1;
                        open_edges += 1;
                    }
                    next.push(c);
                }
                ensure(incident <= 1, || {
                    format!("seed {s}: vertex {v} has {incident} open edges")
                })?;
            }
            frontier = next;
        }
    }
    for s in 0..8 {
        let (lo, hi) = site_path_extremes(&SamplerSpec::BipartiteSite, params, Seed::new(s), 16).unwrap();
        ensure(lo == 8 && hi == 8, || format!("seed {s}: site counts in [{lo}, {hi}]"))?;
    }
    Ok(format!(
        "{open_edges} open matching edges, none adjacent; site density 8/16 on every path"
    ))
}

fn monotone() -> Outcome {
    let grid = [0.1, 0.3, 0.4226497308, 0.5, 0.6, 2.0 / 3.0, 0.8, 0.95];
    let mut comparisons = 0;
    for s in 0..1000 {
        let seed = Seed::new(s);
        let counts: Vec<u32> = grid
            .iter()
            .map(|&p| {
                max_path_dfs(&SamplerSpec::Bernoulli { p }, t(3), seed, 12, true)
                    .unwrap()
                    .open_count
            })
            .collect();
        for (w, ps) in counts.windows(2).zip(grid.windows(2)) {
            comparisons += 1;
            ensure(w[0] <= w[1], || {
                format!("seed {s}: M(p={}) = {} > M(p={}) = {}", ps[0], w[0], ps[1], w[1])
            })?;
        }
    }
    Ok(format!("{comparisons} adjacent-pair comparisons, 0 violations"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut configs = Vec::new();
    let mut density = ExperimentConfig::new(ExperimentKind::DensitySweep);
    density.sampler = "max(bernoulli(0.3),k=2)".into();
    density.horizons = vec![4, 8, 12];
    density.trials = 200;
    configs.push(density);
    let mut copies = ExperimentConfig::new(ExperimentKind::Copies);
    copies.sampler = "max(bernoulli(0.4226497308),k=2)".into();
    copies.horizons = vec![10];
    copies.trials = 100;
    configs.push(copies);
    let mut bounds = ExperimentConfig::new(ExperimentKind::BoundsCurve);
    bounds.p_grid = "0.01:1:0.01".parse::<Grid>().map_err(|e| e.to_string())?;
    configs.push(bounds);
    let mut files = 0;
    for (i, base) in configs.into_iter().enumerate() {
        for format in [Format::Csv, Format::Json] {
            let mut outputs = Vec::new();
            for threads in [1usize, 4] {
                let mut c = base.clone();
                c.threads = Some(threads);
                c.format = format;
                let path = dir.path().join(format!("{i}-{threads}.out"));
                c.output = Some(path.clone());
                run_and_emit(&c).map_err(|e| e.to_string())?;
                outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
            }
            ensure(outputs[0] == outputs[1], || {
                format!("{} differs across thread counts", base.kind.name())
            })?;
            files += 1;
        }
    }
    Ok(format!("{files} output pairs byte-identical at 1 and 4 threads"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("formula regression", formulas),
        ("interval coverage", coverage),
        ("k-regime boundary d=3", k_regime),
        ("oracle equivalence", oracle),
        ("dfs vs exact", dfs_vs_exact),
        ("survival fixed point", survival),
        ("bernoulli density bounds", bernoulli_bounds),
        ("pigeonhole copies", pigeonhole),
        ("matching and site", matching_and_site),
        ("monotone coupling", monotone),
        ("determinism across threads", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
