//! Reproducible experiment runs: seeds, sweeps, aggregation and emission.
//!
//! Trial `i` always uses seed `base + i`. Trials run on a rayon pool and are
//! collected in index order before aggregation, so results never depend on
//! the thread count.

mod config;
mod records;

pub use config::{ExperimentConfig, ExperimentKind, Format, Grid};
pub use records::{
    csv_header, emit, read_json, render, render_csv, render_json, sig12, BarrierRow, BoundsRow, CopiesRow, CoverageRow,
    DensityRow, MarginalRow, ResultRecord, SurvivalRow,
};

use std::time::Instant;

use rayon::prelude::*;

use crate::bounds::{interval_coverage, lower_bound_curve};
use crate::density::{
    barrier_survival, best_copy_density, density_samples, exact_bernoulli_distribution, site_path_density,
    survival_fixed_point,
};
use crate::error::{Error, Result};
use crate::samplers::{empirical_marginal, exact_marginal, Mode, SamplerSpec};
use crate::stats::NeumaierSum;
pub use crate::stats::{confidence_interval, mean_ci, Interval};
use crate::tree::{Seed, TreeParams};

/// Runs one experiment on a pool with `config.threads` workers (rayon's default otherwise).
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("--threads: {e}")))?;
    pool.install(|| run_in_pool(config))
}

/// Runs and writes the output file named in the config, if any.
pub fn run_and_emit(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let records = run(config)?;
    if let Some(path) = &config.output {
        emit(config.kind, &records, config.format, path)?;
    }
    Ok(records)
}

struct Clock {
    start: Instant,
    enabled: bool,
}

impl Clock {
    fn start(enabled: bool) -> Self {
        Clock {
            start: Instant::now(),
            enabled,
        }
    }

    fn seconds(&self) -> f64 {
        if self.enabled {
            self.start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    }
}

fn run_in_pool(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let params = cfg.tree()?;
    match cfg.kind {
        ExperimentKind::DensitySweep => density_sweep(cfg, params),
        ExperimentKind::BoundsCurve => bounds_curve(cfg, params),
        ExperimentKind::Coverage => coverage(cfg, params),
        ExperimentKind::Barrier => barrier(cfg, params),
        ExperimentKind::Copies => copies(cfg, params),
        ExperimentKind::Marginal => marginal(cfg, params),
        ExperimentKind::Survival => survival(cfg, params),
    }
}

fn seeds(cfg: &ExperimentConfig) -> impl IndexedParallelIterator<Item = Seed> + '_ {
    (0..cfg.trials as usize)
        .into_par_iter()
        .map(move |i| Seed::new(cfg.seed.wrapping_add(i as u64)))
}

fn density_sweep(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    let clock = Clock::start(cfg.timing);
    let spec = cfg.sampler_spec()?;
    let rows: Vec<Vec<f64>> = match spec.mode() {
        Mode::Edge => density_samples(&spec, params, cfg.seed, cfg.trials, &cfg.horizons)?,
        Mode::Site => seeds(cfg)
            .map(|seed| {
                cfg.horizons
                    .iter()
                    .map(|&n| Ok(site_path_density(&spec, params, seed, n)?.value))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?,
    };
    let seconds = clock.seconds();
    cfg.horizons
        .iter()
        .enumerate()
        .map(|(col, &n)| {
            let xs: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            let (mean, ci) = mean_ci(&xs)?;
            let max = xs.iter().copied().fold(0.0, f64::max);
            Ok(ResultRecord::DensitySweep(DensityRow {
                d: params.d(),
                sampler: spec.render(),
                n,
                trials: cfg.trials,
                mean,
                max,
                ci_lo: ci.lo.max(0.0),
                ci_hi: ci.hi.min(1.0),
                seconds,
            }))
        })
        .collect()
}

fn bounds_curve(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    cfg.p_grid
        .points()
        .into_iter()
        .filter(|&p| p > 0.0 && p < 1.0)
        .map(|p| {
            let pt = lower_bound_curve(params, p)?;
            Ok(ResultRecord::BoundsCurve(BoundsRow {
                p: pt.p,
                lower: pt.lower,
                source: pt.source.tag().to_owned(),
                k: pt.source.k(),
            }))
        })
        .collect()
}

fn coverage(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    let report = interval_coverage(params, cfg.k_max, cfg.step)?;
    let intervals = report.intervals.iter().map(|iv| {
        ResultRecord::Coverage(CoverageRow {
            d: report.d,
            item: "interval".into(),
            k: Some(iv.k),
            lo: iv.lo,
            hi: iv.hi,
            overlaps_next: Some(iv.overlaps_next),
        })
    });
    let gaps = report.gaps.iter().map(|g| {
        ResultRecord::Coverage(CoverageRow {
            d: report.d,
            item: "gap".into(),
            k: None,
            lo: g.lo,
            hi: g.hi,
            overlaps_next: None,
        })
    });
    Ok(intervals.chain(gaps).collect())
}

fn barrier(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    let spec = cfg.sampler_spec()?;
    cfg.horizons
        .iter()
        .map(|&n| {
            let clock = Clock::start(cfg.timing);
            let outcomes: Vec<(bool, bool)> = seeds(cfg)
                .map(|seed| {
                    let o = barrier_survival(&spec, params, seed, n, cfg.a, cfg.c, cfg.cap)?;
                    Ok((o.survivors > 0, o.capped))
                })
                .collect::<Result<_>>()?;
            let surviving = outcomes.iter().filter(|o| o.0).count() as u64;
            let capped = outcomes.iter().filter(|o| o.1).count() as u64;
            let ci = confidence_interval(surviving, cfg.trials)?;
            Ok(ResultRecord::Barrier(BarrierRow {
                d: params.d(),
                sampler: spec.render(),
                n,
                a: cfg.a,
                c: cfg.c,
                trials: cfg.trials,
                surviving,
                fraction: surviving as f64 / cfg.trials as f64,
                ci_lo: ci.lo,
                ci_hi: ci.hi,
                capped,
                seconds: clock.seconds(),
            }))
        })
        .collect()
}

fn copies(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    let spec = cfg.sampler_spec()?;
    cfg.horizons
        .iter()
        .map(|&n| {
            let clock = Clock::start(cfg.timing);
            let results = seeds(cfg)
                .map(|seed| best_copy_density(&spec, params, seed, n))
                .collect::<Result<Vec<_>>>()?;
            let fully_open = results.iter().filter(|r| r.fully_open).count() as u64;
            let violations = results
                .iter()
                .filter(|r| r.best_copy_average < r.pigeonhole_bound)
                .count() as u64;
            let mean_best_copy = NeumaierSum::of(results.iter().map(|r| r.best_copy_average)) / results.len() as f64;
            let min_best_copy_open = results
                .iter()
                .filter(|r| r.fully_open)
                .map(|r| r.best_copy_average)
                .reduce(f64::min);
            Ok(ResultRecord::Copies(CopiesRow {
                d: params.d(),
                sampler: spec.render(),
                n,
                trials: cfg.trials,
                fully_open,
                violations,
                mean_best_copy,
                min_best_copy_open,
                seconds: clock.seconds(),
            }))
        })
        .collect()
}

fn marginal(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    let clock = Clock::start(cfg.timing);
    let spec = cfg.sampler_spec()?;
    let report = empirical_marginal(&spec, params, cfg.seed, cfg.trials)?;
    let exact = exact_marginal(&spec, params);
    let seconds = clock.seconds();
    Ok(report
        .per_depth
        .iter()
        .map(|est| {
            ResultRecord::Marginal(MarginalRow {
                d: params.d(),
                sampler: spec.render(),
                depth: est.depth as u32,
                trials: est.trials,
                mean: est.mean,
                ci_lo: est.ci.lo,
                ci_hi: est.ci.hi,
                exact,
                seconds,
            })
        })
        .collect())
}

fn survival(cfg: &ExperimentConfig, params: TreeParams) -> Result<Vec<ResultRecord>> {
    let theta = survival_fixed_point(params, cfg.p)?;
    let limit = 1.0 - (1.0 - cfg.p * theta).powi(params.d() as i32);
    cfg.horizons
        .iter()
        .map(|&n| {
            let dist = exact_bernoulli_distribution(params, cfg.p, n)?;
            Ok(ResultRecord::Survival(SurvivalRow {
                d: params.d(),
                p: cfg.p,
                n,
                mean_density: dist.mean_density(),
                fully_open: dist.fully_open(),
                limit,
            }))
        })
        .collect()
}

/// Exact `E[M_n]/n` for a Bernoulli sampler, or `None` for other laws.
pub fn exact_reference(spec: &SamplerSpec, params: TreeParams, n: u32) -> Result<Option<f64>> {
    match spec {
        SamplerSpec::Bernoulli { p } => Ok(Some(exact_bernoulli_distribution(params, *p, n)?.mean_density())),
        _ => Ok(None),
    }
}
