//! Horizon-`n` proxies for the best path density `D(S)`.

mod exact;
mod oracle;
mod search;

pub use exact::{
    exact_bernoulli_distribution, nonroot_cdfs, nonroot_expectations, survival_fixed_point, survival_fully_open,
    MaxPathDistribution, Survival, FIXED_POINT_TOL,
};
pub use oracle::{enumerate_oracle, MAX_ORACLE_EDGES};
pub use search::{
    barrier_survival, best_copy_density, max_path_dfs, max_path_profile, site_path_density, site_path_extremes,
    BarrierOutcome, CopyDensity, DensityEstimate, Method, PathRecord, DEFAULT_BARRIER_CAP,
};

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::samplers::SamplerSpec;
use crate::stats::{mean_ci, Interval};
use crate::tree::{Seed, TreeParams};

pub fn exact_density(params: TreeParams, p: f64, n: u32) -> Result<DensityEstimate> {
    let dist = exact_bernoulli_distribution(params, p, n)?;
    let mean = dist.mean_density();
    Ok(DensityEstimate {
        horizon: n,
        value: mean,
        mean: Some(mean),
        ci: None,
        trials: 0,
        method: Method::Exact,
    })
}

/// `M_h / h` for seeds `base_seed .. base_seed + trials`, one row per seed,
/// one column per horizon. Runs on the current rayon pool; the output order
/// never depends on scheduling.
pub fn density_samples(
    spec: &SamplerSpec,
    params: TreeParams,
    base_seed: u64,
    trials: u64,
    horizons: &[u32],
) -> Result<Vec<Vec<f64>>> {
    if trials == 0 {
        return domain("at least one trial is required");
    }
    (0..trials as usize)
        .into_par_iter()
        .map(|i| {
            let seed = Seed::new(base_seed.wrapping_add(i as u64));
            let maxima = max_path_profile(spec, params, seed, horizons)?;
            Ok(maxima
                .iter()
                .zip(horizons)
                .map(|(&m, &h)| f64::from(m) / f64::from(h))
                .collect())
        })
        .collect()
}

/// Monte Carlo density estimate at each horizon: mean with a 95% interval,
/// and the largest realization as the essential-supremum proxy.
pub fn monte_carlo_density(
    spec: &SamplerSpec,
    params: TreeParams,
    base_seed: u64,
    trials: u64,
    horizons: &[u32],
) -> Result<Vec<DensityEstimate>> {
    let rows = density_samples(spec, params, base_seed, trials, horizons)?;
    horizons
        .iter()
        .enumerate()
        .map(|(col, &h)| {
            let xs: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            let (mean, ci) = mean_ci(&xs)?;
            let max = xs.iter().copied().fold(0.0, f64::max);
            Ok(DensityEstimate {
                horizon: h,
                value: max,
                mean: Some(mean),
                ci: Some(Interval {
                    lo: ci.lo.max(0.0),
                    hi: ci.hi.min(1.0),
                }),
                trials,
                method: Method::DfsMonteCarlo,
            })
        })
        .collect()
}
