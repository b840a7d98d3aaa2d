//! Depth-first searches over descending paths from the root, sampling edge
//! states lazily through a [`PathCursor`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::samplers::{CompiledSampler, Mode, PathCursor, SamplerSpec};
use crate::tree::{Seed, TreeParams, VertexId};

/// A descending path `x_0 = root, ..., x_n` with its open-edge counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub path: Vec<u8>,
    pub open_count: u32,
    /// Open counts of the individual copies of a `MaxOfK` sampler.
    pub copy_counts: Option<Vec<u32>>,
}

impl PathRecord {
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn average(&self) -> f64 {
        if self.path.is_empty() {
            return 0.0;
        }
        f64::from(self.open_count) / self.path.len() as f64
    }

    pub fn endpoint(&self) -> VertexId {
        VertexId::from_vec_unchecked(self.path.clone())
    }
}

fn check_horizon(n: u32) -> Result<()> {
    if n == 0 {
        return domain("horizon n must be at least 1");
    }
    Ok(())
}

fn compile_edge(spec: &SamplerSpec, params: TreeParams, seed: Seed) -> Result<CompiledSampler> {
    let compiled = CompiledSampler::new(spec, params, seed)?;
    if compiled.mode() != Mode::Edge {
        return Err(Error::Mode(format!("{spec} is a site process")));
    }
    Ok(compiled)
}

struct MaxSearch {
    params: TreeParams,
    n: usize,
    prune: bool,
    best: Option<u32>,
    best_path: Vec<u8>,
}

impl MaxSearch {
    fn visit(&mut self, cursor: &mut PathCursor<'_>, count: u32, open: impl Fn(&PathCursor<'_>) -> bool + Copy) {
        let depth = cursor.depth();
        if depth == self.n {
            if self.best.is_none_or(|b| count > b) {
                self.best = Some(count);
                self.best_path.clear();
                self.best_path.extend_from_slice(cursor.path());
            }
            return;
        }
        if self.prune {
            if let Some(b) = self.best {
                if count as usize + (self.n - depth) <= b as usize {
                    return;
                }
            }
        }
        for i in 0..self.params.branching(depth) {
            cursor.push(i as u8);
            let c = count + u32::from(open(cursor));
            self.visit(cursor, c, open);
            cursor.pop();
        }
    }
}

/// Argmax over all length-`n` descending paths of the open-edge count.
/// Ties go to the lexicographically smallest path; pruning never changes the result.
pub fn max_path_dfs(spec: &SamplerSpec, params: TreeParams, seed: Seed, n: u32, prune: bool) -> Result<PathRecord> {
    check_horizon(n)?;
    let compiled = compile_edge(spec, params, seed)?;
    let mut cursor = compiled.cursor(n as usize);
    let mut search = MaxSearch {
        params,
        n: n as usize,
        prune,
        best: None,
        best_path: Vec::with_capacity(n as usize),
    };
    search.visit(&mut cursor, 0, |c| c.edge_open());
    let path = search.best_path;
    let copy_counts = compiled.copies().map(|k| {
        let mut counts = vec![0u32; k];
        let mut walk = compiled.cursor(path.len());
        let mut bits = Vec::with_capacity(k);
        for &i in &path {
            walk.push(i);
            walk.copy_bits(&mut bits);
            for (c, &b) in counts.iter_mut().zip(&bits) {
                *c += u32::from(b);
            }
        }
        counts
    });
    Ok(PathRecord {
        path,
        open_count: search.best.expect("at least one path"),
        copy_counts,
    })
}

/// `M_h` for every requested horizon in a single traversal.
pub fn max_path_profile(spec: &SamplerSpec, params: TreeParams, seed: Seed, horizons: &[u32]) -> Result<Vec<u32>> {
    let Some(&deepest) = horizons.iter().max() else {
        return domain("no horizons requested");
    };
    if horizons.contains(&0) {
        return domain("horizon n must be at least 1");
    }
    let compiled = compile_edge(spec, params, seed)?;
    let mut cursor = compiled.cursor(deepest as usize);
    // best[h] for h = 0..=deepest; only requested horizons constrain pruning
    let mut wanted = vec![false; deepest as usize + 1];
    for &h in horizons {
        wanted[h as usize] = true;
    }
    let mut best: Vec<Option<u32>> = vec![None; deepest as usize + 1];
    profile_visit(&mut cursor, params, &wanted, &mut best, 0);
    Ok(horizons
        .iter()
        .map(|&h| best[h as usize].expect("every horizon is reached"))
        .collect())
}

fn profile_visit(
    cursor: &mut PathCursor<'_>,
    params: TreeParams,
    wanted: &[bool],
    best: &mut [Option<u32>],
    count: u32,
) {
    let depth = cursor.depth();
    if wanted[depth] && best[depth].is_none_or(|b| count > b) {
        best[depth] = Some(count);
    }
    let deepest = wanted.len() - 1;
    if depth == deepest {
        return;
    }
    let promising = (depth + 1..=deepest)
        .filter(|&h| wanted[h])
        .any(|h| best[h].is_none_or(|b| count as usize + (h - depth) > b as usize));
    if !promising {
        return;
    }
    for i in 0..params.branching(depth) {
        cursor.push(i as u8);
        let c = count + u32::from(cursor.edge_open());
        profile_visit(cursor, params, wanted, best, c);
        cursor.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Enumeration,
    DfsMonteCarlo,
}

/// Horizon-`n` proxy for the best path density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub horizon: u32,
    /// Best path average: a single realization, or the largest over seeds.
    pub value: f64,
    /// Exact `E[M_n]/n` or the Monte Carlo mean over seeds.
    pub mean: Option<f64>,
    pub ci: Option<crate::stats::Interval>,
    pub trials: u64,
    pub method: Method,
}

fn compile_site(spec: &SamplerSpec, params: TreeParams, seed: Seed) -> Result<CompiledSampler> {
    let compiled = CompiledSampler::new(spec, params, seed)?;
    if compiled.mode() != Mode::Site {
        return Err(Error::Mode(format!("{spec} is an edge process")));
    }
    Ok(compiled)
}

/// Best fraction of open sites among `x_1..x_n` over descending paths.
///
/// The only site law, [`SamplerSpec::BipartiteSite`], depends on depth alone,
/// so every path from the root carries the same count and one path suffices.
/// [`site_path_extremes`] checks that claim by enumeration.
pub fn site_path_density(spec: &SamplerSpec, params: TreeParams, seed: Seed, n: u32) -> Result<DensityEstimate> {
    check_horizon(n)?;
    let compiled = compile_site(spec, params, seed)?;
    let mut cursor = compiled.cursor(n as usize);
    let mut open = 0u32;
    for _ in 0..n {
        cursor.push(0);
        open += u32::from(cursor.site_open());
    }
    Ok(DensityEstimate {
        horizon: n,
        value: f64::from(open) / f64::from(n),
        mean: None,
        ci: None,
        trials: 1,
        method: Method::Enumeration,
    })
}

/// Smallest and largest open-site counts among `x_1..x_n` over all
/// `d (d-1)^(n-1)` descending paths, by exhaustive enumeration.
pub fn site_path_extremes(spec: &SamplerSpec, params: TreeParams, seed: Seed, n: u32) -> Result<(u32, u32)> {
    check_horizon(n)?;
    let compiled = compile_site(spec, params, seed)?;
    let mut cursor = compiled.cursor(n as usize);
    let mut extremes = (u32::MAX, 0u32);
    fn visit(cursor: &mut PathCursor<'_>, params: TreeParams, n: usize, count: u32, ext: &mut (u32, u32)) {
        let depth = cursor.depth();
        if depth == n {
            ext.0 = ext.0.min(count);
            ext.1 = ext.1.max(count);
            return;
        }
        for i in 0..params.branching(depth) {
            cursor.push(i as u8);
            let c = count + u32::from(cursor.site_open());
            visit(cursor, params, n, c, ext);
            cursor.pop();
        }
    }
    visit(&mut cursor, params, n as usize, 0, &mut extremes);
    Ok(extremes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierOutcome {
    /// Surviving length-`n` paths found, at most the cap.
    pub survivors: u64,
    /// The search stopped at the cap; `survivors` is a lower bound.
    pub capped: bool,
    /// Lexicographically first surviving path.
    pub example: Option<PathRecord>,
}

pub const DEFAULT_BARRIER_CAP: u64 = 1_000_000;

struct BarrierSearch {
    params: TreeParams,
    n: usize,
    slope: f64,
    slack: f64,
    cap: u64,
    survivors: u64,
    example: Option<PathRecord>,
}

impl BarrierSearch {
    fn visit(&mut self, cursor: &mut PathCursor<'_>, count: u32) {
        let depth = cursor.depth();
        if depth == self.n {
            self.survivors += 1;
            if self.example.is_none() {
                self.example = Some(PathRecord {
                    path: cursor.path().to_vec(),
                    open_count: count,
                    copy_counts: None,
                });
            }
            return;
        }
        for i in 0..self.params.branching(depth) {
            if self.survivors >= self.cap {
                return;
            }
            cursor.push(i as u8);
            let c = count + u32::from(cursor.edge_open());
            if f64::from(c) >= self.slope * (depth + 1) as f64 - self.slack {
                self.visit(cursor, c);
            }
            cursor.pop();
        }
    }
}

/// Counts length-`n` paths whose every prefix of length `j >= 1` has at
/// least `a j - c` open edges, stopping once `cap` survivors are found.
pub fn barrier_survival(
    spec: &SamplerSpec,
    params: TreeParams,
    seed: Seed,
    n: u32,
    a: f64,
    c: f64,
    cap: u64,
) -> Result<BarrierOutcome> {
    check_horizon(n)?;
    if !(0.0..=1.0).contains(&a) {
        return domain(format!("target density {a} outside [0, 1]"));
    }
    if c.is_nan() || c < 0.0 {
        return domain(format!("slack {c} must be non-negative"));
    }
    if cap == 0 {
        return domain("survivor cap must be at least 1");
    }
    let compiled = compile_edge(spec, params, seed)?;
    let mut cursor = compiled.cursor(n as usize);
    let mut search = BarrierSearch {
        params,
        n: n as usize,
        slope: a,
        slack: c,
        cap,
        survivors: 0,
        example: None,
    };
    search.visit(&mut cursor, 0);
    Ok(BarrierOutcome {
        survivors: search.survivors,
        capped: search.survivors >= cap,
        example: search.example,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyDensity {
    pub record: PathRecord,
    pub k: u32,
    pub best_copy_count: u32,
    /// Open fraction of the best single copy along the max path.
    pub best_copy_average: f64,
    /// `ceil(open_count / k) / n`, guaranteed not to exceed `best_copy_average`.
    pub pigeonhole_bound: f64,
    pub fully_open: bool,
}

impl CopyDensity {
    pub fn from_record(record: PathRecord, k: u32) -> Result<Self> {
        let counts = record
            .copy_counts
            .as_ref()
            .ok_or_else(|| Error::Mode("path record carries no per-copy counts".into()))?;
        if counts.len() != k as usize {
            return domain(format!("{} copy counts for k = {k}", counts.len()));
        }
        let n = record.len() as f64;
        let best_copy_count = counts.iter().copied().max().unwrap_or(0);
        Ok(CopyDensity {
            k,
            best_copy_count,
            best_copy_average: f64::from(best_copy_count) / n,
            pigeonhole_bound: f64::from(record.open_count.div_ceil(k)) / n,
            fully_open: record.open_count as usize == record.len(),
            record,
        })
    }
}

pub fn best_copy_density(spec: &SamplerSpec, params: TreeParams, seed: Seed, n: u32) -> Result<CopyDensity> {
    let SamplerSpec::MaxOfK { k, .. } = spec else {
        return Err(Error::Mode(format!("{spec} is not a max(...) sampler")));
    };
    let record = max_path_dfs(spec, params, seed, n, true)?;
    CopyDensity::from_record(record, *k)
}
