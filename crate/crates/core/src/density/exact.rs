//! Exact law of the maximal open-edge count `M_n` over descending paths of
//! length `n` under Bernoulli percolation.
//!
//! Subtrees hanging off distinct children are independent under a product
//! measure, so the CDF of the maximum below a vertex is a power of the CDF of
//! "one edge plus the maximum below its child".

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::tree::TreeParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPathDistribution {
    pub d: u32,
    pub p: f64,
    pub n: u32,
    /// `cdf[m] = P(M_n <= m)` for `m = 0..=n`.
    pub cdf: Vec<f64>,
    /// `tail[m] = P(M_n > m)`, kept separately so tiny upper tails keep full
    /// relative precision.
    pub tail: Vec<f64>,
}

impl MaxPathDistribution {
    /// Builds both sides from a probability mass function over `0..=n`.
    pub fn from_pmf(d: u32, p: f64, pmf: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|x| {
                acc += x;
                acc.min(1.0)
            })
            .collect();
        let mut tail = vec![0.0; pmf.len()];
        let mut acc = 0.0f64;
        for m in (0..pmf.len()).rev() {
            tail[m] = acc.min(1.0);
            acc += pmf[m];
        }
        MaxPathDistribution {
            d,
            p,
            n: (pmf.len() - 1) as u32,
            cdf,
            tail,
        }
    }

    pub fn expectation(&self) -> f64 {
        self.tail.iter().sum()
    }

    /// `E[M_n] / n`.
    pub fn mean_density(&self) -> f64 {
        self.expectation() / f64::from(self.n)
    }

    pub fn pmf(&self, m: usize) -> f64 {
        match m {
            0 => self.cdf[0],
            _ if m > self.n as usize => 0.0,
            _ if self.cdf[m] <= 0.5 => self.cdf[m] - self.cdf[m - 1],
            _ => self.tail[m - 1] - self.tail[m],
        }
    }

    /// `P(M_n = n)`: some length-`n` path from the root is fully open.
    pub fn fully_open(&self) -> f64 {
        self.tail[self.n as usize - 1]
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// Law of a maximum as a CDF and its complement, `cdf[m] + tail[m] = 1`.
#[derive(Debug, Clone, Default)]
struct Law {
    cdf: Vec<f64>,
    tail: Vec<f64>,
}

impl Law {
    fn point_mass_zero() -> Self {
        Law {
            cdf: vec![1.0],
            tail: vec![0.0],
        }
    }

    /// Law of "one edge plus this maximum": `G(m) = p Q(m-1) + (1-p) Q(m)`,
    /// with `Q(-1) = 0` and `Q(m) = 1` past the end; the tail likewise.
    fn edge_step(&self, p: f64, out: &mut Law) {
        out.cdf.clear();
        out.tail.clear();
        let len = self.cdf.len() as isize;
        let cdf = |m: isize| {
            if m < 0 {
                0.0
            } else if m >= len {
                1.0
            } else {
                self.cdf[m as usize]
            }
        };
        let tail = |m: isize| {
            if m < 0 {
                1.0
            } else if m >= len {
                0.0
            } else {
                self.tail[m as usize]
            }
        };
        for m in 0..=len {
            out.cdf.push(p * cdf(m - 1) + (1.0 - p) * cdf(m));
            out.tail.push(p * tail(m - 1) + (1.0 - p) * tail(m));
        }
    }

    /// Maximum of `b` independent copies. Each entry is computed from
    /// whichever side is smaller, then the other side follows.
    fn power(&self, b: u32, out: &mut Law) {
        out.cdf.clear();
        out.tail.clear();
        let bf = f64::from(b);
        for (&c, &t) in self.cdf.iter().zip(&self.tail) {
            if c <= t {
                let q = c.powi(b as i32).clamp(0.0, 1.0);
                out.cdf.push(q);
                out.tail.push(1.0 - q);
            } else {
                let r = (-(bf * (-t).ln_1p()).exp_m1()).clamp(0.0, 1.0);
                out.cdf.push(1.0 - r);
                out.tail.push(r);
            }
        }
    }
}

fn nonroot_laws(params: TreeParams, p: f64, depth: u32) -> Vec<Law> {
    let mut out = Vec::with_capacity(depth as usize + 1);
    out.push(Law::point_mass_zero());
    let mut g = Law::default();
    for j in 1..=depth as usize {
        out[j - 1].edge_step(p, &mut g);
        let mut q = Law::default();
        g.power(params.d() - 1, &mut q);
        out.push(q);
    }
    out
}

/// CDFs `Q_j` of the maximum below a non-root vertex, for `j = 0..=depth`.
/// `Q_j` has `j + 1` entries.
pub fn nonroot_cdfs(params: TreeParams, p: f64, depth: u32) -> Result<Vec<Vec<f64>>> {
    check_probability(p)?;
    Ok(nonroot_laws(params, p, depth).into_iter().map(|l| l.cdf).collect())
}

/// `E_j`, the expected maximum below a non-root vertex over paths of length `j`, for `j = 0..=depth`.
pub fn nonroot_expectations(params: TreeParams, p: f64, depth: u32) -> Result<Vec<f64>> {
    check_probability(p)?;
    Ok(nonroot_laws(params, p, depth)
        .iter()
        .map(|l| l.tail.iter().sum())
        .collect())
}

pub fn exact_bernoulli_distribution(params: TreeParams, p: f64, n: u32) -> Result<MaxPathDistribution> {
    check_probability(p)?;
    if n == 0 {
        return domain("horizon n must be at least 1");
    }
    let mut q = Law::point_mass_zero();
    let mut g = Law::default();
    for _ in 1..n {
        q.edge_step(p, &mut g);
        g.power(params.d() - 1, &mut q);
    }
    q.edge_step(p, &mut g);
    g.power(params.d(), &mut q);
    Ok(MaxPathDistribution {
        d: params.d(),
        p,
        n,
        cdf: q.cdf,
        tail: q.tail,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Survival {
    /// `P(M_n = n)` at the requested horizon.
    pub at_horizon: f64,
    /// `lim P(M_n = n) = 1 - (1 - p theta)^d`.
    pub limit: f64,
    /// Largest fixed point of `theta = 1 - (1 - p theta)^(d-1)`.
    pub theta: f64,
}

pub const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITERS: usize = 50_000_000;

/// Survival probability of the open cluster below a non-root vertex.
pub fn survival_fixed_point(params: TreeParams, p: f64) -> Result<f64> {
    check_probability(p)?;
    let branching = params.d() - 1;
    // subcritical or critical Galton-Watson: the only fixed point in [0,1] is 0
    if p * f64::from(branching) <= 1.0 {
        return Ok(0.0);
    }
    let mut theta = 1.0f64;
    for _ in 0..FIXED_POINT_MAX_ITERS {
        let next = 1.0 - (1.0 - p * theta).powi(branching as i32);
        if (next - theta).abs() < FIXED_POINT_TOL {
            return Ok(next);
        }
        theta = next;
    }
    Ok(theta)
}

pub fn survival_fully_open(params: TreeParams, p: f64, n: u32) -> Result<Survival> {
    let dist = exact_bernoulli_distribution(params, p, n)?;
    let theta = survival_fixed_point(params, p)?;
    Ok(Survival {
        at_horizon: dist.fully_open(),
        limit: 1.0 - (1.0 - p * theta).powi(params.d() as i32),
        theta,
    })
}
