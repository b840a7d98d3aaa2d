//! Brute-force law of `M_n`: every open/closed assignment of the radius-`n`
//! ball is enumerated. Shares nothing with the recursion in [`super::exact`].

use crate::error::{domain, Error, Result};
use crate::tree::{ball_edge_count, TreeParams};

use super::exact::MaxPathDistribution;

/// Largest ball (in edges) the oracle will enumerate.
pub const MAX_ORACLE_EDGES: u64 = 24;

pub fn enumerate_oracle(params: TreeParams, p: f64, n: u32) -> Result<MaxPathDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    if n == 0 {
        return domain("horizon n must be at least 1");
    }
    let edges = ball_edge_count(params, n)?;
    if edges > MAX_ORACLE_EDGES {
        return Err(Error::Capacity(format!(
            "ball of radius {n} in the {}-regular tree has {edges} edges; the oracle enumerates at most {MAX_ORACLE_EDGES}",
            params.d()
        )));
    }
    let edges = edges as usize;

    // Edges in breadth-first order; parent[e] is the edge above e (None at the root).
    let mut parent: Vec<Option<usize>> = Vec::with_capacity(edges);
    let mut level: Vec<usize> = Vec::new();
    for _ in 0..params.d() {
        parent.push(None);
        level.push(parent.len() - 1);
    }
    for _ in 1..n {
        let mut next = Vec::new();
        for &e in &level {
            for _ in 0..params.d() - 1 {
                parent.push(Some(e));
                next.push(parent.len() - 1);
            }
        }
        level = next;
    }
    let leaves = level;
    debug_assert_eq!(parent.len(), edges);

    // counts[open][m]: configurations with `open` open edges whose maximum is m
    let n_us = n as usize;
    let mut counts = vec![vec![0u64; n_us + 1]; edges + 1];
    let mut along = vec![0u32; edges];
    for mask in 0u64..(1u64 << edges) {
        for e in 0..edges {
            let bit = ((mask >> e) & 1) as u32;
            along[e] = bit + parent[e].map_or(0, |q| along[q]);
        }
        let m = leaves.iter().map(|&e| along[e]).max().unwrap_or(0) as usize;
        counts[mask.count_ones() as usize][m] += 1;
    }

    let mut pmf = vec![0.0f64; n_us + 1];
    for (open, row) in counts.iter().enumerate() {
        let w = p.powi(open as i32) * (1.0 - p).powi((edges - open) as i32);
        for (m, &c) in row.iter().enumerate() {
            pmf[m] += c as f64 * w;
        }
    }
    Ok(MaxPathDistribution::from_pmf(params.d(), p, &pmf))
}
