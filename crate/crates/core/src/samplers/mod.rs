//! Invariant percolation laws on the edges (and sites) of the regular tree.
//!
//! Every law is evaluated lazily: the state of an edge is a deterministic
//! function of `(spec, seed, edge)`. Independent copies inside [`SamplerSpec::MaxOfK`]
//! draw from distinct stream labels, so no global state is ever needed.

mod compiled;
mod text;

pub use compiled::{CompiledSampler, PathCursor};
pub use text::parse_sampler;

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::stats::{confidence_interval, Interval};
use crate::tree::{edge_uniform, global_bit, vertex_uniform, EdgeId, Seed, TreeParams, VertexId};

/// Largest number of copies in one `MaxOfK` layer.
pub const MAX_COPIES: u32 = 256;
/// Nested `MaxOfK` layers allowed before stream labels would overflow.
pub const MAX_COPY_NESTING: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub enum SamplerSpec {
    /// Independent edges, each open with probability `p`.
    Bernoulli {
        p: f64,
    },
    /// Edgewise maximum of `k` iid copies of `base`.
    MaxOfK {
        base: Box<SamplerSpec>,
        k: u32,
    },
    Complement {
        base: Box<SamplerSpec>,
    },
    /// Every vertex picks one incident edge uniformly; an edge is open iff
    /// both endpoints picked it.
    MutualChoiceMatching,
    /// Site process: one side of the bipartition is open, chosen by a fair bit.
    BipartiteSite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Edge,
    Site,
}

impl SamplerSpec {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("probability {p} outside [0, 1]"));
        }
        Ok(SamplerSpec::Bernoulli { p })
    }

    pub fn max_of_k(base: SamplerSpec, k: u32) -> Result<Self> {
        let spec = SamplerSpec::MaxOfK {
            base: Box::new(base),
            k,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn complement(base: SamplerSpec) -> Result<Self> {
        let spec = SamplerSpec::Complement { base: Box::new(base) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mode(&self) -> Mode {
        match self {
            SamplerSpec::BipartiteSite => Mode::Site,
            _ => Mode::Edge,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SamplerSpec::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return domain(format!("probability {p} outside [0, 1]"));
                }
            }
            SamplerSpec::MaxOfK { base, k } => {
                if *k == 0 || *k > MAX_COPIES {
                    return domain(format!("copy count k = {k} outside 1..={MAX_COPIES}"));
                }
                if base.mode() != Mode::Edge {
                    return Err(Error::Mode("max(...) wraps edge processes only".into()));
                }
                base.validate()?;
            }
            SamplerSpec::Complement { base } => {
                if base.mode() != Mode::Edge {
                    return Err(Error::Mode("complement(...) wraps edge processes only".into()));
                }
                base.validate()?;
            }
            SamplerSpec::MutualChoiceMatching | SamplerSpec::BipartiteSite => {}
        }
        if self.copy_nesting() > MAX_COPY_NESTING {
            return domain(format!("more than {MAX_COPY_NESTING} nested max(...) layers"));
        }
        Ok(())
    }

    fn copy_nesting(&self) -> usize {
        match self {
            SamplerSpec::MaxOfK { base, .. } => 1 + base.copy_nesting(),
            SamplerSpec::Complement { base } => base.copy_nesting(),
            _ => 0,
        }
    }

    fn require_edge(&self) -> Result<()> {
        if self.mode() != Mode::Edge {
            return Err(Error::Mode(format!("{self} is a site process")));
        }
        Ok(())
    }

    /// Canonical text form, accepted back by [`parse_sampler`].
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SamplerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerSpec::Bernoulli { p } => write!(f, "bernoulli({})", text::format_probability(*p)),
            SamplerSpec::MaxOfK { base, k } => write!(f, "max({base},k={k})"),
            SamplerSpec::Complement { base } => write!(f, "complement({base})"),
            SamplerSpec::MutualChoiceMatching => f.write_str("matching"),
            SamplerSpec::BipartiteSite => f.write_str("bipartite-site"),
        }
    }
}

/// Stream label of copy `i` inside a `MaxOfK` evaluated on `stream`.
pub(crate) fn copy_stream(stream: u64, i: u32) -> u64 {
    stream.wrapping_mul(u64::from(MAX_COPIES)) + u64::from(i)
}

/// Index of the edge `e` in the incident-edge list of its parent
/// (the parent edge first, then children in order; the root has no parent edge).
pub(crate) fn slot_at_parent(parent_depth: usize, child_index: u8) -> u32 {
    if parent_depth == 0 {
        u32::from(child_index)
    } else {
        u32::from(child_index) + 1
    }
}

/// Incident edge picked by a vertex with uniform `u`.
pub(crate) fn pick(u: f64, d: u32) -> u32 {
    ((u * f64::from(d)) as u32).min(d - 1)
}

pub fn edge_state(spec: &SamplerSpec, params: TreeParams, seed: Seed, e: &EdgeId) -> Result<bool> {
    spec.require_edge()?;
    e.child().validate(params)?;
    Ok(edge_state_unchecked(spec, params, seed, e))
}

fn edge_state_unchecked(spec: &SamplerSpec, params: TreeParams, seed: Seed, e: &EdgeId) -> bool {
    match spec {
        SamplerSpec::Bernoulli { p } => edge_uniform(seed, e) < *p,
        SamplerSpec::MaxOfK { base, k } => {
            (0..*k).any(|i| edge_state_unchecked(base, params, seed.with_stream(copy_stream(seed.stream, i)), e))
        }
        SamplerSpec::Complement { base } => !edge_state_unchecked(base, params, seed, e),
        SamplerSpec::MutualChoiceMatching => {
            let d = params.d();
            let parent = e.parent();
            let at_parent = pick(vertex_uniform(seed, &parent), d)
                == slot_at_parent(parent.depth(), e.child().last_index().unwrap_or(0));
            let at_child = pick(vertex_uniform(seed, e.child()), d) == 0;
            at_parent && at_child
        }
        SamplerSpec::BipartiteSite => unreachable!("site spec rejected by caller"),
    }
}

/// States of the individual copies underlying a `MaxOfK` at one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyStates {
    pub bits: Vec<bool>,
}

impl CopyStates {
    pub fn max(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }
}

pub fn copy_states(spec: &SamplerSpec, params: TreeParams, seed: Seed, e: &EdgeId) -> Result<CopyStates> {
    let SamplerSpec::MaxOfK { base, k } = spec else {
        return Err(Error::Mode(format!("{spec} is not a max(...) sampler")));
    };
    e.child().validate(params)?;
    let bits = (0..*k)
        .map(|i| edge_state_unchecked(base, params, seed.with_stream(copy_stream(seed.stream, i)), e))
        .collect();
    Ok(CopyStates { bits })
}

pub fn site_state(spec: &SamplerSpec, seed: Seed, v: &VertexId) -> Result<bool> {
    match spec {
        SamplerSpec::BipartiteSite => {
            let side = usize::from(global_bit(seed));
            Ok(v.depth() % 2 == side)
        }
        _ => Err(Error::Mode(format!("{spec} is an edge process"))),
    }
}

/// Closed-form probability that a fixed edge (or site) is open.
pub fn exact_marginal(spec: &SamplerSpec, params: TreeParams) -> f64 {
    match spec {
        SamplerSpec::Bernoulli { p } => *p,
        SamplerSpec::MaxOfK { base, k } => {
            let m = exact_marginal(base, params);
            1.0 - (1.0 - m).powi(*k as i32)
        }
        SamplerSpec::Complement { base } => 1.0 - exact_marginal(base, params),
        SamplerSpec::MutualChoiceMatching => {
            let d = f64::from(params.d());
            1.0 / (d * d)
        }
        SamplerSpec::BipartiteSite => 0.5,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalEstimate {
    /// Depth of the measured edge (or site).
    pub depth: usize,
    pub trials: u64,
    pub open: u64,
    pub mean: f64,
    pub ci: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalReport {
    /// Estimate at the first edge (or depth-1 site) on the leftmost ray.
    pub fixed: MarginalEstimate,
    /// Estimates along the leftmost ray at depths 1..=4.
    pub per_depth: Vec<MarginalEstimate>,
}

pub const MARGINAL_DEPTHS: usize = 4;

/// Monte Carlo marginal over seeds `base_seed .. base_seed + samples`.
pub fn empirical_marginal(
    spec: &SamplerSpec,
    params: TreeParams,
    base_seed: u64,
    samples: u64,
) -> Result<MarginalReport> {
    if samples == 0 {
        return domain("empirical marginal needs at least one sample");
    }
    spec.validate()?;
    let mut per_depth = Vec::with_capacity(MARGINAL_DEPTHS);
    for depth in 1..=MARGINAL_DEPTHS {
        let v = VertexId::from_vec_unchecked(vec![0; depth]);
        let e = EdgeId::new(v.clone())?;
        let mut open = 0u64;
        for i in 0..samples {
            let seed = Seed::new(base_seed.wrapping_add(i));
            let state = match spec.mode() {
                Mode::Edge => edge_state_unchecked(spec, params, seed, &e),
                Mode::Site => site_state(spec, seed, &v)?,
            };
            open += u64::from(state);
        }
        per_depth.push(MarginalEstimate {
            depth,
            trials: samples,
            open,
            mean: open as f64 / samples as f64,
            ci: confidence_interval(open, samples)?,
        });
    }
    Ok(MarginalReport {
        fixed: per_depth[0].clone(),
        per_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::children;

    fn t(d: u32) -> TreeParams {
        TreeParams::new(d).unwrap()
    }

    fn edges_in_ball(params: TreeParams, radius: usize) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut frontier = vec![VertexId::root()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for v in &frontier {
                for c in children(v, params).unwrap() {
                    out.push(EdgeId::new(c.clone()).unwrap());
                    next.push(c);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn degenerate_bernoulli() {
        let p = t(3);
        let one = SamplerSpec::bernoulli(1.0).unwrap();
        let zero = SamplerSpec::bernoulli(0.0).unwrap();
        for e in edges_in_ball(p, 4) {
            assert!(edge_state(&one, p, Seed::new(9), &e).unwrap());
            assert!(!edge_state(&zero, p, Seed::new(9), &e).unwrap());
        }
        assert!(SamplerSpec::bernoulli(1.5).is_err());
        assert!(SamplerSpec::bernoulli(f64::NAN).is_err());
    }

    #[test]
    fn mode_errors() {
        let p = t(3);
        let e = EdgeId::from_indices(p, &[0]).unwrap();
        let site = SamplerSpec::BipartiteSite;
        assert!(matches!(edge_state(&site, p, Seed::new(0), &e), Err(Error::Mode(_))));
        let b = SamplerSpec::bernoulli(0.5).unwrap();
        assert!(matches!(
            site_state(&b, Seed::new(0), &VertexId::root()),
            Err(Error::Mode(_))
        ));
        assert!(matches!(copy_states(&b, p, Seed::new(0), &e), Err(Error::Mode(_))));
        assert!(SamplerSpec::max_of_k(SamplerSpec::BipartiteSite, 2).is_err());
        assert!(SamplerSpec::complement(SamplerSpec::BipartiteSite).is_err());
        assert!(SamplerSpec::max_of_k(b.clone(), 0).is_err());
    }

    #[test]
    fn copy_states_max_matches_edge_state() {
        let p = t(3);
        let spec = SamplerSpec::max_of_k(SamplerSpec::bernoulli(0.3).unwrap(), 3).unwrap();
        for s in 0..20 {
            for e in edges_in_ball(p, 3) {
                let cs = copy_states(&spec, p, Seed::new(s), &e).unwrap();
                assert_eq!(cs.bits.len(), 3);
                assert_eq!(cs.max(), edge_state(&spec, p, Seed::new(s), &e).unwrap());
            }
        }
    }

    #[test]
    fn copy_streams_are_the_copy_index_at_top_level() {
        let p = t(3);
        let base = SamplerSpec::bernoulli(0.5).unwrap();
        let spec = SamplerSpec::max_of_k(base.clone(), 2).unwrap();
        let e = EdgeId::from_indices(p, &[1, 1]).unwrap();
        for s in 0..50 {
            let cs = copy_states(&spec, p, Seed::new(s), &e).unwrap();
            for (i, &bit) in cs.bits.iter().enumerate() {
                let direct = edge_state(&base, p, Seed::new(s).with_stream(i as u64), &e).unwrap();
                assert_eq!(bit, direct);
            }
        }
    }

    #[test]
    fn max_of_copies_examples() {
        assert!(!CopyStates {
            bits: vec![false, false]
        }
        .max());
        assert!(CopyStates {
            bits: vec![false, true, false]
        }
        .max());
    }

    #[test]
    fn max_of_two_empirical_marginal() {
        let p = t(3);
        let spec = SamplerSpec::max_of_k(SamplerSpec::bernoulli(0.4).unwrap(), 2).unwrap();
        let mut open = 0u64;
        let n = 100_000u64;
        let mut count = 0u64;
        'outer: for s in 0.. {
            for e in edges_in_ball(p, 6) {
                open += u64::from(edge_state(&spec, p, Seed::new(s), &e).unwrap());
                count += 1;
                if count == n {
                    break 'outer;
                }
            }
        }
        let mean = open as f64 / n as f64;
        let sigma = (0.64f64 * 0.36 / n as f64).sqrt();
        assert!((mean - 0.64).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn exact_marginals() {
        let p3 = t(3);
        let a32 = 1.0 - 1.0 / 3f64.sqrt();
        let spec = SamplerSpec::max_of_k(SamplerSpec::bernoulli(a32).unwrap(), 2).unwrap();
        assert!((exact_marginal(&spec, p3) - 2.0 / 3.0).abs() < 1e-15);
        let c = SamplerSpec::complement(SamplerSpec::bernoulli(0.3).unwrap()).unwrap();
        assert!((exact_marginal(&c, p3) - 0.7).abs() < 1e-15);
        assert_eq!(exact_marginal(&SamplerSpec::MutualChoiceMatching, t(4)), 0.0625);
        assert_eq!(exact_marginal(&SamplerSpec::BipartiteSite, p3), 0.5);
    }

    /// Enumerates the d x d pair of endpoint choices for a depth-2 edge.
    #[test]
    fn matching_marginal_by_enumeration() {
        for d in 3..7u32 {
            let mut hits = 0;
            for parent_pick in 0..d {
                for child_pick in 0..d {
                    // edge is child slot 0 of a non-root parent: parent slot 1, child slot 0
                    if parent_pick == slot_at_parent(1, 0) && child_pick == 0 {
                        hits += 1;
                    }
                }
            }
            let oracle = f64::from(hits) / f64::from(d * d);
            assert_eq!(oracle, exact_marginal(&SamplerSpec::MutualChoiceMatching, t(d)));
        }
    }

    #[test]
    fn matching_never_opens_adjacent_edges() {
        let p = t(3);
        let spec = SamplerSpec::MutualChoiceMatching;
        for s in 0..50 {
            let seed = Seed::new(s);
            for e in edges_in_ball(p, 5) {
                if !edge_state(&spec, p, seed, &e).unwrap() {
                    continue;
                }
                for c in children(e.child(), p).unwrap() {
                    assert!(!edge_state(&spec, p, seed, &EdgeId::new(c).unwrap()).unwrap());
                }
                if let Some(up) = e.parent().edge() {
                    assert!(!edge_state(&spec, p, seed, &up).unwrap());
                }
            }
        }
    }

    #[test]
    fn complement_involution() {
        let p = t(4);
        let x = SamplerSpec::max_of_k(SamplerSpec::bernoulli(0.2).unwrap(), 2).unwrap();
        let cc = SamplerSpec::complement(SamplerSpec::complement(x.clone()).unwrap()).unwrap();
        for s in 0..10 {
            for e in edges_in_ball(p, 3) {
                assert_eq!(
                    edge_state(&x, p, Seed::new(s), &e).unwrap(),
                    edge_state(&cc, p, Seed::new(s), &e).unwrap()
                );
            }
        }
    }

    #[test]
    fn bipartite_site_parity() {
        let spec = SamplerSpec::BipartiteSite;
        let p = t(3);
        let seed = (0..).map(Seed::new).find(|&s| !global_bit(s)).unwrap();
        assert!(site_state(&spec, seed, &VertexId::root()).unwrap());
        for c in children(&VertexId::root(), p).unwrap() {
            assert!(!site_state(&spec, seed, &c).unwrap());
        }
    }

    #[test]
    fn empirical_marginal_bernoulli_half() {
        let spec = SamplerSpec::bernoulli(0.5).unwrap();
        let r = empirical_marginal(&spec, t(3), 0, 100_000).unwrap();
        assert!(r.fixed.ci.contains(0.5), "{:?}", r.fixed);
        assert_eq!(r.per_depth.len(), MARGINAL_DEPTHS);
        assert!(empirical_marginal(&spec, t(3), 0, 0).is_err());
    }

    #[test]
    fn per_depth_marginals_agree() {
        let spec = SamplerSpec::bernoulli(0.3).unwrap();
        let n = 50_000u64;
        let r = empirical_marginal(&spec, t(3), 1000, n).unwrap();
        let sigma = (0.3f64 * 0.7 / n as f64).sqrt();
        for est in &r.per_depth {
            assert!((est.mean - 0.3).abs() < 3.0 * sigma, "{est:?}");
        }
    }

    #[test]
    fn monotone_coupling_bernoulli() {
        let p = t(3);
        let grid = [0.1, 0.25, 0.5, 0.75, 0.9];
        for s in 0..20 {
            for e in edges_in_ball(p, 4) {
                let states: Vec<bool> = grid
                    .iter()
                    .map(|&q| edge_state(&SamplerSpec::Bernoulli { p: q }, p, Seed::new(s), &e).unwrap())
                    .collect();
                assert!(states.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
