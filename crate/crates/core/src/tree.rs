//! Addresses in the rooted d-regular tree and hash-derived per-object randomness.
//!
//! A vertex is the sequence of child indices leading to it from the root. The
//! root has `d` children (indices `0..d`), every other vertex has `d - 1`
//! (indices `0..d-1`). An edge is named by its child endpoint.
//!
//! Randomness attached to an edge or a vertex is a pure function of the seed,
//! the stream label and the address, so any part of the infinite tree can be
//! sampled lazily, in any order, on any thread.

use std::fmt;

use crate::error::{domain, Error, Result};

/// Degree of the regular tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeParams {
    d: u32,
}

impl TreeParams {
    pub const MAX_DEGREE: u32 = 255;

    pub fn new(d: u32) -> Result<Self> {
        if !(3..=Self::MAX_DEGREE).contains(&d) {
            return domain(format!("degree must be in 3..=255, got {d}"));
        }
        Ok(TreeParams { d })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of children of a vertex at the given depth.
    pub fn branching(&self, depth: usize) -> u32 {
        if depth == 0 {
            self.d
        } else {
            self.d - 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexId {
    path: Vec<u8>,
}

impl VertexId {
    pub fn root() -> Self {
        VertexId { path: Vec::new() }
    }

    pub fn from_indices(params: TreeParams, indices: &[u8]) -> Result<Self> {
        let v = VertexId { path: indices.to_vec() };
        v.validate(params)?;
        Ok(v)
    }

    /// Builds an address without checking index bounds.
    pub(crate) fn from_vec_unchecked(path: Vec<u8>) -> Self {
        VertexId { path }
    }

    pub fn validate(&self, params: TreeParams) -> Result<()> {
        for (depth, &i) in self.path.iter().enumerate() {
            let limit = params.branching(depth);
            if u32::from(i) >= limit {
                return Err(Error::Address(format!(
                    "index {i} at depth {} exceeds {} children (d = {})",
                    depth + 1,
                    limit,
                    params.d()
                )));
            }
        }
        Ok(())
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn indices(&self) -> &[u8] {
        &self.path
    }

    pub fn parent(&self) -> Option<VertexId> {
        if self.path.is_empty() {
            return None;
        }
        Some(VertexId {
            path: self.path[..self.path.len() - 1].to_vec(),
        })
    }

    /// Index of this vertex among its parent's children.
    pub fn last_index(&self) -> Option<u8> {
        self.path.last().copied()
    }

    pub fn child(&self, params: TreeParams, index: u8) -> Result<VertexId> {
        if u32::from(index) >= params.branching(self.depth()) {
            return Err(Error::Address(format!(
                "child index {index} out of range at depth {}",
                self.depth()
            )));
        }
        let mut path = self.path.clone();
        path.push(index);
        Ok(VertexId { path })
    }

    pub fn edge(&self) -> Option<EdgeId> {
        EdgeId::new(self.clone()).ok()
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, idx) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}")?;
        }
        f.write_str(")")
    }
}

/// The edge between `parent(child)` and `child`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    child: VertexId,
}

impl EdgeId {
    pub fn new(child: VertexId) -> Result<Self> {
        if child.is_root() {
            return Err(Error::Address("the root is not the child end of any edge".into()));
        }
        Ok(EdgeId { child })
    }

    pub fn from_indices(params: TreeParams, indices: &[u8]) -> Result<Self> {
        EdgeId::new(VertexId::from_indices(params, indices)?)
    }

    pub fn child(&self) -> &VertexId {
        &self.child
    }

    pub fn parent(&self) -> VertexId {
        self.child.parent().expect("edge child is never the root")
    }

    /// Depth of the child endpoint, i.e. 1 for edges at the root.
    pub fn depth(&self) -> usize {
        self.child.depth()
    }
}

pub fn children(v: &VertexId, params: TreeParams) -> Result<Vec<VertexId>> {
    v.validate(params)?;
    let count = params.branching(v.depth());
    (0..count).map(|i| v.child(params, i as u8)).collect()
}

/// Number of self-avoiding paths of length `n` starting at a vertex: `d (d-1)^(n-1)`.
pub fn path_count(params: TreeParams, n: u32) -> Result<u64> {
    if n == 0 {
        return domain("path length must be at least 1");
    }
    let d = u64::from(params.d());
    (d - 1)
        .checked_pow(n - 1)
        .and_then(|x| x.checked_mul(d))
        .ok_or_else(|| Error::Overflow(format!("d(d-1)^(n-1) with d = {d}, n = {n}")))
}

/// Number of edges in the ball of radius `n` around the root.
pub fn ball_edge_count(params: TreeParams, n: u32) -> Result<u64> {
    let mut total = 0u64;
    for j in 1..=n {
        total = total
            .checked_add(path_count(params, j)?)
            .ok_or_else(|| Error::Overflow(format!("ball of radius {n}")))?;
    }
    Ok(total)
}

/// Independent randomness source: `value` picks the realization, `stream`
/// separates independent copies drawn from the same realization seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed {
    pub value: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Seed { value, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Seed { stream, ..self }
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub(crate) const EDGE_TAG: u64 = 0x4544_4745; // "EDGE"
pub(crate) const VERTEX_TAG: u64 = 0x5645_5254; // "VERT"
pub(crate) const GLOBAL_TAG: u64 = 0x474C_4F42; // "GLOB"

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, x: u64) -> u64 {
    mix64(h.wrapping_add(GOLDEN) ^ x)
}

/// Streaming address hash.
///
/// State after absorbing a prefix can be reused for every extension of that
/// prefix, which is what makes depth-first sampling O(1) per edge. The length
/// is absorbed last, so the encoding stays injective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddressHasher {
    state: u64,
}

impl AddressHasher {
    #[inline]
    pub fn new(seed: Seed, tag: u64) -> Self {
        let h = mix64(seed.value ^ GOLDEN);
        let h = absorb(h, tag);
        AddressHasher {
            state: absorb(h, seed.stream),
        }
    }

    #[inline]
    pub fn push(self, index: u8) -> Self {
        AddressHasher {
            state: absorb(self.state, u64::from(index) + 1),
        }
    }

    #[inline]
    pub fn finish(self, len: usize) -> u64 {
        absorb(self.state, (len as u64) << 32 | 0xA5)
    }

    pub fn hash_path(seed: Seed, tag: u64, path: &[u8]) -> u64 {
        path.iter()
            .fold(AddressHasher::new(seed, tag), |h, &i| h.push(i))
            .finish(path.len())
    }
}

/// Maps 64 random bits to `[0, 1)` using the top 53 bits.
#[inline]
pub fn unit_from_bits(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn edge_uniform(seed: Seed, e: &EdgeId) -> f64 {
    unit_from_bits(AddressHasher::hash_path(seed, EDGE_TAG, e.child.indices()))
}

pub fn vertex_uniform(seed: Seed, v: &VertexId) -> f64 {
    unit_from_bits(AddressHasher::hash_path(seed, VERTEX_TAG, v.indices()))
}

/// One fair bit shared by the whole realization.
pub fn global_bit(seed: Seed) -> bool {
    AddressHasher::new(seed, GLOBAL_TAG).finish(0) >> 63 == 1
}
