use crate::error::Result;
use crate::tree::{global_bit, unit_from_bits, AddressHasher, Seed, TreeParams, EDGE_TAG, VERTEX_TAG};

use super::{copy_stream, pick, slot_at_parent, Mode, SamplerSpec};

#[derive(Debug, Clone)]
enum Node {
    Bernoulli { p: f64, channel: usize },
    Any(Vec<Node>),
    Not(Box<Node>),
    Matching { channel: usize },
    Site { side: usize },
}

/// A sampler bound to one seed, laid out for incremental evaluation along a
/// depth-first walk. Produces exactly the states of [`super::edge_state`].
#[derive(Debug, Clone)]
pub struct CompiledSampler {
    root: Node,
    channels: Vec<AddressHasher>,
    d: u32,
    copies: Option<usize>,
}

impl CompiledSampler {
    pub fn new(spec: &SamplerSpec, params: TreeParams, seed: Seed) -> Result<Self> {
        spec.validate()?;
        let mut channels = Vec::new();
        let root = compile(spec, seed, &mut channels);
        let copies = match spec {
            SamplerSpec::MaxOfK { k, .. } => Some(*k as usize),
            _ => None,
        };
        Ok(CompiledSampler {
            root,
            channels,
            d: params.d(),
            copies,
        })
    }

    pub fn mode(&self) -> Mode {
        match self.root {
            Node::Site { .. } => Mode::Site,
            _ => Mode::Edge,
        }
    }

    /// Number of top-level copies when the sampler is a `MaxOfK`.
    pub fn copies(&self) -> Option<usize> {
        self.copies
    }

    pub fn cursor(&self, max_depth: usize) -> PathCursor<'_> {
        let nch = self.channels.len();
        let mut states = Vec::with_capacity((max_depth + 1) * nch);
        states.extend_from_slice(&self.channels);
        PathCursor {
            sampler: self,
            states,
            path: Vec::with_capacity(max_depth),
        }
    }
}

fn compile(spec: &SamplerSpec, seed: Seed, channels: &mut Vec<AddressHasher>) -> Node {
    match spec {
        SamplerSpec::Bernoulli { p } => {
            channels.push(AddressHasher::new(seed, EDGE_TAG));
            Node::Bernoulli {
                p: *p,
                channel: channels.len() - 1,
            }
        }
        SamplerSpec::MaxOfK { base, k } => Node::Any(
            (0..*k)
                .map(|i| compile(base, seed.with_stream(copy_stream(seed.stream, i)), channels))
                .collect(),
        ),
        SamplerSpec::Complement { base } => Node::Not(Box::new(compile(base, seed, channels))),
        SamplerSpec::MutualChoiceMatching => {
            channels.push(AddressHasher::new(seed, VERTEX_TAG));
            Node::Matching {
                channel: channels.len() - 1,
            }
        }
        SamplerSpec::BipartiteSite => Node::Site {
            side: usize::from(global_bit(seed)),
        },
    }
}

/// Current position of a depth-first walk from the root, with cached hash
/// prefixes for every randomness channel along the path.
#[derive(Debug, Clone)]
pub struct PathCursor<'a> {
    sampler: &'a CompiledSampler,
    states: Vec<AddressHasher>,
    path: Vec<u8>,
}

impl PathCursor<'_> {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn push(&mut self, index: u8) {
        let nch = self.sampler.channels.len();
        let base = self.path.len() * nch;
        for ch in 0..nch {
            let next = self.states[base + ch].push(index);
            self.states.push(next);
        }
        self.path.push(index);
    }

    pub fn pop(&mut self) {
        let nch = self.sampler.channels.len();
        self.path.pop();
        self.states.truncate((self.path.len() + 1) * nch);
    }

    #[inline]
    fn uniform(&self, depth: usize, channel: usize) -> f64 {
        let nch = self.sampler.channels.len();
        unit_from_bits(self.states[depth * nch + channel].finish(depth))
    }

    fn eval(&self, node: &Node) -> bool {
        let j = self.path.len();
        match node {
            Node::Bernoulli { p, channel } => self.uniform(j, *channel) < *p,
            Node::Any(copies) => copies.iter().any(|c| self.eval(c)),
            Node::Not(inner) => !self.eval(inner),
            Node::Matching { channel } => {
                let d = self.sampler.d;
                let idx = self.path[j - 1];
                pick(self.uniform(j - 1, *channel), d) == slot_at_parent(j - 1, idx)
                    && pick(self.uniform(j, *channel), d) == 0
            }
            Node::Site { side } => j % 2 == *side,
        }
    }

    /// State of the edge ending at the current vertex. Must not be called at the root.
    pub fn edge_open(&self) -> bool {
        debug_assert!(!self.path.is_empty());
        self.eval(&self.sampler.root)
    }

    /// State of the current vertex for a site process.
    pub fn site_open(&self) -> bool {
        self.eval(&self.sampler.root)
    }

    /// Per-copy states at the current edge; empty unless the sampler is a `MaxOfK`.
    pub fn copy_bits(&self, out: &mut Vec<bool>) {
        out.clear();
        if let Node::Any(copies) = &self.sampler.root {
            out.extend(copies.iter().map(|c| self.eval(c)));
        }
    }
}
