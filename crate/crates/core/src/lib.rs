//! Invariant percolation on the d-regular tree and the density of open edges
//! along self-avoiding paths.
//!
//! - [`tree`]: vertex/edge addresses and hash-derived per-edge randomness.
//! - [`samplers`]: Bernoulli, max-of-k copies, complement, mutual-choice
//!   matching and the bipartite site process, all evaluated lazily.
//! - [`density`]: exact law of the best path count under Bernoulli
//!   percolation, a brute-force oracle, and branch-and-bound path searches.
//! - [`bounds`]: thresholds `2/d`, `a(d,k)`, `f_d(eps)` and the best known
//!   lower bounds on `D_d(p)`.
//! - [`harness`]: seeded Monte Carlo experiments with CSV/JSON output.
//! - [`cli`]: the `treedense` command line.

pub mod bounds;
pub mod cli;
pub mod density;
pub mod error;
pub mod harness;
pub mod samplers;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use samplers::SamplerSpec;
pub use tree::{EdgeId, Seed, TreeParams, VertexId};
