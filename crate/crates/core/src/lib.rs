//! Distributed optimization on stochastic graphs.
//!
//! A base graph `G` is known to every vertex together with a realization
//! probability `p_e` for each edge. A random subgraph `G*` is then sampled and
//! vertices may only talk over realized edges, in synchronous rounds. This
//! crate provides
//!
//! - the graph model, generators and a text file format ([`graph`]),
//! - a round-synchronous executor that enforces the communication model and
//!   meters rounds and message sizes ([`engine`]),
//! - exact and Monte-Carlo baselines ([`oracles`]),
//! - vertex cover, matching and dominating set protocols ([`vc`],
//!   [`matching`], [`mds`]),
//! - the Poisson tail analysis behind the zero-round cover constant
//!   ([`poisson`]),
//! - an experiment harness and acceptance suite ([`harness`]).
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod engine;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod mds;
pub mod oracles;
pub mod poisson;
pub mod rng;
pub mod stats;
pub mod vc;

pub use engine::{NodeProgram, NodeView, Protocol, RunTrace, Simulator};
pub use graph::{BaseGraph, Bipartition, EdgeId, Realization, StochasticGraph, VertexId};
pub use stats::MCEstimate;
