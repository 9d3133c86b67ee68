//! Vertex cover on stochastic graphs.
//!
//! - [`nocomm`]: each vertex takes responsibility for some incident edges in
//!   preprocessing and joins the cover if one of them is realized. No
//!   messages; expected size within 3.44 of the optimal fractional cover.
//! - [`ordering`]: the cover induced by a vertex ordering, with the
//!   sequential random matching used to bound it.
//! - [`waterfill`]: a `(2 + ε)` cover from a proportional water-filling
//!   matching computed in preprocessing, finished by a discretized
//!   water-filling over single-bit rounds.

pub mod nocomm;
pub mod ordering;
pub mod waterfill;

pub use nocomm::{
    build_edge_association, cover_probability_closed_form, nocomm_vc_protocol, EdgeAssociation, NoCommVc,
};
pub use ordering::{
    default_ordering, ordering_cover, ordering_cover_expectation, ordering_cover_probabilities,
    sequential_random_matching, SequentialMatching,
};
pub use waterfill::{
    distributed_waterfilling_protocol, realize_chi, run_waterfill_vc, waterfilling, witness_fractional_matching,
    ChiSets, VCConstants, WaterfillRun, WaterfillState, WaterfillVc,
};

use crate::engine::EngineError;
use crate::graph::{EdgeId, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum VcError {
    #[error("ε must lie in (0, 1/4], got {0}")]
    Epsilon(f64),
    #[error("conditional estimates cover {got} edges, graph has {expected}")]
    MissingEstimate { expected: usize, got: usize },
    #[error("ordering is not a permutation of 0..{n}")]
    NotPermutation { n: usize },
    #[error("witness overloads vertex {vertex}: {load}")]
    WitnessInfeasible { vertex: VertexId, load: f64 },
    #[error("realized edge {0} is not covered")]
    Uncovered(EdgeId),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Whether `cover` (a vertex mask) touches every realized edge; returns the
/// first uncovered edge otherwise.
pub fn check_cover(
    g: &crate::graph::BaseGraph,
    realization: &crate::graph::Realization,
    cover: &[bool],
) -> Result<(), VcError> {
    match realization.realized_edges().find(|&e| {
        let (u, v) = g.endpoints(e);
        !cover[u] && !cover[v]
    }) {
        Some(e) => Err(VcError::Uncovered(e)),
        None => Ok(()),
    }
}
