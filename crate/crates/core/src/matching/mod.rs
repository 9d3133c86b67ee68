//! Maximum matching on stochastic graphs.
//!
//! - [`two_round`]: active vertices propose along the optimal matching of a
//!   private hallucinated realization; passive vertices accept one proposal.
//! - [`polyeps`]: a degree-capped sparsifier chosen in preprocessing, pruning
//!   of high realized degrees, then a local propose/grant matching followed
//!   by short augmenting-path rounds.

pub mod polyeps;
pub mod two_round;

pub use polyeps::{
    degree_cap_sparsifier, distributed_matching_approx_protocol, matching_polyeps_pipeline, prune_high_degree,
    run_polyeps, PolyEpsConfig, PolyEpsMatching, PolyEpsRun, PrunedInstance, Schedule,
};
pub use two_round::{
    bipartite_two_round_protocol, hallucination, optimal_alpha, ratio_fn, two_round_matching_protocol, SideAssignment,
    SideRule, TwoRoundMatching,
};

use crate::engine::EngineError;
use crate::graph::{EdgeId, GraphError, Realization, StochasticGraph, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum MatchingError {
    #[error("α must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("ε must lie in (0, 1/2), got {0}")]
    Epsilon(f64),
    #[error("θ must be at least 1, got {0}")]
    Theta(f64),
    #[error("sparsifier cap must be at least 1")]
    Cap,
    #[error("all edges must share one realization probability")]
    NonUniform,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("inconsistent matching: {0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Collects the edges reported by both endpoints, checking that reports
/// agree, that every edge is realized and that the result is a matching.
pub fn matching_from_partners(
    sg: &StochasticGraph,
    realization: &Realization,
    partner: &[Option<(VertexId, EdgeId)>],
) -> Result<Vec<EdgeId>, MatchingError> {
    let g = sg.graph();
    let mut edges = Vec::new();
    for (v, p) in partner.iter().enumerate() {
        let Some((u, e)) = *p else { continue };
        if e >= g.m() || g.endpoints(e) != (v.min(u), v.max(u)) {
            return Err(MatchingError::Invalid(format!("vertex {v} reports edge {e} to {u}")));
        }
        if partner[u] != Some((v, e)) {
            return Err(MatchingError::Invalid(format!(
                "vertex {v} matched to {u}, not reciprocated"
            )));
        }
        if !realization.is_present(e) {
            return Err(MatchingError::Invalid(format!("edge {e} is not realized")));
        }
        if v < u {
            edges.push(e);
        }
    }
    edges.sort_unstable();
    Ok(edges)
}
