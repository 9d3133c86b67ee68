//! Exact and Monte-Carlo baselines.

pub mod brute;
mod dominating;
mod estimators;
mod matching;
mod vertex_cover;

pub use dominating::exact_min_dominating_set;
pub use estimators::{
    estimate_conditional_f, estimate_match_marginals, tail_expectation_check, ConditionalF, MatchMarginals,
};
pub use matching::{is_matching, max_bipartite_matching, max_matching, Matching};
pub use vertex_cover::{
    exact_min_vertex_cover, is_vertex_cover, optimal_fractional_vertex_cover, FractionalVertexCover,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{what}: instance with n = {n}, m = {m} exceeds the configured size guard")]
    Budget { what: &'static str, n: usize, m: usize },
    #[error("negative value {0} in a non-negative sample")]
    NegativeSupport(i64),
    #[error("empty sample")]
    EmptySample,
}

/// Size guards for the exponential-time oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Exact vertex cover runs when `n <= vc_max_n` or `m <= vc_max_m`.
    pub vc_max_n: usize,
    pub vc_max_m: usize,
    pub mds_max_n: usize,
    /// Largest `n` for the exhaustive reference searches in [`brute`].
    pub exhaustive_max_n: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            vc_max_n: 40,
            vc_max_m: 80,
            mds_max_n: 24,
            exhaustive_max_n: 12,
        }
    }
}

pub(crate) fn bits_of(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}
