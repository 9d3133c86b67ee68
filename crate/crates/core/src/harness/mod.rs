//! Experiment plumbing: key=value configs, paired ratio tables, and the
//! acceptance suite behind `stochgraph accept`.

pub mod accept;
pub mod config;
pub mod report;

pub use accept::{criteria, run_acceptance, AcceptOptions, Criterion, Outcome};
pub use config::{parse_pairs, Algorithm, Baseline, ExperimentConfig, GraphSource, Problem};
pub use report::{baseline_value, prepare, ratio_report, solve, write_rows_csv, Prepared, ResultRow};

use thiserror::Error;

use crate::engine::EngineError;
use crate::graph::GraphError;
use crate::matching::MatchingError;
use crate::mds::MdsError;
use crate::oracles::OracleError;
use crate::vc::VcError;

/// Process exit codes of the CLI.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VIOLATION: i32 = 2;
    pub const ACCEPTANCE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad flags, config keys or algorithm parameters.
    #[error("usage: {0}")]
    Usage(String),
    /// The requested baseline cannot be computed at this size.
    #[error("refused: {0}")]
    Refused(String),
    /// A run broke the model or a checked invariant.
    #[error("violation: {0}")]
    Violation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Violation(_) => exit::VIOLATION,
            _ => exit::USAGE,
        }
    }
}

impl From<GraphError> for HarnessError {
    fn from(e: GraphError) -> Self {
        HarnessError::Usage(e.to_string())
    }
}

impl From<EngineError> for HarnessError {
    fn from(e: EngineError) -> Self {
        HarnessError::Violation(e.to_string())
    }
}

impl From<OracleError> for HarnessError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget { .. } => HarnessError::Refused(e.to_string()),
            _ => HarnessError::Violation(e.to_string()),
        }
    }
}

impl From<VcError> for HarnessError {
    fn from(e: VcError) -> Self {
        match e {
            VcError::Epsilon(_) | VcError::NotPermutation { .. } => HarnessError::Usage(e.to_string()),
            _ => HarnessError::Violation(e.to_string()),
        }
    }
}

impl From<MatchingError> for HarnessError {
    fn from(e: MatchingError) -> Self {
        match e {
            MatchingError::Invalid(_) | MatchingError::Engine(_) => HarnessError::Violation(e.to_string()),
            _ => HarnessError::Usage(e.to_string()),
        }
    }
}

impl From<MdsError> for HarnessError {
    fn from(e: MdsError) -> Self {
        match e {
            MdsError::RankingMismatch { .. } => HarnessError::Usage(e.to_string()),
            _ => HarnessError::Violation(e.to_string()),
        }
    }
}
