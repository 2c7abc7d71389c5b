use thiserror::Error;

use crate::graph::PreprocessReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),

    #[error("no edges survived preprocessing ({report})")]
    EmptyGraph { report: Box<PreprocessReport> },

    #[error("sign vector has length {found}, graph has {expected} edges")]
    LengthMismatch { expected: usize, found: usize },

    #[error("graph is disconnected: traversal reached {reached} of {total} vertices")]
    Disconnected { reached: usize, total: usize },

    #[error("Aldous-Broder walk exceeded {cap} steps")]
    WalkTimeout { cap: u64 },

    #[error("byte budget {budget} cannot hold one cloud entry of {needed} bytes")]
    Budget { budget: u64, needed: u64 },

    #[error("frustration cloud is empty")]
    EmptyCloud,

    #[error("all {failed} sampling iterations failed; last error: {last}")]
    AllIterationsFailed { failed: usize, last: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("gradient descent diverged at update {update}")]
    Divergence { update: usize },

    #[error("relaxation value at vertex {index} is NaN")]
    NotANumber { index: usize },

    #[error("graph has {vertices} vertices, exceeding the exhaustive-search limit of {max}")]
    SizeGuard { vertices: usize, max: usize },

    #[error("malformed state key: {0}")]
    MalformedStateKey(String),

    #[error(
        "unknown sampler method `{0}` (expected one of bfs, dfs, rdfs, ab, kruskal, prim, hybrid)"
    )]
    UnknownMethod(String),
}
