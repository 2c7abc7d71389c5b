//! Balancing signed graphs and estimating their frustration index.
//!
//! The pipeline: ingest an edge list into a [`SignedGraph`], sample spanning
//! trees, balance against each tree, and keep the distinct balanced states in a
//! [`FrustrationCloud`]. [`graphl`] offers a gradient-descent alternative and
//! [`oracle`] the exact answer for small graphs.

pub mod balance;
pub mod cloud;
pub mod error;
pub mod graph;
pub mod graphl;
pub mod oracle;
pub mod rng;
pub mod sampling;
pub mod sign;
mod union_find;

pub use balance::{
    balance_with_tree, compute_parity_labels, frustration_of_assignment, hamming_distance,
    harary_bipartition, is_balanced, BalancedState, Bipartition, ParityLabels,
};
pub use cloud::{
    derive_f_max, run_graphbpp, ByteBudget, CloudEntry, FrustrationCloud, GraphBppConfig,
    InsertOutcome, RunReport, ENTRY_OVERHEAD_BYTES,
};
pub use error::{Error, Result};
pub use graph::{
    amazon_ratings_to_records, build_signed_graph, largest_connected_component, parse_edge_list,
    parse_edge_str, parse_state_key, serialize_state, Edge, EdgeListFormat, ParsedEdges,
    PreprocessReport, RatingReport, RawEdgeRecord, SignedGraph,
};
pub use graphl::{run_graphl, GammaVector, GraphLConfig, GraphLResult};
pub use oracle::{
    exact_frustration, exact_frustration_parallel, OracleResult, DEFAULT_MAX_VERTICES,
};
pub use sampling::{sample_tree, SamplerMethod, SpanningTree};
pub use sign::{Sign, VertexAssignment};
