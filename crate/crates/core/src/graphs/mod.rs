//! Feynman graphs: representation, canonical forms, enumeration,
//! concatenation and admissible partitions.

pub mod canon;
pub mod concat;
pub mod enumerate;
pub mod fgraph;
pub mod ngraph;

pub use canon::{brute_force_aut, canonicalize, isomorphic, GraphClass};
pub use concat::{admissible_partitions, concatenate, sigma_partition, AdmissiblePartition, Split};
pub use enumerate::{enumerate, enumerate_with, Family};
pub use fgraph::{FGraph, GraphRecord, VertexKind, SINK, SOURCE};
pub use ngraph::{lambda_order, NGraphKey};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("regular weight {0} is below -1")]
    BadWeight(i32),
    #[error("graph has a directed cycle")]
    Cycle,
    #[error("source has incoming edges")]
    SourceHasIncoming,
    #[error("sink has outgoing edges")]
    SinkHasOutgoing,
    #[error("vertex {0} lacks an incoming or outgoing edge")]
    Dangling(String),
    #[error("weight -1 vertex {0} has fewer than three incident edges")]
    LowDegree(String),
    #[error("path from s{0} to s{1} contradicts the special order")]
    OrderConflict(usize, usize),
    #[error("graph record: {0}")]
    Parse(String),
    #[error("sink degree {0} does not match source degree {1}")]
    Incomposable(u32, u32),
    #[error("splice map is not a bijection")]
    BadSplice,
    #[error("special index {0} exceeds special count {1}")]
    SpecialOutOfRange(usize, usize),
    #[error("graph is not in the family without internal edges")]
    NotNGraph,
}
