//! Replica placement on top of an original allocation: n-hop expansion and
//! workload-aware refinement.

mod dataset;
mod nhop;
mod store;
mod warp;

pub use dataset::{Partition, PartitionedDataset, Provenance, Quad};
pub use nhop::{nhop_expand, one_hop_expand, verify_nhop, NHopViolation, SubjectIndex};
pub use store::{load_partitioned, save_partitioned, MANIFEST_FILE, PROVENANCE_MAGIC};
pub use warp::{
    annotate_bindings, hybrid_pipeline, originals_index, seed_pairs, warp_generalize, warp_pipeline, warp_refine,
    warp_seed_cost, warp_stages, AnnotatedRow, PatternRefinement, PipelineReport, SeedCandidate, WarpReport,
};

use crate::partitioner::PartitionError;
use crate::query::QueryError;

#[derive(Debug, thiserror::Error)]
pub enum ReplicationError {
    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),
    #[error("workload pattern with {0} triple patterns is not connected")]
    DisconnectedPattern(usize),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

impl From<QueryError> for ReplicationError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::UnsupportedPattern(m) => ReplicationError::UnsupportedPattern(m),
            other => ReplicationError::UnsupportedPattern(other.to_string()),
        }
    }
}
