//! Partition assignment: per-triple hashing and the multilevel graph partitioner.

mod config;
pub mod hash;
mod multilevel;

pub use config::{Strategy, StrategyConfig};
pub use hash::{hash_random, hash_subject};
pub use multilevel::multilevel_partition;

use crate::graph_prep::{PartitionId, PartitionMap};
use crate::rdf_io::{EncodedTriple, NodeId};
use crate::replication::PartitionedDataset;

#[derive(Debug, thiserror::Error)]
pub enum PartitionError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot split {vertices} vertices into {k} non-empty balanced partitions")]
    InfeasibleBalance { k: u32, vertices: usize },
    #[error("subject {0} has no partition in the partition map")]
    UnmappedSubject(NodeId),
    #[error("partition map has k={map_k}, configuration asks for k={k}")]
    KMismatch { map_k: u32, k: u32 },
}

/// Places every triple in the partition chosen by `assign`, flagged original.
pub fn allocate_with<F>(triples: &[EncodedTriple], k: u32, mut assign: F) -> Result<PartitionedDataset, PartitionError>
where
    F: FnMut(&EncodedTriple) -> Result<PartitionId, PartitionError>,
{
    let mut pd = PartitionedDataset::new(k);
    for t in triples {
        let p = assign(t)?;
        pd.insert_original(*t, p);
    }
    Ok(pd)
}

/// Places each triple in the partition of its subject.
pub fn allocate_by_subject(triples: &[EncodedTriple], map: &PartitionMap) -> Result<PartitionedDataset, PartitionError> {
    allocate_with(triples, map.k(), |t| map.get(t.s.0).ok_or(PartitionError::UnmappedSubject(t.s)))
}

pub fn allocate_random_hash(triples: &[EncodedTriple], cfg: &StrategyConfig) -> Result<PartitionedDataset, PartitionError> {
    cfg.validate()?;
    allocate_with(triples, cfg.k, |t| Ok(hash_random(t, cfg)))
}

pub fn allocate_subject_hash(triples: &[EncodedTriple], cfg: &StrategyConfig) -> Result<PartitionedDataset, PartitionError> {
    cfg.validate()?;
    allocate_with(triples, cfg.k, |t| Ok(hash_subject(t, cfg)))
}

/// Partition map equivalent to subject hashing over `node_count` nodes.
pub fn subject_hash_map(node_count: usize, cfg: &StrategyConfig) -> PartitionMap {
    let parts = (0..node_count as u64).map(|v| hash::hash_node(v, cfg)).collect();
    PartitionMap::new(parts, cfg.k).expect("hash buckets below k")
}
