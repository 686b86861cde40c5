//! Builds a partitioned dataset for one strategy, timing each stage.

use std::time::Instant;

use anyhow::{bail, Result};
use rdfdist::engine::Deployment;
use rdfdist::graph_prep::{to_undirected, PartitionMap};
use rdfdist::partitioner::{
    allocate_by_subject, allocate_random_hash, allocate_subject_hash, multilevel_partition, Strategy, StrategyConfig,
};
use rdfdist::query::Query;
use rdfdist::replication::{nhop_expand, warp_generalize, warp_stages, PartitionedDataset};
use rdfdist::rdf_io::EncodedTriple;
use serde::Serialize;

/// Wall-clock milliseconds per preparation stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PrepTimings {
    pub encode_ms: f64,
    pub graph_prep_ms: f64,
    pub partition_ms: f64,
    pub replicate_ms: f64,
}

impl PrepTimings {
    pub fn total_ms(&self) -> f64 {
        self.encode_ms + self.graph_prep_ms + self.partition_ms + self.replicate_ms
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

#[derive(Debug, Clone)]
pub struct Built {
    pub cfg: StrategyConfig,
    pub pd: PartitionedDataset,
    pub timings: PrepTimings,
    /// Replicas added by n-hop expansion.
    pub expansion_replicas: usize,
    /// Replicas added by workload refinement.
    pub refinement_replicas: usize,
    /// Generalized workload patterns, empty for workload-blind strategies.
    pub covered: Vec<Query>,
    /// Hop count relevant to locality analysis.
    pub hops: usize,
}

impl Built {
    pub fn deployment(&self) -> Deployment {
        Deployment::new(self.cfg.strategy, self.hops, self.covered.clone(), &self.pd)
    }
}

/// Runs the strategy's stages. `external` replaces the internal graph
/// partitioner with a precomputed partition map. `encode_ms` is carried over
/// from the caller, which encodes once per dataset.
pub fn build(
    cfg: &StrategyConfig,
    triples: &[EncodedTriple],
    node_count: usize,
    workload: &[Query],
    external: Option<&PartitionMap>,
    encode_ms: f64,
) -> Result<Built> {
    cfg.validate()?;
    let mut timings = PrepTimings { encode_ms, ..PrepTimings::default() };
    let strategy = cfg.strategy;
    let graph_map = |timings: &mut PrepTimings| -> Result<PartitionMap> {
        if let Some(m) = external {
            if m.k() != cfg.k {
                bail!("partition file has k={}, expected {}", m.k(), cfg.k);
            }
            return Ok(m.clone());
        }
        let t = Instant::now();
        let g = to_undirected(triples, node_count);
        timings.graph_prep_ms = ms_since(t);
        let t = Instant::now();
        let m = multilevel_partition(&g, cfg)?;
        timings.partition_ms = ms_since(t);
        Ok(m)
    };

    let mut pd = match strategy {
        Strategy::RandomHash | Strategy::SubjectHash | Strategy::Hybrid => {
            let t = Instant::now();
            let pd = if strategy == Strategy::RandomHash {
                allocate_random_hash(triples, cfg)?
            } else {
                allocate_subject_hash(triples, cfg)?
            };
            timings.partition_ms = ms_since(t);
            pd
        }
        Strategy::GraphSubject | Strategy::GraphNHop | Strategy::Warp => {
            let map = graph_map(&mut timings)?;
            let t = Instant::now();
            let pd = allocate_by_subject(triples, &map)?;
            timings.partition_ms += ms_since(t);
            pd
        }
    };

    let t = Instant::now();
    let (mut expansion_replicas, mut refinement_replicas, mut covered, mut hops) = (0, 0, Vec::new(), 0);
    match strategy {
        Strategy::RandomHash | Strategy::SubjectHash | Strategy::GraphSubject => {}
        Strategy::GraphNHop => {
            nhop_expand(&mut pd, triples, cfg.hops.max(1));
            expansion_replicas = pd.replica_count();
            hops = cfg.hops.max(1);
        }
        Strategy::Warp | Strategy::Hybrid => {
            covered = warp_generalize(workload)?;
            hops = if strategy == Strategy::Warp { 2 } else { cfg.hybrid_prehop.max(1) };
            let report = warp_stages(&mut pd, triples, hops, &covered)?;
            expansion_replicas = report.expansion_replicas;
            refinement_replicas = report.refinement.replicas_added;
        }
    }
    timings.replicate_ms = ms_since(t);
    Ok(Built { cfg: cfg.clone(), pd, timings, expansion_replicas, refinement_replicas, covered, hops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::replication_rate;

    #[test]
    fn hash_strategies_do_not_replicate() {
        let triples: Vec<EncodedTriple> = (0..500u64).map(|i| EncodedTriple::new(i % 50, i % 3, (i * i * 31 + 7) % 50)).collect();
        for s in [Strategy::RandomHash, Strategy::SubjectHash, Strategy::GraphSubject] {
            let b = build(&StrategyConfig::new(s, 4), &triples, 50, &[], None, 0.0).unwrap();
            assert_eq!(replication_rate(&b.pd), 0.0, "{s}");
            assert_eq!(b.pd.original_count(), b.pd.total_quads());
        }
        let b = build(&StrategyConfig::new(Strategy::GraphNHop, 4), &triples, 50, &[], None, 0.0).unwrap();
        assert!(replication_rate(&b.pd) > 0.0);
        assert_eq!(b.expansion_replicas, b.pd.replica_count());
    }
}
