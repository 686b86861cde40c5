//! Workload-aware replication: generalize workload queries into patterns,
//! annotate each pattern's solutions with the partitions of the matched
//! originals, and copy missing triples to the partition of the cheapest seed.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph_prep::{to_undirected, PartitionId, PartitionMap};
use crate::partitioner::{allocate_by_subject, allocate_subject_hash, multilevel_partition, PartitionError, StrategyConfig};
use crate::query::{plan_order, Column, JoinOrder, Query, Relation, TripleIndex};
use crate::rdf_io::EncodedTriple;

use super::{nhop_expand, PartitionedDataset, ReplicationError};

/// Generalizes every workload query and merges duplicates, keeping first
/// occurrences in order.
pub fn warp_generalize(workload: &[Query]) -> Result<Vec<Query>, ReplicationError> {
    let mut out: Vec<Query> = Vec::new();
    for q in workload {
        let g = q.generalize()?;
        if !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

/// One solution of a pattern over the original triples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotatedRow {
    /// Value per pattern variable, indexed like `Query::vars`.
    pub bindings: Vec<u64>,
    /// Matched triple per triple pattern.
    pub triples: Vec<EncodedTriple>,
    /// Original partition of each matched triple.
    pub partitions: Vec<PartitionId>,
}

/// Original triples of `pd` indexed for matching. Replication never changes
/// originals, so one index serves a whole refinement run.
pub fn originals_index(pd: &PartitionedDataset) -> TripleIndex {
    TripleIndex::from_vec(pd.original_triples())
}

/// Solutions of a connected pattern, each annotated with the original
/// partition of every matched triple. Replicas are ignored.
pub fn annotate_bindings(pattern: &Query, pd: &PartitionedDataset) -> Result<Vec<AnnotatedRow>, ReplicationError> {
    annotate_with(pattern, pd, &originals_index(pd))
}

fn annotate_with(pattern: &Query, pd: &PartitionedDataset, index: &TripleIndex) -> Result<Vec<AnnotatedRow>, ReplicationError> {
    if pattern.has_variable_predicate() {
        return Err(ReplicationError::UnsupportedPattern("variable predicate".into()));
    }
    if !pattern.is_connected() {
        return Err(ReplicationError::DisconnectedPattern(pattern.patterns.len()));
    }
    let matches: Vec<Vec<u32>> = pattern.patterns.iter().map(|p| index.matches(p)).collect();
    if matches.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let counts: Vec<usize> = matches.iter().map(Vec::len).collect();
    let mut acc = Relation::unit();
    for i in plan_order(pattern, JoinOrder::Greedy, &counts) {
        acc = acc.join(&Relation::from_matches(&pattern.patterns[i], index, &matches[i], Some(i)));
        if acc.is_empty() {
            return Ok(Vec::new());
        }
    }
    let var_pos: Vec<usize> = (0..pattern.vars.len()).map(|v| acc.position(Column::Var(v)).expect("bound")).collect();
    let tag_pos: Vec<usize> =
        (0..pattern.patterns.len()).map(|i| acc.position(Column::Tag(i)).expect("tagged")).collect();
    let mut rows: Vec<AnnotatedRow> = acc
        .rows
        .iter()
        .map(|r| {
            let triples: Vec<EncodedTriple> = tag_pos.iter().map(|&p| index.triple(r[p] as u32)).collect();
            let partitions = triples.iter().map(|t| pd.original_partition(t).expect("indexed original")).collect();
            AnnotatedRow { bindings: var_pos.iter().map(|&p| r[p]).collect(), triples, partitions }
        })
        .collect();
    rows.sort_by(|a, b| a.triples.cmp(&b.triples));
    rows.dedup();
    Ok(rows)
}

/// Choice of seed for one generalized pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedCandidate {
    /// Index of the generalized pattern in the refinement input.
    pub pattern: usize,
    /// Index of the seed triple pattern within that BGP.
    pub seed: usize,
    pub cost: usize,
}

/// The (triple, partition) pairs that seeding at `seed` would replicate.
pub fn seed_pairs(seed: usize, rows: &[AnnotatedRow], pd: &PartitionedDataset) -> HashSet<(EncodedTriple, PartitionId)> {
    let mut pairs = HashSet::new();
    for row in rows {
        let target = row.partitions[seed];
        for (j, t) in row.triples.iter().enumerate() {
            if j != seed && row.partitions[j] != target && !pd.contains(t, target) {
                pairs.insert((*t, target));
            }
        }
    }
    pairs
}

/// Number of distinct triples that must be copied to the seed partitions.
pub fn warp_seed_cost(seed: usize, rows: &[AnnotatedRow], pd: &PartitionedDataset) -> usize {
    seed_pairs(seed, rows, pd).len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternRefinement {
    pub rows: usize,
    pub candidates: Vec<SeedCandidate>,
    pub chosen: Option<SeedCandidate>,
    pub replicas_added: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WarpReport {
    pub patterns: Vec<PatternRefinement>,
    pub replicas_added: usize,
}

/// Refines `pd` pattern by pattern. Each pattern is costed against the
/// dataset as left by the previous ones.
pub fn warp_refine(pd: &mut PartitionedDataset, patterns: &[Query]) -> Result<WarpReport, ReplicationError> {
    let index = originals_index(pd);
    let mut report = WarpReport::default();
    for (pi, pattern) in patterns.iter().enumerate() {
        let rows = annotate_with(pattern, pd, &index)?;
        if rows.is_empty() {
            report.patterns.push(PatternRefinement { rows: 0, candidates: Vec::new(), chosen: None, replicas_added: 0 });
            continue;
        }
        let snapshot = &*pd;
        let mut costed: Vec<(SeedCandidate, Vec<(EncodedTriple, PartitionId)>)> = (0..pattern.patterns.len())
            .into_par_iter()
            .map(|seed| {
                let mut pairs: Vec<_> = seed_pairs(seed, &rows, snapshot).into_iter().collect();
                pairs.sort_unstable();
                (SeedCandidate { pattern: pi, seed, cost: pairs.len() }, pairs)
            })
            .collect();
        let best = (0..costed.len()).min_by_key(|&i| (costed[i].0.cost, i)).expect("non-empty pattern");
        let chosen = costed[best].0;
        let pairs = std::mem::take(&mut costed[best].1);
        let mut added = 0;
        for (t, p) in pairs {
            if pd.add_replica(t, p) {
                added += 1;
            }
        }
        report.replicas_added += added;
        report.patterns.push(PatternRefinement {
            rows: rows.len(),
            candidates: costed.iter().map(|c| c.0).collect(),
            chosen: Some(chosen),
            replicas_added: added,
        });
    }
    Ok(report)
}

/// Replica counts of a pipeline, split by stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub expansion_replicas: usize,
    pub refinement: WarpReport,
}

impl PipelineReport {
    pub fn total_replicas(&self) -> usize {
        self.expansion_replicas + self.refinement.replicas_added
    }
}

/// Multilevel partitioning of the subject/object graph (or `external`, a
/// partition map read from a Metis output file), subject allocation, 2-hop
/// expansion, then refinement against `workload`.
pub fn warp_pipeline(
    triples: &[EncodedTriple],
    node_count: usize,
    workload: &[Query],
    cfg: &StrategyConfig,
    external: Option<&PartitionMap>,
) -> Result<(PartitionedDataset, PipelineReport), ReplicationError> {
    let patterns = warp_generalize(workload)?;
    let map = match external {
        Some(m) if m.k() != cfg.k => return Err(PartitionError::KMismatch { map_k: m.k(), k: cfg.k }.into()),
        Some(m) => m.clone(),
        None => multilevel_partition(&to_undirected(triples, node_count), cfg)?,
    };
    let mut pd = allocate_by_subject(triples, &map)?;
    let report = warp_stages(&mut pd, triples, 2, &patterns)?;
    Ok((pd, report))
}

/// Subject hashing, optional `cfg.hybrid_prehop`-hop expansion, then
/// refinement against `workload`.
pub fn hybrid_pipeline(
    triples: &[EncodedTriple],
    workload: &[Query],
    cfg: &StrategyConfig,
) -> Result<(PartitionedDataset, PipelineReport), ReplicationError> {
    let patterns = warp_generalize(workload)?;
    let mut pd = allocate_subject_hash(triples, cfg)?;
    let report = warp_stages(&mut pd, triples, cfg.hybrid_prehop.max(1), &patterns)?;
    Ok((pd, report))
}

/// Expansion to `hops` followed by refinement; the stage split used by both pipelines.
pub fn warp_stages(
    pd: &mut PartitionedDataset,
    triples: &[EncodedTriple],
    hops: usize,
    patterns: &[Query],
) -> Result<PipelineReport, ReplicationError> {
    let before = pd.replica_count();
    nhop_expand(pd, triples, hops);
    let expansion_replicas = pd.replica_count() - before;
    let refinement = warp_refine(pd, patterns)?;
    Ok(PipelineReport { expansion_replicas, refinement })
}
