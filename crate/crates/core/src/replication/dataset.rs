use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph_prep::PartitionId;
use crate::rdf_io::EncodedTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Original,
    Replica,
}

/// A triple tagged with the partition that stores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quad {
    pub triple: EncodedTriple,
    pub partition: PartitionId,
    pub provenance: Provenance,
}

/// The quads stored by one partition, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    triples: Vec<EncodedTriple>,
    provenance: Vec<Provenance>,
    present: HashSet<EncodedTriple>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &EncodedTriple) -> bool {
        self.present.contains(t)
    }

    pub fn triples(&self) -> &[EncodedTriple] {
        &self.triples
    }

    pub fn iter(&self) -> impl Iterator<Item = (EncodedTriple, Provenance)> + '_ {
        self.triples.iter().copied().zip(self.provenance.iter().copied())
    }

    pub fn originals(&self) -> impl Iterator<Item = EncodedTriple> + '_ {
        self.iter().filter(|(_, p)| *p == Provenance::Original).map(|(t, _)| t)
    }

    pub fn replica_count(&self) -> usize {
        self.provenance.iter().filter(|p| **p == Provenance::Replica).count()
    }

    fn push(&mut self, t: EncodedTriple, prov: Provenance) -> bool {
        if !self.present.insert(t) {
            return false;
        }
        self.triples.push(t);
        self.provenance.push(prov);
        true
    }
}

/// `k` partitions of quads, each triple original in exactly one partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedDataset {
    partitions: Vec<Partition>,
    origin: HashMap<EncodedTriple, PartitionId>,
}

impl PartitionedDataset {
    pub fn new(k: u32) -> Self {
        Self { partitions: vec![Partition::default(); k as usize], origin: HashMap::new() }
    }

    pub fn k(&self) -> u32 {
        self.partitions.len() as u32
    }

    /// Stores `t` as original in partition `p`. Returns false, and changes
    /// nothing, if `t` is already stored as an original anywhere.
    pub fn insert_original(&mut self, t: EncodedTriple, p: PartitionId) -> bool {
        if self.origin.contains_key(&t) {
            return false;
        }
        assert!(p < self.k(), "partition {p} out of range for k={}", self.k());
        self.origin.insert(t, p);
        let inserted = self.partitions[p as usize].push(t, Provenance::Original);
        debug_assert!(inserted);
        true
    }

    /// Copies an original triple into partition `p`. Returns false if the
    /// pair is already present.
    ///
    /// # Panics
    /// If `t` is not stored as an original in some partition.
    pub fn add_replica(&mut self, t: EncodedTriple, p: PartitionId) -> bool {
        assert!(self.origin.contains_key(&t), "replica of unknown triple {t}");
        self.partitions[p as usize].push(t, Provenance::Replica)
    }

    pub fn contains(&self, t: &EncodedTriple, p: PartitionId) -> bool {
        self.partitions[p as usize].contains(t)
    }

    pub fn original_partition(&self, t: &EncodedTriple) -> Option<PartitionId> {
        self.origin.get(t).copied()
    }

    pub fn partition(&self, p: PartitionId) -> &Partition {
        &self.partitions[p as usize]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.partitions.iter().enumerate().flat_map(|(p, part)| {
            part.iter().map(move |(triple, provenance)| Quad { triple, partition: p as PartitionId, provenance })
        })
    }

    /// Distinct original triples, grouped by partition in insertion order.
    pub fn original_triples(&self) -> Vec<EncodedTriple> {
        self.partitions.iter().flat_map(|p| p.originals()).collect()
    }

    /// Quad count per partition.
    pub fn sizes(&self) -> Vec<usize> {
        self.partitions.iter().map(Partition::len).collect()
    }

    pub fn total_quads(&self) -> usize {
        self.partitions.iter().map(Partition::len).sum()
    }

    pub fn original_count(&self) -> usize {
        self.origin.len()
    }

    pub fn replica_count(&self) -> usize {
        self.total_quads() - self.original_count()
    }

    /// Checks the provenance invariants; returns a description of the first violation.
    pub fn validate(&self) -> Result<(), String> {
        let mut originals = 0;
        for (p, part) in self.partitions.iter().enumerate() {
            if part.present.len() != part.triples.len() {
                return Err(format!("partition {p} holds duplicate quads"));
            }
            for (t, prov) in part.iter() {
                match (prov, self.origin.get(&t)) {
                    (Provenance::Original, Some(&o)) if o as usize == p => originals += 1,
                    (Provenance::Original, _) => return Err(format!("original {t} in {p} not indexed there")),
                    (Provenance::Replica, Some(&o)) if o as usize != p => {}
                    (Provenance::Replica, _) => return Err(format!("replica {t} in {p} has no original elsewhere")),
                }
            }
        }
        if originals != self.origin.len() {
            return Err(format!("{} originals indexed, {originals} stored", self.origin.len()));
        }
        Ok(())
    }
}
