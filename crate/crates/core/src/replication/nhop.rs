//! n-hop guarantee: every directed path of `n` triples that starts at an
//! original triple of a partition is stored in that partition.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::graph_prep::PartitionId;
use crate::rdf_io::{EncodedTriple, NodeId};

use super::PartitionedDataset;

/// Original triples grouped by subject.
#[derive(Debug, Clone, Default)]
pub struct SubjectIndex {
    by_subject: HashMap<NodeId, Vec<EncodedTriple>>,
}

impl SubjectIndex {
    pub fn new(triples: &[EncodedTriple]) -> Self {
        let mut by_subject: HashMap<NodeId, Vec<EncodedTriple>> = HashMap::new();
        let mut seen = HashSet::with_capacity(triples.len());
        for t in triples {
            if seen.insert(*t) {
                by_subject.entry(t.s).or_default().push(*t);
            }
        }
        Self { by_subject }
    }

    pub fn with_subject(&self, s: NodeId) -> &[EncodedTriple] {
        self.by_subject.get(&s).map_or(&[], Vec::as_slice)
    }
}

/// Adds to each partition the triples whose subject is an object of a
/// triple in `frontier`. Returns the newly added quads per partition.
fn expand_frontier(
    pd: &mut PartitionedDataset,
    index: &SubjectIndex,
    frontier: &[Vec<EncodedTriple>],
) -> Vec<Vec<EncodedTriple>> {
    let additions: Vec<Vec<EncodedTriple>> = frontier
        .par_iter()
        .enumerate()
        .map(|(p, quads)| {
            let part = pd.partition(p as PartitionId);
            let mut objects = HashSet::new();
            let mut added = Vec::new();
            let mut added_set = HashSet::new();
            for t in quads {
                if !objects.insert(t.o) {
                    continue;
                }
                for next in index.with_subject(t.o) {
                    if !part.contains(next) && added_set.insert(*next) {
                        added.push(*next);
                    }
                }
            }
            added
        })
        .collect();
    for (p, added) in additions.iter().enumerate() {
        for t in added {
            pd.add_replica(*t, p as PartitionId);
        }
    }
    additions
}

/// One expansion round over every quad currently stored.
pub fn one_hop_expand(pd: &mut PartitionedDataset, triples: &[EncodedTriple]) {
    let index = SubjectIndex::new(triples);
    let frontier: Vec<Vec<EncodedTriple>> = pd.partitions().iter().map(|p| p.triples().to_vec()).collect();
    expand_frontier(pd, &index, &frontier);
}

/// Applies `n - 1` expansion rounds; `n = 1` leaves `pd` unchanged.
///
/// Rounds after the first only look at quads added by the previous round,
/// which yields the same result as re-scanning every partition.
pub fn nhop_expand(pd: &mut PartitionedDataset, triples: &[EncodedTriple], n: usize) {
    assert!(n >= 1, "hop count must be at least 1");
    if n == 1 {
        return;
    }
    let index = SubjectIndex::new(triples);
    let mut frontier: Vec<Vec<EncodedTriple>> = pd.partitions().iter().map(|p| p.triples().to_vec()).collect();
    for _ in 1..n {
        frontier = expand_frontier(pd, &index, &frontier);
        if frontier.iter().all(Vec::is_empty) {
            break;
        }
    }
}

/// A path that starts at an original triple of `partition` but leaves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NHopViolation {
    pub partition: PartitionId,
    pub path: Vec<EncodedTriple>,
}

/// Checks the n-hop guarantee by enumerating, for every original triple of
/// every partition, all forward paths of up to `n` triples.
pub fn verify_nhop(pd: &PartitionedDataset, triples: &[EncodedTriple], n: usize) -> Result<(), NHopViolation> {
    if n <= 1 {
        return Ok(());
    }
    let index = SubjectIndex::new(triples);
    let results: Vec<Result<(), NHopViolation>> = (0..pd.k())
        .into_par_iter()
        .map(|p| {
            let part = pd.partition(p);
            // (node, remaining hops) pairs already known to be closed
            let mut closed: HashSet<(NodeId, usize)> = HashSet::new();
            let mut path = Vec::with_capacity(n);
            for t in part.originals() {
                path.clear();
                path.push(t);
                if let Some(bad) = walk(part_contains(pd, p), &index, t.o, n - 1, &mut path, &mut closed) {
                    return Err(NHopViolation { partition: p, path: bad });
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect()
}

fn part_contains(pd: &PartitionedDataset, p: PartitionId) -> impl Fn(&EncodedTriple) -> bool + Copy + '_ {
    move |t| pd.contains(t, p)
}

fn walk(
    contains: impl Fn(&EncodedTriple) -> bool + Copy,
    index: &SubjectIndex,
    node: NodeId,
    remaining: usize,
    path: &mut Vec<EncodedTriple>,
    closed: &mut HashSet<(NodeId, usize)>,
) -> Option<Vec<EncodedTriple>> {
    if remaining == 0 || closed.contains(&(node, remaining)) {
        return None;
    }
    for next in index.with_subject(node) {
        path.push(*next);
        if !contains(next) {
            return Some(path.clone());
        }
        if let Some(bad) = walk(contains, index, next.o, remaining - 1, path, closed) {
            return Some(bad);
        }
        path.pop();
    }
    closed.insert((node, remaining));
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: u64, p: u64, o: u64) -> EncodedTriple {
        EncodedTriple::new(s, p, o)
    }

    fn chain_pd() -> (PartitionedDataset, Vec<EncodedTriple>) {
        // a=0 -> b=1 -> c=2 -> d=3, one triple per partition
        let triples = vec![t(0, 0, 1), t(1, 1, 2), t(2, 2, 3)];
        let mut pd = PartitionedDataset::new(3);
        for (i, tr) in triples.iter().enumerate() {
            pd.insert_original(*tr, i as u32);
        }
        (pd, triples)
    }

    #[test]
    fn one_hop_adds_successor() {
        let triples = vec![t(0, 0, 1), t(1, 1, 2)];
        let mut pd = PartitionedDataset::new(2);
        pd.insert_original(triples[0], 0);
        pd.insert_original(triples[1], 1);
        one_hop_expand(&mut pd, &triples);
        assert!(pd.contains(&triples[1], 0));
        assert_eq!(pd.sizes(), vec![2, 1]);
        pd.validate().unwrap();
    }

    #[test]
    fn no_links_is_fixpoint() {
        let triples = vec![t(0, 0, 1), t(2, 0, 3)];
        let mut pd = PartitionedDataset::new(2);
        pd.insert_original(triples[0], 0);
        pd.insert_original(triples[1], 1);
        let before = pd.clone();
        one_hop_expand(&mut pd, &triples);
        assert_eq!(pd, before);
    }

    #[test]
    fn n_one_is_identity() {
        let (mut pd, triples) = chain_pd();
        let before = pd.clone();
        nhop_expand(&mut pd, &triples, 1);
        assert_eq!(pd, before);
    }

    #[test]
    fn chain_three_hops() {
        let (mut pd, triples) = chain_pd();
        nhop_expand(&mut pd, &triples, 3);
        for tr in &triples {
            assert!(pd.contains(tr, 0));
        }
        assert!(verify_nhop(&pd, &triples, 3).is_ok());
    }

    #[test]
    fn verify_reports_path() {
        let triples = vec![t(0, 0, 1), t(1, 1, 2)];
        let mut pd = PartitionedDataset::new(2);
        pd.insert_original(triples[0], 0);
        pd.insert_original(triples[1], 1);
        assert!(verify_nhop(&pd, &triples, 1).is_ok());
        let v = verify_nhop(&pd, &triples, 2).unwrap_err();
        assert_eq!(v, NHopViolation { partition: 0, path: vec![triples[0], triples[1]] });
    }

    #[test]
    fn cycles_terminate() {
        let triples = vec![t(0, 0, 1), t(1, 0, 0)];
        let mut pd = PartitionedDataset::new(2);
        pd.insert_original(triples[0], 0);
        pd.insert_original(triples[1], 1);
        nhop_expand(&mut pd, &triples, 5);
        assert!(verify_nhop(&pd, &triples, 5).is_ok());
        assert_eq!(pd.sizes(), vec![2, 2]);
    }
}
