mod common;

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rdfdist::graph_prep::PartitionId;
use rdfdist::partitioner::{allocate_random_hash, allocate_subject_hash, Strategy, StrategyConfig};
use rdfdist::replication::{nhop_expand, one_hop_expand, verify_nhop, PartitionedDataset};
use rdfdist::rdf_io::EncodedTriple;

/// Expected partition contents after one expansion, computed pairwise:
/// every stored triple `t1` pulls in every `t2` with `subject(t2) = object(t1)`.
fn brute_one_hop(pd: &PartitionedDataset, triples: &[EncodedTriple]) -> Vec<HashSet<EncodedTriple>> {
    pd.partitions()
        .iter()
        .map(|part| {
            let mut out: HashSet<EncodedTriple> = part.triples().iter().copied().collect();
            for t1 in part.triples() {
                for t2 in triples {
                    if t2.s == t1.o {
                        out.insert(*t2);
                    }
                }
            }
            out
        })
        .collect()
}

fn contents(pd: &PartitionedDataset) -> Vec<HashSet<EncodedTriple>> {
    pd.partitions().iter().map(|p| p.triples().iter().copied().collect()).collect()
}

/// Every forward path of exactly `n` triples from each original of each partition.
fn brute_paths_hold(pd: &PartitionedDataset, triples: &[EncodedTriple], n: usize) -> bool {
    let mut by_s: HashMap<u64, Vec<EncodedTriple>> = HashMap::new();
    for t in triples {
        by_s.entry(t.s.0).or_default().push(*t);
    }
    fn walk(pd: &PartitionedDataset, by_s: &HashMap<u64, Vec<EncodedTriple>>, p: PartitionId, node: u64, left: usize) -> bool {
        if left == 0 {
            return true;
        }
        by_s.get(&node).is_none_or(|ts| ts.iter().all(|t| pd.contains(t, p) && walk(pd, by_s, p, t.o.0, left - 1)))
    }
    (0..pd.k()).all(|p| pd.partition(p).originals().all(|t| walk(pd, &by_s, p, t.o.0, n - 1)))
}

#[test]
fn one_hop_matches_pairwise_oracle_on_5k() {
    let triples = common::random_triples(42, 5000, 1500, 6);
    let mut pd = allocate_random_hash(&triples, &StrategyConfig::new(Strategy::RandomHash, 5)).unwrap();
    let expected = brute_one_hop(&pd, &triples);
    let originals = pd.original_count();
    one_hop_expand(&mut pd, &triples);
    assert_eq!(contents(&pd), expected);
    assert_eq!(pd.original_count(), originals);
    pd.validate().unwrap();
}

#[test]
fn nhop_guarantee_on_hundred_random_datasets() {
    for seed in 0..100u64 {
        let size = 200 + (seed as usize * 48) % 4800;
        let triples = common::random_triples(seed, size, (size / 3) as u64 + 10, 5);
        let k = if seed % 2 == 0 { 2 } else { 5 };
        let base = allocate_subject_hash(&triples, &StrategyConfig::new(Strategy::SubjectHash, k).with_seed(seed)).unwrap();
        for n in 1..=3 {
            let mut pd = base.clone();
            nhop_expand(&mut pd, &triples, n);
            assert!(verify_nhop(&pd, &triples, n).is_ok(), "seed {seed} n {n}");
            assert!(brute_paths_hold(&pd, &triples, n), "seed {seed} n {n}");
            assert_eq!(pd.original_count(), triples.len());
            pd.validate().unwrap();
        }
    }
}

#[test]
fn verify_agrees_with_path_oracle_before_expansion() {
    for seed in 0..20u64 {
        let triples = common::random_triples(seed, 300, 200, 3);
        let pd = allocate_random_hash(&triples, &StrategyConfig::new(Strategy::RandomHash, 3).with_seed(seed)).unwrap();
        for n in 1..=3 {
            assert_eq!(verify_nhop(&pd, &triples, n).is_ok(), brute_paths_hold(&pd, &triples, n), "seed {seed} n {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_is_monotone(seed in 0u64..10_000, n in 1usize..4) {
        let triples = common::random_triples(seed, 400, 150, 4);
        let base = allocate_random_hash(&triples, &StrategyConfig::new(Strategy::RandomHash, 4).with_seed(seed)).unwrap();
        let mut a = base.clone();
        nhop_expand(&mut a, &triples, n);
        let mut b = base.clone();
        nhop_expand(&mut b, &triples, n + 1);
        let (ca, cb, c0) = (contents(&a), contents(&b), contents(&base));
        for p in 0..4 {
            prop_assert!(c0[p].is_subset(&ca[p]));
            prop_assert!(ca[p].is_subset(&cb[p]));
        }
    }

    #[test]
    fn expansion_reaches_fixpoint(seed in 0u64..10_000) {
        let triples = common::random_triples(seed, 150, 100, 3);
        let mut pd = allocate_random_hash(&triples, &StrategyConfig::new(Strategy::RandomHash, 3).with_seed(seed)).unwrap();
        nhop_expand(&mut pd, &triples, 200);
        let before = pd.clone();
        one_hop_expand(&mut pd, &triples);
        prop_assert_eq!(pd, before);
    }
}
