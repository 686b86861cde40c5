mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdfdist::query::{evaluate, evaluate_global, JoinOrder, Query, Slot, TripleIndex, TriplePattern};
use rdfdist::rdf_io::NodeId;

/// Random BGP of 1..=4 patterns over at most 4 variables and a few constants.
fn random_query(rng: &mut ChaCha8Rng, nodes: u64, preds: u64) -> Query {
    let np = rng.gen_range(1..=4);
    let slot = |rng: &mut ChaCha8Rng| -> Slot<NodeId> {
        if rng.gen_bool(0.8) {
            Slot::Var(rng.gen_range(0..4))
        } else {
            Slot::Const(NodeId(rng.gen_range(0..nodes)))
        }
    };
    let mut patterns: Vec<TriplePattern> = Vec::new();
    for _ in 0..np {
        let s = slot(rng);
        let o = slot(rng);
        patterns.push(common::pat(s, rng.gen_range(0..preds), o));
    }
    // renumber variables densely in order of appearance
    let mut used: Vec<usize> = Vec::new();
    for p in &mut patterns {
        for s in [&mut p.s, &mut p.o] {
            if let Slot::Var(v) = s {
                let i = used.iter().position(|u| u == v).unwrap_or_else(|| {
                    used.push(*v);
                    used.len() - 1
                });
                *v = i;
            }
        }
    }
    let n = used.len();
    common::query(n, (0..n).collect(), patterns)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn global_matches_nested_loop(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let triples = common::random_triples(seed, rng.gen_range(0..60), 12, 3);
        let q = random_query(&mut rng, 12, 3);
        let naive = common::naive_eval(&q, &triples);
        prop_assert_eq!(&evaluate_global(&q, &triples).rows, &naive);
        prop_assert_eq!(&evaluate(&q, &TripleIndex::new(&triples), JoinOrder::Greedy).rows, &naive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pattern_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let triples = common::random_triples(seed, 80, 15, 3);
        let q = random_query(&mut rng, 15, 3);
        let mut shuffled = q.clone();
        shuffled.patterns.shuffle(&mut rng);
        prop_assert_eq!(evaluate_global(&q, &triples), evaluate_global(&shuffled, &triples));
    }
}

#[test]
fn projection_drops_duplicates() {
    use common::{pat, query, var};
    let triples = common::random_triples(3, 200, 20, 2);
    let q = query(2, vec![0], vec![pat(var(0), 0, var(1))]);
    let r = evaluate_global(&q, &triples);
    let subjects: std::collections::BTreeSet<u64> = triples.iter().filter(|t| t.p.0 == 0).map(|t| t.s.0).collect();
    assert_eq!(r.rows.into_iter().map(|v| v[0]).collect::<std::collections::BTreeSet<_>>(), subjects);
}
