#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdfdist::query::{Query, Slot, TriplePattern, VarKind};
use rdfdist::rdf_io::{EncodedTriple, NodeId, PredId};

/// `n` random triples over `nodes` nodes and `preds` predicates, duplicates removed.
pub fn random_triples(seed: u64, n: usize, nodes: u64, preds: u64) -> Vec<EncodedTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let t = EncodedTriple::new(rng.gen_range(0..nodes), rng.gen_range(0..preds), rng.gen_range(0..nodes));
        if seen.insert(t) {
            out.push(t);
        }
    }
    out
}

pub fn node_count(triples: &[EncodedTriple]) -> usize {
    triples.iter().map(|t| t.s.0.max(t.o.0) + 1).max().unwrap_or(0) as usize
}

pub fn var(i: usize) -> Slot<NodeId> {
    Slot::Var(i)
}

pub fn pat(s: Slot<NodeId>, p: u64, o: Slot<NodeId>) -> TriplePattern {
    TriplePattern { s, p: Slot::Const(PredId(p)), o }
}

pub fn query(nvars: usize, projection: Vec<usize>, patterns: Vec<TriplePattern>) -> Query {
    Query {
        vars: (0..nvars).map(|i| format!("v{i}")).collect(),
        var_kinds: vec![VarKind::Node; nvars],
        projection,
        patterns,
    }
}

fn bind_node(slot: &Slot<NodeId>, value: u64, env: &mut HashMap<usize, u64>, undo: &mut Vec<usize>) -> bool {
    match slot {
        Slot::Const(c) => c.0 == value,
        Slot::Absent(_) => false,
        Slot::Var(v) => match env.get(v) {
            Some(&x) => x == value,
            None => {
                env.insert(*v, value);
                undo.push(*v);
                true
            }
        },
    }
}

fn bind_pred(slot: &Slot<PredId>, value: u64, env: &mut HashMap<usize, u64>, undo: &mut Vec<usize>) -> bool {
    match slot {
        Slot::Const(c) => c.0 == value,
        Slot::Absent(_) => false,
        Slot::Var(v) => match env.get(v) {
            Some(&x) => x == value,
            None => {
                env.insert(*v, value);
                undo.push(*v);
                true
            }
        },
    }
}

/// Nested-loop evaluation: try every triple for every pattern in turn.
pub fn naive_eval(q: &Query, triples: &[EncodedTriple]) -> BTreeSet<Vec<u64>> {
    fn go(q: &Query, triples: &[EncodedTriple], i: usize, env: &mut HashMap<usize, u64>, out: &mut BTreeSet<Vec<u64>>) {
        if i == q.patterns.len() {
            out.insert(q.projection.iter().map(|v| env[v]).collect());
            return;
        }
        let p = &q.patterns[i];
        for t in triples {
            let mut undo = Vec::new();
            if bind_node(&p.s, t.s.0, env, &mut undo)
                && bind_pred(&p.p, t.p.0, env, &mut undo)
                && bind_node(&p.o, t.o.0, env, &mut undo)
            {
                go(q, triples, i + 1, env, out);
            }
            for v in undo {
                env.remove(&v);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(q, triples, 0, &mut HashMap::new(), &mut out);
    out
}
