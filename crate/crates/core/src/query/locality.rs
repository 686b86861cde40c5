//! Decides whether a query can be answered by unioning per-partition results.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::partitioner::Strategy;

use super::ast::{node_key, NodeKey, Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Locality {
    Local,
    Distributed,
}

/// Longest path, in patterns, that a strategy keeps inside the partition of
/// the path's first subject. `n` is the expansion hop count (GraphNHop's n,
/// Hybrid's optional pre-expansion; ignored otherwise).
pub fn hop_guarantee(strategy: Strategy, n: usize) -> usize {
    match strategy {
        Strategy::RandomHash => 0,
        Strategy::SubjectHash | Strategy::GraphSubject => 1,
        Strategy::GraphNHop => n.max(1),
        Strategy::Warp => 2,
        Strategy::Hybrid => n.max(1),
    }
}

/// Smallest `L` such that some subject can reach every pattern along
/// subject→object links, with every pattern at most `L - 1` links away.
/// `None` when no single subject reaches all patterns.
pub fn chain_length(query: &Query) -> Option<usize> {
    let mut roots: Vec<NodeKey<'_>> = Vec::new();
    for p in &query.patterns {
        let k = node_key(&p.s);
        if !roots.contains(&k) {
            roots.push(k);
        }
    }
    roots.into_iter().filter_map(|root| depth_from(query, root)).min()
}

fn depth_from<'a>(query: &'a Query, root: NodeKey<'a>) -> Option<usize> {
    let mut level: HashMap<NodeKey<'a>, usize> = HashMap::new();
    level.insert(root, 0);
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        let l = level[&node];
        for p in query.patterns.iter().filter(|p| node_key(&p.s) == node) {
            let o = node_key(&p.o);
            if let std::collections::hash_map::Entry::Vacant(e) = level.entry(o) {
                e.insert(l + 1);
                queue.push_back(o);
            }
        }
    }
    let mut deepest = 0;
    for p in &query.patterns {
        deepest = deepest.max(*level.get(&node_key(&p.s))?);
    }
    Some(deepest + 1)
}

/// Local when the query is a single pattern, when its chain length fits the
/// strategy's hop guarantee, or, for the workload-aware strategies, when its
/// generalization is one of the `covered` patterns. Queries with a variable
/// predicate are always Distributed.
pub fn classify_locality(query: &Query, strategy: Strategy, n: usize, covered: &[Query]) -> Locality {
    if query.has_variable_predicate() {
        return Locality::Distributed;
    }
    if query.patterns.len() == 1 {
        return Locality::Local;
    }
    if chain_length(query).is_some_and(|len| len <= hop_guarantee(strategy, n)) {
        return Locality::Local;
    }
    if strategy.uses_workload() {
        if let Ok(g) = query.generalize() {
            if covered.iter().any(|c| c.patterns == g.patterns) {
                return Locality::Local;
            }
        }
    }
    Locality::Distributed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_query, PrefixMap};
    use crate::rdf_io::DictionaryPair;

    fn q(text: &str) -> Query {
        let mut m = PrefixMap::new();
        m.insert("x", "http://x/");
        parse_query(text, &m, &DictionaryPair::new()).unwrap()
    }

    #[test]
    fn chain_lengths() {
        assert_eq!(chain_length(&q("SELECT * WHERE { ?x x:a ?y . ?x x:b ?z . ?x x:c ?w }")), Some(1));
        assert_eq!(chain_length(&q("SELECT * WHERE { ?x x:a ?y . ?y x:b ?z . ?z x:c ?w }")), Some(3));
        // written out of order; root is still ?x
        assert_eq!(chain_length(&q("SELECT * WHERE { ?y x:b ?z . ?x x:a ?y }")), Some(2));
        assert_eq!(chain_length(&q("SELECT * WHERE { ?x x:a ?y . ?z x:b ?y }")), None);
        assert_eq!(chain_length(&q("SELECT * WHERE { ?x x:a ?y . ?y x:b ?x }")), Some(2));
    }

    #[test]
    fn chain_needs_three_hops() {
        let chain = q("SELECT * WHERE { ?x x:advisor ?y . ?y x:worksFor ?z . ?z x:subOrganisation ?t }");
        assert_eq!(classify_locality(&chain, Strategy::GraphNHop, 2, &[]), Locality::Distributed);
        assert_eq!(classify_locality(&chain, Strategy::GraphNHop, 3, &[]), Locality::Local);
    }

    #[test]
    fn star_and_single() {
        let star = q("SELECT * WHERE { ?x x:a ?y . ?x x:b ?z }");
        assert_eq!(classify_locality(&star, Strategy::SubjectHash, 0, &[]), Locality::Local);
        assert_eq!(classify_locality(&star, Strategy::RandomHash, 0, &[]), Locality::Distributed);
        let single = q("SELECT * WHERE { ?x x:a ?y }");
        assert_eq!(classify_locality(&single, Strategy::RandomHash, 0, &[]), Locality::Local);
        let vp = q("SELECT * WHERE { ?x ?p ?y . ?x x:a ?z }");
        assert_eq!(classify_locality(&vp, Strategy::SubjectHash, 0, &[]), Locality::Distributed);
    }

    #[test]
    fn covered_workload_pattern() {
        let chain = q("SELECT * WHERE { ?x x:a ?y . ?y x:b ?z . ?z x:c x:k }");
        let covered = vec![chain.generalize().unwrap()];
        assert_eq!(classify_locality(&chain, Strategy::Hybrid, 0, &covered), Locality::Local);
        assert_eq!(classify_locality(&chain, Strategy::Hybrid, 0, &[]), Locality::Distributed);
        assert_eq!(classify_locality(&chain, Strategy::SubjectHash, 0, &covered), Locality::Distributed);
    }
}
