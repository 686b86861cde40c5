//! Simulated cluster evaluation. A partition is the unit of placement;
//! partition-local work runs on the rayon pool and every repartitioning
//! round is a barrier with exact accounting of the rows that change
//! partition.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::graph_prep::PartitionId;
use crate::partitioner::hash::{bucket, hash_words};
use crate::partitioner::Strategy;
use crate::query::{
    classify_locality, evaluate, plan_order, JoinOrder, Locality, NamedQuery, Query, Relation, ResultSet, TripleIndex,
};
use crate::replication::PartitionedDataset;

/// Seed of the join-key hash that picks the target partition of a row.
pub const SHUFFLE_SEED: u64 = 0x5348_5546_464C_4531;

/// Bytes per bound variable in the exchange estimate.
pub const BYTES_PER_VALUE: u64 = 8;

/// Per-partition indexes over a partitioned dataset.
#[derive(Debug, Clone)]
pub struct Cluster {
    all: Vec<TripleIndex>,
    originals: Vec<TripleIndex>,
}

impl Cluster {
    pub fn new(pd: &PartitionedDataset) -> Self {
        let (all, originals) = pd
            .partitions()
            .par_iter()
            .map(|p| (TripleIndex::new(p.triples()), TripleIndex::from_vec(p.originals().collect())))
            .unzip();
        Self { all, originals }
    }

    pub fn k(&self) -> u32 {
        self.all.len() as u32
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ShuffleStats {
    pub tuples_exchanged: u64,
    pub bytes_estimated: u64,
    pub stages: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Local,
    Distributed,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub results: ResultSet,
    pub shuffle: ShuffleStats,
    /// Per-partition evaluation time; empty for distributed runs.
    pub partition_times: Vec<Duration>,
    pub elapsed: Duration,
}

/// Evaluates the query inside every partition over all its quads and
/// unions the results. Only correct when the query is local for the
/// dataset's strategy.
pub fn evaluate_local(query: &Query, cluster: &Cluster) -> Evaluation {
    let start = Instant::now();
    let parts: Vec<(ResultSet, Duration)> = cluster
        .all
        .par_iter()
        .map(|idx| {
            let t = Instant::now();
            let r = evaluate(query, idx, JoinOrder::Greedy);
            (r, t.elapsed())
        })
        .collect();
    let mut results = ResultSet::empty_for(query);
    let mut partition_times = Vec::with_capacity(parts.len());
    for (r, t) in parts {
        results.extend(r);
        partition_times.push(t);
    }
    Evaluation { results, shuffle: ShuffleStats::default(), partition_times, elapsed: start.elapsed() }
}

/// Target partition of a row keyed on `key`.
pub fn shuffle_target(key: &[u64], k: u32) -> PartitionId {
    bucket(hash_words(SHUFFLE_SEED, key), k)
}

/// Moves rows to the partition chosen by their join key, counting every
/// row that changes partition.
fn repartition(rel: Vec<Relation>, vars: &[usize], k: u32, stats: &mut ShuffleStats) -> Vec<Relation> {
    let columns = rel.first().map(|r| r.columns.clone()).unwrap_or_default();
    let width = columns.len() as u64;
    let mut out: Vec<Relation> = (0..k).map(|_| Relation { columns: columns.clone(), rows: Vec::new() }).collect();
    for (p, r) in rel.into_iter().enumerate() {
        let pos: Vec<usize> = vars.iter().map(|&v| r.position(crate::query::Column::Var(v)).expect("key")).collect();
        for row in r.rows {
            let key: Vec<u64> = pos.iter().map(|&i| row[i]).collect();
            let target = shuffle_target(&key, k);
            if target as usize != p {
                stats.tuples_exchanged += 1;
                stats.bytes_estimated += width * BYTES_PER_VALUE;
            }
            out[target as usize].rows.push(row);
        }
    }
    out
}

/// Iterative hash-join plan over original quads: match the first pattern
/// where its triples live, then for each further pattern shuffle both sides
/// on the shared variables and join per partition. Replicas are not read.
pub fn evaluate_distributed(query: &Query, cluster: &Cluster) -> Evaluation {
    let start = Instant::now();
    let k = cluster.k();
    let mut shuffle = ShuffleStats::default();
    let mut results = ResultSet::empty_for(query);
    let finish = |results, shuffle| Evaluation { results, shuffle, partition_times: Vec::new(), elapsed: start.elapsed() };

    let matches: Vec<Vec<Vec<u32>>> = cluster
        .originals
        .par_iter()
        .map(|idx| query.patterns.iter().map(|p| idx.matches(p)).collect())
        .collect();
    let counts: Vec<usize> =
        (0..query.patterns.len()).map(|i| matches.iter().map(|m| m[i].len()).sum()).collect();
    if counts.contains(&0) {
        return finish(results, shuffle);
    }
    let order = plan_order(query, JoinOrder::Greedy, &counts);
    let relation_of = |i: usize| -> Vec<Relation> {
        cluster
            .originals
            .par_iter()
            .zip(matches.par_iter())
            .map(|(idx, m)| Relation::from_matches(&query.patterns[i], idx, &m[i], None))
            .collect()
    };

    let mut acc = relation_of(order[0]);
    for &i in &order[1..] {
        let right = relation_of(i);
        let shared = acc[0].shared_vars(&right[0]);
        let (left, right) = if k > 1 {
            shuffle.stages += 1;
            (repartition(acc, &shared, k, &mut shuffle), repartition(right, &shared, k, &mut shuffle))
        } else {
            (acc, right)
        };
        acc = left.par_iter().zip(right.par_iter()).map(|(l, r)| l.join(r)).collect();
        if acc.iter().all(Relation::is_empty) {
            return finish(results, shuffle);
        }
    }
    for r in &acc {
        results.rows.extend(r.project(&query.projection));
    }
    finish(results, shuffle)
}

/// One query run, as written to reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRunReport {
    pub query: String,
    pub strategy: String,
    pub k: u32,
    pub mode: Mode,
    /// True when the run mode was imposed rather than derived from locality.
    pub forced: bool,
    pub results: usize,
    pub time_ms: f64,
    pub tuples_exchanged: u64,
    pub bytes_estimated: u64,
    pub stages: u32,
}

/// How `run_suite` picks the evaluation mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ModeChoice {
    /// Local when `classify_locality` says so, otherwise distributed.
    #[default]
    Auto,
    ForceLocal,
    ForceDistributed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub repetitions: usize,
    pub mode: ModeChoice,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { repetitions: 3, mode: ModeChoice::Auto }
    }
}

/// A partitioned dataset ready for querying, with what locality analysis
/// needs to know about how it was built.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub strategy: Strategy,
    /// Expansion hop count (see `hop_guarantee`).
    pub hops: usize,
    /// Generalized workload patterns the dataset was refined for.
    pub covered: Vec<Query>,
    pub cluster: Cluster,
}

impl Deployment {
    pub fn new(strategy: Strategy, hops: usize, covered: Vec<Query>, pd: &PartitionedDataset) -> Self {
        Self { strategy, hops, covered, cluster: Cluster::new(pd) }
    }

    pub fn locality(&self, query: &Query) -> Locality {
        classify_locality(query, self.strategy, self.hops, &self.covered)
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Runs every query on every deployment `repetitions` times and reports the
/// median time. Local runs are timed by their slowest partition.
pub fn run_suite(queries: &[NamedQuery], deployments: &[Deployment], cfg: &SuiteConfig) -> Vec<QueryRunReport> {
    let reps = cfg.repetitions.max(1);
    let mut out = Vec::with_capacity(queries.len() * deployments.len());
    for d in deployments {
        for nq in queries {
            let (mode, forced) = match cfg.mode {
                ModeChoice::Auto => match d.locality(&nq.query) {
                    Locality::Local => (Mode::Local, false),
                    Locality::Distributed => (Mode::Distributed, false),
                },
                ModeChoice::ForceLocal => (Mode::Local, d.locality(&nq.query) != Locality::Local),
                ModeChoice::ForceDistributed => (Mode::Distributed, false),
            };
            let mut times = Vec::with_capacity(reps);
            let mut last = None;
            for _ in 0..reps {
                let ev = match mode {
                    Mode::Local => evaluate_local(&nq.query, &d.cluster),
                    Mode::Distributed => evaluate_distributed(&nq.query, &d.cluster),
                };
                let t = match mode {
                    Mode::Local => ev.partition_times.iter().max().copied().unwrap_or_default(),
                    Mode::Distributed => ev.elapsed,
                };
                times.push(t.as_secs_f64() * 1e3);
                last = Some(ev);
            }
            let ev = last.expect("at least one repetition");
            out.push(QueryRunReport {
                query: nq.id.clone(),
                strategy: d.strategy.name().to_string(),
                k: d.cluster.k(),
                mode,
                forced,
                results: ev.results.len(),
                time_ms: median(times),
                tuples_exchanged: ev.shuffle.tuples_exchanged,
                bytes_estimated: ev.shuffle.bytes_estimated,
                stages: ev.shuffle.stages,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitioner::{allocate_random_hash, allocate_subject_hash, StrategyConfig};
    use crate::query::evaluate_global;
    use crate::query::{parse_query, PrefixMap};
    use crate::rdf_io::{encode, DictionaryPair, EncodedTriple, Term, TermTriple};

    fn data() -> (Vec<EncodedTriple>, DictionaryPair) {
        let mut terms = Vec::new();
        for i in 0..40 {
            let iri = |s: String| Term::iri(format!("http://x/{s}")).unwrap();
            terms.push(TermTriple::new(iri(format!("n{i}")), iri("p".into()), iri(format!("n{}", (i * 7 + 1) % 40))));
            terms.push(TermTriple::new(iri(format!("n{i}")), iri("q".into()), iri(format!("n{}", (i * 3 + 2) % 40))));
        }
        let mut d = DictionaryPair::new();
        let t = encode(terms.iter(), &mut d);
        (t, d)
    }

    fn q(text: &str, d: &DictionaryPair) -> Query {
        let mut m = PrefixMap::new();
        m.insert("x", "http://x/");
        parse_query(text, &m, d).unwrap()
    }

    #[test]
    fn distributed_matches_oracle() {
        let (t, d) = data();
        let query = q("SELECT ?a ?c WHERE { ?a x:p ?b . ?b x:q ?c . ?c x:p ?e }", &d);
        let oracle = evaluate_global(&query, &t);
        assert!(!oracle.is_empty());
        for k in [1, 3, 5] {
            let pd = allocate_random_hash(&t, &StrategyConfig::new(Strategy::RandomHash, k)).unwrap();
            let ev = evaluate_distributed(&query, &Cluster::new(&pd));
            assert_eq!(ev.results, oracle);
            if k == 1 {
                assert_eq!(ev.shuffle, ShuffleStats::default());
            } else {
                assert_eq!(ev.shuffle.stages, 2);
                assert!(ev.shuffle.tuples_exchanged > 0);
            }
        }
    }

    #[test]
    fn single_pattern_no_shuffle() {
        let (t, d) = data();
        let query = q("SELECT ?a WHERE { ?a x:p ?b }", &d);
        let pd = allocate_random_hash(&t, &StrategyConfig::new(Strategy::RandomHash, 4)).unwrap();
        let ev = evaluate_distributed(&query, &Cluster::new(&pd));
        assert_eq!(ev.shuffle, ShuffleStats::default());
        assert_eq!(ev.results, evaluate_global(&query, &t));
    }

    #[test]
    fn star_local_under_subject_hash() {
        let (t, d) = data();
        let query = q("SELECT ?a ?b ?c WHERE { ?a x:p ?b . ?a x:q ?c }", &d);
        let pd = allocate_subject_hash(&t, &StrategyConfig::new(Strategy::SubjectHash, 4)).unwrap();
        let dep = Deployment::new(Strategy::SubjectHash, 0, Vec::new(), &pd);
        assert_eq!(dep.locality(&query), Locality::Local);
        let ev = evaluate_local(&query, &dep.cluster);
        assert_eq!(ev.results, evaluate_global(&query, &t));
        assert_eq!(ev.partition_times.len(), 4);
    }

    #[test]
    fn suite_reports() {
        let (t, d) = data();
        let pd = allocate_subject_hash(&t, &StrategyConfig::new(Strategy::SubjectHash, 2)).unwrap();
        let deps = vec![Deployment::new(Strategy::SubjectHash, 0, Vec::new(), &pd)];
        assert!(run_suite(&[], &deps, &SuiteConfig::default()).is_empty());
        let queries = vec![
            NamedQuery { id: "star".into(), query: q("SELECT ?a WHERE { ?a x:p ?b . ?a x:q ?c }", &d) },
            NamedQuery { id: "chain".into(), query: q("SELECT ?a WHERE { ?a x:p ?b . ?b x:q ?c }", &d) },
        ];
        let reports = run_suite(&queries, &deps, &SuiteConfig::default());
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].mode, Mode::Local);
        assert_eq!(reports[0].tuples_exchanged, 0);
        assert_eq!(reports[1].mode, Mode::Distributed);
        let again = run_suite(&queries, &deps, &SuiteConfig::default());
        assert_eq!(reports.iter().map(|r| r.results).collect::<Vec<_>>(), again.iter().map(|r| r.results).collect::<Vec<_>>());
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
    }
}
