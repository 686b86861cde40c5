//! End-to-end benchmark runs.

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use log::info;
use rdfdist::engine::{run_suite, SuiteConfig};
use rdfdist::graph_prep::PartitionMap;
use rdfdist::partitioner::StrategyConfig;
use rdfdist::query::{parse_query, NamedQuery};
use rdfdist::rdf_io::{encode, open_ntriples, DictionaryPair, EncodedTriple, MalformedPolicy, NTriplesParser, TermTriple};

use crate::config::{BenchConfig, DatasetSource, OutDirLock};
use crate::generator::{generate_lubm, random_dataset, GeneratorSpec};
use crate::metrics::{replication_rate, size_stddev};
use crate::pipeline::build;
use crate::report::{write_all, MetricsReport};
use crate::corpus;

/// An encoded dataset and the time spent encoding it.
pub struct Dataset {
    pub triples: Vec<EncodedTriple>,
    pub dicts: DictionaryPair,
    pub encode_ms: f64,
}

impl Dataset {
    pub fn node_count(&self) -> usize {
        self.dicts.nodes.len()
    }

    pub fn from_terms(terms: &[TermTriple]) -> Self {
        let t = Instant::now();
        let mut dicts = DictionaryPair::new();
        let triples = encode(terms.iter(), &mut dicts);
        Self { triples, dicts, encode_ms: t.elapsed().as_secs_f64() * 1e3 }
    }
}

pub fn load_dataset(source: &DatasetSource, seed: u64, policy: MalformedPolicy) -> Result<Dataset> {
    match source {
        DatasetSource::Generated { universities, hub_fraction } => {
            let spec = GeneratorSpec { universities: *universities, seed, hub_fraction: *hub_fraction };
            Ok(Dataset::from_terms(&generate_lubm(&spec)))
        }
        DatasetSource::Entities { triples } => Ok(Dataset::from_terms(&random_dataset(*triples, seed))),
        DatasetSource::File(path) => {
            let t = Instant::now();
            let reader = open_ntriples(path).with_context(|| format!("opening {}", path.display()))?;
            let mut parser = NTriplesParser::with_policy(reader, policy);
            let mut dicts = DictionaryPair::new();
            let mut triples = Vec::new();
            for t in parser.by_ref() {
                triples.push(dicts.encode_triple(&t?));
            }
            if parser.skipped() > 0 {
                log::warn!("skipped {} malformed lines", parser.skipped());
            }
            Ok(Dataset { triples, dicts, encode_ms: t.elapsed().as_secs_f64() * 1e3 })
        }
    }
}

/// Resolves query ids against the corpus, falling back to `.rq` file paths.
pub fn resolve_queries(ids: &[String], dicts: &DictionaryPair) -> Result<Vec<NamedQuery>> {
    let prefixes = corpus::prefixes();
    ids.iter()
        .map(|id| {
            let (name, text) = match corpus::text(id) {
                Some(t) => (id.clone(), t.to_string()),
                None => {
                    let path = Path::new(id);
                    let name = path.file_stem().map_or_else(|| id.clone(), |s| s.to_string_lossy().into_owned());
                    (name, std::fs::read_to_string(path).with_context(|| format!("reading query {id}"))?)
                }
            };
            let query = parse_query(&text, &prefixes, dicts).with_context(|| format!("query {name}"))?;
            Ok(NamedQuery { id: name, query })
        })
        .collect()
}

/// Runs every (strategy, k) pair on one dataset. Reports are rewritten
/// after each pair, so a failure leaves the finished ones on disk.
pub fn run_benchmark(cfg: &BenchConfig, external: Option<&PartitionMap>) -> Result<Vec<MetricsReport>> {
    cfg.validate()?;
    let _lock = OutDirLock::acquire(&cfg.out_dir)?;
    let data = load_dataset(&cfg.dataset, cfg.seed, MalformedPolicy::Abort)?;
    info!("dataset: {} triples, {} nodes", data.triples.len(), data.node_count());
    let workload: Vec<_> = resolve_queries(&cfg.workload, &data.dicts)?.into_iter().map(|q| q.query).collect();
    let queries = resolve_queries(cfg.query_ids(), &data.dicts)?;
    let suite = SuiteConfig { repetitions: cfg.repetitions, ..SuiteConfig::default() };

    let mut reports = Vec::new();
    for &k in &cfg.ks {
        for &strategy in &cfg.strategies {
            let mut sc = StrategyConfig::new(strategy, k).with_seed(cfg.seed).with_hops(cfg.n_hop);
            sc.hybrid_prehop = cfg.hybrid_prehop;
            let built = build(&sc, &data.triples, data.node_count(), &workload, external, data.encode_ms)?;
            let runs = run_suite(&queries, &[built.deployment()], &suite);
            info!("{strategy} k={k}: prep {:.1} ms, replication {:.3}", built.timings.total_ms(), replication_rate(&built.pd));
            reports.push(MetricsReport {
                strategy: strategy.name().to_string(),
                k,
                triples: built.pd.original_count(),
                prep: built.timings,
                partition_sizes: built.pd.sizes(),
                size_stddev: size_stddev(&built.pd),
                replication_rate: replication_rate(&built.pd),
                expansion_replicas: built.expansion_replicas,
                refinement_replicas: built.refinement_replicas,
                queries: runs,
            });
            write_all(&cfg.out_dir, &reports)?;
        }
    }
    Ok(reports)
}
