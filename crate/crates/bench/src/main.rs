use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use rdfdist::engine::{evaluate_distributed, evaluate_local, Cluster, Mode, QueryRunReport};
use rdfdist::graph_prep::{read_metis_partition, to_undirected, write_metis, write_metis_partition, PartitionMap};
use rdfdist::partitioner::{multilevel_partition, Strategy, StrategyConfig};
use rdfdist::query::{classify_locality, evaluate_global, Locality};
use rdfdist::replication::{load_partitioned, nhop_expand, save_partitioned, verify_nhop, warp_generalize, warp_stages};
use rdfdist::rdf_io::{load_encoded, save_encoded, MalformedPolicy};
use rdfdist_bench::bench::{load_dataset, resolve_queries, run_benchmark};
use rdfdist_bench::config::{BenchConfig, DatasetSource};
use rdfdist_bench::generator::{generate_lubm, random_dataset, write_ntriples, GeneratorSpec};
use rdfdist_bench::metrics::{replication_rate, size_stddev};
use rdfdist_bench::pipeline::build;

#[derive(Parser, Debug)]
#[command(name = "rdfdist", version, about = "RDF partitioning and replication workbench")]
struct Cli {
    /// Number of partitions.
    #[arg(long, global = true, default_value_t = 4)]
    k: u32,
    #[arg(long, global = true, default_value = "subject-hash")]
    strategy: String,
    /// Hop guarantee for graph-nhop.
    #[arg(long = "n-hop", global = true, default_value_t = 2)]
    n_hop: usize,
    /// Expansion hops run by hybrid before refinement (0 disables).
    #[arg(long = "hybrid-prehop", global = true, default_value_t = 0)]
    hybrid_prehop: usize,
    /// Workload queries: corpus ids (q1-analog, q3, ...) or .rq paths, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    workload: Vec<String>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Partition assignment produced by an external Metis run.
    #[arg(long = "metis-partition-file", global = true)]
    metis_partition_file: Option<PathBuf>,
    #[arg(long = "out-dir", global = true, default_value = "rdfdist-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RunMode {
    Auto,
    Local,
    Distributed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic N-Triples file.
    Generate {
        #[arg(long, default_value_t = 2)]
        universities: usize,
        /// Share of triples given to one hub subject.
        #[arg(long)]
        hub_fraction: Option<f64>,
        /// Generate entity data with this many triples instead.
        #[arg(long)]
        random_triples: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Parse and dictionary-encode an N-Triples file (gzip accepted) into the out dir.
    Encode {
        input: PathBuf,
        #[arg(long)]
        skip_malformed: bool,
    },
    /// Write the subject/object graph as a Metis file.
    PrepGraph,
    /// Assign triples to partitions without replication.
    Partition,
    /// Add the strategy's replicas to a partitioned dataset.
    Replicate,
    /// Run one query file against a partitioned dataset.
    Query {
        query: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: RunMode,
        /// Print result rows.
        #[arg(long)]
        rows: bool,
    },
    /// Check storage invariants; exits non-zero on any violation.
    Verify,
    /// Run a benchmark sweep.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        universities: Option<usize>,
        #[arg(long)]
        hub_fraction: Option<f64>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        ks: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        queries: Vec<String>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
}

impl Cli {
    fn strategy_config(&self) -> Result<StrategyConfig> {
        let strategy: Strategy = self.strategy.parse()?;
        let mut cfg = StrategyConfig::new(strategy, self.k).with_seed(self.seed).with_hops(self.n_hop);
        cfg.hybrid_prehop = self.hybrid_prehop;
        cfg.validate()?;
        Ok(cfg)
    }

    fn workload(&self) -> Vec<String> {
        if self.workload.is_empty() {
            rdfdist_bench::corpus::LUBM_WORKLOAD.iter().map(|s| s.to_string()).collect()
        } else {
            self.workload.clone()
        }
    }

    fn parts_dir(&self, cfg: &StrategyConfig) -> PathBuf {
        self.out_dir.join(format!("{}-k{}", cfg.strategy.name(), cfg.k))
    }

    fn external_map(&self, vertex_count: usize, k: u32) -> Result<Option<PartitionMap>> {
        let Some(path) = &self.metis_partition_file else { return Ok(None) };
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Ok(Some(read_metis_partition(BufReader::new(f), vertex_count, k)?))
    }
}

fn graph_file(out: &Path) -> PathBuf {
    out.join("graph.metis")
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Generate { universities, hub_fraction, random_triples, output } => {
            let triples = match random_triples {
                Some(n) => random_dataset(*n, cli.seed),
                None => generate_lubm(&GeneratorSpec { universities: *universities, seed: cli.seed, hub_fraction: *hub_fraction }),
            };
            write_ntriples(BufWriter::new(File::create(output)?), &triples)?;
            info!("wrote {} triples to {}", triples.len(), output.display());
        }
        Command::Encode { input, skip_malformed } => {
            let policy = if *skip_malformed { MalformedPolicy::SkipAndCount } else { MalformedPolicy::Abort };
            let data = load_dataset(&DatasetSource::File(input.clone()), cli.seed, policy)?;
            save_encoded(&cli.out_dir, &data.triples, &data.dicts)?;
            println!(
                "triples\t{}\nnodes\t{}\npredicates\t{}\nencode_ms\t{:.1}",
                data.triples.len(),
                data.dicts.nodes.len(),
                data.dicts.predicates.len(),
                data.encode_ms
            );
        }
        Command::PrepGraph => {
            let (triples, dicts) = load_encoded(&cli.out_dir)?;
            let g = to_undirected(&triples, dicts.nodes.len());
            write_metis(&g, BufWriter::new(File::create(graph_file(&cli.out_dir))?))?;
            println!("vertices\t{}\nedges\t{}", g.vertex_count(), g.edge_count());
        }
        Command::Partition => {
            let cfg = cli.strategy_config()?;
            let (triples, dicts) = load_encoded(&cli.out_dir)?;
            let external = cli.external_map(dicts.nodes.len(), cfg.k)?;
            if cfg.strategy.uses_graph_partitioner() && external.is_none() {
                let map = multilevel_partition(&to_undirected(&triples, dicts.nodes.len()), &cfg)?;
                let path = cli.out_dir.join(format!("graph.metis.part.{}", cfg.k));
                write_metis_partition(&map, BufWriter::new(File::create(&path)?))?;
            }
            // allocation only: the replicate verb adds replicas
            let mut alloc = cfg.clone();
            alloc.strategy = match cfg.strategy {
                Strategy::GraphNHop | Strategy::Warp => Strategy::GraphSubject,
                Strategy::Hybrid => Strategy::SubjectHash,
                s => s,
            };
            let built = build(&alloc, &triples, dicts.nodes.len(), &[], external.as_ref(), 0.0)?;
            save_partitioned(&cli.parts_dir(&cfg), &built.pd)?;
            println!("partition_ms\t{:.1}\nsizes\t{:?}\nsize_stddev\t{:.2}", built.timings.partition_ms, built.pd.sizes(), size_stddev(&built.pd));
        }
        Command::Replicate => {
            let cfg = cli.strategy_config()?;
            let (triples, dicts) = load_encoded(&cli.out_dir)?;
            let dir = cli.parts_dir(&cfg);
            let mut pd = load_partitioned(&dir).with_context(|| format!("run `partition` first ({})", dir.display()))?;
            match cfg.strategy {
                Strategy::GraphNHop => nhop_expand(&mut pd, &triples, cfg.hops),
                Strategy::Warp | Strategy::Hybrid => {
                    let workload: Vec<_> = resolve_queries(&cli.workload(), &dicts)?.into_iter().map(|q| q.query).collect();
                    let hops = if cfg.strategy == Strategy::Warp { 2 } else { cfg.hybrid_prehop.max(1) };
                    let report = warp_stages(&mut pd, &triples, hops, &warp_generalize(&workload)?)?;
                    println!("expansion_replicas\t{}\nrefinement_replicas\t{}", report.expansion_replicas, report.refinement.replicas_added);
                }
                _ => {}
            }
            save_partitioned(&dir, &pd)?;
            println!("replication_rate\t{:.4}", replication_rate(&pd));
        }
        Command::Query { query, mode, rows } => {
            let cfg = cli.strategy_config()?;
            let (_, dicts) = load_encoded(&cli.out_dir)?;
            let pd = load_partitioned(&cli.parts_dir(&cfg))?;
            let q = resolve_queries(&[query.to_string_lossy().into_owned()], &dicts)?.remove(0);
            let covered = if cfg.strategy.uses_workload() {
                let w: Vec<_> = resolve_queries(&cli.workload(), &dicts)?.into_iter().map(|q| q.query).collect();
                warp_generalize(&w)?
            } else {
                Vec::new()
            };
            let hops = match cfg.strategy {
                Strategy::GraphNHop => cfg.hops,
                Strategy::Warp => 2,
                Strategy::Hybrid => cfg.hybrid_prehop,
                _ => 0,
            };
            let locality = classify_locality(&q.query, cfg.strategy, hops, &covered);
            let (mode, forced) = match mode {
                RunMode::Auto if locality == Locality::Local => (Mode::Local, false),
                RunMode::Auto | RunMode::Distributed => (Mode::Distributed, false),
                RunMode::Local => (Mode::Local, locality != Locality::Local),
            };
            let cluster = Cluster::new(&pd);
            let ev = match mode {
                Mode::Local => evaluate_local(&q.query, &cluster),
                Mode::Distributed => evaluate_distributed(&q.query, &cluster),
            };
            if *rows {
                let mut out = io::stdout().lock();
                writeln!(out, "{}", ev.results.vars.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t"))?;
                for row in &ev.results.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .zip(&q.query.projection)
                        .map(|(&id, &v)| match q.query.var_kinds[v] {
                            rdfdist::query::VarKind::Node => dicts.node(rdfdist::rdf_io::NodeId(id)).map(ToString::to_string),
                            rdfdist::query::VarKind::Predicate => {
                                dicts.predicate(rdfdist::rdf_io::PredId(id)).map(ToString::to_string)
                            }
                        })
                        .collect::<Result<_, _>>()?;
                    writeln!(out, "{}", cells.join("\t"))?;
                }
            }
            let report = QueryRunReport {
                query: q.id,
                strategy: cfg.strategy.name().into(),
                k: cfg.k,
                mode,
                forced,
                results: ev.results.len(),
                time_ms: ev.elapsed.as_secs_f64() * 1e3,
                tuples_exchanged: ev.shuffle.tuples_exchanged,
                bytes_estimated: ev.shuffle.bytes_estimated,
                stages: ev.shuffle.stages,
            };
            eprintln!("{}", serde_json::to_string(&report)?);
        }
        Command::Verify => return verify(cli),
        Command::Bench { config, universities, hub_fraction, dataset, strategies, ks, queries, repetitions } => {
            let mut cfg = match config {
                Some(p) => BenchConfig::load(p)?,
                None => BenchConfig::default(),
            };
            cfg.seed = cli.seed;
            cfg.n_hop = cli.n_hop;
            cfg.hybrid_prehop = cli.hybrid_prehop;
            cfg.out_dir = cli.out_dir.clone();
            if !cli.workload.is_empty() {
                cfg.workload = cli.workload.clone();
            }
            if let Some(u) = universities {
                cfg.set("universities", &u.to_string())?;
            }
            if let Some(h) = hub_fraction {
                cfg.set("hub_fraction", &h.to_string())?;
            }
            if let Some(d) = dataset {
                cfg.dataset = DatasetSource::File(d.clone());
            }
            if !strategies.is_empty() {
                cfg.set("strategies", &strategies.join(","))?;
            }
            if !ks.is_empty() {
                cfg.ks = ks.clone();
            }
            if !queries.is_empty() {
                cfg.queries = queries.clone();
            }
            if let Some(r) = repetitions {
                cfg.repetitions = *r;
            }
            let external = match (&cli.metis_partition_file, cfg.ks.as_slice()) {
                (None, _) => None,
                (Some(_), [k]) => {
                    let data = load_dataset(&cfg.dataset, cfg.seed, MalformedPolicy::Abort)?;
                    cli.external_map(data.node_count(), *k)?
                }
                (Some(_), _) => bail!("--metis-partition-file needs exactly one k"),
            };
            let reports = run_benchmark(&cfg, external.as_ref())?;
            for r in &reports {
                println!(
                    "{}\tk={}\tprep_ms={:.1}\tstddev={:.1}\treplication={:.4}",
                    r.strategy,
                    r.k,
                    r.prep.total_ms(),
                    r.size_stddev,
                    r.replication_rate
                );
            }
            println!("reports written to {}", cfg.out_dir.display());
        }
    }
    Ok(true)
}

/// Storage invariants, the n-hop guarantee where the strategy promises one,
/// and local-versus-oracle agreement for workload queries.
fn verify(cli: &Cli) -> Result<bool> {
    let cfg = cli.strategy_config()?;
    let (triples, dicts) = load_encoded(&cli.out_dir)?;
    let pd = load_partitioned(&cli.parts_dir(&cfg))?;
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{}\t{name}\t{detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };
    match pd.validate() {
        Ok(()) => check("provenance", true, String::new()),
        Err(e) => check("provenance", false, e),
    }
    let mut distinct = triples.clone();
    distinct.sort_unstable();
    distinct.dedup();
    check("original-count", pd.original_count() == distinct.len(), format!("{} / {}", pd.original_count(), distinct.len()));
    let hops = match cfg.strategy {
        Strategy::GraphNHop => cfg.hops,
        Strategy::Warp => 2,
        Strategy::Hybrid => cfg.hybrid_prehop,
        _ => 1,
    };
    if hops > 1 {
        match verify_nhop(&pd, &triples, hops) {
            Ok(()) => check("n-hop", true, format!("n={hops}")),
            Err(v) => check("n-hop", false, format!("partition {} path {:?}", v.partition, v.path)),
        }
    }
    if cfg.strategy.uses_workload() {
        let cluster = Cluster::new(&pd);
        for q in resolve_queries(&cli.workload(), &dicts)? {
            let local = evaluate_local(&q.query, &cluster).results;
            let oracle = evaluate_global(&q.query, &triples);
            check(&format!("local:{}", q.id), local == oracle, format!("{} rows", oracle.len()));
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = fs::create_dir_all(&cli.out_dir) {
        eprintln!("error: cannot create {}: {e}", cli.out_dir.display());
        return ExitCode::FAILURE;
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
