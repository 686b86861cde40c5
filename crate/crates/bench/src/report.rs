//! Report rows and their CSV, JSON and TSV renderings.
//!
//! `prep.csv`: strategy, k, triples, encode_ms, graph_prep_ms, partition_ms,
//! replicate_ms, total_prep_ms, size_stddev, replication_rate,
//! expansion_replicas, refinement_replicas, partition_sizes (`;`-joined).
//!
//! `queries.csv`: strategy, k, query, mode, forced, results,
//! tuples_exchanged, bytes_estimated, stages, time_ms.
//!
//! `report.json` holds the full [`MetricsReport`] list. The `*.tsv` files
//! are whitespace-separated tables for plotting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Result;
use rdfdist::engine::QueryRunReport;
use serde::Serialize;

use crate::pipeline::PrepTimings;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub strategy: String,
    pub k: u32,
    pub triples: usize,
    pub prep: PrepTimings,
    pub partition_sizes: Vec<usize>,
    pub size_stddev: f64,
    pub replication_rate: f64,
    pub expansion_replicas: usize,
    pub refinement_replicas: usize,
    pub queries: Vec<QueryRunReport>,
}

#[derive(Serialize)]
struct PrepRow<'a> {
    strategy: &'a str,
    k: u32,
    triples: usize,
    encode_ms: f64,
    graph_prep_ms: f64,
    partition_ms: f64,
    replicate_ms: f64,
    total_prep_ms: f64,
    size_stddev: f64,
    replication_rate: f64,
    expansion_replicas: usize,
    refinement_replicas: usize,
    partition_sizes: String,
}

pub fn write_prep_csv<W: Write>(w: W, reports: &[MetricsReport]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in reports {
        csv.serialize(PrepRow {
            strategy: &r.strategy,
            k: r.k,
            triples: r.triples,
            encode_ms: r.prep.encode_ms,
            graph_prep_ms: r.prep.graph_prep_ms,
            partition_ms: r.prep.partition_ms,
            replicate_ms: r.prep.replicate_ms,
            total_prep_ms: r.prep.total_ms(),
            size_stddev: r.size_stddev,
            replication_rate: r.replication_rate,
            expansion_replicas: r.expansion_replicas,
            refinement_replicas: r.refinement_replicas,
            partition_sizes: r.partition_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
        })?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_queries_csv<W: Write>(w: W, reports: &[MetricsReport]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "strategy",
        "k",
        "query",
        "mode",
        "forced",
        "results",
        "tuples_exchanged",
        "bytes_estimated",
        "stages",
        "time_ms",
    ])?;
    for q in reports.iter().flat_map(|r| &r.queries) {
        csv.write_record([
            q.strategy.clone(),
            q.k.to_string(),
            q.query.clone(),
            match q.mode {
                rdfdist::engine::Mode::Local => "local".into(),
                rdfdist::engine::Mode::Distributed => "distributed".into(),
            },
            q.forced.to_string(),
            q.results.to_string(),
            q.tuples_exchanged.to_string(),
            q.bytes_estimated.to_string(),
            q.stages.to_string(),
            format!("{:.3}", q.time_ms),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Plot tables: one row per (strategy, k).
pub fn write_tsv<W: Write>(mut w: W, reports: &[MetricsReport]) -> Result<()> {
    writeln!(w, "# strategy\tk\ttotal_prep_ms\tsize_stddev\treplication_rate\tmax_query_ms")?;
    for r in reports {
        let max_q = r.queries.iter().map(|q| q.time_ms).fold(0.0, f64::max);
        writeln!(
            w,
            "{}\t{}\t{:.3}\t{:.3}\t{:.4}\t{:.3}",
            r.strategy,
            r.k,
            r.prep.total_ms(),
            r.size_stddev,
            r.replication_rate,
            max_q
        )?;
    }
    Ok(())
}

/// Writes every report file into `dir`.
pub fn write_all(dir: &Path, reports: &[MetricsReport]) -> Result<()> {
    write_prep_csv(BufWriter::new(File::create(dir.join("prep.csv"))?), reports)?;
    write_queries_csv(BufWriter::new(File::create(dir.join("queries.csv"))?), reports)?;
    write_tsv(BufWriter::new(File::create(dir.join("summary.tsv"))?), reports)?;
    let mut json = BufWriter::new(File::create(dir.join("report.json"))?);
    serde_json::to_writer_pretty(&mut json, reports)?;
    json.flush()?;
    Ok(())
}
