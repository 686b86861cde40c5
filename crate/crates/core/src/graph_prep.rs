//! Conversion of encoded triples into the unlabeled undirected graph a graph
//! partitioner consumes, plus Metis graph/partition file interop.
//!
//! Graph file: header `n m`, then one line per vertex `v` (1-based) listing
//! the 1-based ids of its neighbours separated by single spaces. Isolated
//! vertices get an empty line. Partition file: one 0-based partition id per
//! line, line `i` holding the partition of vertex `i - 1`.

use std::io::{self, BufRead, Write};

use crate::rdf_io::EncodedTriple;

/// Index of a partition, `0..k`.
pub type PartitionId = u32;

/// Symmetric adjacency lists without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UndirectedGraph {
    adj: Vec<Vec<u32>>,
    edges: usize,
}

impl UndirectedGraph {
    /// Builds a graph over vertices `0..n` from an edge list; duplicates and
    /// self-loops are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a == b {
                continue;
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let mut total = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            total += list.len();
        }
        Self { adj, edges: total / 2 }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Number of edges whose endpoints lie in different partitions.
    pub fn edge_cut(&self, parts: &[PartitionId]) -> usize {
        let mut cut = 0;
        for (v, list) in self.adj.iter().enumerate() {
            for &u in list {
                if (u as usize) > v && parts[v] != parts[u as usize] {
                    cut += 1;
                }
            }
        }
        cut
    }
}

/// Drops predicates and merges each `(s, o)` with its reverse.
///
/// `node_count` is the size of the node dictionary; the vertex set is
/// `0..max(node_count, largest id + 1)`.
pub fn to_undirected(triples: &[EncodedTriple], node_count: usize) -> UndirectedGraph {
    let n = triples
        .iter()
        .map(|t| t.s.0.max(t.o.0) as usize + 1)
        .max()
        .unwrap_or(0)
        .max(node_count);
    assert!(n <= u32::MAX as usize, "graph too large for 32-bit vertex ids");
    UndirectedGraph::from_edges(n, triples.iter().map(|t| (t.s.0 as u32, t.o.0 as u32)))
}

/// Assignment of every graph vertex to one of `k` partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMap {
    parts: Vec<PartitionId>,
    k: u32,
}

impl PartitionMap {
    pub fn new(parts: Vec<PartitionId>, k: u32) -> Result<Self, MetisError> {
        if let Some((v, &p)) = parts.iter().enumerate().find(|(_, &p)| p >= k) {
            return Err(MetisError::PartitionOutOfRange { line: v + 1, id: p as u64, k });
        }
        Ok(Self { parts, k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn get(&self, vertex: u64) -> Option<PartitionId> {
        usize::try_from(vertex).ok().and_then(|v| self.parts.get(v)).copied()
    }

    pub fn as_slice(&self) -> &[PartitionId] {
        &self.parts
    }

    /// Vertex count per partition.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k as usize];
        for &p in &self.parts {
            sizes[p as usize] += 1;
        }
        sizes
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MetisError {
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("expected {expected} lines, found {found}")]
    LineCountMismatch { expected: usize, found: usize },
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("line {line}: partition id {id} out of range for k={k}")]
    PartitionOutOfRange { line: usize, id: u64, k: u32 },
    #[error("header declares {declared} edges but adjacency lists hold {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_metis<W: Write>(graph: &UndirectedGraph, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {}", graph.vertex_count(), graph.edge_count())?;
    let mut line = String::new();
    for v in 0..graph.vertex_count() {
        line.clear();
        for (i, &u) in graph.neighbors(v).iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&(u + 1).to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

/// Reads a plain (unweighted) Metis graph file.
pub fn read_metis_graph<R: BufRead>(r: R) -> Result<UndirectedGraph, MetisError> {
    let mut lines = r.lines();
    let header = loop {
        match lines.next() {
            None => return Err(MetisError::BadHeader("empty file".into())),
            Some(l) => {
                let l = l?;
                if !l.trim_start().starts_with('%') {
                    break l;
                }
            }
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(MetisError::BadHeader(format!("expected `n m`, got {header:?}")));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| MetisError::BadHeader(header.clone()));
    let n = parse(fields[0])?;
    let m = parse(fields[1])?;
    let mut adj: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (i, l) in lines.enumerate() {
        let l = l?;
        if l.trim_start().starts_with('%') {
            continue;
        }
        if adj.len() == n {
            if l.trim().is_empty() {
                continue;
            }
            return Err(MetisError::LineCountMismatch { expected: n, found: n + 1 });
        }
        let mut list = Vec::new();
        for tok in l.split_whitespace() {
            let u: usize = tok
                .parse()
                .map_err(|_| MetisError::BadLine { line: i + 2, reason: format!("bad vertex id {tok:?}") })?;
            if u == 0 || u > n {
                return Err(MetisError::BadLine { line: i + 2, reason: format!("vertex {u} out of range") });
            }
            list.push((u - 1) as u32);
        }
        adj.push(list);
    }
    if adj.len() != n {
        return Err(MetisError::LineCountMismatch { expected: n, found: adj.len() });
    }
    let mentions: usize = adj.iter().map(Vec::len).sum();
    if mentions != 2 * m {
        return Err(MetisError::EdgeCountMismatch { declared: m, found: mentions / 2 });
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(v, list)| list.iter().map(move |&u| (v as u32, u)))
        .collect::<Vec<_>>();
    let g = UndirectedGraph::from_edges(n, edges);
    if g.edge_count() != m {
        return Err(MetisError::EdgeCountMismatch { declared: m, found: g.edge_count() });
    }
    Ok(g)
}

/// Reads a Metis partition output file for a graph with `vertex_count` vertices.
pub fn read_metis_partition<R: BufRead>(r: R, vertex_count: usize, k: u32) -> Result<PartitionMap, MetisError> {
    let mut parts = Vec::with_capacity(vertex_count);
    for (i, l) in r.lines().enumerate() {
        let l = l?;
        let tok = l.trim();
        if tok.is_empty() {
            continue;
        }
        let id: u64 = tok
            .parse()
            .map_err(|_| MetisError::BadLine { line: i + 1, reason: format!("bad partition id {tok:?}") })?;
        if id >= k as u64 {
            return Err(MetisError::PartitionOutOfRange { line: i + 1, id, k });
        }
        parts.push(id as PartitionId);
    }
    if parts.len() != vertex_count {
        return Err(MetisError::LineCountMismatch { expected: vertex_count, found: parts.len() });
    }
    Ok(PartitionMap { parts, k })
}

pub fn write_metis_partition<W: Write>(map: &PartitionMap, mut w: W) -> io::Result<()> {
    for p in &map.parts {
        writeln!(w, "{p}")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: u64, p: u64, o: u64) -> EncodedTriple {
        EncodedTriple::new(s, p, o)
    }

    #[test]
    fn reversed_pair_dedups() {
        let g = to_undirected(&[t(0, 0, 1), t(1, 1, 0)], 2);
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn self_loop_dropped() {
        let g = to_undirected(&[t(0, 0, 0)], 1);
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        assert!(g.neighbors(0).is_empty());
    }

    #[test]
    fn chain_is_path() {
        let g = to_undirected(&[t(0, 0, 1), t(1, 0, 2), t(2, 0, 3)], 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn metis_path_file() {
        let g = to_undirected(&[t(0, 0, 1), t(1, 0, 2)], 3);
        let mut buf = Vec::new();
        write_metis(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 2\n2\n1 3\n2\n");
        assert_eq!(read_metis_graph(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn isolated_vertex_keeps_empty_line() {
        let g = to_undirected(&[t(0, 0, 0), t(1, 0, 2)], 3);
        let mut buf = Vec::new();
        write_metis(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "3 1\n\n3\n2\n");
    }

    #[test]
    fn partition_file() {
        let map = read_metis_partition("0\n1\n0\n".as_bytes(), 3, 2).unwrap();
        assert_eq!(map.as_slice(), &[0, 1, 0]);
        assert_eq!(map.get(1), Some(1));
        let mut buf = Vec::new();
        write_metis_partition(&map, &mut buf).unwrap();
        assert_eq!(buf, b"0\n1\n0\n");
    }

    #[test]
    fn partition_file_errors() {
        let err = read_metis_partition("0\n1\n".as_bytes(), 3, 2).unwrap_err();
        assert!(matches!(err, MetisError::LineCountMismatch { expected: 3, found: 2 }));
        let err = read_metis_partition("0\n2\n0\n".as_bytes(), 3, 2).unwrap_err();
        assert!(matches!(err, MetisError::PartitionOutOfRange { line: 2, id: 2, k: 2 }));
    }

    #[test]
    fn graph_reader_rejects_bad_counts() {
        assert!(matches!(
            read_metis_graph("3 2\n2\n1 3\n".as_bytes()),
            Err(MetisError::LineCountMismatch { expected: 3, found: 2 })
        ));
        assert!(matches!(
            read_metis_graph("3 3\n2\n1 3\n2\n".as_bytes()),
            Err(MetisError::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn edge_cut_counts_crossing_edges() {
        let g = to_undirected(&[t(0, 0, 1), t(1, 0, 2), t(2, 0, 3)], 4);
        assert_eq!(g.edge_cut(&[0, 0, 1, 1]), 1);
        assert_eq!(g.edge_cut(&[0, 1, 0, 1]), 3);
    }
}
