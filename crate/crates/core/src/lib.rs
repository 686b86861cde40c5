//! Partitioning, replication and simulated distributed querying of RDF datasets.
//!
//! The pipeline runs N-Triples through dictionary encoding ([`rdf_io`]),
//! builds a subject/object graph ([`graph_prep`]), assigns triples to
//! partitions ([`partitioner`]), adds replicas ([`replication`]) and answers
//! conjunctive queries ([`query`], [`engine`]).

pub mod engine;
pub mod graph_prep;
pub mod partitioner;
pub mod query;
pub mod replication;
pub mod rdf_io;
