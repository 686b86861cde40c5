//! N-Triples ingestion, dictionary encoding and persistence of encoded datasets.

mod dictionary;
mod ntriples;
mod persist;
mod term;

pub use dictionary::{decode, encode, DictKind, Dictionary, DictionaryPair, EncodedTriple, NodeId, PredId};
pub use ntriples::{
    maybe_gunzip, open_ntriples, parse_ntriples, parse_ntriples_str, MalformedPolicy, NTriplesParser,
};
pub use persist::{
    load_encoded, read_dictionary, read_triples, save_encoded, write_dictionary, write_triples, DATASET_FILE,
    NODES_FILE, PREDS_FILE, TRIPLES_MAGIC,
};
pub use term::{InvalidTerm, Term, TermKind, TermTriple};

#[derive(Debug, thiserror::Error)]
pub enum RdfIoError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: DictKind, id: u64 },
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
