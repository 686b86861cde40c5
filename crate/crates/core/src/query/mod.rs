//! Conjunctive SPARQL subset: parsing, global evaluation and locality analysis.

mod ast;
mod eval;
mod locality;
mod parser;

use thiserror::Error;

pub use ast::{NamedQuery, ParsedPattern, ParsedQuery, PatternTerm, Query, Slot, TriplePattern, VarKind};
pub use eval::{
    evaluate, evaluate_global, match_pattern, plan_order, Column, JoinOrder, Relation, ResultSet, TripleIndex,
};
pub use locality::{chain_length, classify_locality, hop_guarantee, Locality};
pub use parser::{parse_query, parse_sparql, PrefixMap, RDF_NS, RDF_TYPE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported feature {feature} at byte {position}")]
    Unsupported { position: usize, feature: String },
    #[error("unknown prefix {prefix:?} at byte {position}")]
    UnknownPrefix { position: usize, prefix: String },
    #[error("bad prefix file: {0}")]
    PrefixFile(String),
    #[error("projected variable ?{0} does not occur in the pattern")]
    UnboundProjection(String),
    #[error("variable ?{0} used both as a node and as a predicate")]
    MixedVariable(String),
    #[error("query has no triple patterns")]
    EmptyPattern,
    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),
}
