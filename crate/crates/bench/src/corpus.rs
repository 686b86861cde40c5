//! The bundled query corpus.

use rdfdist::query::{parse_query, NamedQuery, PrefixMap, QueryError};
use rdfdist::rdf_io::DictionaryPair;

pub const QUERIES: &[(&str, &str)] = &[
    ("q1", include_str!("../../../queries/q1.rq")),
    ("q1-analog", include_str!("../../../queries/q1-analog.rq")),
    ("q2", include_str!("../../../queries/q2.rq")),
    ("q2-corrected", include_str!("../../../queries/q2-corrected.rq")),
    ("q3", include_str!("../../../queries/q3.rq")),
    ("q4", include_str!("../../../queries/q4.rq")),
    ("q5", include_str!("../../../queries/q5.rq")),
    ("q6", include_str!("../../../queries/q6.rq")),
];

pub const PREFIXES_TSV: &str = include_str!("../../../queries/prefixes.tsv");

/// The university workload: Q1-Q4 in the variants that match generated data.
pub const LUBM_WORKLOAD: &[&str] = &["q1-analog", "q2-corrected", "q3", "q4"];

/// The entity queries.
pub const ENTITY_QUERIES: &[&str] = &["q5", "q6"];

pub fn prefixes() -> PrefixMap {
    PrefixMap::from_tsv(PREFIXES_TSV.as_bytes()).expect("bundled prefix file parses")
}

pub fn text(id: &str) -> Option<&'static str> {
    QUERIES.iter().find(|(name, _)| *name == id).map(|(_, t)| *t)
}

/// Parses and encodes corpus queries by id.
pub fn load(ids: &[&str], dicts: &DictionaryPair) -> Result<Vec<NamedQuery>, QueryError> {
    let prefixes = prefixes();
    ids.iter()
        .map(|id| {
            let t = text(id).unwrap_or_else(|| panic!("no corpus query {id}"));
            Ok(NamedQuery { id: id.to_string(), query: parse_query(t, &prefixes, dicts)? })
        })
        .collect()
}
