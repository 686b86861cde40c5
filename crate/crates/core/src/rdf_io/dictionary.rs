use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{Term, TermTriple};
use super::RdfIoError;

/// Dense id of a subject/object term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u64);

/// Dense id of a predicate term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for PredId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// Integer-encoded triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncodedTriple {
    pub s: NodeId,
    pub p: PredId,
    pub o: NodeId,
}

impl EncodedTriple {
    pub const fn new(s: u64, p: u64, o: u64) -> Self {
        Self { s: NodeId(s), p: PredId(p), o: NodeId(o) }
    }
}

impl fmt::Display for EncodedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.s.0, self.p.0, self.o.0)
    }
}

/// Which of the two dictionaries an id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictKind {
    Nodes,
    Predicates,
}

impl fmt::Display for DictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DictKind::Nodes => "node",
            DictKind::Predicates => "predicate",
        })
    }
}

/// Bidirectional term ↔ dense id map. Ids are assigned in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    terms: Vec<Term>,
    ids: HashMap<Term, u64>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_insert(&mut self, term: &Term) -> u64 {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as u64;
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    pub fn id_of(&self, term: &Term) -> Option<u64> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: u64) -> Option<&Term> {
        usize::try_from(id).ok().and_then(|i| self.terms.get(i))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in id order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &Term)> {
        self.terms.iter().enumerate().map(|(i, t)| (i as u64, t))
    }

    pub(crate) fn from_terms(terms: Vec<Term>) -> Result<Self, Term> {
        let mut ids = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if ids.insert(t.clone(), i as u64).is_some() {
                return Err(t.clone());
            }
        }
        Ok(Self { terms, ids })
    }
}

/// One dictionary for subjects/objects, another for predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DictionaryPair {
    pub nodes: Dictionary,
    pub predicates: Dictionary,
}

impl DictionaryPair {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn encode_triple(&mut self, t: &TermTriple) -> EncodedTriple {
        let s = self.nodes.get_or_insert(&t.subject);
        let p = self.predicates.get_or_insert(&t.predicate);
        let o = self.nodes.get_or_insert(&t.object);
        EncodedTriple::new(s, p, o)
    }

    pub fn node_id(&self, term: &Term) -> Option<NodeId> {
        self.nodes.id_of(term).map(NodeId)
    }

    pub fn pred_id(&self, term: &Term) -> Option<PredId> {
        self.predicates.id_of(term).map(PredId)
    }

    pub fn node(&self, id: NodeId) -> Result<&Term, RdfIoError> {
        self.nodes.term(id.0).ok_or(RdfIoError::UnknownId { kind: DictKind::Nodes, id: id.0 })
    }

    pub fn predicate(&self, id: PredId) -> Result<&Term, RdfIoError> {
        self.predicates
            .term(id.0)
            .ok_or(RdfIoError::UnknownId { kind: DictKind::Predicates, id: id.0 })
    }

    pub fn decode_triple(&self, t: &EncodedTriple) -> Result<TermTriple, RdfIoError> {
        Ok(TermTriple::new(self.node(t.s)?.clone(), self.predicate(t.p)?.clone(), self.node(t.o)?.clone()))
    }
}

/// Encodes `triples`, extending `dicts` with any unseen terms.
pub fn encode<'a, I>(triples: I, dicts: &mut DictionaryPair) -> Vec<EncodedTriple>
where
    I: IntoIterator<Item = &'a TermTriple>,
{
    triples.into_iter().map(|t| dicts.encode_triple(t)).collect()
}

pub fn decode(triples: &[EncodedTriple], dicts: &DictionaryPair) -> Result<Vec<TermTriple>, RdfIoError> {
    triples.iter().map(|t| dicts.decode_triple(t)).collect()
}
