use std::fmt;

use crate::rdf_io::{DictionaryPair, NodeId, PredId, Term};

use super::QueryError;

/// A position in a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot<I> {
    /// Index into [`Query::vars`].
    Var(usize),
    Const(I),
    /// A constant missing from the dictionary; the pattern matches nothing.
    Absent(Term),
}

impl<I: Copy> Slot<I> {
    pub fn var(&self) -> Option<usize> {
        match self {
            Slot::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn constant(&self) -> Option<I> {
        match self {
            Slot::Const(c) => Some(*c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub s: Slot<NodeId>,
    pub p: Slot<PredId>,
    pub o: Slot<NodeId>,
}

impl TriplePattern {
    /// Variables in s, p, o order, repeats removed.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(3);
        for v in [self.s.var(), self.p.var(), self.o.var()].into_iter().flatten() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn is_satisfiable(&self) -> bool {
        !matches!(self.s, Slot::Absent(_)) && !matches!(self.p, Slot::Absent(_)) && !matches!(self.o, Slot::Absent(_))
    }
}

/// Which dictionary a variable's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Node,
    Predicate,
}

/// A conjunctive basic graph pattern with a projection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub vars: Vec<String>,
    pub var_kinds: Vec<VarKind>,
    pub projection: Vec<usize>,
    pub patterns: Vec<TriplePattern>,
}

impl Query {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn has_variable_predicate(&self) -> bool {
        self.patterns.iter().any(|p| p.p.var().is_some())
    }

    /// True when the patterns form one component, linked by shared
    /// variables or shared subject/object constants.
    pub fn is_connected(&self) -> bool {
        let n = self.patterns.len();
        if n <= 1 {
            return true;
        }
        let keys: Vec<Vec<NodeKey<'_>>> = self.patterns.iter().map(join_keys).collect();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && keys[i].iter().any(|k| keys[j].contains(k)) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Replaces every subject/object constant with a variable and renames
    /// variables `v0, v1, ..` in order of first appearance. Repeated
    /// constants map to the same variable, so the result matches a superset
    /// of the original query's triples. The projection covers all variables.
    pub fn generalize(&self) -> Result<Query, QueryError> {
        let mut keys: Vec<NodeKey<'_>> = Vec::new();
        let mut patterns = Vec::with_capacity(self.patterns.len());
        for p in &self.patterns {
            let pred = match &p.p {
                Slot::Var(v) => {
                    return Err(QueryError::UnsupportedPattern(format!(
                        "variable predicate ?{} cannot anchor a placement pattern",
                        self.vars[*v]
                    )))
                }
                other => other.clone(),
            };
            let s = canonical_var(&mut keys, &p.s);
            let o = canonical_var(&mut keys, &p.o);
            patterns.push(TriplePattern { s, p: pred, o });
        }
        let n = keys.len();
        Ok(Query {
            vars: (0..n).map(|i| format!("v{i}")).collect(),
            var_kinds: vec![VarKind::Node; n],
            projection: (0..n).collect(),
            patterns,
        })
    }
}

fn canonical_var<'a>(keys: &mut Vec<NodeKey<'a>>, s: &'a Slot<NodeId>) -> Slot<NodeId> {
    let k = node_key(s);
    let i = keys.iter().position(|x| *x == k).unwrap_or_else(|| {
        keys.push(k);
        keys.len() - 1
    });
    Slot::Var(i)
}

/// Identity of a subject/object slot, used to find joins and chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum NodeKey<'a> {
    Var(usize),
    Const(NodeId),
    Absent(&'a Term),
}

pub(crate) fn node_key(slot: &Slot<NodeId>) -> NodeKey<'_> {
    match slot {
        Slot::Var(v) => NodeKey::Var(*v),
        Slot::Const(c) => NodeKey::Const(*c),
        Slot::Absent(t) => NodeKey::Absent(t),
    }
}

fn join_keys(p: &TriplePattern) -> Vec<NodeKey<'_>> {
    let mut keys = vec![node_key(&p.s), node_key(&p.o)];
    if let Some(v) = p.p.var() {
        keys.push(NodeKey::Var(v));
    }
    keys
}

/// A query with an identifier, as loaded from a workload or corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedQuery {
    pub id: String,
    pub query: Query,
}

/// A term of a parsed but not yet encoded pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

/// Output of the SPARQL parser, with constants still in lexical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedQuery {
    /// `None` for `SELECT *`.
    pub projection: Option<Vec<String>>,
    pub patterns: Vec<ParsedPattern>,
}

impl ParsedQuery {
    /// Resolves constants against `dicts`. Unknown constants become
    /// [`Slot::Absent`] so the pattern simply matches nothing.
    pub fn encode(&self, dicts: &DictionaryPair) -> Result<Query, QueryError> {
        let mut vars: Vec<String> = Vec::new();
        let mut var_kinds: Vec<VarKind> = Vec::new();
        let mut var = |name: &str, kind: VarKind| -> Result<usize, QueryError> {
            if let Some(i) = vars.iter().position(|v| v == name) {
                if var_kinds[i] != kind {
                    return Err(QueryError::MixedVariable(name.to_string()));
                }
                return Ok(i);
            }
            let i = vars.len();
            vars.push(name.to_string());
            var_kinds.push(kind);
            Ok(i)
        };
        let mut patterns = Vec::with_capacity(self.patterns.len());
        for pp in &self.patterns {
            let s = match &pp.s {
                PatternTerm::Var(v) => Slot::Var(var(v, VarKind::Node)?),
                PatternTerm::Term(term) => dicts.node_id(term).map_or(Slot::Absent(term.clone()), Slot::Const),
            };
            let p = match &pp.p {
                PatternTerm::Var(v) => Slot::Var(var(v, VarKind::Predicate)?),
                PatternTerm::Term(term) => dicts.pred_id(term).map_or(Slot::Absent(term.clone()), Slot::Const),
            };
            let o = match &pp.o {
                PatternTerm::Var(v) => Slot::Var(var(v, VarKind::Node)?),
                PatternTerm::Term(term) => dicts.node_id(term).map_or(Slot::Absent(term.clone()), Slot::Const),
            };
            patterns.push(TriplePattern { s, p, o });
        }
        if patterns.is_empty() {
            return Err(QueryError::EmptyPattern);
        }
        let projection = match &self.projection {
            None => (0..vars.len()).collect(),
            Some(list) => list
                .iter()
                .map(|name| {
                    vars.iter()
                        .position(|v| v == name)
                        .ok_or_else(|| QueryError::UnboundProjection(name.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(Query { vars, var_kinds, projection, patterns })
    }
}
