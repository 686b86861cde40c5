use std::fmt;

/// The three disjoint kinds of RDF terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Iri,
    BlankNode,
    Literal,
}

/// An RDF term in lexical form.
///
/// For IRIs `lexical` is the IRI without angle brackets, for blank nodes the
/// label without the `_:` prefix. Literals keep the whole N-Triples token
/// (quotes, escapes and any `@lang` / `^^<datatype>` suffix) verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    lexical: String,
    kind: TermKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidTerm {
    #[error("IRI must be non-empty and contain no whitespace: {0:?}")]
    Iri(String),
    #[error("blank node label must be non-empty and contain no whitespace: {0:?}")]
    BlankNode(String),
    #[error("literal token must start with a quote and span a single line: {0:?}")]
    Literal(String),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Result<Self, InvalidTerm> {
        let lexical = iri.into();
        if lexical.is_empty() || lexical.chars().any(char::is_whitespace) {
            return Err(InvalidTerm::Iri(lexical));
        }
        Ok(Self { lexical, kind: TermKind::Iri })
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, InvalidTerm> {
        let lexical = label.into();
        if lexical.is_empty() || lexical.chars().any(char::is_whitespace) {
            return Err(InvalidTerm::BlankNode(lexical));
        }
        Ok(Self { lexical, kind: TermKind::BlankNode })
    }

    /// Wraps an already-tokenized literal such as `"42"^^<xsd:int>`.
    pub fn literal_token(token: impl Into<String>) -> Result<Self, InvalidTerm> {
        let lexical = token.into();
        if !lexical.starts_with('"') || lexical.contains(['\n', '\r']) {
            return Err(InvalidTerm::Literal(lexical));
        }
        Ok(Self { lexical, kind: TermKind::Literal })
    }

    /// Builds a plain string literal, escaping the value as N-Triples requires.
    pub fn plain_literal(value: &str) -> Self {
        let mut token = String::with_capacity(value.len() + 2);
        token.push('"');
        for c in value.chars() {
            match c {
                '"' => token.push_str("\\\""),
                '\\' => token.push_str("\\\\"),
                '\n' => token.push_str("\\n"),
                '\r' => token.push_str("\\r"),
                '\t' => token.push_str("\\t"),
                c => token.push(c),
            }
        }
        token.push('"');
        Self { lexical: token, kind: TermKind::Literal }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn is_iri(&self) -> bool {
        self.kind == TermKind::Iri
    }

    /// Parses the N-Triples rendering produced by `Display`.
    pub fn from_ntriples(token: &str) -> Option<Self> {
        if let Some(inner) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            Term::iri(inner).ok()
        } else if let Some(label) = token.strip_prefix("_:") {
            Term::blank(label).ok()
        } else {
            Term::literal_token(token).ok()
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TermKind::Iri => write!(f, "<{}>", self.lexical),
            TermKind::BlankNode => write!(f, "_:{}", self.lexical),
            TermKind::Literal => f.write_str(&self.lexical),
        }
    }
}

/// A subject/predicate/object triple of lexical terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermTriple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl TermTriple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Self { subject, predicate, object }
    }
}

impl fmt::Display for TermTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_rejects_whitespace_and_empty() {
        assert!(Term::iri("").is_err());
        assert!(Term::iri("http://a b").is_err());
        assert!(Term::iri("http://ab").is_ok());
    }

    #[test]
    fn plain_literal_escapes() {
        let t = Term::plain_literal("say \"hi\"\n");
        assert_eq!(t.lexical(), r#""say \"hi\"\n""#);
        assert_eq!(Term::from_ntriples(&t.to_string()), Some(t));
    }

    #[test]
    fn display_round_trips() {
        for t in [
            Term::iri("http://x/y").unwrap(),
            Term::blank("b0").unwrap(),
            Term::literal_token("\"v\"@en").unwrap(),
        ] {
            assert_eq!(Term::from_ntriples(&t.to_string()).unwrap(), t);
        }
    }
}
