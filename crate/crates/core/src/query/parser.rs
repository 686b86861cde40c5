//! Parser for the conjunctive SPARQL subset: `PREFIX` declarations, `SELECT`
//! with a variable list or `*`, and a `WHERE` group of triple patterns.
//! Nested groups are flattened. `;` and `,` abbreviations are accepted.

use std::collections::HashMap;
use std::io::BufRead;

use crate::rdf_io::{DictionaryPair, Term};

use super::ast::{ParsedPattern, ParsedQuery, PatternTerm, Query};
use super::QueryError;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Prefix → namespace IRI table. `rdf`, `rdfs` and `xsd` are predefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    map: HashMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        Self::new()
    }
}

impl PrefixMap {
    pub fn new() -> Self {
        let mut map = HashMap::new();
        map.insert("rdf".into(), RDF_NS.into());
        map.insert("rdfs".into(), "http://www.w3.org/2000/01/rdf-schema#".into());
        map.insert("xsd".into(), "http://www.w3.org/2001/XMLSchema#".into());
        Self { map }
    }

    pub fn insert(&mut self, prefix: &str, iri: &str) {
        self.map.insert(prefix.trim_end_matches(':').to_string(), iri.to_string());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    /// Reads `prefix<TAB>iri` lines; blank lines and `#` comments are ignored.
    pub fn from_tsv<R: BufRead>(r: R) -> Result<Self, QueryError> {
        let mut m = Self::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| QueryError::PrefixFile(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, iri) = line
                .split_once('\t')
                .ok_or_else(|| QueryError::PrefixFile(format!("line {}: expected prefix<TAB>iri", i + 1)))?;
            let iri = iri.trim().trim_start_matches('<').trim_end_matches('>');
            m.insert(prefix.trim(), iri);
        }
        Ok(m)
    }
}

const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "UNION", "FILTER", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "ORDER", "LIMIT", "OFFSET",
    "GROUP", "HAVING", "FROM", "CONSTRUCT", "ASK", "DESCRIBE", "BASE",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBrace,
    RBrace,
    Dot,
    Semicolon,
    Comma,
    Star,
    Var(String),
    Iri(String),
    PName(String, String),
    Literal(String),
    Blank(String),
    Word(String),
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, pos: usize, msg: impl Into<String>) -> QueryError {
        QueryError::Syntax { position: pos, message: msg.into() }
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn next(&mut self) -> Result<(usize, Tok), QueryError> {
        self.skip_trivia();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok((start, Tok::Eof));
        };
        let single = |t: Tok, this: &mut Self| {
            this.pos += 1;
            Ok((start, t))
        };
        match c {
            '{' => single(Tok::LBrace, self),
            '}' => single(Tok::RBrace, self),
            '.' => single(Tok::Dot, self),
            ';' => single(Tok::Semicolon, self),
            ',' => single(Tok::Comma, self),
            '*' => single(Tok::Star, self),
            '?' | '$' => {
                let name: String = rest[1..].chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
                if name.is_empty() {
                    return Err(self.err(start, "empty variable name"));
                }
                self.pos += 1 + name.len();
                Ok((start, Tok::Var(name)))
            }
            '<' => {
                let end = rest.find('>').ok_or_else(|| self.err(start, "unterminated IRI"))?;
                let iri = &rest[1..end];
                if iri.chars().any(char::is_whitespace) {
                    return Err(self.err(start, "whitespace in IRI"));
                }
                self.pos += end + 1;
                Ok((start, Tok::Iri(iri.to_string())))
            }
            '"' => {
                let bytes = rest.as_bytes();
                let mut i = 1;
                loop {
                    match bytes.get(i) {
                        None | Some(b'\n') => return Err(self.err(start, "unterminated literal")),
                        Some(b'\\') => i += 2,
                        Some(b'"') => break,
                        Some(_) => i += 1,
                    }
                }
                i += 1;
                if bytes.get(i) == Some(&b'@') {
                    i += 1 + bytes[i + 1..].iter().take_while(|b| b.is_ascii_alphanumeric() || **b == b'-').count();
                    self.pos += i;
                    return Ok((start, Tok::Literal(rest[..i].to_string())));
                }
                let value = rest[..i].to_string();
                self.pos += i;
                if rest[i..].starts_with("^^") {
                    self.pos += 2;
                    let dt = match self.next()? {
                        (_, Tok::Iri(iri)) => iri,
                        (p, Tok::PName(prefix, local)) => self.resolve_later(p, prefix, local),
                        (p, _) => return Err(self.err(p, "expected datatype IRI")),
                    };
                    return Ok((start, Tok::Literal(format!("{value}^^<{dt}>"))));
                }
                Ok((start, Tok::Literal(value)))
            }
            '_' if rest.starts_with("_:") => {
                let label: String =
                    rest[2..].chars().take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '-').collect();
                if label.is_empty() {
                    return Err(self.err(start, "empty blank node label"));
                }
                self.pos += 2 + label.len();
                Ok((start, Tok::Blank(label)))
            }
            c if c.is_alphabetic() || c == ':' => {
                let len = rest
                    .char_indices()
                    .find(|(_, c)| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%')))
                    .map_or(rest.len(), |(i, _)| i);
                let word = rest[..len].trim_end_matches('.');
                self.pos += word.len();
                match word.split_once(':') {
                    Some((prefix, local)) => Ok((start, Tok::PName(prefix.to_string(), local.to_string()))),
                    None => Ok((start, Tok::Word(word.to_string()))),
                }
            }
            _ => Err(self.err(start, format!("unexpected character {c:?}"))),
        }
    }

    // Datatype prefixed names are expanded by the parser; keep them marked.
    fn resolve_later(&self, _pos: usize, prefix: String, local: String) -> String {
        format!("\u{0}{prefix}:{local}")
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(usize, Tok)>,
    prefixes: PrefixMap,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Result<&(usize, Tok), QueryError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<(usize, Tok), QueryError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> QueryError {
        QueryError::Syntax { position: pos, message: msg.into() }
    }

    fn check_unsupported(&self, pos: usize, word: &str) -> Result<(), QueryError> {
        let upper = word.to_ascii_uppercase();
        if UNSUPPORTED.contains(&upper.as_str()) {
            return Err(QueryError::Unsupported { position: pos, feature: upper });
        }
        Ok(())
    }

    fn expand(&self, pos: usize, prefix: &str, local: &str) -> Result<String, QueryError> {
        let ns = self.prefixes.get(prefix).ok_or_else(|| QueryError::UnknownPrefix { position: pos, prefix: prefix.into() })?;
        Ok(format!("{ns}{local}"))
    }

    fn fix_literal(&self, pos: usize, lit: String) -> Result<String, QueryError> {
        if let Some(i) = lit.find("^^<\u{0}") {
            let inner = &lit[i + 4..lit.len() - 1];
            let (prefix, local) = inner.split_once(':').expect("marked datatype");
            return Ok(format!("{}^^<{}>", &lit[..i], self.expand(pos, prefix, local)?));
        }
        Ok(lit)
    }

    fn term(&mut self, position: &str) -> Result<PatternTerm, QueryError> {
        let (pos, tok) = self.bump()?;
        let term = match tok {
            Tok::Var(v) => return Ok(PatternTerm::Var(v)),
            Tok::Iri(iri) => Term::iri(iri),
            Tok::PName(prefix, local) => Term::iri(self.expand(pos, &prefix, &local)?),
            Tok::Literal(lit) => Term::literal_token(self.fix_literal(pos, lit)?),
            Tok::Blank(label) => Term::blank(label),
            Tok::Word(w) if w == "a" && position == "predicate" => Term::iri(RDF_TYPE),
            Tok::Word(w) => {
                self.check_unsupported(pos, &w)?;
                return Err(self.err(pos, format!("unexpected word {w:?} in {position} position")));
            }
            Tok::Eof => return Err(self.err(pos, format!("unexpected end of query, expected {position}"))),
            other => return Err(self.err(pos, format!("expected {position}, found {other:?}"))),
        };
        term.map(PatternTerm::Term).map_err(|e| self.err(pos, e.to_string()))
    }

    fn group(&mut self, out: &mut Vec<ParsedPattern>) -> Result<(), QueryError> {
        match self.bump()? {
            (_, Tok::LBrace) => {}
            (p, _) => return Err(self.err(p, "expected '{'")),
        }
        loop {
            let (pos, tok) = self.peek()?.clone();
            match tok {
                Tok::RBrace => {
                    self.bump()?;
                    return Ok(());
                }
                Tok::LBrace => self.group(out)?,
                Tok::Dot => {
                    self.bump()?;
                }
                Tok::Word(w) if w != "a" => {
                    self.check_unsupported(pos, &w)?;
                    return Err(self.err(pos, format!("unexpected word {w:?}")));
                }
                Tok::Eof => return Err(self.err(pos, "unterminated group")),
                _ => self.triples_block(out)?,
            }
        }
    }

    fn triples_block(&mut self, out: &mut Vec<ParsedPattern>) -> Result<(), QueryError> {
        let s = self.term("subject")?;
        loop {
            let p = self.term("predicate")?;
            loop {
                let o = self.term("object")?;
                out.push(ParsedPattern { s: s.clone(), p: p.clone(), o });
                if matches!(self.peek()?.1, Tok::Comma) {
                    self.bump()?;
                } else {
                    break;
                }
            }
            if matches!(self.peek()?.1, Tok::Semicolon) {
                self.bump()?;
                if matches!(self.peek()?.1, Tok::Dot | Tok::RBrace) {
                    break;
                }
            } else {
                break;
            }
        }
        match self.peek()?.clone() {
            (_, Tok::Dot) => {
                self.bump()?;
                Ok(())
            }
            (_, Tok::RBrace | Tok::LBrace) => Ok(()),
            (pos, Tok::Word(w)) => {
                self.check_unsupported(pos, &w)?;
                Err(self.err(pos, "expected '.' between triple patterns"))
            }
            (pos, _) => Err(self.err(pos, "expected '.' between triple patterns")),
        }
    }

    fn query(&mut self) -> Result<ParsedQuery, QueryError> {
        loop {
            let (pos, tok) = self.bump()?;
            match tok {
                Tok::Word(w) if w.eq_ignore_ascii_case("PREFIX") => {
                    let prefix = match self.bump()? {
                        (_, Tok::PName(prefix, local)) if local.is_empty() => prefix,
                        (p, _) => return Err(self.err(p, "expected prefix name after PREFIX")),
                    };
                    match self.bump()? {
                        (_, Tok::Iri(iri)) => self.prefixes.insert(&prefix, &iri),
                        (p, _) => return Err(self.err(p, "expected IRI in PREFIX declaration")),
                    }
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("SELECT") => break,
                Tok::Word(w) => {
                    self.check_unsupported(pos, &w)?;
                    return Err(self.err(pos, format!("expected SELECT, found {w:?}")));
                }
                _ => return Err(self.err(pos, "expected SELECT")),
            }
        }
        if let (_, Tok::Word(w)) = self.peek()?.clone() {
            if w.eq_ignore_ascii_case("DISTINCT") || w.eq_ignore_ascii_case("REDUCED") {
                self.bump()?;
            }
        }
        let projection = if matches!(self.peek()?.1, Tok::Star) {
            self.bump()?;
            None
        } else {
            let mut vars = Vec::new();
            while let (_, Tok::Var(v)) = self.peek()?.clone() {
                self.bump()?;
                vars.push(v);
            }
            if vars.is_empty() {
                let pos = self.peek()?.0;
                return Err(self.err(pos, "expected projection variables or '*'"));
            }
            Some(vars)
        };
        match self.peek()?.clone() {
            (_, Tok::Word(w)) if w.eq_ignore_ascii_case("WHERE") => {
                self.bump()?;
            }
            (pos, Tok::Word(w)) => {
                self.check_unsupported(pos, &w)?;
                return Err(self.err(pos, format!("unexpected {w:?}")));
            }
            _ => {}
        }
        let mut patterns = Vec::new();
        self.group(&mut patterns)?;
        match self.bump()? {
            (_, Tok::Eof) => {}
            (pos, Tok::Word(w)) => {
                self.check_unsupported(pos, &w)?;
                return Err(self.err(pos, format!("unexpected {w:?} after WHERE group")));
            }
            (pos, _) => return Err(self.err(pos, "trailing input after WHERE group")),
        }
        if patterns.is_empty() {
            return Err(QueryError::EmptyPattern);
        }
        Ok(ParsedQuery { projection, patterns })
    }
}

/// Parses query text, keeping constants in lexical form.
pub fn parse_sparql(text: &str, prefixes: &PrefixMap) -> Result<ParsedQuery, QueryError> {
    Parser { lexer: Lexer { src: text, pos: 0 }, peeked: None, prefixes: prefixes.clone() }.query()
}

/// Parses query text and encodes its constants against `dicts`.
pub fn parse_query(text: &str, prefixes: &PrefixMap, dicts: &DictionaryPair) -> Result<Query, QueryError> {
    parse_sparql(text, prefixes)?.encode(dicts)
}
