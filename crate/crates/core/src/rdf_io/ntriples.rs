//! Line-oriented N-Triples reader.
//!
//! Supports IRIs, blank nodes and literals with language tags or datatypes.
//! Input may be gzip-compressed; compression is detected from the magic bytes.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use super::term::{Term, TermTriple};
use super::RdfIoError;

/// What to do with a line that does not parse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MalformedPolicy {
    #[default]
    Abort,
    SkipAndCount,
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Opens a possibly gzip-compressed N-Triples file.
pub fn open_ntriples(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let file = File::open(path)?;
    maybe_gunzip(BufReader::new(file))
}

/// Wraps `reader` in a gzip decoder if its first bytes carry the gzip magic.
pub fn maybe_gunzip<R: BufRead + Send + 'static>(mut reader: R) -> io::Result<Box<dyn BufRead + Send>> {
    let head = reader.fill_buf()?;
    if head.len() >= 2 && head[..2] == GZIP_MAGIC {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Streaming parser yielding one [`TermTriple`] per statement, in input order.
pub struct NTriplesParser<R> {
    reader: R,
    buf: String,
    line_no: usize,
    policy: MalformedPolicy,
    skipped: usize,
    done: bool,
}

impl<R: BufRead> NTriplesParser<R> {
    pub fn new(reader: R) -> Self {
        Self::with_policy(reader, MalformedPolicy::Abort)
    }

    pub fn with_policy(reader: R, policy: MalformedPolicy) -> Self {
        Self { reader, buf: String::new(), line_no: 0, policy, skipped: 0, done: false }
    }

    /// Number of malformed lines skipped so far under [`MalformedPolicy::SkipAndCount`].
    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl<R: BufRead> Iterator for NTriplesParser<R> {
    type Item = Result<TermTriple, RdfIoError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    self.line_no += 1;
                    match parse_line(&self.buf) {
                        Ok(Some(triple)) => return Some(Ok(triple)),
                        Ok(None) => {}
                        Err(reason) => match self.policy {
                            MalformedPolicy::SkipAndCount => self.skipped += 1,
                            MalformedPolicy::Abort => {
                                self.done = true;
                                return Some(Err(RdfIoError::MalformedLine {
                                    line: self.line_no,
                                    reason: reason.to_string(),
                                }));
                            }
                        },
                    }
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            }
        }
        None
    }
}

/// Parses an in-memory document, aborting on the first malformed line.
pub fn parse_ntriples_str(text: &str) -> Result<Vec<TermTriple>, RdfIoError> {
    NTriplesParser::new(text.as_bytes()).collect()
}

/// Reads every triple from `reader`; returns the triples and the number of skipped lines.
pub fn parse_ntriples<R: Read>(reader: R, policy: MalformedPolicy) -> Result<(Vec<TermTriple>, usize), RdfIoError> {
    let mut parser = NTriplesParser::with_policy(BufReader::new(reader), policy);
    let triples = parser.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok((triples, parser.skipped()))
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

const TRUNCATED: &str = "truncated statement";

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start_matches([' ', '\t', '\r', '\n']).len();
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn iri(&mut self) -> Result<Term, &'static str> {
        debug_assert_eq!(self.peek(), Some(b'<'));
        let rest = &self.rest()[1..];
        let end = rest.find('>').ok_or("unterminated IRI")?;
        let inner = &rest[..end];
        self.pos += end + 2;
        Term::iri(inner).map_err(|_| "invalid IRI")
    }

    fn blank(&mut self) -> Result<Term, &'static str> {
        let rest = &self.rest()[2..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '<' || c == '"')
            .unwrap_or(rest.len());
        let label = rest[..len].trim_end_matches('.');
        if label.is_empty() {
            return Err("empty blank node label");
        }
        self.pos += 2 + label.len();
        Term::blank(label).map_err(|_| "invalid blank node label")
    }

    fn literal(&mut self) -> Result<Term, &'static str> {
        let bytes = self.text.as_bytes();
        let start = self.pos;
        let mut i = start + 1;
        loop {
            match bytes.get(i) {
                None | Some(b'\n') | Some(b'\r') => return Err("unterminated literal"),
                Some(b'\\') => i += 2,
                Some(b'"') => break,
                Some(_) => i += 1,
            }
        }
        i += 1;
        match bytes.get(i) {
            Some(b'@') => {
                let tag_len = bytes[i + 1..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'-')
                    .count();
                if tag_len == 0 {
                    return Err("empty language tag");
                }
                i += 1 + tag_len;
            }
            Some(b'^') => {
                if bytes.get(i + 1) != Some(&b'^') || bytes.get(i + 2) != Some(&b'<') {
                    return Err("malformed datatype");
                }
                let close = self.text[i + 3..].find('>').ok_or("unterminated datatype IRI")?;
                i += 3 + close + 1;
            }
            _ => {}
        }
        self.pos = i;
        Term::literal_token(&self.text[start..i]).map_err(|_| "invalid literal")
    }

    fn node(&mut self, allow_literal: bool) -> Result<Term, &'static str> {
        self.skip_ws();
        match self.peek() {
            None => Err(TRUNCATED),
            Some(b'<') => self.iri(),
            Some(b'_') if self.rest().starts_with("_:") => self.blank(),
            Some(b'"') if allow_literal => self.literal(),
            Some(b'"') => Err("literal in subject position"),
            Some(b'.') => Err(TRUNCATED),
            Some(_) => Err("unexpected character"),
        }
    }

    fn predicate(&mut self) -> Result<Term, &'static str> {
        self.skip_ws();
        match self.peek() {
            None | Some(b'.') => Err(TRUNCATED),
            Some(b'<') => self.iri(),
            Some(_) => Err("predicate must be an IRI"),
        }
    }
}

/// Parses one line; `Ok(None)` for blank lines and comments.
pub(crate) fn parse_line(line: &str) -> Result<Option<TermTriple>, &'static str> {
    let mut cur = Cursor { text: line, pos: 0 };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some(b'#') {
        return Ok(None);
    }
    let subject = cur.node(false)?;
    let predicate = cur.predicate()?;
    let object = cur.node(true)?;
    cur.skip_ws();
    match cur.peek() {
        Some(b'.') => cur.pos += 1,
        None => return Err(TRUNCATED),
        Some(_) => return Err("expected '.'"),
    }
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some(b'#') {
        return Err("trailing content after '.'");
    }
    Ok(Some(TermTriple::new(subject, predicate, object)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf_io::TermKind;
    use std::io::Write;

    #[test]
    fn iri_triple() {
        let t = parse_line("<a> <p> <b> .").unwrap().unwrap();
        assert_eq!(t.subject, Term::iri("a").unwrap());
        assert_eq!(t.predicate, Term::iri("p").unwrap());
        assert_eq!(t.object, Term::iri("b").unwrap());
    }

    #[test]
    fn blank_and_literal() {
        let t = parse_line("_:x <p> \"v\" .").unwrap().unwrap();
        assert_eq!(t.subject.kind(), TermKind::BlankNode);
        assert_eq!(t.subject.lexical(), "x");
        assert_eq!(t.object, Term::literal_token("\"v\"").unwrap());
    }

    #[test]
    fn literal_suffixes_kept_verbatim() {
        let t = parse_line(r#"<s> <p> "a \"q\" b"@en-GB ."#).unwrap().unwrap();
        assert_eq!(t.object.lexical(), r#""a \"q\" b"@en-GB"#);
        let t = parse_line("<s> <p> \"1\"^^<http://www.w3.org/2001/XMLSchema#int>.").unwrap().unwrap();
        assert_eq!(t.object.lexical(), "\"1\"^^<http://www.w3.org/2001/XMLSchema#int>");
    }

    #[test]
    fn blank_object_before_dot() {
        let t = parse_line("<s> <p> _:b1.").unwrap().unwrap();
        assert_eq!(t.object, Term::blank("b1").unwrap());
    }

    #[test]
    fn truncated_statement_reports_line() {
        let err = parse_ntriples_str("<a> <p>").unwrap_err();
        match err {
            RdfIoError::MalformedLine { line, reason } => {
                assert_eq!(line, 1);
                assert_eq!(reason, "truncated statement");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_line("<a> <p> <b>"), Err(TRUNCATED));
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let doc = "# header\n\n<a> <p> <b> . # trailing\n   \n<b> <p> <c> .\n";
        let triples = parse_ntriples_str(doc).unwrap();
        assert_eq!(triples.len(), 2);
    }

    #[test]
    fn skip_policy_counts() {
        let doc = "<a> <p> <b> .\ngarbage\n<a> <p>\n<b> <p> <c> .\n";
        let (triples, skipped) = parse_ntriples(doc.as_bytes(), MalformedPolicy::SkipAndCount).unwrap();
        assert_eq!(triples.len(), 2);
        assert_eq!(skipped, 2);
        let err = parse_ntriples(doc.as_bytes(), MalformedPolicy::Abort).unwrap_err();
        assert!(matches!(err, RdfIoError::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn literal_subject_rejected() {
        assert!(parse_line("\"x\" <p> <o> .").is_err());
        assert!(parse_line("<s> \"p\" <o> .").is_err());
        assert!(parse_line("<s> <p> <o> . <extra>").is_err());
    }

    #[test]
    fn gzip_detected_by_magic() {
        let doc = "<a> <p> <b> .\n<b> <p> \"c\" .\n";
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::fast());
        enc.write_all(doc.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();
        let reader = maybe_gunzip(std::io::Cursor::new(gz)).unwrap();
        let triples: Vec<_> = NTriplesParser::new(reader).collect::<Result<_, _>>().unwrap();
        assert_eq!(triples, parse_ntriples_str(doc).unwrap());
    }
}
