//! On-disk layout of an encoded dataset.
//!
//! `dataset.bin`: 8-byte magic `RDFDTRP1`, little-endian `u64` triple count,
//! then `count` records of three little-endian `u64` (s, p, o).
//!
//! `nodes.dict` / `preds.dict`: one `id<TAB>term` line per entry in ascending
//! id order, where `term` is the N-Triples rendering of the term.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::dictionary::{Dictionary, DictionaryPair, EncodedTriple};
use super::term::Term;
use super::RdfIoError;

pub const TRIPLES_MAGIC: &[u8; 8] = b"RDFDTRP1";
pub const DATASET_FILE: &str = "dataset.bin";
pub const NODES_FILE: &str = "nodes.dict";
pub const PREDS_FILE: &str = "preds.dict";

pub fn write_triples<W: Write>(mut w: W, triples: &[EncodedTriple]) -> io::Result<()> {
    w.write_all(TRIPLES_MAGIC)?;
    w.write_all(&(triples.len() as u64).to_le_bytes())?;
    for t in triples {
        w.write_all(&t.s.0.to_le_bytes())?;
        w.write_all(&t.p.0.to_le_bytes())?;
        w.write_all(&t.o.0.to_le_bytes())?;
    }
    w.flush()
}

fn corrupt(msg: impl Into<String>) -> RdfIoError {
    RdfIoError::CorruptFile(msg.into())
}

fn read_exact_or_corrupt<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<(), RdfIoError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => corrupt(format!("truncated {what}")),
        _ => RdfIoError::Io(e),
    })
}

pub fn read_triples<R: Read>(mut r: R) -> Result<Vec<EncodedTriple>, RdfIoError> {
    let mut magic = [0u8; 8];
    read_exact_or_corrupt(&mut r, &mut magic, "header")?;
    if &magic != TRIPLES_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let mut word = [0u8; 8];
    read_exact_or_corrupt(&mut r, &mut word, "header")?;
    let count = u64::from_le_bytes(word);
    let mut out = Vec::with_capacity(count.min(1 << 24) as usize);
    let mut rec = [0u8; 24];
    for _ in 0..count {
        read_exact_or_corrupt(&mut r, &mut rec, "triple record")?;
        let f = |i: usize| u64::from_le_bytes(rec[i * 8..i * 8 + 8].try_into().unwrap());
        out.push(EncodedTriple::new(f(0), f(1), f(2)));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(corrupt("trailing bytes after last record"));
    }
    Ok(out)
}

pub fn write_dictionary<W: Write>(mut w: W, dict: &Dictionary) -> io::Result<()> {
    for (id, term) in dict.iter() {
        writeln!(w, "{id}\t{term}")?;
    }
    w.flush()
}

pub fn read_dictionary<R: BufRead>(r: R) -> Result<Dictionary, RdfIoError> {
    let mut terms = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let (id, lexical) = line
            .split_once('\t')
            .ok_or_else(|| corrupt(format!("dictionary line {} has no tab", i + 1)))?;
        let id: u64 = id.parse().map_err(|_| corrupt(format!("bad id on dictionary line {}", i + 1)))?;
        if id != i as u64 {
            return Err(corrupt(format!("dictionary ids not dense: expected {i}, found {id}")));
        }
        let term =
            Term::from_ntriples(lexical).ok_or_else(|| corrupt(format!("bad term on dictionary line {}", i + 1)))?;
        terms.push(term);
    }
    Dictionary::from_terms(terms).map_err(|t| corrupt(format!("duplicate term {t}")))
}

/// Writes `dataset.bin`, `nodes.dict` and `preds.dict` into `dir`.
pub fn save_encoded(dir: &Path, triples: &[EncodedTriple], dicts: &DictionaryPair) -> Result<(), RdfIoError> {
    fs::create_dir_all(dir)?;
    write_triples(BufWriter::new(File::create(dir.join(DATASET_FILE))?), triples)?;
    write_dictionary(BufWriter::new(File::create(dir.join(NODES_FILE))?), &dicts.nodes)?;
    write_dictionary(BufWriter::new(File::create(dir.join(PREDS_FILE))?), &dicts.predicates)?;
    Ok(())
}

pub fn load_encoded(dir: &Path) -> Result<(Vec<EncodedTriple>, DictionaryPair), RdfIoError> {
    let triples = read_triples(BufReader::new(File::open(dir.join(DATASET_FILE))?))?;
    let nodes = read_dictionary(BufReader::new(File::open(dir.join(NODES_FILE))?))?;
    let predicates = read_dictionary(BufReader::new(File::open(dir.join(PREDS_FILE))?))?;
    let dicts = DictionaryPair { nodes, predicates };
    for t in &triples {
        dicts.node(t.s)?;
        dicts.predicate(t.p)?;
        dicts.node(t.o)?;
    }
    Ok((triples, dicts))
}
