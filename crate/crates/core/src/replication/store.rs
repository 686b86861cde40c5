//! Directory layout of a persisted [`PartitionedDataset`]:
//!
//! - `manifest`: `k<TAB>{k}` and `originals<TAB>{count}` lines.
//! - `part-{p:05}.quads`: the partition's triples in the `dataset.bin` format.
//! - `part-{p:05}.prov`: magic `RDFDPRV1`, little-endian `u64` count, then
//!   one byte per quad in the same order: 0 = original, 1 = replica.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::rdf_io::{read_triples, write_triples, RdfIoError};

use super::{PartitionedDataset, Provenance};

pub const PROVENANCE_MAGIC: &[u8; 8] = b"RDFDPRV1";
pub const MANIFEST_FILE: &str = "manifest";

fn corrupt(msg: impl Into<String>) -> RdfIoError {
    RdfIoError::CorruptFile(msg.into())
}

pub fn save_partitioned(dir: &Path, pd: &PartitionedDataset) -> Result<(), RdfIoError> {
    fs::create_dir_all(dir)?;
    let mut manifest = BufWriter::new(File::create(dir.join(MANIFEST_FILE))?);
    writeln!(manifest, "k\t{}", pd.k())?;
    writeln!(manifest, "originals\t{}", pd.original_count())?;
    manifest.flush()?;
    for (p, part) in pd.partitions().iter().enumerate() {
        write_triples(BufWriter::new(File::create(dir.join(format!("part-{p:05}.quads")))?), part.triples())?;
        let mut w = BufWriter::new(File::create(dir.join(format!("part-{p:05}.prov")))?);
        w.write_all(PROVENANCE_MAGIC)?;
        w.write_all(&(part.len() as u64).to_le_bytes())?;
        let flags: Vec<u8> = part.iter().map(|(_, prov)| u8::from(prov == Provenance::Replica)).collect();
        w.write_all(&flags)?;
        w.flush()?;
    }
    Ok(())
}

fn read_provenance<R: Read>(mut r: R) -> Result<Vec<Provenance>, RdfIoError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..8] != PROVENANCE_MAGIC {
        return Err(corrupt("bad provenance header"));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let flags = &bytes[16..];
    if flags.len() != count {
        return Err(corrupt(format!("provenance sidecar holds {} flags, header says {count}", flags.len())));
    }
    flags
        .iter()
        .map(|&b| match b {
            0 => Ok(Provenance::Original),
            1 => Ok(Provenance::Replica),
            _ => Err(corrupt(format!("bad provenance flag {b}"))),
        })
        .collect()
}

pub fn load_partitioned(dir: &Path) -> Result<PartitionedDataset, RdfIoError> {
    let mut k = None;
    let mut originals = None;
    for line in BufReader::new(File::open(dir.join(MANIFEST_FILE))?).lines() {
        let line = line?;
        let Some((key, value)) = line.split_once('\t') else { continue };
        let value: usize = value.trim().parse().map_err(|_| corrupt(format!("bad manifest line {line:?}")))?;
        match key {
            "k" => k = Some(value),
            "originals" => originals = Some(value),
            _ => {}
        }
    }
    let k = k.ok_or_else(|| corrupt("manifest missing k"))?;
    let k32 = u32::try_from(k).map_err(|_| corrupt("k out of range"))?;
    let mut pd = PartitionedDataset::new(k32);
    let mut replicas = Vec::new();
    for p in 0..k32 {
        let triples = read_triples(BufReader::new(File::open(dir.join(format!("part-{p:05}.quads")))?))?;
        let prov = read_provenance(File::open(dir.join(format!("part-{p:05}.prov")))?)?;
        if prov.len() != triples.len() {
            return Err(corrupt(format!("partition {p}: {} quads, {} provenance flags", triples.len(), prov.len())));
        }
        for (t, flag) in triples.into_iter().zip(prov) {
            match flag {
                Provenance::Original => {
                    if !pd.insert_original(t, p) {
                        return Err(corrupt(format!("triple {t} original in two partitions")));
                    }
                }
                Provenance::Replica => replicas.push((t, p)),
            }
        }
    }
    for (t, p) in replicas {
        if pd.original_partition(&t).is_none() {
            return Err(corrupt(format!("replica {t} has no original")));
        }
        if !pd.add_replica(t, p) {
            return Err(corrupt(format!("duplicate quad {t} in partition {p}")));
        }
    }
    if originals.is_some_and(|n| n != pd.original_count()) {
        return Err(corrupt("original count does not match manifest"));
    }
    Ok(pd)
}
