//! Benchmark configuration: a flat `key = value` file, overridden by flags.
//!
//! Keys: `dataset`, `universities`, `hub_fraction`, `random_triples`,
//! `strategies`, `k`, `n_hop`, `hybrid_prehop`, `workload`, `queries`,
//! `seed`, `repetitions`, `out_dir`. List values are comma separated.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rdfdist::partitioner::Strategy;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    /// An N-Triples file, plain or gzip-compressed.
    File(PathBuf),
    /// Generated university data, optionally with a hub subject.
    Generated { universities: usize, hub_fraction: Option<f64> },
    /// Generated entity data with this many triples.
    Entities { triples: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dataset: DatasetSource,
    pub strategies: Vec<Strategy>,
    pub ks: Vec<u32>,
    pub n_hop: usize,
    pub hybrid_prehop: usize,
    /// Workload query ids from the corpus, or paths to `.rq` files.
    pub workload: Vec<String>,
    /// Queries to run; defaults to the workload.
    pub queries: Vec<String>,
    pub seed: u64,
    pub repetitions: usize,
    pub out_dir: PathBuf,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Generated { universities: 5, hub_fraction: None },
            strategies: Strategy::ALL.to_vec(),
            ks: vec![5, 10],
            n_hop: 2,
            hybrid_prehop: 0,
            workload: crate::corpus::LUBM_WORKLOAD.iter().map(|s| s.to_string()).collect(),
            queries: Vec::new(),
            seed: 42,
            repetitions: 3,
            out_dir: PathBuf::from("bench-out"),
        }
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl BenchConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "dataset" => self.dataset = DatasetSource::File(PathBuf::from(value)),
            "universities" => {
                let universities = value.parse()?;
                let hub_fraction = match self.dataset {
                    DatasetSource::Generated { hub_fraction, .. } => hub_fraction,
                    _ => None,
                };
                self.dataset = DatasetSource::Generated { universities, hub_fraction };
            }
            "hub_fraction" => match &mut self.dataset {
                DatasetSource::Generated { hub_fraction, .. } => *hub_fraction = Some(value.parse()?),
                _ => bail!("hub_fraction applies to generated university data only"),
            },
            "random_triples" => self.dataset = DatasetSource::Entities { triples: value.parse()? },
            "strategies" => {
                self.strategies =
                    list(value).map(|s| s.parse::<Strategy>().map_err(|e| anyhow!("{e}"))).collect::<Result<_>>()?
            }
            "k" => self.ks = list(value).map(str::parse).collect::<Result<_, _>>()?,
            "n_hop" => self.n_hop = value.parse()?,
            "hybrid_prehop" => self.hybrid_prehop = value.parse()?,
            "workload" => self.workload = list(value).map(String::from).collect(),
            "queries" => self.queries = list(value).map(String::from).collect(),
            "seed" => self.seed = value.parse()?,
            "repetitions" => self.repetitions = value.parse()?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => bail!("unknown configuration key {other:?}"),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
            cfg.set(k, v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            bail!("no strategy selected");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            bail!("k list must be non-empty and positive");
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        Ok(())
    }

    pub fn query_ids(&self) -> &[String] {
        if self.queries.is_empty() {
            &self.workload
        } else {
            &self.queries
        }
    }
}

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutDirLock {
    path: PathBuf,
}

pub const LOCK_FILE: &str = ".rdfdist.lock";

impl OutDirLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(LOCK_FILE);
        let mut f: File = OpenOptions::new().write(true).create_new(true).open(&path).with_context(|| {
            format!("{} is locked by another benchmark (remove {} if stale)", dir.display(), path.display())
        })?;
        writeln!(f, "{}", std::process::id())?;
        Ok(Self { path })
    }
}

impl Drop for OutDirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut cfg = BenchConfig::parse("# sweep\nuniversities = 2\nhub_fraction=0.1\nstrategies = subject-hash, warp\nk = 4,8\n")
            .unwrap();
        assert_eq!(cfg.dataset, DatasetSource::Generated { universities: 2, hub_fraction: Some(0.1) });
        assert_eq!(cfg.strategies, vec![Strategy::SubjectHash, Strategy::Warp]);
        assert_eq!(cfg.ks, vec![4, 8]);
        cfg.set("k", "3").unwrap();
        assert_eq!(cfg.ks, vec![3]);
        assert!(cfg.set("bogus", "1").is_err());
        cfg.strategies.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let lock = OutDirLock::acquire(dir.path()).unwrap();
        assert!(OutDirLock::acquire(dir.path()).is_err());
        drop(lock);
        assert!(OutDirLock::acquire(dir.path()).is_ok());
    }
}
