use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PartitionError;

/// The distribution strategies the workbench compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Partition on a hash of the whole triple.
    RandomHash,
    /// Partition on a hash of the subject.
    SubjectHash,
    /// Graph partitioning, each triple placed with its subject, no replication.
    GraphSubject,
    /// Graph partitioning followed by n-hop guarantee expansion.
    GraphNHop,
    /// Graph partitioning, 2-hop expansion and workload-aware refinement.
    Warp,
    /// Subject hashing followed by workload-aware refinement.
    Hybrid,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::RandomHash,
        Strategy::SubjectHash,
        Strategy::GraphSubject,
        Strategy::GraphNHop,
        Strategy::Warp,
        Strategy::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RandomHash => "random-hash",
            Strategy::SubjectHash => "subject-hash",
            Strategy::GraphSubject => "graph-subject",
            Strategy::GraphNHop => "graph-nhop",
            Strategy::Warp => "warp",
            Strategy::Hybrid => "hybrid",
        }
    }

    /// True for strategies that run the multilevel graph partitioner.
    pub fn uses_graph_partitioner(self) -> bool {
        matches!(self, Strategy::GraphSubject | Strategy::GraphNHop | Strategy::Warp)
    }

    pub fn uses_workload(self) -> bool {
        matches!(self, Strategy::Warp | Strategy::Hybrid)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == norm)
            .or(match norm.as_str() {
                "random" => Some(Strategy::RandomHash),
                "subject" => Some(Strategy::SubjectHash),
                "nhop" | "nhopdb" => Some(Strategy::GraphNHop),
                _ => None,
            })
            .ok_or_else(|| PartitionError::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

/// Parameters shared by every partitioning strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    /// Number of partitions.
    pub k: u32,
    pub seed: u64,
    /// Allowed imbalance of the graph partitioner, as a fraction over ⌈n/k⌉.
    pub epsilon: f64,
    /// Hop guarantee for [`Strategy::GraphNHop`].
    pub hops: usize,
    /// Optional n-hop expansion run by [`Strategy::Hybrid`] before refinement; 0 or 1 disables it.
    pub hybrid_prehop: usize,
}

impl StrategyConfig {
    pub const DEFAULT_EPSILON: f64 = 0.03;

    pub fn new(strategy: Strategy, k: u32) -> Self {
        Self { strategy, k, seed: 0, epsilon: Self::DEFAULT_EPSILON, hops: 2, hybrid_prehop: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_hops(mut self, hops: usize) -> Self {
        self.hops = hops;
        self
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        if self.k == 0 {
            return Err(PartitionError::InvalidConfig("k must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(PartitionError::InvalidConfig(format!("epsilon {} outside [0, 1)", self.epsilon)));
        }
        if self.hops == 0 {
            return Err(PartitionError::InvalidConfig("hop count must be at least 1".into()));
        }
        Ok(())
    }
}
