//! Seeded 64-bit hashing used for every hash-based placement decision.
//!
//! `mix64` is the SplitMix64 finalizer. A sequence of words is folded as
//! `h = mix64(seed ^ GOLDEN)`, then `h = mix64(h.wrapping_add(GOLDEN) ^ w)`
//! for each word in order, so the hash of a tuple depends on its order.
//! Results are identical on every platform.

use crate::graph_prep::PartitionId;
use crate::rdf_io::EncodedTriple;

use super::StrategyConfig;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn hash_words(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(mix64(seed ^ GOLDEN), |h, &w| mix64(h.wrapping_add(GOLDEN) ^ w))
}

#[inline]
pub fn bucket(hash: u64, k: u32) -> PartitionId {
    (hash % k as u64) as PartitionId
}

/// Partition keyed on the whole `(s, p, o)` tuple.
pub fn hash_random(t: &EncodedTriple, cfg: &StrategyConfig) -> PartitionId {
    bucket(hash_words(cfg.seed, &[t.s.0, t.p.0, t.o.0]), cfg.k)
}

/// Partition keyed on the subject only.
pub fn hash_subject(t: &EncodedTriple, cfg: &StrategyConfig) -> PartitionId {
    hash_node(t.s.0, cfg)
}

pub fn hash_node(node: u64, cfg: &StrategyConfig) -> PartitionId {
    bucket(hash_words(cfg.seed, &[node]), cfg.k)
}
