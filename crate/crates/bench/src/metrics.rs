//! Storage metrics over a partitioned dataset.

use rdfdist::replication::PartitionedDataset;

/// `(stored quads - originals) / originals`; 0 for an empty dataset.
pub fn replication_rate(pd: &PartitionedDataset) -> f64 {
    let originals = pd.original_count();
    if originals == 0 {
        return 0.0;
    }
    (pd.total_quads() - originals) as f64 / originals as f64
}

/// Population standard deviation of per-partition quad counts.
pub fn size_stddev(pd: &PartitionedDataset) -> f64 {
    stddev(&pd.sizes())
}

pub fn stddev(sizes: &[usize]) -> f64 {
    if sizes.is_empty() {
        return 0.0;
    }
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / n;
    (sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n).sqrt()
}
