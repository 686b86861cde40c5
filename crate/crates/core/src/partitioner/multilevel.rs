//! Multilevel k-way min-edge-cut partitioning.
//!
//! 1. Coarsen by repeated matching until at most `max(100, 20k)` vertices
//!    remain. Vertices are visited in decreasing degree order (ties broken by
//!    a seeded random key) and matched to the unmatched neighbour joined by
//!    the heaviest edge.
//! 2. Grow `k` regions greedily on the coarsest graph, each up to its share
//!    of the remaining vertex weight.
//! 3. Project back level by level. At each level: restore balance if a
//!    partition exceeds `(1 + ε)·⌈W/k⌉`, then run one greedy boundary pass
//!    that moves a vertex to the neighbouring partition with the largest
//!    positive cut gain when the move keeps the target under the cap.
//!
//! Ties go to the smallest vertex id and the smallest partition id.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph_prep::{PartitionId, PartitionMap, UndirectedGraph};

use super::{PartitionError, StrategyConfig};

/// Coarsening stops once a level shrinks the graph by less than this factor.
const MIN_SHRINK: f64 = 0.95;

#[derive(Debug, Clone)]
struct WeightedGraph {
    xadj: Vec<usize>,
    adjncy: Vec<u32>,
    adjwgt: Vec<u64>,
    vwgt: Vec<u64>,
}

impl WeightedGraph {
    fn from_unweighted(g: &UndirectedGraph) -> Self {
        let n = g.vertex_count();
        let mut xadj = Vec::with_capacity(n + 1);
        let mut adjncy = Vec::with_capacity(2 * g.edge_count());
        xadj.push(0);
        for v in 0..n {
            adjncy.extend_from_slice(g.neighbors(v));
            xadj.push(adjncy.len());
        }
        let adjwgt = vec![1; adjncy.len()];
        Self { xadj, adjncy, adjwgt, vwgt: vec![1; n] }
    }

    fn n(&self) -> usize {
        self.vwgt.len()
    }

    fn total_weight(&self) -> u64 {
        self.vwgt.iter().sum()
    }

    fn edges(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let r = self.xadj[v]..self.xadj[v + 1];
        self.adjncy[r.clone()].iter().map(|&u| u as usize).zip(self.adjwgt[r].iter().copied())
    }

    fn degree(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }
}

/// One coarsening step; returns the coarse graph and the fine → coarse map.
fn coarsen(g: &WeightedGraph, max_vwgt: u64, rng: &mut ChaCha8Rng) -> (WeightedGraph, Vec<u32>) {
    let n = g.n();
    let keys: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (Reverse(g.degree(v)), keys[v], v));

    const UNMATCHED: usize = usize::MAX;
    let mut mate = vec![UNMATCHED; n];
    for &v in &order {
        if mate[v] != UNMATCHED {
            continue;
        }
        let mut best: Option<(u64, Reverse<u64>, Reverse<usize>)> = None;
        for (u, w) in g.edges(v) {
            if mate[u] != UNMATCHED || g.vwgt[v] + g.vwgt[u] > max_vwgt {
                continue;
            }
            let cand = (w, Reverse(g.vwgt[u]), Reverse(u));
            if best.is_none_or(|b| cand > b) {
                best = Some(cand);
            }
        }
        match best {
            Some((_, _, Reverse(u))) => {
                mate[v] = u;
                mate[u] = v;
            }
            None => mate[v] = v,
        }
    }

    let mut cmap = vec![u32::MAX; n];
    let mut cn = 0u32;
    for v in 0..n {
        if cmap[v] == u32::MAX {
            cmap[v] = cn;
            cmap[mate[v]] = cn;
            cn += 1;
        }
    }
    let cn = cn as usize;
    let mut members: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); cn];
    for v in 0..n {
        let c = cmap[v] as usize;
        if members[c].0 == usize::MAX {
            members[c].0 = v;
        } else {
            members[c].1 = v;
        }
    }

    let mut xadj = Vec::with_capacity(cn + 1);
    let mut adjncy = Vec::new();
    let mut adjwgt = Vec::new();
    let mut vwgt = Vec::with_capacity(cn);
    let mut slot = vec![usize::MAX; cn];
    xadj.push(0);
    for (c, &(a, b)) in members.iter().enumerate() {
        let start = adjncy.len();
        let mut weight = 0;
        for v in [a, b] {
            if v == usize::MAX {
                continue;
            }
            weight += g.vwgt[v];
            for (u, w) in g.edges(v) {
                let cu = cmap[u] as usize;
                if cu == c {
                    continue;
                }
                if slot[cu] == usize::MAX {
                    slot[cu] = adjncy.len();
                    adjncy.push(cu as u32);
                    adjwgt.push(w);
                } else {
                    adjwgt[slot[cu]] += w;
                }
            }
        }
        for &u in &adjncy[start..] {
            slot[u as usize] = usize::MAX;
        }
        vwgt.push(weight);
        xadj.push(adjncy.len());
    }
    (WeightedGraph { xadj, adjncy, adjwgt, vwgt }, cmap)
}

/// Greedy region growing: each region absorbs the unassigned vertex most
/// strongly connected to it until it reaches its share of the weight.
fn initial_partition(g: &WeightedGraph, k: u32) -> Vec<PartitionId> {
    let n = g.n();
    const NONE: PartitionId = PartitionId::MAX;
    let mut parts = vec![NONE; n];
    let mut remaining = g.total_weight();
    let mut next_seed = 0usize;
    let mut conn = vec![0u64; n];

    for p in 0..k.saturating_sub(1) {
        let target = remaining as f64 / (k - p) as f64;
        let mut region = 0u64;
        let mut heap: BinaryHeap<(u64, Reverse<usize>)> = BinaryHeap::new();
        let mut touched = Vec::new();
        loop {
            let v = match heap.pop() {
                Some((c, Reverse(v))) => {
                    if parts[v] != NONE || c != conn[v] {
                        continue;
                    }
                    v
                }
                None => {
                    while next_seed < n && parts[next_seed] != NONE {
                        next_seed += 1;
                    }
                    if next_seed == n {
                        break;
                    }
                    next_seed
                }
            };
            let w = g.vwgt[v];
            if region > 0 {
                let over = (region + w) as f64 - target;
                if over > 0.0 && over > target - region as f64 {
                    break;
                }
            }
            parts[v] = p;
            region += w;
            for (u, ew) in g.edges(v) {
                if parts[u] == NONE {
                    conn[u] += ew;
                    touched.push(u);
                    heap.push((conn[u], Reverse(u)));
                }
            }
            if region as f64 >= target {
                break;
            }
        }
        for u in touched {
            conn[u] = 0;
        }
        remaining -= region;
    }
    for p in parts.iter_mut() {
        if *p == NONE {
            *p = k - 1;
        }
    }
    parts
}

fn part_weights(g: &WeightedGraph, parts: &[PartitionId], k: u32) -> Vec<u64> {
    let mut pw = vec![0u64; k as usize];
    for (v, &p) in parts.iter().enumerate() {
        pw[p as usize] += g.vwgt[v];
    }
    pw
}

/// Edge weight from `v` into each partition, as sparse (partition, weight) pairs.
fn connectivity(g: &WeightedGraph, parts: &[PartitionId], v: usize, buf: &mut Vec<(PartitionId, u64)>) {
    buf.clear();
    for (u, w) in g.edges(v) {
        let p = parts[u];
        match buf.iter_mut().find(|(q, _)| *q == p) {
            Some(e) => e.1 += w,
            None => buf.push((p, w)),
        }
    }
}

/// Best destination for `v` among partitions in `buf` (plus, when
/// `any_partition`, every partition), judged by cut gain.
fn best_move(
    buf: &[(PartitionId, u64)],
    from: PartitionId,
    fits: impl Fn(PartitionId) -> bool,
    k: u32,
    any_partition: bool,
) -> Option<(i64, PartitionId)> {
    let internal = buf.iter().find(|(p, _)| *p == from).map_or(0, |e| e.1) as i64;
    let mut best: Option<(i64, Reverse<PartitionId>)> = None;
    let mut consider = |to: PartitionId, ext: u64| {
        if to == from || !fits(to) {
            return;
        }
        let cand = (ext as i64 - internal, Reverse(to));
        if best.is_none_or(|b| cand > b) {
            best = Some(cand);
        }
    };
    if any_partition {
        for to in 0..k {
            let ext = buf.iter().find(|(p, _)| *p == to).map_or(0, |e| e.1);
            consider(to, ext);
        }
    } else {
        for &(to, ext) in buf {
            consider(to, ext);
        }
    }
    best.map(|(gain, Reverse(to))| (gain, to))
}

/// Moves vertices out of partitions heavier than `cap`, best gain first.
fn rebalance(g: &WeightedGraph, parts: &mut [PartitionId], k: u32, cap: f64) {
    let mut pw = part_weights(g, parts, k);
    let mut buf = Vec::new();
    loop {
        let Some(heavy) = (0..k).find(|&p| pw[p as usize] as f64 > cap) else {
            return;
        };
        let mut moves = Vec::new();
        for v in 0..g.n() {
            if parts[v] != heavy {
                continue;
            }
            connectivity(g, parts, v, &mut buf);
            let w = g.vwgt[v];
            if let Some((gain, to)) = best_move(&buf, heavy, |to| (pw[to as usize] + w) as f64 <= cap, k, true) {
                moves.push((Reverse(gain), v, to));
            }
        }
        if moves.is_empty() {
            return;
        }
        moves.sort_unstable();
        let mut moved = false;
        for (_, v, to) in moves {
            if pw[heavy as usize] as f64 <= cap {
                break;
            }
            let w = g.vwgt[v];
            if (pw[to as usize] + w) as f64 > cap {
                continue;
            }
            pw[heavy as usize] -= w;
            pw[to as usize] += w;
            parts[v] = to;
            moved = true;
        }
        if !moved {
            return;
        }
    }
}

/// One greedy pass over boundary vertices in id order.
fn refine_pass(g: &WeightedGraph, parts: &mut [PartitionId], k: u32, cap: f64) {
    let mut pw = part_weights(g, parts, k);
    let mut buf = Vec::new();
    for v in 0..g.n() {
        let from = parts[v];
        connectivity(g, parts, v, &mut buf);
        if buf.iter().all(|(p, _)| *p == from) {
            continue;
        }
        let w = g.vwgt[v];
        let Some((gain, to)) = best_move(&buf, from, |to| (pw[to as usize] + w) as f64 <= cap, k, false) else {
            continue;
        };
        let evens_load = pw[from as usize] > pw[to as usize] + w;
        if gain > 0 || (gain == 0 && evens_load) {
            pw[from as usize] -= w;
            pw[to as usize] += w;
            parts[v] = to;
        }
    }
}

/// Partitions `graph` into `cfg.k` parts minimising edge cut under the
/// `(1 + ε)·⌈n/k⌉` vertex-count bound.
pub fn multilevel_partition(graph: &UndirectedGraph, cfg: &StrategyConfig) -> Result<PartitionMap, PartitionError> {
    cfg.validate()?;
    let n = graph.vertex_count();
    let k = cfg.k;
    if k as usize > n {
        return Err(PartitionError::InfeasibleBalance { k, vertices: n });
    }
    if k == 1 {
        return Ok(PartitionMap::new(vec![0; n], 1).expect("valid ids"));
    }

    let coarsen_to = 100usize.max(20 * k as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut levels: Vec<WeightedGraph> = vec![WeightedGraph::from_unweighted(graph)];
    let mut maps: Vec<Vec<u32>> = Vec::new();
    let total = n as u64;
    let max_vwgt = ((1.5 * total as f64) / coarsen_to as f64).ceil().max(1.0) as u64;
    while levels.last().unwrap().n() > coarsen_to {
        let fine = levels.last().unwrap();
        let (coarse, cmap) = coarsen(fine, max_vwgt, &mut rng);
        let shrunk = (coarse.n() as f64) <= MIN_SHRINK * fine.n() as f64;
        if coarse.n() < fine.n() {
            levels.push(coarse);
            maps.push(cmap);
        }
        if !shrunk {
            break;
        }
    }

    let cap = (1.0 + cfg.epsilon) * n.div_ceil(k as usize) as f64;
    let coarsest = levels.last().unwrap();
    let mut parts = initial_partition(coarsest, k);
    rebalance(coarsest, &mut parts, k, cap);
    refine_pass(coarsest, &mut parts, k, cap);

    for level in (0..maps.len()).rev() {
        let fine = &levels[level];
        let cmap = &maps[level];
        parts = (0..fine.n()).map(|v| parts[cmap[v] as usize]).collect();
        rebalance(fine, &mut parts, k, cap);
        refine_pass(fine, &mut parts, k, cap);
    }
    // unit weights at the finest level make the bound always reachable
    rebalance(&levels[0], &mut parts, k, cap);
    debug_assert!(part_weights(&levels[0], &parts, k).iter().all(|&w| w as f64 <= cap));

    Ok(PartitionMap::new(parts, k).expect("partition ids below k"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitioner::Strategy;

    fn cfg(k: u32) -> StrategyConfig {
        StrategyConfig::new(Strategy::GraphSubject, k).with_seed(1)
    }

    #[test]
    fn k_one_all_zero() {
        let g = UndirectedGraph::from_edges(5, [(0, 1), (1, 2), (3, 4)]);
        let map = multilevel_partition(&g, &cfg(1)).unwrap();
        assert!(map.as_slice().iter().all(|&p| p == 0));
        assert_eq!(g.edge_cut(map.as_slice()), 0);
    }

    #[test]
    fn more_parts_than_vertices() {
        let g = UndirectedGraph::from_edges(3, [(0, 1)]);
        assert!(matches!(
            multilevel_partition(&g, &cfg(4)),
            Err(PartitionError::InfeasibleBalance { k: 4, vertices: 3 })
        ));
    }

    #[test]
    fn coarsening_preserves_weight_and_symmetry() {
        let edges: Vec<(u32, u32)> = (0..400u32).map(|i| (i, (i * 7 + 3) % 400)).collect();
        let g = WeightedGraph::from_unweighted(&UndirectedGraph::from_edges(400, edges));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (c, cmap) = coarsen(&g, 4, &mut rng);
        assert_eq!(c.total_weight(), 400);
        assert!(c.n() < 400);
        assert!(cmap.iter().all(|&x| (x as usize) < c.n()));
        let fine_cut_weight: u64 = (0..g.n())
            .flat_map(|v| g.edges(v).map(move |(u, w)| (v, u, w)))
            .filter(|&(v, u, _)| cmap[v] != cmap[u])
            .map(|(_, _, w)| w)
            .sum();
        let coarse_weight: u64 = (0..c.n()).flat_map(|v| c.edges(v).map(|(_, w)| w)).sum();
        assert_eq!(fine_cut_weight, coarse_weight);
        for v in 0..c.n() {
            for (u, w) in c.edges(v) {
                assert!(c.edges(u).any(|(x, y)| x == v && y == w));
            }
        }
    }

    #[test]
    fn every_vertex_its_own_part() {
        let g = UndirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let map = multilevel_partition(&g, &cfg(4)).unwrap();
        assert_eq!(map.sizes(), vec![1, 1, 1, 1]);
    }
}
