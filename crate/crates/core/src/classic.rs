//! Deterministic core-periphery baselines: k-core decomposition, the
//! two-block edge-misfit optimum over degree-ordered prefixes, and k-core
//! shell binning.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

/// Core number of every node via bucket peeling, O(N + M).
pub fn k_core_decomposition(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
    let max_deg = deg.iter().copied().max().unwrap();

    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0usize;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pw] = u;
                    pos[w] = pu;
                    vert[pu] = w;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Result of the two-block edge-count fit.
#[derive(Debug, Clone)]
pub struct TwoBlockFit {
    /// Block 0 = core, block 1 = periphery.
    pub partition: Partition,
    pub core_size: usize,
    /// Misfit: missing core-core edges plus present periphery-periphery edges.
    pub z: u64,
}

/// Scans cores formed by degree-ordered prefixes (degree descending, node id
/// ascending) of sizes 1..=N-1 and returns the one minimizing
/// `Z = [C(k,2) - m_cc] + m_pp`; Z ties go to the smaller core.
pub fn two_block_partition(g: &Graph) -> Result<TwoBlockFit> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::invalid(
            "two-block fit needs at least two nodes",
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.neighbors(v).len()), v));

    let mut in_core = vec![false; n];
    let mut m_cc = 0u64;
    let mut m_pp = g.edge_count() as u64;
    let mut best_k = 0usize;
    let mut best_z = u64::MAX;
    for (i, &v) in order.iter().enumerate().take(n - 1) {
        let k = (i + 1) as u64;
        let to_core = g.neighbors(v).iter().filter(|&&u| in_core[u as usize]).count() as u64;
        let deg = g.neighbors(v).len() as u64;
        in_core[v] = true;
        m_cc += to_core;
        m_pp -= deg - to_core;
        let z = (k * (k - 1) / 2 - m_cc) + m_pp;
        if z < best_z {
            best_z = z;
            best_k = k as usize;
        }
    }
    let mut blocks = vec![1usize; n];
    for &v in order.iter().take(best_k) {
        blocks[v] = 0;
    }
    Ok(TwoBlockFit {
        partition: Partition::new(blocks, 2)?,
        core_size: best_k,
        z: best_z,
    })
}

/// Aggregates k-core shells into two bins: innermost shells (highest core
/// number first) are added to the core bin until its size is as close as
/// possible to `target_fraction * N`, distance ties going to the smaller
/// core. Shells are never split. A graph with a single shell yields the
/// trivial one-block partition.
pub fn binned_kcores(g: &Graph, target_fraction: f64) -> Result<Partition> {
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(Error::Invalid(format!(
            "target core fraction must lie in (0,1), got {target_fraction}"
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::invalid("empty graph"));
    }
    let core = k_core_decomposition(g);
    let mut shells: Vec<usize> = core.clone();
    shells.sort_unstable();
    shells.dedup();
    if shells.len() == 1 {
        return Partition::new(vec![0; n], 1);
    }
    shells.reverse(); // innermost first
    let target = target_fraction * n as f64;
    let mut cum = 0usize;
    let mut best_dist = f64::INFINITY;
    let mut best_cut = shells[0]; // core numbers >= cut form the core bin
    for &shell in shells.iter().take(shells.len() - 1) {
        cum += core.iter().filter(|&&c| c == shell).count();
        let dist = (cum as f64 - target).abs();
        if dist < best_dist {
            best_dist = dist;
            best_cut = shell;
        }
    }
    let blocks: Vec<usize> = core.iter().map(|&c| usize::from(c < best_cut)).collect();
    Partition::new(blocks, 2)
}
