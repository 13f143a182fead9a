//! Constrained block models: kinds, ordered densities, sufficient
//! statistics, Bernoulli likelihood, and the partition/density priors.
//!
//! Both models place every unordered node pair in a density class. The
//! hub-and-spoke model has two blocks and three free densities
//! `p11 > p12 > p22`; the layered model has `l` blocks with densities
//! `p_1 > ... > p_l` and a pair `(r, s)` uses the density of its outermost
//! block, `p_max(r,s)`. Densities live in the open interval (0, 1) and the
//! prior over them is uniform on the ordered region (volume `1/dim!`).

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    /// Two blocks (core, periphery); free densities (p11, p12, p22).
    HubSpoke,
    /// `l` layers, block 1 innermost. `Layered(1)` is the degenerate
    /// one-block case: meaningful for description length of a trivial
    /// partition, rejected by inference.
    Layered(usize),
}

impl ModelKind {
    pub fn block_count(&self) -> usize {
        match self {
            ModelKind::HubSpoke => 2,
            ModelKind::Layered(l) => *l,
        }
    }

    /// Number of free densities (3 for hub-and-spoke, `l` for layered).
    pub fn density_dim(&self) -> usize {
        match self {
            ModelKind::HubSpoke => 3,
            ModelKind::Layered(l) => *l,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelKind::Layered(0) => Err(Error::invalid("layered model needs at least one layer")),
            _ => Ok(()),
        }
    }

    /// Index into the density vector governing block pair `(r, s)`.
    pub fn density_index(&self, r: usize, s: usize) -> usize {
        match self {
            ModelKind::HubSpoke => r + s,
            ModelKind::Layered(_) => r.max(s),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::HubSpoke => write!(f, "hub-spoke"),
            ModelKind::Layered(l) => write!(f, "layered-{l}"),
        }
    }
}

/// Strictly decreasing densities in (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityVector(Vec<f64>);

impl DensityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("density vector is empty"));
        }
        if values.iter().any(|p| !p.is_finite() || *p <= 0.0 || *p >= 1.0) {
            return Err(Error::Invalid(format!(
                "densities must lie strictly inside (0,1): {values:?}"
            )));
        }
        if values.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Invalid(format!(
                "densities must be strictly decreasing: {values:?}"
            )));
        }
        Ok(DensityVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sufficient statistics of a partition under a block model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockStats {
    pub block_count: usize,
    /// Nodes per block.
    pub sizes: Vec<u64>,
    /// `m[r * block_count + s]`: edges between blocks r and s (symmetric;
    /// diagonal entries count each within-block edge once).
    pub m: Vec<u64>,
    /// Pair capacities: `n_r * n_s` off-diagonal, `n_r (n_r - 1) / 2` on it.
    pub capacity: Vec<u64>,
    /// `alpha[s]`: edges over all pairs whose outermost block is s.
    pub alpha: Vec<u64>,
    /// `beta[s]`: non-edges over the same pairs.
    pub beta: Vec<u64>,
}

impl BlockStats {
    pub fn m_at(&self, r: usize, s: usize) -> u64 {
        self.m[r * self.block_count + s]
    }

    pub fn capacity_at(&self, r: usize, s: usize) -> u64 {
        self.capacity[r * self.block_count + s]
    }

    pub(crate) fn from_assignment(g: &Graph, blocks: &[u16], block_count: usize) -> Result<Self> {
        let l = block_count;
        if l == 0 {
            return Err(Error::invalid("partition needs at least one block"));
        }
        let mut sizes = vec![0u64; l];
        for (v, &b) in blocks.iter().enumerate() {
            let b = b as usize;
            if b >= l {
                return Err(Error::Invalid(format!(
                    "node {v} assigned to block {} but only {l} blocks exist",
                    b + 1
                )));
            }
            sizes[b as usize] += 1;
        }
        if let Some(r) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::Invalid(format!(
                "block {} is empty (outside the partition prior's support)",
                r + 1
            )));
        }
        let mut m = vec![0u64; l * l];
        for (u, &bu) in blocks.iter().enumerate() {
            for &v in g.neighbors(u) {
                let v = v as usize;
                if v > u {
                    let bv = blocks[v] as usize;
                    let (r, s) = (bu as usize, bv);
                    m[r * l + s] += 1;
                    if r != s {
                        m[s * l + r] += 1;
                    }
                }
            }
        }
        let capacity = capacities(&sizes);
        let (alpha, beta) = layer_exponents(&m, &capacity, l);
        Ok(BlockStats {
            block_count: l,
            sizes,
            m,
            capacity,
            alpha,
            beta,
        })
    }
}

pub(crate) fn capacities(sizes: &[u64]) -> Vec<u64> {
    let l = sizes.len();
    let mut capacity = vec![0u64; l * l];
    for r in 0..l {
        for s in 0..l {
            capacity[r * l + s] = if r == s {
                sizes[r] * (sizes[r].saturating_sub(1)) / 2
            } else {
                sizes[r] * sizes[s]
            };
        }
    }
    capacity
}

pub(crate) fn layer_exponents(m: &[u64], capacity: &[u64], l: usize) -> (Vec<u64>, Vec<u64>) {
    let mut alpha = vec![0u64; l];
    let mut beta = vec![0u64; l];
    for r in 0..l {
        for s in r..l {
            alpha[s] += m[r * l + s];
            beta[s] += capacity[r * l + s] - m[r * l + s];
        }
    }
    (alpha, beta)
}

/// Counts edges, capacities, and layer exponents of `p` on `g`.
/// Errors if any block is empty or the assignment is out of range.
pub fn block_stats(g: &Graph, p: &Partition) -> Result<BlockStats> {
    if p.len() != g.node_count() {
        return Err(Error::Invalid(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            g.node_count()
        )));
    }
    if p.block_count > u16::MAX as usize {
        return Err(Error::invalid("too many blocks"));
    }
    let blocks: Vec<u16> = p.blocks.iter().map(|&b| b as u16).collect();
    BlockStats::from_assignment(g, &blocks, p.block_count)
}

/// Bernoulli log-likelihood of the observed edges given densities `p`.
pub fn log_likelihood(stats: &BlockStats, kind: ModelKind, p: &DensityVector) -> Result<f64> {
    if kind.block_count() != stats.block_count {
        return Err(Error::Invalid(format!(
            "model has {} blocks, stats have {}",
            kind.block_count(),
            stats.block_count
        )));
    }
    if p.len() != kind.density_dim() {
        return Err(Error::Invalid(format!(
            "model needs {} densities, got {}",
            kind.density_dim(),
            p.len()
        )));
    }
    Ok(log_likelihood_slice(stats, kind, p.values()))
}

/// Likelihood on a raw density slice, skipping ordering validation; for
/// inner loops whose draws are ordered by construction.
pub(crate) fn log_likelihood_slice(stats: &BlockStats, kind: ModelKind, pv: &[f64]) -> f64 {
    match kind {
        ModelKind::Layered(_) => stats
            .alpha
            .iter()
            .zip(&stats.beta)
            .zip(pv)
            .map(|((&a, &b), &d)| a as f64 * d.ln() + b as f64 * (-d).ln_1p())
            .sum(),
        ModelKind::HubSpoke => {
            let mut total = 0.0;
            for (r, s) in [(0, 0), (0, 1), (1, 1)] {
                let d = pv[kind.density_index(r, s)];
                let m = stats.m_at(r, s) as f64;
                let hole = (stats.capacity_at(r, s) - stats.m_at(r, s)) as f64;
                total += m * d.ln() + hole * (-d).ln_1p();
            }
            total
        }
    }
}

fn ln_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// Log prior of a partition: uniform over ordered size compositions and
/// block counts, `(prod_r n_r!) / N! * C(N-1, l-1)^{-1} * N^{-1}`.
/// All blocks must be non-empty.
pub fn log_prior_theta(sizes: &[u64]) -> Result<f64> {
    if sizes.is_empty() || sizes.iter().any(|&n| n == 0) {
        return Err(Error::invalid(
            "partition prior requires every block non-empty",
        ));
    }
    let l = sizes.len();
    let n: u64 = sizes.iter().sum();
    let ln_sizes: f64 = sizes.iter().map(|&k| ln_factorial(k as usize)).sum();
    let ln_comp = ln_factorial(n as usize - 1)
        - ln_factorial(l - 1)
        - ln_factorial((n as usize) - l);
    Ok(ln_sizes - ln_factorial(n as usize) - ln_comp - (n as f64).ln())
}

/// Log prior density of an ordered density vector: `ln(dim!)` on its
/// support (the vector's own invariant guarantees membership).
pub fn log_prior_densities(p: &DensityVector) -> f64 {
    ln_factorial(p.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num::bigint::BigInt;
    use num::rational::BigRational;
    use num::{One, ToPrimitive};
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn triangle_stats() {
        let p = Partition::new(vec![0, 0, 1], 2).unwrap();
        let s = block_stats(&triangle(), &p).unwrap();
        assert_eq!(s.sizes, vec![2, 1]);
        assert_eq!(s.m_at(0, 0), 1);
        assert_eq!(s.m_at(0, 1), 1 + 1);
        assert_eq!(s.m_at(1, 1), 0);
        assert_eq!(s.capacity_at(0, 0), 1);
        assert_eq!(s.capacity_at(0, 1), 2);
        assert_eq!(s.capacity_at(1, 1), 0);
        assert_eq!(s.alpha, vec![1, 2]);
        assert_eq!(s.beta, vec![0, 0]);
    }

    #[test]
    fn empty_block_rejected() {
        let p = Partition::new(vec![0, 0, 0], 2).unwrap();
        assert!(block_stats(&triangle(), &p).is_err());
    }

    #[test]
    fn hub_spoke_likelihood_matches_hand_value() {
        let p = Partition::new(vec![0, 0, 1], 2).unwrap();
        let s = block_stats(&triangle(), &p).unwrap();
        let d = DensityVector::new(vec![0.9, 0.5, 0.1]).unwrap();
        let ll = log_likelihood(&s, ModelKind::HubSpoke, &d).unwrap();
        assert_relative_eq!(ll, 0.9f64.ln() + 2.0 * 0.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn density_vector_enforces_order_and_range() {
        assert!(DensityVector::new(vec![0.9, 0.5, 0.1]).is_ok());
        assert!(DensityVector::new(vec![0.5, 0.5]).is_err());
        assert!(DensityVector::new(vec![0.1, 0.5]).is_err());
        assert!(DensityVector::new(vec![1.0, 0.5]).is_err());
        assert!(DensityVector::new(vec![0.5, 0.0]).is_err());
        assert!(DensityVector::new(vec![]).is_err());
    }

    #[test]
    fn prior_matches_hand_computed_cases() {
        // N=3, sizes (2,1): (2!1!/3!) * C(2,1)^{-1} * 3^{-1} = 1/18
        assert_relative_eq!(
            log_prior_theta(&[2, 1]).unwrap(),
            (1.0f64 / 18.0).ln(),
            epsilon = 1e-12
        );
        // N=2, sizes (1,1): (1/2) * 1 * (1/2) = 1/4
        assert_relative_eq!(
            log_prior_theta(&[1, 1]).unwrap(),
            0.25f64.ln(),
            epsilon = 1e-12
        );
        assert!(log_prior_theta(&[2, 0]).is_err());
        assert!(log_prior_theta(&[]).is_err());
    }

    /// Exact rational oracle for the partition prior.
    fn prior_exact(sizes: &[u64]) -> BigRational {
        fn fact(k: u64) -> BigInt {
            (1..=k).map(BigInt::from).product::<BigInt>().max(BigInt::one())
        }
        fn binom(n: u64, k: u64) -> BigInt {
            fact(n) / (fact(k) * fact(n - k))
        }
        let n: u64 = sizes.iter().sum();
        let l = sizes.len() as u64;
        let num: BigInt = sizes.iter().map(|&k| fact(k)).product();
        BigRational::new(num, fact(n) * binom(n - 1, l - 1) * BigInt::from(n))
    }

    proptest! {
        #[test]
        fn prior_matches_exact_rational(sizes in proptest::collection::vec(1u64..25, 1..6)) {
            let exact = prior_exact(&sizes).to_f64().unwrap().ln();
            let got = log_prior_theta(&sizes).unwrap();
            prop_assert!((got - exact).abs() < 1e-9 * exact.abs().max(1.0));
        }

        #[test]
        fn layered_likelihood_equals_generic_blockwise_form(
            seed in 0u64..500,
            l in 1usize..5,
        ) {
            use rand::Rng;
            let mut rng = crate::rng::stream_rng(seed, 0);
            let n = l + rng.random_range(0..6usize);
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if rng.random::<f64>() < 0.4 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let mut blocks: Vec<usize> = (0..n).map(|v| v % l).collect();
            use rand::seq::SliceRandom;
            blocks.shuffle(&mut rng);
            let part = Partition::new(blocks, l).unwrap();
            let stats = block_stats(&g, &part).unwrap();

            let mut vals: Vec<f64> = (0..l).map(|_| rng.random_range(0.001..0.999)).collect();
            vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
            vals.dedup();
            prop_assume!(vals.len() == l);
            let dens = DensityVector::new(vals.clone()).unwrap();

            let kind = ModelKind::Layered(l);
            let fast = log_likelihood(&stats, kind, &dens).unwrap();
            let mut slow = 0.0;
            for r in 0..l {
                for s in r..l {
                    let d = vals[kind.density_index(r, s)];
                    let m = stats.m_at(r, s) as f64;
                    let cap = stats.capacity_at(r, s) as f64;
                    slow += m * d.ln() + (cap - m) * (1.0 - d).ln();
                }
            }
            prop_assert!((fast - slow).abs() < 1e-9 * slow.abs().max(1.0));
        }
    }
}
