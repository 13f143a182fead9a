//! Planted block-model generators and the two synthetic validation
//! experiments: discerning hub-and-spoke from layered structure, and
//! recovering the number of layers.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mdl::{self, Estimator, Evidence};
use crate::model::ModelKind;
use crate::partition::Partition;
use crate::rng::{child_seed, stream_rng};
use crate::sampler::{run_chains, ChainResult, GibbsConfig, Proposal};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A stochastic block model to draw graphs from: block sizes plus a full
/// symmetric density matrix.
#[derive(Debug, Clone, Serialize)]
pub struct PlantedConfig {
    pub sizes: Vec<usize>,
    /// `matrix[r][s]`: probability of an edge between a node in block r and
    /// one in block s.
    pub matrix: Vec<Vec<f64>>,
}

impl PlantedConfig {
    pub fn new(sizes: Vec<usize>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::invalid("block sizes must be positive"));
        }
        let l = sizes.len();
        if matrix.len() != l || matrix.iter().any(|row| row.len() != l) {
            return Err(Error::Invalid(format!(
                "density matrix must be {l}x{l} to match the block sizes"
            )));
        }
        for r in 0..l {
            for s in 0..l {
                let p = matrix[r][s];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Invalid(format!(
                        "density ({},{}) = {p} outside [0,1]",
                        r + 1,
                        s + 1
                    )));
                }
                if (p - matrix[s][r]).abs() > 1e-12 {
                    return Err(Error::invalid("density matrix must be symmetric"));
                }
            }
        }
        Ok(PlantedConfig { sizes, matrix })
    }

    /// Layered matrix from a density-per-layer vector: the density of a
    /// pair is that of its outermost layer.
    pub fn layered(sizes: Vec<usize>, densities: &[f64]) -> Result<Self> {
        if sizes.len() != densities.len() {
            return Err(Error::invalid("need one density per layer"));
        }
        let matrix = layered_matrix(densities);
        PlantedConfig::new(sizes, matrix)
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Ground-truth block assignment: block r occupies the contiguous id
    /// range after blocks 1..r.
    pub fn planted_partition(&self) -> Partition {
        let mut blocks = Vec::with_capacity(self.node_count());
        for (r, &n) in self.sizes.iter().enumerate() {
            blocks.extend(std::iter::repeat_n(r, n));
        }
        Partition::new(blocks, self.sizes.len()).expect("sizes validated non-empty")
    }

    /// Expected number of edges under the model.
    pub fn expected_edges(&self) -> f64 {
        let l = self.sizes.len();
        let mut total = 0.0;
        for r in 0..l {
            for s in r..l {
                let cap = if r == s {
                    self.sizes[r] as f64 * (self.sizes[r] as f64 - 1.0) / 2.0
                } else {
                    self.sizes[r] as f64 * self.sizes[s] as f64
                };
                total += cap * self.matrix[r][s];
            }
        }
        total
    }

    pub fn expected_mean_degree(&self) -> f64 {
        2.0 * self.expected_edges() / self.node_count() as f64
    }
}

/// `matrix[r][s] = densities[max(r, s)]`.
pub fn layered_matrix(densities: &[f64]) -> Vec<Vec<f64>> {
    let l = densities.len();
    (0..l)
        .map(|r| (0..l).map(|s| densities[r.max(s)]).collect())
        .collect()
}

/// Splits `n` into `parts` sizes differing by at most one (larger first).
pub fn split_even(n: usize, parts: usize) -> Vec<usize> {
    let base = n / parts;
    let extra = n % parts;
    (0..parts).map(|i| base + usize::from(i < extra)).collect()
}

/// Decodes linear index `k` into the `k`-th pair `(i, j)`, `i < j`, of
/// `0..n` in lexicographic order.
fn tri_decode(k: u64, n: u64) -> (u64, u64) {
    // row i starts at S(i) = i(2n - i - 1)/2
    let s = |i: u64| i * (2 * n - i - 1) / 2;
    let nf = n as f64;
    let disc = ((2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * k as f64).max(0.0);
    let guess = ((2.0 * nf - 1.0 - disc.sqrt()) / 2.0).floor().max(0.0) as u64;
    let mut i = guess.min(n - 2);
    while s(i + 1) <= k {
        i += 1;
    }
    while s(i) > k {
        i -= 1;
    }
    (i, i + 1 + (k - s(i)))
}

/// Appends each of `count` candidates independently with probability `p`,
/// visiting only the successes via geometric gaps.
fn sample_pairs(
    rng: &mut ChaCha8Rng,
    p: f64,
    count: u64,
    mut emit: impl FnMut(u64),
) {
    if p <= 0.0 || count == 0 {
        return;
    }
    if p >= 1.0 {
        for k in 0..count {
            emit(k);
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut cursor = 0u64;
    loop {
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if !gap.is_finite() || gap >= (count - cursor) as f64 {
            return;
        }
        cursor += gap as u64;
        emit(cursor);
        cursor += 1;
        if cursor >= count {
            return;
        }
    }
}

/// Draws a graph from the block model; nodes of block r occupy the id
/// range after blocks 1..r, matching [`PlantedConfig::planted_partition`].
pub fn sbm_generate(cfg: &PlantedConfig, rng: &mut ChaCha8Rng) -> Result<(Graph, Partition)> {
    let l = cfg.sizes.len();
    let n = cfg.node_count();
    let mut offsets = vec![0u64; l + 1];
    for r in 0..l {
        offsets[r + 1] = offsets[r] + cfg.sizes[r] as u64;
    }
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(cfg.expected_edges() as usize + 16);
    for r in 0..l {
        let nr = cfg.sizes[r] as u64;
        let within = nr * nr.saturating_sub(1) / 2;
        sample_pairs(rng, cfg.matrix[r][r], within, |k| {
            let (i, j) = tri_decode(k, nr);
            edges.push(((offsets[r] + i) as u32, (offsets[r] + j) as u32));
        });
        for s in r + 1..l {
            let ns = cfg.sizes[s] as u64;
            sample_pairs(rng, cfg.matrix[r][s], nr * ns, |k| {
                edges.push(((offsets[r] + k / ns) as u32, (offsets[s] + k % ns) as u32));
            });
        }
    }
    let g = Graph::from_edges(n, &edges)?;
    Ok((g, cfg.planted_partition()))
}

/// Three-block family interpolating between the two core-periphery types:
/// `delta = 0` collapses blocks 2 and 3 into one periphery (hub-and-spoke
/// with densities `(p*gamma, p, p/gamma)`), `delta = 1` yields three layers
/// with those same densities, and `gamma = 1` is uniform noise at `p`.
pub fn discernment_matrix(p: f64, gamma: f64, delta: f64) -> Result<Vec<Vec<f64>>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Invalid(format!("baseline density {p} outside (0,1]")));
    }
    if !(1.0..=1.0 / p).contains(&gamma) {
        return Err(Error::Invalid(format!(
            "structural clarity {gamma} outside [1, {}]",
            1.0 / p
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Invalid(format!(
            "interpolation parameter {delta} outside [0,1]"
        )));
    }
    let lo = p / gamma;
    let mix = p * (1.0 - delta) + lo * delta;
    Ok(vec![
        vec![p * gamma, p, mix],
        vec![p, p * delta + lo * (1.0 - delta), lo],
        vec![mix, lo, lo],
    ])
}

/// Geometric interpolation from `first` to `last` over `l` layers:
/// `p_r = first * (last/first)^{(r-1)/(l-1)}`.
pub fn geometric_densities(first: f64, last: f64, l: usize) -> Result<Vec<f64>> {
    if l < 2 {
        return Err(Error::invalid("need at least two layers to interpolate"));
    }
    for p in [first, last] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Invalid(format!("density {p} outside (0,1]")));
        }
    }
    let ratio = last / first;
    Ok((0..l)
        .map(|r| first * ratio.powf(r as f64 / (l - 1) as f64))
        .collect())
}

/// The single density that, applied to all pairs whose outermost layer is
/// `k..=l`, preserves the expected average degree of the original layered
/// network with equal layer sizes `n` (`k` is 1-based).
pub fn merged_layer_density(densities: &[f64], k: usize, n: u64) -> Result<f64> {
    let l = densities.len();
    if !(2..=l).contains(&k) {
        return Err(Error::Invalid(format!(
            "merge point {k} outside [2, {l}]"
        )));
    }
    let within = (n * n.saturating_sub(1) / 2) as f64;
    let cross = (n * n) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in k..=l {
        let pairs_factor = (r - 1) as f64;
        num += (within + cross * pairs_factor) * densities[r - 1];
        den += within + cross * pairs_factor;
    }
    Ok(num / den)
}

/// Density vector of the merged network: original densities below the
/// merge point, the degree-preserving density at and beyond it.
pub fn merged_density_vector(densities: &[f64], k: usize, n: u64) -> Result<Vec<f64>> {
    let q = merged_layer_density(densities, k, n)?;
    Ok(densities
        .iter()
        .enumerate()
        .map(|(i, &p)| if i + 1 < k { p } else { q })
        .collect())
}

/// Fitting budget for one model on one network.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitParams {
    /// Independent restarts; the best by description length is kept.
    pub restarts: usize,
    pub sweeps: usize,
    pub mcmc_per_node: usize,
    pub proposal: Proposal,
    /// Monte Carlo samples per description-length estimate.
    pub dl_samples: u64,
    pub estimator: Estimator,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            restarts: 3,
            sweeps: 250,
            mcmc_per_node: 10,
            proposal: Proposal::Uniform,
            dl_samples: 200_000,
            estimator: Estimator::Importance,
        }
    }
}

/// The partition a chain is scored at: the marginal-mode assignment, or the
/// best retained sample if the mode left a block empty.
pub fn scoring_partition(chain: &ChainResult) -> Result<Partition> {
    if !chain.map.sizes().contains(&0) {
        return Ok(chain.map.clone());
    }
    let burn = chain.log_posterior.len() - chain.samples.len();
    let best = (0..chain.samples.len())
        .max_by(|&a, &b| {
            chain.log_posterior[burn + a]
                .partial_cmp(&chain.log_posterior[burn + b])
                .unwrap()
        })
        .ok_or_else(|| Error::invalid("chain retained no samples"))?;
    Partition::new(
        chain.samples[best].iter().map(|&b| b as usize).collect(),
        chain.kind.block_count(),
    )
}

/// Runs `restarts` chains and keeps the one whose scored partition has the
/// smallest description length.
pub fn fit_best(
    g: &Graph,
    kind: ModelKind,
    fp: &FitParams,
    seed: u64,
) -> Result<(Evidence, ChainResult)> {
    let cfg = GibbsConfig {
        sweeps: fp.sweeps,
        mcmc_per_node: fp.mcmc_per_node,
        proposal: fp.proposal,
        seed,
    };
    let chains = run_chains(g, kind, &cfg, fp.restarts)?;
    let mut best: Option<(Evidence, ChainResult)> = None;
    for (i, chain) in chains.into_iter().enumerate() {
        let part = scoring_partition(&chain)?;
        let ev = mdl::estimate_evidence(
            g,
            &part,
            kind,
            fp.estimator,
            fp.dl_samples,
            child_seed(seed, 0x1000 + i as u64),
        )?;
        if best
            .as_ref()
            .is_none_or(|(b, _)| ev.estimate.bits < b.estimate.bits)
        {
            best = Some((ev, chain));
        }
    }
    Ok(best.expect("run_chains rejects zero restarts"))
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscernmentConfig {
    pub n: usize,
    /// Baseline density.
    pub p: f64,
    pub gammas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Networks per grid cell.
    pub reps: u32,
    pub fit: FitParams,
    pub seed: u64,
}

impl DiscernmentConfig {
    /// Desk-scale defaults: dense-block mean degree ~75, minutes not hours.
    pub fn desk() -> Self {
        DiscernmentConfig {
            n: 1500,
            p: 0.05,
            gammas: vec![1.0, 2.0, 4.0],
            deltas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            reps: 1,
            fit: FitParams::default(),
            seed: 0,
        }
    }
}

/// One generated network scored under both models.
#[derive(Debug, Clone, Serialize)]
pub struct DiscernmentCell {
    pub gamma: f64,
    pub delta: f64,
    pub rep: u32,
    pub seed: u64,
    pub edges: u64,
    pub hub_bits: f64,
    pub layered_bits: f64,
    /// Negative favors hub-and-spoke, positive favors layered.
    pub dl_hub_minus_layered_per_edge: f64,
    pub hub_ess: f64,
    pub layered_ess: f64,
}

/// Generates a network per (gamma, delta, rep) job and fits both models,
/// best of `fit.restarts` each. Jobs run in parallel; output order and all
/// randomness depend only on the config.
pub fn run_discernment_experiment(cfg: &DiscernmentConfig) -> Result<Vec<DiscernmentCell>> {
    let mut jobs = Vec::new();
    for &gamma in &cfg.gammas {
        for &delta in &cfg.deltas {
            for rep in 0..cfg.reps {
                jobs.push((gamma, delta, rep));
            }
        }
    }
    jobs.into_par_iter()
        .enumerate()
        .map(|(jidx, (gamma, delta, rep))| {
            let job_seed = child_seed(cfg.seed, jidx as u64);
            let matrix = discernment_matrix(cfg.p, gamma, delta)?;
            let planted = PlantedConfig::new(split_even(cfg.n, 3), matrix)?;
            let mut rng = stream_rng(child_seed(job_seed, 1), 0);
            let (g, _) = sbm_generate(&planted, &mut rng)?;
            let (hub, _) = fit_best(&g, ModelKind::HubSpoke, &cfg.fit, child_seed(job_seed, 10))?;
            let (lay, _) = fit_best(&g, ModelKind::Layered(3), &cfg.fit, child_seed(job_seed, 11))?;
            let edges = g.edge_count() as u64;
            Ok(DiscernmentCell {
                gamma,
                delta,
                rep,
                seed: job_seed,
                edges,
                hub_bits: hub.estimate.bits,
                layered_bits: lay.estimate.bits,
                dl_hub_minus_layered_per_edge: (hub.estimate.bits - lay.estimate.bits)
                    / edges.max(1) as f64,
                hub_ess: hub.estimate.ess,
                layered_ess: lay.estimate.ess,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LayersConfig {
    pub n: usize,
    /// Layers in the base network before merging.
    pub layers: usize,
    /// Innermost (densest) and outermost layer densities; the rest are
    /// geometrically spaced between them.
    pub p_inner: f64,
    pub p_outer: f64,
    /// Effective layer counts to plant (merge points).
    pub planted: Vec<usize>,
    /// Model sizes to fit at each planted count.
    pub fit_layers: Vec<usize>,
    pub networks_per_l: u32,
    pub fit: FitParams,
    pub seed: u64,
}

impl LayersConfig {
    /// Desk-scale defaults: six 200-node layers, densities rescaled from
    /// the reference regime to preserve mean degree.
    ///
    /// The chain schedule trades label moves for density redraws (many
    /// short sweeps): at this scale adjacent layers start with nearly
    /// equal empirical densities, and separation only nucleates when the
    /// density resample tracks composition fluctuations closely. The
    /// sample count keeps the Monte Carlo spread of a description-length
    /// estimate a few bits wide, well under the ~19-bit penalty that
    /// separates a planted layer count from an overfit split.
    pub fn desk() -> Self {
        LayersConfig {
            n: 1200,
            layers: 6,
            p_inner: 0.833_333,
            p_outer: 0.016_667,
            planted: vec![2, 3, 4],
            fit_layers: vec![2, 3, 4, 5, 6],
            networks_per_l: 10,
            fit: FitParams {
                sweeps: 2000,
                mcmc_per_node: 2,
                dl_samples: 30_000_000,
                ..FitParams::default()
            },
            seed: 0,
        }
    }

    /// Density vector with layers `planted_l..` merged degree-preservingly.
    pub fn planted_densities(&self, planted_l: usize) -> Result<Vec<f64>> {
        let base = geometric_densities(self.p_inner, self.p_outer, self.layers)?;
        let n = (self.n / self.layers) as u64;
        merged_density_vector(&base, planted_l, n)
    }
}

/// One (planted L, fitted l) evaluation on one network.
#[derive(Debug, Clone, Serialize)]
pub struct LayersCell {
    pub planted_l: usize,
    pub fitted_l: usize,
    pub network: u32,
    pub seed: u64,
    pub edges: u64,
    pub bits: f64,
    pub bits_per_edge: f64,
    pub ess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayersSummary {
    pub planted_l: usize,
    /// `(fitted_l, mean bits per edge over networks)`.
    pub mean_bits_per_edge: Vec<(usize, f64)>,
    /// Fitted layer count minimizing the mean description length.
    pub argmin_l: usize,
    /// Networks whose own best fitted count equals the planted count.
    pub correct_networks: u32,
    pub total_networks: u32,
}

/// For each planted layer count, generates networks with the outer layers
/// merged and fits the layered model across `fit_layers`.
pub fn run_layers_experiment(
    cfg: &LayersConfig,
) -> Result<(Vec<LayersCell>, Vec<LayersSummary>)> {
    if cfg.n % cfg.layers != 0 {
        return Err(Error::invalid("node count must divide evenly into layers"));
    }
    if cfg.fit_layers.iter().any(|&l| l < 2) {
        return Err(Error::invalid("fitted layer counts must be at least 2"));
    }
    let mut jobs = Vec::new();
    for &planted_l in &cfg.planted {
        for network in 0..cfg.networks_per_l {
            jobs.push((planted_l, network));
        }
    }
    let sizes = vec![cfg.n / cfg.layers; cfg.layers];
    let per_network: Vec<Vec<LayersCell>> = jobs
        .into_par_iter()
        .enumerate()
        .map(|(jidx, (planted_l, network))| {
            let job_seed = child_seed(cfg.seed, jidx as u64);
            let densities = cfg.planted_densities(planted_l)?;
            let planted = PlantedConfig::layered(sizes.clone(), &densities)?;
            let mut rng = stream_rng(child_seed(job_seed, 1), 0);
            let (g, _) = sbm_generate(&planted, &mut rng)?;
            let edges = g.edge_count() as u64;
            cfg.fit_layers
                .iter()
                .map(|&fitted_l| {
                    let (ev, _) = fit_best(
                        &g,
                        ModelKind::Layered(fitted_l),
                        &cfg.fit,
                        child_seed(job_seed, 20 + fitted_l as u64),
                    )?;
                    Ok(LayersCell {
                        planted_l,
                        fitted_l,
                        network,
                        seed: job_seed,
                        edges,
                        bits: ev.estimate.bits,
                        bits_per_edge: ev.estimate.bits_per_edge,
                        ess: ev.estimate.ess,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<LayersCell> = per_network.into_iter().flatten().collect();

    let mut summaries = Vec::new();
    for &planted_l in &cfg.planted {
        let mut mean_bpe = Vec::new();
        for &fitted_l in &cfg.fit_layers {
            let vals: Vec<f64> = cells
                .iter()
                .filter(|c| c.planted_l == planted_l && c.fitted_l == fitted_l)
                .map(|c| c.bits_per_edge)
                .collect();
            mean_bpe.push((fitted_l, vals.iter().sum::<f64>() / vals.len() as f64));
        }
        let argmin_l = mean_bpe
            .iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|&(l, _)| l)
            .unwrap_or(0);
        let mut correct = 0;
        for network in 0..cfg.networks_per_l {
            let best = cells
                .iter()
                .filter(|c| c.planted_l == planted_l && c.network == network)
                .min_by(|a, b| a.bits.partial_cmp(&b.bits).unwrap())
                .map(|c| c.fitted_l);
            if best == Some(planted_l) {
                correct += 1;
            }
        }
        summaries.push(LayersSummary {
            planted_l,
            mean_bits_per_edge: mean_bpe,
            argmin_l,
            correct_networks: correct,
            total_networks: cfg.networks_per_l,
        });
    }
    Ok((cells, summaries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_decode_matches_enumeration() {
        for n in 2..=40u64 {
            let mut k = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    assert_eq!(tri_decode(k, n), (i, j), "n={n} k={k}");
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn degenerate_matrices() {
        let zero = PlantedConfig::new(vec![4, 4], vec![vec![0.0; 2]; 2]).unwrap();
        let one = PlantedConfig::new(vec![4, 4], vec![vec![1.0; 2]; 2]).unwrap();
        let mut rng = stream_rng(1, 0);
        let (g, p) = sbm_generate(&zero, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(p.sizes(), vec![4, 4]);
        let (g, _) = sbm_generate(&one, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 8 * 7 / 2);
    }

    #[test]
    fn single_block_mean_degree_within_three_sigma() {
        let cfg = PlantedConfig::new(vec![2000], vec![vec![0.01]]).unwrap();
        let expected = cfg.expected_mean_degree();
        assert!((expected - 19.99).abs() < 1e-9);
        let pairs: f64 = 2000.0 * 1999.0 / 2.0;
        // stderr of the mean degree over 10 draws
        let sigma = (pairs * 0.01 * 0.99 / 10.0).sqrt() * 2.0 / 2000.0;
        let mut rng = stream_rng(2, 0);
        let mut acc = 0.0;
        for _ in 0..10 {
            let (g, _) = sbm_generate(&cfg, &mut rng).unwrap();
            acc += g.mean_degree();
        }
        let sim = acc / 10.0;
        assert!((sim - expected).abs() < 3.0 * sigma, "{sim} vs {expected}");
    }

    #[test]
    fn per_class_edge_counts_are_binomial() {
        let cfg = PlantedConfig::new(
            vec![60, 90],
            vec![vec![0.4, 0.1], vec![0.1, 0.02]],
        )
        .unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..5 {
            let (g, part) = sbm_generate(&cfg, &mut rng).unwrap();
            let stats = crate::model::block_stats(&g, &part).unwrap();
            for (r, s, p) in [(0, 0, 0.4), (0, 1, 0.1), (1, 1, 0.02)] {
                let cap = stats.capacity_at(r, s) as f64;
                let mean = cap * p;
                let sd = (cap * p * (1.0 - p)).sqrt();
                let z = (stats.m_at(r, s) as f64 - mean) / sd;
                assert!(z.abs() < 4.5, "class ({r},{s}): z = {z}");
            }
        }
    }

    #[test]
    fn discernment_matrix_limits() {
        let p = 0.05;
        let flat = discernment_matrix(p, 1.0, 0.3).unwrap();
        for row in &flat {
            for &v in row {
                assert!((v - p).abs() < 1e-15);
            }
        }
        let hub = discernment_matrix(p, 4.0, 0.0).unwrap();
        assert_eq!(hub[1], hub[2], "periphery blocks must be identical");
        let lay = discernment_matrix(p, 4.0, 1.0).unwrap();
        assert_eq!(lay, layered_matrix(&[p * 4.0, p, p / 4.0]));
        for (gamma, delta) in [(2.0, 0.3), (7.5, 0.9), (1.0, 1.0)] {
            let m = discernment_matrix(p, gamma, delta).unwrap();
            for r in 0..3 {
                for s in 0..3 {
                    assert_eq!(m[r][s], m[s][r]);
                    assert!((0.0..=1.0).contains(&m[r][s]));
                }
            }
        }
        assert!(discernment_matrix(p, 0.9, 0.5).is_err());
        assert!(discernment_matrix(p, 21.0, 0.5).is_err());
        assert!(discernment_matrix(p, 2.0, -0.1).is_err());
        assert!(discernment_matrix(p, 2.0, 1.1).is_err());
        assert!(discernment_matrix(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn geometric_densities_shape() {
        let d = geometric_densities(0.002, 0.1, 6).unwrap();
        assert_eq!(d.len(), 6);
        assert!((d[0] - 0.002).abs() < 1e-15);
        assert!((d[5] - 0.1).abs() < 1e-15);
        let ratios: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
        for r in &ratios {
            assert!((r - ratios[0]).abs() < 1e-12);
        }
        let desc = geometric_densities(0.8, 0.01, 4).unwrap();
        assert!(desc.windows(2).all(|w| w[0] > w[1]));
        assert!(geometric_densities(0.1, 0.2, 1).is_err());
    }

    #[test]
    fn merged_density_identities() {
        let uniform = vec![0.07; 5];
        for k in 2..=5 {
            let q = merged_layer_density(&uniform, k, 100).unwrap();
            assert!((q - 0.07).abs() < 1e-15);
        }
        let d = geometric_densities(0.002, 0.1, 6).unwrap();
        let q_last = merged_layer_density(&d, 6, 50).unwrap();
        assert!((q_last - d[5]).abs() < 1e-15);
        assert!(merged_layer_density(&d, 1, 50).is_err());
        assert!(merged_layer_density(&d, 7, 50).is_err());
    }

    #[test]
    fn merging_preserves_expected_degree() {
        for dens in [
            geometric_densities(0.002, 0.1, 6).unwrap(),
            geometric_densities(0.833_333, 0.016_667, 6).unwrap(),
        ] {
            let sizes = vec![200usize; 6];
            let base = PlantedConfig::layered(sizes.clone(), &dens).unwrap();
            let kappa = base.expected_mean_degree();
            for k in 2..=6 {
                let merged = merged_density_vector(&dens, k, 200).unwrap();
                let cfg = PlantedConfig::layered(sizes.clone(), &merged).unwrap();
                assert!(
                    (cfg.expected_mean_degree() - kappa).abs() < 1e-9,
                    "k={k}: {} vs {kappa}",
                    cfg.expected_mean_degree()
                );
            }
        }
    }

    #[test]
    fn merged_density_matches_exact_rational_arithmetic() {
        use num::rational::BigRational;
        use num::{BigInt, FromPrimitive, ToPrimitive, Zero};
        let rat = |x: f64| BigRational::from_f64(x).unwrap();
        let dens = [0.002, 0.004_573, 0.010_456, 0.023_908, 0.054_668, 0.1];
        let n = 167u64;
        let l = dens.len();
        for k in 2..=l {
            let within = BigRational::from(BigInt::from(n * (n - 1) / 2));
            let cross = BigRational::from(BigInt::from(n * n));
            let mut num = BigRational::zero();
            let mut den = BigRational::zero();
            for r in k..=l {
                let w = &within + &cross * BigRational::from(BigInt::from(r as u64 - 1));
                num += &w * rat(dens[r - 1]);
                den += w;
            }
            let exact = (num / den).to_f64().unwrap();
            let got = merged_layer_density(&dens, k, n).unwrap();
            assert!((got - exact).abs() < 1e-15, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn split_even_covers_all() {
        assert_eq!(split_even(1500, 3), vec![500, 500, 500]);
        assert_eq!(split_even(10, 3), vec![4, 3, 3]);
        assert_eq!(split_even(2, 2), vec![1, 1]);
    }

    #[test]
    fn planted_partition_layout() {
        let cfg = PlantedConfig::new(
            vec![2, 3],
            vec![vec![0.5, 0.1], vec![0.1, 0.05]],
        )
        .unwrap();
        let p = cfg.planted_partition();
        assert_eq!(p.blocks, vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn config_validation() {
        assert!(PlantedConfig::new(vec![], vec![]).is_err());
        assert!(PlantedConfig::new(vec![2, 0], vec![vec![0.1; 2]; 2]).is_err());
        assert!(PlantedConfig::new(vec![2], vec![vec![0.1, 0.2]]).is_err());
        assert!(PlantedConfig::new(vec![2, 2], vec![vec![0.1, 0.2], vec![0.3, 0.1]]).is_err());
        assert!(PlantedConfig::new(vec![2, 2], vec![vec![1.1, 0.2], vec![0.2, 0.1]]).is_err());
    }

    #[test]
    fn discernment_smoke_signs() {
        // small but sharply separated instance: the sign structure should
        // already be visible far below desk scale
        let cfg = DiscernmentConfig {
            n: 150,
            p: 0.2,
            gammas: vec![4.0],
            deltas: vec![0.0, 1.0],
            reps: 1,
            fit: FitParams {
                restarts: 2,
                sweeps: 80,
                dl_samples: 30_000,
                ..FitParams::default()
            },
            seed: 5,
        };
        let cells = run_discernment_experiment(&cfg).unwrap();
        assert_eq!(cells.len(), 2);
        let at = |delta: f64| {
            cells
                .iter()
                .find(|c| c.delta == delta)
                .unwrap()
                .dl_hub_minus_layered_per_edge
        };
        assert!(at(0.0) < 0.0, "hub-planted cell favored layered: {}", at(0.0));
        assert!(at(1.0) > 0.0, "layer-planted cell favored hub: {}", at(1.0));
    }

    #[test]
    fn layers_experiment_shape() {
        let cfg = LayersConfig {
            n: 180,
            layers: 3,
            p_inner: 0.6,
            p_outer: 0.05,
            planted: vec![2],
            fit_layers: vec![2, 3],
            networks_per_l: 2,
            fit: FitParams {
                restarts: 1,
                sweeps: 60,
                dl_samples: 20_000,
                ..FitParams::default()
            },
            seed: 6,
        };
        let (cells, summaries) = run_layers_experiment(&cfg).unwrap();
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.bits.is_finite() && c.bits > 0.0));
        assert_eq!(summaries.len(), 1);
        assert_eq!(summaries[0].total_networks, 2);
        assert_eq!(summaries[0].mean_bits_per_edge.len(), 2);
        // output must not depend on scheduling
        let (cells2, _) = run_layers_experiment(&cfg).unwrap();
        assert_eq!(cells.len(), cells2.len());
        for (a, b) in cells.iter().zip(&cells2) {
            assert_eq!(a.bits, b.bits);
            assert_eq!(a.seed, b.seed);
        }
    }
}
