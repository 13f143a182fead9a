//! Gibbs sampler for the constrained block models.
//!
//! One sweep makes `mcmc_per_node * N` Metropolis-Hastings label moves (each
//! picks a random node and proposes a block) and then redraws the ordered
//! densities sequentially from truncated Beta conditionals, each truncated
//! to the interval between its already-updated upper neighbor and its
//! not-yet-updated lower neighbor (virtual bounds 1 and 0 at the ends).
//! Block statistics are maintained incrementally, O(deg + l) per label move.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{self, BlockStats, DensityVector, ModelKind};
use crate::partition::Partition;
use crate::rng::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

/// Label-move proposal distribution.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Proposal {
    /// New block drawn uniformly from all blocks.
    Uniform,
    /// Edge-guided proposal: follow a random neighbor's block `s`, then pick
    /// the target in proportion to `s`'s connectivity profile, smoothed by
    /// `epsilon`. Asymmetric; corrected by its Hastings ratio.
    Neighborhood { epsilon: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct GibbsConfig {
    /// Gibbs sweeps in total; the first half is burn-in.
    pub sweeps: usize,
    /// MH label moves per node per sweep.
    pub mcmc_per_node: usize,
    pub proposal: Proposal,
    pub seed: u64,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            sweeps: 150,
            mcmc_per_node: 10,
            proposal: Proposal::Uniform,
            seed: 0,
        }
    }
}

/// Output of one chain.
#[derive(Debug, Clone)]
pub struct ChainResult {
    pub kind: ModelKind,
    /// Marginal-mode assignment; ties go to the innermost block.
    pub map: Partition,
    /// Row-normalized posterior block marginals, `N x l` row-major.
    pub marginals: Vec<f64>,
    /// Posterior coreness per node (see [`coreness`]).
    pub coreness: Vec<f64>,
    /// Retained assignments, one per post-burn-in sweep.
    pub samples: Vec<Vec<u16>>,
    /// Mean of the retained density draws, per density index.
    pub mean_densities: Vec<f64>,
    /// Accepted moves / proposed moves over the whole run (no-op proposals
    /// of the current block count as accepted).
    pub acceptance_rate: f64,
    /// Log posterior (likelihood + both priors) after every sweep.
    pub log_posterior: Vec<f64>,
    /// Approximate operation count, for complexity diagnostics.
    pub work_units: u64,
    pub seed: u64,
}

/// Draws from a Beta(alpha+1, beta+1) density truncated to (lo, hi).
///
/// When the untruncated mean lies inside the interval, naive Beta draws are
/// tried first (up to 1000); otherwise, or after exhausting the tries, falls
/// back to uniform proposals accepted against the density's supremum on the
/// interval.
pub fn sample_truncated_beta(
    rng: &mut impl Rng,
    alpha: f64,
    beta: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::Invalid(format!(
            "truncation interval ({lo}, {hi}) is not a sub-interval of (0,1)"
        )));
    }
    if !alpha.is_finite() || !beta.is_finite() || alpha < 0.0 || beta < 0.0 {
        return Err(Error::Invalid(format!(
            "exponents must be non-negative, got alpha={alpha}, beta={beta}"
        )));
    }
    let mean = (alpha + 1.0) / (alpha + beta + 2.0);
    if lo < mean && mean < hi {
        let direct = Beta::new(alpha + 1.0, beta + 1.0)
            .map_err(|e| Error::Numerical(format!("beta distribution: {e}")))?;
        for _ in 0..1000 {
            let x = direct.sample(rng);
            if lo < x && x < hi {
                return Ok(x);
            }
        }
    }
    // exponent-0 terms skipped so the endpoints stay finite (0^0 = 1)
    let logf = |x: f64| -> f64 {
        let mut v = 0.0;
        if alpha > 0.0 {
            v += alpha * x.ln();
        }
        if beta > 0.0 {
            v += beta * (-x).ln_1p();
        }
        v
    };
    let mode = if alpha + beta > 0.0 {
        alpha / (alpha + beta)
    } else {
        0.5
    };
    let log_sup = logf(mode.clamp(lo, hi));
    for _ in 0..100_000_000u64 {
        let u = lo + (hi - lo) * rng.random::<f64>();
        if u <= lo || u >= hi {
            continue;
        }
        if rng.random::<f64>().ln() < logf(u) - log_sup {
            return Ok(u);
        }
    }
    Err(Error::Numerical(format!(
        "truncated beta sampler failed to accept (alpha={alpha}, beta={beta}, interval=({lo},{hi}))"
    )))
}

/// Posterior coreness `c_i = 1 - (1/l) * sum_r rank(r) * P(theta_i = r)`
/// with ranks 1..=l from the innermost block outward. The score spans
/// `[0, 1 - 1/l]`: full confidence in the innermost block yields `1 - 1/l`,
/// full confidence in the outermost yields 0.
pub fn coreness(marginals: &[f64], l: usize) -> Result<Vec<f64>> {
    if l == 0 || marginals.len() % l != 0 {
        return Err(Error::invalid("marginals are not an N x l table"));
    }
    Ok(marginals
        .chunks_exact(l)
        .map(|row| {
            let expected_rank: f64 = row
                .iter()
                .enumerate()
                .map(|(r, &p)| (r + 1) as f64 * p)
                .sum();
            1.0 - expected_rank / l as f64
        })
        .collect())
}

struct State<'g> {
    g: &'g Graph,
    kind: ModelKind,
    l: usize,
    dim: usize,
    theta: Vec<u16>,
    sizes: Vec<u64>,
    /// Full symmetric `l x l` pair edge counts (diagonal counted once).
    m: Vec<u64>,
    /// Total degree per block (for the neighborhood proposal).
    block_degree: Vec<u64>,
    dens: Vec<f64>,
    logit: Vec<f64>,
    log1m: Vec<f64>,
    dcount: Vec<u64>,
    touched: Vec<u16>,
    work: u64,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph, kind: ModelKind, theta: Vec<u16>) -> Self {
        let l = kind.block_count();
        let dim = kind.density_dim();
        let mut state = State {
            g,
            kind,
            l,
            dim,
            theta,
            sizes: vec![0; l],
            m: vec![0; l * l],
            block_degree: vec![0; l],
            dens: vec![0.0; dim],
            logit: vec![0.0; dim],
            log1m: vec![0.0; dim],
            dcount: vec![0; l],
            touched: Vec::with_capacity(l),
            work: 0,
        };
        state.recount();
        state
    }

    fn recount(&mut self) {
        self.sizes.fill(0);
        self.m.fill(0);
        self.block_degree.fill(0);
        for (v, &b) in self.theta.iter().enumerate() {
            self.sizes[b as usize] += 1;
            self.block_degree[b as usize] += self.g.neighbors(v).len() as u64;
            for &u in self.g.neighbors(v) {
                let u = u as usize;
                if u > v {
                    let (r, s) = (b as usize, self.theta[u] as usize);
                    self.m[r * self.l + s] += 1;
                    if r != s {
                        self.m[s * self.l + r] += 1;
                    }
                }
            }
        }
    }

    /// Materializes full statistics from the live counters.
    fn stats(&self) -> BlockStats {
        let capacity = model::capacities(&self.sizes);
        let (alpha, beta) = model::layer_exponents(&self.m, &capacity, self.l);
        BlockStats {
            block_count: self.l,
            sizes: self.sizes.clone(),
            m: self.m.clone(),
            capacity,
            alpha,
            beta,
        }
    }

    /// Relabels blocks by decreasing within-block density (stable in the
    /// original label on ties) so the initial state starts inside the
    /// ordered-density regime.
    fn order_blocks_by_density(&mut self) {
        let mut order: Vec<usize> = (0..self.l).collect();
        let density = |r: usize| -> f64 {
            let cap = self.sizes[r] * self.sizes[r].saturating_sub(1) / 2;
            if cap == 0 {
                0.0
            } else {
                self.m[r * self.l + r] as f64 / cap as f64
            }
        };
        order.sort_by(|&a, &b| density(b).partial_cmp(&density(a)).unwrap().then(a.cmp(&b)));
        let mut new_label = vec![0u16; self.l];
        for (new, &old) in order.iter().enumerate() {
            new_label[old] = new as u16;
        }
        for b in self.theta.iter_mut() {
            *b = new_label[*b as usize];
        }
        self.recount();
    }

    fn refresh_density_caches(&mut self) {
        for k in 0..self.dim {
            let p = self.dens[k];
            self.logit[k] = p.ln() - (-p).ln_1p();
            self.log1m[k] = (-p).ln_1p();
        }
    }

    /// Exponent pair (edges, holes) for density index `k` given the current
    /// counts.
    fn density_exponents(&self) -> Vec<(u64, u64)> {
        match self.kind {
            ModelKind::HubSpoke => {
                let cap = model::capacities(&self.sizes);
                [(0usize, 0usize), (0, 1), (1, 1)]
                    .iter()
                    .map(|&(r, s)| {
                        let m = self.m[r * self.l + s];
                        (m, cap[r * self.l + s] - m)
                    })
                    .collect()
            }
            ModelKind::Layered(_) => {
                let cap = model::capacities(&self.sizes);
                let (alpha, beta) = model::layer_exponents(&self.m, &cap, self.l);
                alpha.into_iter().zip(beta).collect()
            }
        }
    }

    /// Sequential conditional redraw of all densities, outermost-in.
    fn sample_densities(&mut self, rng: &mut ChaCha8Rng, initial: bool) -> Result<()> {
        let exps = self.density_exponents();
        for k in 0..self.dim {
            let (a, b) = exps[k];
            let lo = if initial || k + 1 >= self.dim {
                0.0
            } else {
                self.dens[k + 1]
            };
            let hi = if k == 0 { 1.0 } else { self.dens[k - 1] };
            self.dens[k] = sample_truncated_beta(rng, a as f64, b as f64, lo, hi)?;
        }
        self.work += (self.l * self.l + self.dim) as u64;
        self.refresh_density_caches();
        Ok(())
    }

    /// Per-block neighbor counts of `v`; returns degree.
    fn scan_neighbors(&mut self, v: usize) -> u64 {
        for &b in &self.touched {
            self.dcount[b as usize] = 0;
        }
        self.touched.clear();
        for &u in self.g.neighbors(v) {
            let b = self.theta[u as usize];
            if self.dcount[b as usize] == 0 {
                self.touched.push(b);
            }
            self.dcount[b as usize] += 1;
        }
        self.g.neighbors(v).len() as u64
    }

    /// Log-likelihood change of moving a node (with neighbor profile
    /// `dcount`) from block `r` to block `t`.
    fn delta_log_likelihood(&self, r: usize, t: usize) -> f64 {
        let kind = self.kind;
        let mut delta = 0.0;
        for &b in &self.touched {
            let b = b as usize;
            let d = self.dcount[b] as f64;
            delta += d * (self.logit[kind.density_index(t, b)] - self.logit[kind.density_index(r, b)]);
        }
        let nr = self.sizes[r] as f64;
        let nt = self.sizes[t] as f64;
        for b in 0..self.l {
            if b == r || b == t {
                continue;
            }
            let nb = self.sizes[b] as f64;
            delta += nb * (self.log1m[kind.density_index(t, b)] - self.log1m[kind.density_index(r, b)]);
        }
        delta -= (nr - 1.0) * self.log1m[kind.density_index(r, r)];
        delta += nt * self.log1m[kind.density_index(t, t)];
        delta += (nr - nt - 1.0) * self.log1m[kind.density_index(r, t)];
        delta
    }

    /// `ln P(theta') - ln P(theta)` for the same move.
    fn delta_log_prior(&self, r: usize, t: usize) -> f64 {
        (self.sizes[t] as f64 + 1.0).ln() - (self.sizes[r] as f64).ln()
    }

    fn apply_move(&mut self, v: usize, r: usize, t: usize) {
        for &b in &self.touched {
            let b = b as usize;
            let d = self.dcount[b];
            self.m[r * self.l + b] -= d;
            if b != r {
                self.m[b * self.l + r] -= d;
            }
            self.m[t * self.l + b] += d;
            if b != t {
                self.m[b * self.l + t] += d;
            }
        }
        let deg = self.g.neighbors(v).len() as u64;
        self.sizes[r] -= 1;
        self.sizes[t] += 1;
        self.block_degree[r] -= deg;
        self.block_degree[t] += deg;
        self.theta[v] = t as u16;
    }

    /// Degree-profile weight of block pair (s, b) in the neighborhood
    /// proposal (within-block edges counted twice, as degree stubs).
    fn e_entry(&self, s: usize, b: usize) -> u64 {
        if s == b {
            2 * self.m[s * self.l + s]
        } else {
            self.m[s * self.l + b]
        }
    }

    /// Probability of proposing target `t` for a node with the current
    /// neighbor profile under the neighborhood proposal.
    fn neighborhood_prob(&self, deg: u64, t: usize, epsilon: f64) -> f64 {
        let le = epsilon * self.l as f64;
        self.touched
            .iter()
            .map(|&s| {
                let s = s as usize;
                let frac = self.dcount[s] as f64 / deg as f64;
                frac * (self.e_entry(s, t) as f64 + epsilon)
                    / (self.block_degree[s] as f64 + le)
            })
            .sum()
    }

    fn mh_step(&mut self, rng: &mut ChaCha8Rng, proposal: Proposal) -> Result<bool> {
        let n = self.g.node_count();
        let v = rng.random_range(0..n);
        let r = self.theta[v] as usize;
        let deg = self.scan_neighbors(v);
        self.work += deg + self.l as u64 + 2;

        let (t, ln_hastings_fwd): (usize, Option<f64>) = match proposal {
            Proposal::Uniform => (rng.random_range(0..self.l), None),
            Proposal::Neighborhood { epsilon } if deg > 0 => {
                let s = {
                    let pick = rng.random_range(0..deg);
                    let mut acc = 0u64;
                    let mut chosen = self.touched[0] as usize;
                    for &b in &self.touched {
                        acc += self.dcount[b as usize];
                        if pick < acc {
                            chosen = b as usize;
                            break;
                        }
                    }
                    chosen
                };
                let le = epsilon * self.l as f64;
                let total = self.block_degree[s] as f64 + le;
                let u = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut t = self.l - 1;
                for b in 0..self.l {
                    acc += self.e_entry(s, b) as f64 + epsilon;
                    if u < acc {
                        t = b;
                        break;
                    }
                }
                (t, Some(self.neighborhood_prob(deg, t, epsilon).ln()))
            }
            // isolated node: the edge-guided proposal has no edges to follow
            Proposal::Neighborhood { .. } => (rng.random_range(0..self.l), None),
        };

        if t == r {
            return Ok(true);
        }
        if self.sizes[r] == 1 {
            return Ok(false); // emptying a block leaves the prior's support
        }

        let delta = self.delta_log_likelihood(r, t) + self.delta_log_prior(r, t);
        match ln_hastings_fwd {
            None => {
                if delta >= 0.0 || rng.random::<f64>().ln() < delta {
                    self.apply_move(v, r, t);
                    Ok(true)
                } else {
                    Ok(false)
                }
            }
            Some(ln_fwd) => {
                let epsilon = match proposal {
                    Proposal::Neighborhood { epsilon } => epsilon,
                    Proposal::Uniform => unreachable!(),
                };
                self.apply_move(v, r, t);
                let ln_rev = self.neighborhood_prob(deg, r, epsilon).ln();
                let ln_accept = delta + ln_rev - ln_fwd;
                if ln_accept >= 0.0 || rng.random::<f64>().ln() < ln_accept {
                    Ok(true)
                } else {
                    self.apply_move(v, t, r);
                    Ok(false)
                }
            }
        }
    }

    fn log_posterior(&self) -> Result<f64> {
        let stats = self.stats();
        let dens = DensityVector::new(self.dens.clone())?;
        let ll = model::log_likelihood(&stats, self.kind, &dens)?;
        let lp = model::log_prior_theta(&stats.sizes)?;
        Ok(ll + lp + model::log_prior_densities(&dens))
    }
}

fn initial_assignment(rng: &mut ChaCha8Rng, n: usize, l: usize) -> Vec<u16> {
    for _ in 0..1000 {
        let theta: Vec<u16> = (0..n).map(|_| rng.random_range(0..l) as u16).collect();
        let mut seen = vec![false; l];
        for &b in &theta {
            seen[b as usize] = true;
        }
        if seen.iter().all(|&s| s) {
            return theta;
        }
    }
    // round-robin shuffled: guaranteed valid when n >= l
    let mut theta: Vec<u16> = (0..n).map(|v| (v % l) as u16).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        theta.swap(i, j);
    }
    theta
}

fn validate(g: &Graph, kind: ModelKind, cfg: &GibbsConfig) -> Result<()> {
    kind.validate()?;
    let l = kind.block_count();
    if l > u16::MAX as usize {
        return Err(Error::invalid("too many blocks"));
    }
    if g.node_count() < l {
        return Err(Error::Invalid(format!(
            "graph has {} nodes, fewer than the {} blocks requested",
            g.node_count(),
            l
        )));
    }
    if cfg.sweeps == 0 {
        return Err(Error::invalid("need at least one sweep"));
    }
    if let Proposal::Neighborhood { epsilon } = cfg.proposal {
        if !(epsilon > 0.0) {
            return Err(Error::invalid("neighborhood epsilon must be positive"));
        }
    }
    Ok(())
}

fn run_chain(g: &Graph, kind: ModelKind, cfg: &GibbsConfig, stream: u64) -> Result<ChainResult> {
    validate(g, kind, cfg)?;
    let n = g.node_count();
    let l = kind.block_count();
    let mut rng = stream_rng(cfg.seed, stream);

    let theta = initial_assignment(&mut rng, n, l);
    let mut state = State::new(g, kind, theta);
    state.order_blocks_by_density();
    state.sample_densities(&mut rng, true)?;

    let burn = cfg.sweeps / 2;
    let steps_per_sweep = cfg.mcmc_per_node * n;
    let mut accepted = 0u64;
    let mut proposed = 0u64;
    let mut log_posterior = Vec::with_capacity(cfg.sweeps);
    let mut samples: Vec<Vec<u16>> = Vec::with_capacity(cfg.sweeps - burn);
    let mut marginal_counts = vec![0u64; n * l];
    let mut density_sums = vec![0.0; state.dim];

    for sweep in 0..cfg.sweeps {
        for _ in 0..steps_per_sweep {
            if state.mh_step(&mut rng, cfg.proposal)? {
                accepted += 1;
            }
            proposed += 1;
        }
        state.sample_densities(&mut rng, false)?;
        log_posterior.push(state.log_posterior()?);
        if sweep >= burn {
            for (i, &b) in state.theta.iter().enumerate() {
                marginal_counts[i * l + b as usize] += 1;
            }
            for (sum, &d) in density_sums.iter_mut().zip(&state.dens) {
                *sum += d;
            }
            samples.push(state.theta.clone());
        }
    }

    let kept = (cfg.sweeps - burn) as f64;
    let marginals: Vec<f64> = marginal_counts.iter().map(|&c| c as f64 / kept).collect();
    let map_blocks: Vec<usize> = (0..n)
        .map(|i| {
            let row = &marginals[i * l..(i + 1) * l];
            let mut best = 0usize;
            for r in 1..l {
                if row[r] > row[best] {
                    best = r;
                }
            }
            best
        })
        .collect();
    let map = Partition::new(map_blocks, l)?;
    let core_scores = coreness(&marginals, l)?;

    Ok(ChainResult {
        kind,
        map,
        coreness: core_scores,
        marginals,
        samples,
        mean_densities: density_sums.iter().map(|s| s / kept).collect(),
        acceptance_rate: if proposed == 0 {
            1.0
        } else {
            accepted as f64 / proposed as f64
        },
        log_posterior,
        work_units: state.work,
        seed: cfg.seed,
    })
}

/// Runs a single chain (substream 0 of `cfg.seed`).
pub fn run_gibbs(g: &Graph, kind: ModelKind, cfg: &GibbsConfig) -> Result<ChainResult> {
    run_chain(g, kind, cfg, 0)
}

/// Runs independent restarts on substreams `0..chains` in parallel;
/// results come back in chain order.
pub fn run_chains(
    g: &Graph,
    kind: ModelKind,
    cfg: &GibbsConfig,
    chains: usize,
) -> Result<Vec<ChainResult>> {
    use rayon::prelude::*;
    if chains == 0 {
        return Err(Error::invalid("need at least one chain"));
    }
    (0..chains as u64)
        .into_par_iter()
        .map(|stream| run_chain(g, kind, cfg, stream))
        .collect()
}
