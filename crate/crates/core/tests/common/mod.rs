//! Test-side oracles, independent of the library's computational paths.
//!
//! Everything here favors exactness and transparency over speed: rational
//! arithmetic where possible, exhaustive enumeration elsewhere. Oracles are
//! only feasible at micro scale (N <= ~12); tests freeze their outputs as
//! expected values for the production implementations.

#![allow(dead_code)]

use cpsbm::graph::Graph;
use cpsbm::model::{block_stats, BlockStats, ModelKind};
use cpsbm::partition::Partition;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

// ---------------------------------------------------------------------------
// Exact polynomial integration of ordered-density evidence
// ---------------------------------------------------------------------------

/// Polynomial with exact rational coefficients, index = power.
#[derive(Clone, Debug)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    fn zero() -> Self {
        Poly(vec![])
    }

    /// x^a (1-x)^b expanded via the binomial theorem.
    pub fn bernoulli_term(a: u64, b: u64) -> Self {
        let mut coeffs = vec![BigRational::zero(); (a + b + 1) as usize];
        let mut binom = BigInt::one();
        for k in 0..=b {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            coeffs[(a + k) as usize] = BigRational::from(binom.clone() * BigInt::from(sign));
            binom = binom * BigInt::from(b - k) / BigInt::from(k + 1);
        }
        Poly(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// Antiderivative with F(0) = 0.
    pub fn integrate(&self) -> Poly {
        let mut out = vec![BigRational::zero(); self.0.len() + 1];
        for (i, c) in self.0.iter().enumerate() {
            out[i + 1] = c / BigRational::from(BigInt::from(i as i64 + 1));
        }
        Poly(out)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Exact value of `dim! * int over {1 > x_1 > ... > x_d > 0} of
/// prod_s x_s^{a_s} (1-x_s)^{b_s}`, i.e. the marginal likelihood of a fixed
/// partition under the ordered uniform density prior, as a rational number.
pub fn evidence_exact_rational(pairs: &[(u64, u64)]) -> BigRational {
    let d = pairs.len();
    assert!(d >= 1);
    // innermost variable first: J_d(x) = int_0^x f_d, then fold outward
    let mut inner: Option<Poly> = None;
    for &(a, b) in pairs.iter().rev() {
        let f = Poly::bernoulli_term(a, b);
        let integrand = match &inner {
            None => f,
            Some(j) => f.mul(j),
        };
        inner = Some(integrand.integrate());
    }
    let fact: BigInt = (1..=d as u64).map(BigInt::from).product();
    inner.unwrap().eval(&BigRational::one()) * BigRational::from(fact)
}

/// Natural log of the exact evidence.
pub fn log_evidence_exact(pairs: &[(u64, u64)]) -> f64 {
    ln_rational(&evidence_exact_rational(pairs))
}

/// ln of a positive rational, safe for values far outside f64 range.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "log of non-positive rational");
    fn ln_bigint(x: &BigInt) -> f64 {
        let bits = x.bits();
        if bits <= 52 {
            return x.to_f64().unwrap().ln();
        }
        let shift = bits - 52;
        let top: BigInt = x >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// (alpha, beta) exponent pairs for the evidence integral of `stats` under
/// `kind`: per-pair counts for hub-and-spoke, cumulative layer exponents for
/// layered.
pub fn exponent_pairs(stats: &BlockStats, kind: ModelKind) -> Vec<(u64, u64)> {
    match kind {
        ModelKind::HubSpoke => [(0, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(r, s)| {
                let m = stats.m_at(r, s);
                (m, stats.capacity_at(r, s) - m)
            })
            .collect(),
        ModelKind::Layered(_) => stats
            .alpha
            .iter()
            .zip(&stats.beta)
            .map(|(&a, &b)| (a, b))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Exhaustive posterior over partitions (micro graphs)
// ---------------------------------------------------------------------------

/// Exact posterior P(theta | A) for a two-block model over every assignment
/// with both blocks non-empty, densities marginalized exactly. Keys are
/// assignment vectors (block of node 0, node 1, ...).
pub fn enumerate_two_block_posterior(g: &Graph, kind: ModelKind) -> HashMap<Vec<u16>, f64> {
    let n = g.node_count();
    assert!(n <= 16, "exhaustive enumeration is exponential in N");
    assert_eq!(kind.block_count(), 2);
    let mut logs: Vec<(Vec<u16>, f64)> = Vec::new();
    for mask in 1..((1u32 << n) - 1) {
        let blocks: Vec<u16> = (0..n).map(|v| ((mask >> v) & 1) as u16).collect();
        let part = Partition::new(blocks.iter().map(|&b| b as usize).collect(), 2).unwrap();
        let stats = block_stats(g, &part).unwrap();
        let log_ev = log_evidence_exact(&exponent_pairs(&stats, kind));
        let log_prior = cpsbm::model::log_prior_theta(&stats.sizes).unwrap();
        logs.push((blocks, log_ev + log_prior));
    }
    let max = logs.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = logs.iter().map(|(_, l)| (l - max).exp()).sum();
    logs.into_iter()
        .map(|(blocks, l)| (blocks, (l - max).exp() / total))
        .collect()
}

/// Total variation distance between two distributions over assignments.
pub fn total_variation(a: &HashMap<Vec<u16>, f64>, b: &HashMap<Vec<u16>, f64>) -> f64 {
    let mut keys: std::collections::HashSet<&Vec<u16>> = a.keys().collect();
    keys.extend(b.keys());
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

// ---------------------------------------------------------------------------
// Brute-force classic baselines
// ---------------------------------------------------------------------------

/// Core numbers by literal definition: repeatedly peel nodes of degree < k.
pub fn brute_core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut core = vec![0usize; n];
    let mut k = 1usize;
    loop {
        // the k-core is contained in the (k-1)-core
        let mut alive: Vec<bool> = (0..n).map(|v| core[v] == k - 1).collect();
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] {
                    let deg = g.neighbors(v).iter().filter(|&&u| alive[u as usize]).count();
                    if deg < k {
                        alive[v] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if !alive.iter().any(|&a| a) {
            return core;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
        k += 1;
    }
}

fn two_block_z(g: &Graph, in_core: &[bool]) -> u64 {
    let k = in_core.iter().filter(|&&c| c).count() as u64;
    let mut core_edges = 0u64;
    let mut periph_edges = 0u64;
    for (u, v) in g.edges() {
        if in_core[u] && in_core[v] {
            core_edges += 1;
        } else if !in_core[u] && !in_core[v] {
            periph_edges += 1;
        }
    }
    (k * (k.saturating_sub(1)) / 2 - core_edges) + periph_edges
}

/// Minimum Z over degree-ordered prefixes (degree desc, id asc), core sizes
/// 1..=N-1, ties to the smaller core. Recomputes Z from scratch per prefix.
pub fn brute_prefix_two_block(g: &Graph) -> (usize, u64) {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v).unwrap()), v));
    let mut in_core = vec![false; n];
    let mut best = (usize::MAX, u64::MAX);
    for k in 1..n {
        in_core[order[k - 1]] = true;
        let z = two_block_z(g, &in_core);
        if z < best.1 {
            best = (k, z);
        }
    }
    best
}

/// Minimum Z over all bipartitions with a non-empty core, exhaustive.
pub fn brute_exhaustive_two_block(g: &Graph) -> u64 {
    let n = g.node_count();
    assert!(n <= 20);
    let mut best = u64::MAX;
    for mask in 1u32..(1 << n) - 1 {
        let in_core: Vec<bool> = (0..n).map(|v| (mask >> v) & 1 == 1).collect();
        best = best.min(two_block_z(g, &in_core));
    }
    best
}

// ---------------------------------------------------------------------------
// Permutation-model expected mutual information
// ---------------------------------------------------------------------------

fn mutual_information_bits(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut joint = vec![0f64; ka * kb];
    let mut ma = vec![0f64; ka];
    let mut mb = vec![0f64; kb];
    for (&x, &y) in a.iter().zip(b) {
        joint[x * kb + y] += 1.0;
        ma[x] += 1.0;
        mb[y] += 1.0;
    }
    let mut mi = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let nxy = joint[x * kb + y];
            if nxy > 0.0 {
                mi += (nxy / n) * ((n * nxy) / (ma[x] * mb[y])).log2();
            }
        }
    }
    mi
}

/// E[MI] under the permutation model, averaged over all N! relabelings of
/// the node order of `b`. Only feasible for tiny N.
pub fn emi_by_permutation(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    assert!(n <= 8, "N! permutations");
    let mut idx: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    let mut count = 0u64;
    permute(&mut idx, 0, &mut |perm| {
        let permuted: Vec<usize> = (0..n).map(|i| b[perm[i]]).collect();
        total += mutual_information_bits(a, &permuted);
        count += 1;
    });
    total / count as f64
}

fn permute(idx: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}

// ---------------------------------------------------------------------------
// Truncated-beta CDF by quadrature, and a one-sample KS test
// ---------------------------------------------------------------------------

/// CDF of a Beta(alpha+1, beta+1) density restricted to (lo, hi), computed
/// by Simpson quadrature on a fixed fine grid (log-space integrand to dodge
/// overflow; normalization by the same rule).
pub struct TruncBetaCdf {
    lo: f64,
    hi: f64,
    cum: Vec<f64>,
}

impl TruncBetaCdf {
    pub fn new(alpha: f64, beta: f64, lo: f64, hi: f64) -> Self {
        const PANELS: usize = 1 << 16;
        // exponent-0 terms are skipped so endpoints stay finite (0^0 = 1)
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
        let h = (hi - lo) / PANELS as f64;
        let peak = (alpha / (alpha + beta).max(1.0)).clamp(lo, hi);
        let scale = logf(peak).max(logf(lo)).max(logf(hi));
        let f = |x: f64| (logf(x) - scale).exp();
        let mut cum = Vec::with_capacity(PANELS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..PANELS {
            // per-panel Simpson keeps the prefix sums monotone
            let a = lo + i as f64 * h;
            acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
            cum.push(acc);
        }
        let total = *cum.last().unwrap();
        for c in &mut cum {
            *c /= total;
        }
        TruncBetaCdf { lo, hi, cum }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let t = (x - self.lo) / (self.hi - self.lo) * (self.cum.len() - 1) as f64;
        let i = t.floor() as usize;
        let frac = t - i as f64;
        if i + 1 >= self.cum.len() {
            return 1.0;
        }
        self.cum[i] * (1.0 - frac) + self.cum[i + 1] * frac
    }
}

/// Two-sided one-sample Kolmogorov-Smirnov test. Returns (D_n, p) with the
/// asymptotic Kolmogorov p-value using Stephens' small-sample correction.
pub fn ks_test(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        d = d.max(c - i as f64 / n).max((i + 1) as f64 / n - c);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1.0f64).powi(k as i32 - 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Micro graph fixtures
// ---------------------------------------------------------------------------

pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|v| (v, v + 1)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn er_graph(n: usize, p: f64, seed: u64) -> Graph {
    use rand::Rng;
    let mut rng = cpsbm::rng::stream_rng(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Fixed 6-node fixture with a dense corner and a tail: edges form a
/// triangle {0,1,2} hung with the path 0-3, 3-4, 4-5.
pub fn fixture_n6() -> Graph {
    Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (0, 3), (3, 4), (4, 5)]).unwrap()
}
