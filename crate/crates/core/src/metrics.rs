//! Partition comparison metrics: variation of information (bits), its
//! normalized form, and adjusted mutual information under the permutation
//! null model with arithmetic-mean normalization.

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Joint block-occupancy table of two partitions over the same node set.
#[derive(Debug, Clone)]
pub struct Contingency {
    /// Row-major `row_count x col_count` overlap counts.
    pub counts: Vec<u64>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
}

impl Contingency {
    pub fn new(a: &Partition, b: &Partition) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Invalid(format!(
                "partitions cover different node sets ({} vs {} nodes)",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::invalid("partitions are empty"));
        }
        let (ra, rb) = (a.block_count, b.block_count);
        let mut counts = vec![0u64; ra * rb];
        for (&x, &y) in a.blocks.iter().zip(&b.blocks) {
            counts[x * rb + y] += 1;
        }
        let mut row_sums = vec![0u64; ra];
        let mut col_sums = vec![0u64; rb];
        for x in 0..ra {
            for y in 0..rb {
                row_sums[x] += counts[x * rb + y];
                col_sums[y] += counts[x * rb + y];
            }
        }
        Ok(Contingency {
            counts,
            row_sums,
            col_sums,
            n: a.len() as u64,
        })
    }

    fn entropy_of(&self, sums: &[u64]) -> f64 {
        let n = self.n as f64;
        let mut terms: Vec<f64> = sums
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.log2()
            })
            .collect();
        // summing in a canonical order makes the entropies — and so VI —
        // bitwise invariant under argument swaps and block relabelings
        terms.sort_by(|a, b| a.partial_cmp(b).expect("entropy terms are finite"));
        -terms.iter().sum::<f64>()
    }

    /// Entropy of the first partition, bits.
    pub fn entropy_rows(&self) -> f64 {
        self.entropy_of(&self.row_sums)
    }

    /// Entropy of the second partition, bits.
    pub fn entropy_cols(&self) -> f64 {
        self.entropy_of(&self.col_sums)
    }

    /// Joint entropy, bits.
    pub fn joint_entropy(&self) -> f64 {
        self.entropy_of(&self.counts)
    }

    /// Mutual information, bits.
    pub fn mutual_information(&self) -> f64 {
        (self.entropy_rows() + self.entropy_cols() - self.joint_entropy()).max(0.0)
    }
}

/// Variation of information in bits: `H(A) + H(B) - 2 I(A;B)`. Exactly
/// symmetric in its arguments: entropies are canonically ordered sums, and
/// the two marginals are combined with a single commutative addition.
pub fn variation_of_information(a: &Partition, b: &Partition) -> Result<f64> {
    let c = Contingency::new(a, b)?;
    Ok((2.0 * c.joint_entropy() - (c.entropy_rows() + c.entropy_cols())).max(0.0))
}

/// VI normalized by its `log2 N` upper bound; 0 for a single-node graph.
pub fn normalized_vi(a: &Partition, b: &Partition) -> Result<f64> {
    let vi = variation_of_information(a, b)?;
    let n = a.len() as f64;
    if a.len() == 1 {
        return Ok(0.0);
    }
    Ok(vi / n.log2())
}

/// Expected mutual information (bits) of the table's margins under the
/// permutation (hypergeometric) null model.
pub fn expected_mutual_information(c: &Contingency) -> f64 {
    let n = c.n;
    let nf = n as f64;
    let ln_fact: Vec<f64> = {
        let mut t = Vec::with_capacity(n as usize + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    };
    let ln_choose = |n: u64, k: u64| -> f64 {
        ln_fact[n as usize] - ln_fact[k as usize] - ln_fact[(n - k) as usize]
    };
    let mut emi = 0.0;
    for &ai in &c.row_sums {
        if ai == 0 {
            continue;
        }
        for &bj in &c.col_sums {
            if bj == 0 {
                continue;
            }
            let lo = (ai + bj).saturating_sub(n).max(1);
            let hi = ai.min(bj);
            for nij in lo..=hi {
                let ln_p = ln_choose(bj, nij) + ln_choose(n - bj, ai - nij) - ln_choose(n, ai);
                let term = (nij as f64 / nf)
                    * ((nf * nij as f64) / (ai as f64 * bj as f64)).log2()
                    * ln_p.exp();
                emi += term;
            }
        }
    }
    emi
}

/// Adjusted mutual information: `(I - E[I]) / (mean(H_A, H_B) - E[I])`.
/// A vanishing denominator yields 1 for identical partitions and 0
/// otherwise.
pub fn adjusted_mutual_information(a: &Partition, b: &Partition) -> Result<f64> {
    let c = Contingency::new(a, b)?;
    let (ha, hb) = (c.entropy_rows(), c.entropy_cols());
    let mi = c.mutual_information();
    let emi = expected_mutual_information(&c);
    let denom = 0.5 * (ha + hb) - emi;
    if denom.abs() < 1e-10 {
        let identical = 2.0 * c.joint_entropy() - ha - hb < 1e-12;
        return Ok(if identical { 1.0 } else { 0.0 });
    }
    Ok((mi - emi) / denom)
}
