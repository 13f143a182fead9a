//! End-to-end typology analysis of a single network: fit both model
//! families, select by description length, and situate the result against
//! the classic combinatorial baselines.

use crate::classic;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mdl::{self, Evidence, ModelComparison};
use crate::metrics;
use crate::model::ModelKind;
use crate::partition::Partition;
use crate::rng::child_seed;
use crate::sampler::ChainResult;
use crate::synth::{fit_best, scoring_partition, FitParams};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub fit: FitParams,
    /// Layer counts to sweep for the layered family.
    pub layer_range: Vec<usize>,
    /// Bootstrap replicates for the model-comparison interval (0 disables).
    pub bootstrap_reps: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            fit: FitParams::default(),
            layer_range: (2..=6).collect(),
            bootstrap_reps: 500,
            seed: 0,
        }
    }
}

/// One fitted model family on the input network.
#[derive(Debug, Clone, Serialize)]
pub struct ModelFit {
    pub kind: ModelKind,
    pub bits: f64,
    pub bits_per_edge: f64,
    pub ess: f64,
    pub partition: Partition,
    pub coreness: Vec<f64>,
    pub mean_densities: Vec<f64>,
    pub acceptance_rate: f64,
}

impl ModelFit {
    fn new(kind: ModelKind, ev: &Evidence, chain: &ChainResult) -> Result<Self> {
        Ok(ModelFit {
            kind,
            bits: ev.estimate.bits,
            bits_per_edge: ev.estimate.bits_per_edge,
            ess: ev.estimate.ess,
            partition: scoring_partition(chain)?,
            coreness: chain.coreness.clone(),
            mean_densities: chain.mean_densities.clone(),
            acceptance_rate: chain.acceptance_rate,
        })
    }
}

/// Similarity of the selected model's partition to a baseline partition.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineComparison {
    pub name: String,
    pub blocks: usize,
    pub vi_bits: f64,
    pub nvi: f64,
    pub ami: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypologyReport {
    pub nodes: usize,
    pub edges: usize,
    pub hub: ModelFit,
    pub layered: ModelFit,
    /// `(layer count, bits)` over the swept layered fits.
    pub layered_sweep: Vec<(usize, f64)>,
    pub comparison: ModelComparison,
    /// Coreness under the selected (fewer-bits) model.
    pub coreness: Vec<f64>,
    pub baselines: Vec<BaselineComparison>,
}

fn baseline_row(name: &str, model: &Partition, other: &Partition) -> Result<BaselineComparison> {
    Ok(BaselineComparison {
        name: name.to_string(),
        blocks: other.block_count,
        vi_bits: metrics::variation_of_information(model, other)?,
        nvi: metrics::normalized_vi(model, other)?,
        ami: metrics::adjusted_mutual_information(model, other)?,
    })
}

/// Partition of nodes by core number (labels are arbitrary; the similarity
/// metrics are label-invariant).
pub fn shell_partition(g: &Graph) -> Result<Partition> {
    let cores = classic::k_core_decomposition(g);
    let mut levels: Vec<usize> = cores.clone();
    levels.sort_unstable();
    levels.dedup();
    let blocks: Vec<usize> = cores
        .iter()
        .map(|c| levels.binary_search(c).expect("level exists"))
        .collect();
    Partition::new(blocks, levels.len())
}

/// Fits hub-and-spoke and a sweep of layered models, selects by
/// description length, and compares the selected partition to the classic
/// baselines.
pub fn full_pipeline(g: &Graph, cfg: &PipelineConfig) -> Result<TypologyReport> {
    if cfg.layer_range.is_empty() {
        return Err(Error::invalid("layer range is empty"));
    }
    if cfg.layer_range.iter().any(|&l| l < 2) {
        return Err(Error::invalid(
            "layered fits need at least two layers; one block carries no structure",
        ));
    }
    let (hub_ev, hub_chain) = fit_best(g, ModelKind::HubSpoke, &cfg.fit, child_seed(cfg.seed, 1))?;
    let hub = ModelFit::new(ModelKind::HubSpoke, &hub_ev, &hub_chain)?;

    let mut sweep = Vec::with_capacity(cfg.layer_range.len());
    let mut best_lay: Option<(Evidence, ChainResult, usize)> = None;
    for &l in &cfg.layer_range {
        let (ev, chain) = fit_best(g, ModelKind::Layered(l), &cfg.fit, child_seed(cfg.seed, 10 + l as u64))?;
        sweep.push((l, ev.estimate.bits));
        if best_lay
            .as_ref()
            .is_none_or(|(b, _, _)| ev.estimate.bits < b.estimate.bits)
        {
            best_lay = Some((ev, chain, l));
        }
    }
    let (lay_ev, lay_chain, lay_l) = best_lay.expect("layer range checked non-empty");
    let layered = ModelFit::new(ModelKind::Layered(lay_l), &lay_ev, &lay_chain)?;

    let bootstrap = (cfg.bootstrap_reps > 0)
        .then(|| (cfg.bootstrap_reps, child_seed(cfg.seed, 99)));
    let comparison = mdl::compare_models(&hub_ev, &lay_ev, bootstrap);

    let (selected_partition, coreness) = if hub.bits <= layered.bits {
        (&hub.partition, hub.coreness.clone())
    } else {
        (&layered.partition, layered.coreness.clone())
    };

    let mut baselines = Vec::new();
    let two = classic::two_block_partition(g)?;
    baselines.push(baseline_row("two-block", selected_partition, &two.partition)?);
    let shells = shell_partition(g)?;
    baselines.push(baseline_row("k-cores", selected_partition, &shells)?);
    let core_fraction = two.core_size as f64 / g.node_count() as f64;
    if core_fraction > 0.0 && core_fraction < 1.0 {
        let binned = classic::binned_kcores(g, core_fraction)?;
        baselines.push(baseline_row("binned-k-cores", selected_partition, &binned)?);
    }

    Ok(TypologyReport {
        nodes: g.node_count(),
        edges: g.edge_count(),
        hub,
        layered,
        layered_sweep: sweep,
        comparison,
        coreness,
        baselines,
    })
}
