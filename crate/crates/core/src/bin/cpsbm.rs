//! Command-line front end.
//!
//! Every subcommand writes its results plus one `manifest.json` into the
//! output directory (`--out`, env `CPSBM_OUT_DIR`). Fixed seed and inputs
//! give byte-identical result files on the same build, independent of
//! `--threads`. Exit codes: 0 success, 1 invalid input or runtime failure,
//! 2 usage errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpsbm::config::ConfigFile;
use cpsbm::error::{Error, Result};
use cpsbm::graph::{self, EdgeListFormat, Graph};
use cpsbm::manifest::RunManifest;
use cpsbm::mdl::{self, Estimator};
use cpsbm::model::ModelKind;
use cpsbm::partition::Partition;
use cpsbm::pipeline::{full_pipeline, PipelineConfig};
use cpsbm::sampler::Proposal;
use cpsbm::synth::{
    self, fit_best, run_discernment_experiment, run_layers_experiment, scoring_partition,
    DiscernmentConfig, FitParams, LayersConfig, PlantedConfig,
};
use cpsbm::{classic, rng};
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cpsbm",
    version,
    about = "Hub-and-spoke vs layered core-periphery inference for undirected networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact k-core decomposition of a graph.
    Kcores {
        /// Edge-list file (whitespace-separated pairs; `#`/`%` comments).
        graph: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Combinatorial two-block core-periphery baseline.
    Twoblock {
        graph: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Posterior coreness of every node under one model family.
    Coreness {
        graph: PathBuf,
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        fit: FitOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fit one model family; write its partition, coreness, and description length.
    Infer {
        graph: PathBuf,
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        fit: FitOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Description length of a graph under a fixed partition.
    Mdl {
        graph: PathBuf,
        /// Partition CSV (`node,block`, 1-based blocks).
        #[arg(long)]
        partition: PathBuf,
        #[command(flatten)]
        model: ModelOpts,
        /// Monte Carlo samples for the evidence estimate.
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = EstimatorArg::Auto)]
        estimator: EstimatorArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fit both families, select by description length, compare to baselines.
    Compare {
        graph: PathBuf,
        /// Smallest layer count in the layered sweep.
        #[arg(long, default_value_t = 2)]
        min_layers: usize,
        /// Largest layer count in the layered sweep.
        #[arg(long, default_value_t = 6)]
        max_layers: usize,
        /// Bootstrap replicates for the verdict interval (0 disables).
        #[arg(long, default_value_t = 500)]
        bootstrap: usize,
        #[command(flatten)]
        fit: FitOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Synthetic networks and validation grids.
    Synth {
        #[command(subcommand)]
        which: SynthCommand,
    },
    /// Validation experiment grids (alias for the `synth` runners).
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Sample one planted network from a config file.
    Generate {
        /// Config with `sizes` and one of `densities` (layered) or `matrix`.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Hub-vs-layered discernment grid over (gamma, delta).
    Discernment {
        /// Optional config overriding the desk-scale defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Layer-count recovery grid over planted and fitted layer counts.
    Layers {
        /// Optional config overriding the desk-scale defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Hub-vs-layered discernment grid over (gamma, delta).
    Discernment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Layer-count recovery grid over planted and fitted layer counts.
    Layers {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Root RNG seed (falls back to the config's `seed`, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker-thread cap (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; created if missing.
    #[arg(long, env = "CPSBM_OUT_DIR", default_value = "cpsbm-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ModelOpts {
    #[arg(long, value_enum, default_value_t = ModelArg::Hub)]
    model: ModelArg,
    /// Layer count for the layered family.
    #[arg(long, default_value_t = 2)]
    layers: usize,
}

impl ModelOpts {
    fn kind(&self) -> Result<ModelKind> {
        match self.model {
            ModelArg::Hub => Ok(ModelKind::HubSpoke),
            ModelArg::Layered => {
                if self.layers < 2 {
                    Err(Error::invalid("layers must be ≥ 2"))
                } else {
                    Ok(ModelKind::Layered(self.layers))
                }
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Hub,
    Layered,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProposalArg {
    Uniform,
    Neighborhood,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    /// Naive for few density parameters, importance otherwise.
    Auto,
    Naive,
    Importance,
}

impl EstimatorArg {
    fn resolve(self, kind: ModelKind) -> Estimator {
        match self {
            EstimatorArg::Auto => mdl::default_estimator(kind),
            EstimatorArg::Naive => Estimator::Naive,
            EstimatorArg::Importance => Estimator::Importance,
        }
    }
}

#[derive(Args)]
struct FitOpts {
    /// Gibbs sweeps per chain.
    #[arg(long, default_value_t = 250)]
    gibbs: usize,
    /// Label-move proposals per node per sweep.
    #[arg(long, default_value_t = 10)]
    mcmc_per_node: usize,
    /// Independent chain restarts; the fewest-bits fit wins.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Monte Carlo samples per description-length estimate.
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    #[arg(long, value_enum, default_value_t = ProposalArg::Uniform)]
    proposal: ProposalArg,
    /// Smoothing weight for the neighborhood proposal.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Auto)]
    estimator: EstimatorArg,
}

impl FitOpts {
    fn params(&self, kind: ModelKind) -> FitParams {
        FitParams {
            restarts: self.restarts,
            sweeps: self.gibbs,
            mcmc_per_node: self.mcmc_per_node,
            proposal: match self.proposal {
                ProposalArg::Uniform => Proposal::Uniform,
                ProposalArg::Neighborhood => Proposal::Neighborhood {
                    epsilon: self.epsilon,
                },
            },
            dl_samples: self.samples,
            estimator: self.estimator.resolve(kind),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Kcores { graph, common } => cmd_kcores(&graph, &common),
        Command::Twoblock { graph, common } => cmd_twoblock(&graph, &common),
        Command::Coreness {
            graph,
            model,
            fit,
            common,
        } => cmd_fit(&graph, &model, &fit, &common, "coreness", false),
        Command::Infer {
            graph,
            model,
            fit,
            common,
        } => cmd_fit(&graph, &model, &fit, &common, "infer", true),
        Command::Mdl {
            graph,
            partition,
            model,
            samples,
            estimator,
            common,
        } => cmd_mdl(&graph, &partition, &model, samples, estimator, &common),
        Command::Compare {
            graph,
            min_layers,
            max_layers,
            bootstrap,
            fit,
            common,
        } => cmd_compare(&graph, min_layers, max_layers, bootstrap, &fit, &common),
        Command::Synth { which } => match which {
            SynthCommand::Generate { config, common } => cmd_generate(&config, &common),
            SynthCommand::Discernment { config, common } => {
                cmd_discernment(config.as_deref(), &common)
            }
            SynthCommand::Layers { config, common } => cmd_layers(config.as_deref(), &common),
        },
        Command::Experiment { which } => match which {
            ExperimentCommand::Discernment { config, common } => {
                cmd_discernment(config.as_deref(), &common)
            }
            ExperimentCommand::Layers { config, common } => cmd_layers(config.as_deref(), &common),
        },
    }
}

fn setup(common: &CommonOpts) -> Result<()> {
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Error::invalid("threads must be ≥ 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&common.out)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let raw = graph::load_edge_list_path(path, EdgeListFormat::Plain)?;
    graph::preprocess(&raw)
}

fn begin_manifest(command: &str, seed: u64, params: serde_json::Value) -> RunManifest {
    RunManifest::begin(command, std::env::args().collect(), seed, params)
}

fn write_text(m: &mut RunManifest, path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    m.record_output(path)
}

fn write_json<T: Serialize>(m: &mut RunManifest, path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("result types serialize");
    text.push('\n');
    write_text(m, path, &text)
}

/// One `label,value` row per node, under the given header.
fn per_node_csv<T: std::fmt::Display>(
    g: &Graph,
    header: &str,
    values: impl IntoIterator<Item = T>,
) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (v, value) in values.into_iter().enumerate() {
        let _ = writeln!(out, "{},{}", g.label_of(v), value);
    }
    out
}

fn partition_csv(g: &Graph, p: &Partition) -> String {
    per_node_csv(g, "node,block", p.blocks.iter().map(|b| b + 1))
}

fn cmd_kcores(graph_path: &Path, common: &CommonOpts) -> Result<()> {
    setup(common)?;
    let seed = common.seed.unwrap_or(0);
    let mut m = begin_manifest("kcores", seed, json!({ "graph": graph_path.display().to_string() }));
    m.record_input(graph_path)?;
    let g = load_graph(graph_path)?;
    let cores = classic::k_core_decomposition(&g);
    write_text(
        &mut m,
        &common.out.join("kcores.csv"),
        &per_node_csv(&g, "node,core_number", cores.iter()),
    )?;
    let summary = json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "max_core": cores.iter().max().copied().unwrap_or(0),
    });
    write_json(&mut m, &common.out.join("kcores.json"), &summary)?;
    m.write(&common.out)?;
    Ok(())
}

fn cmd_twoblock(graph_path: &Path, common: &CommonOpts) -> Result<()> {
    setup(common)?;
    let seed = common.seed.unwrap_or(0);
    let mut m = begin_manifest("twoblock", seed, json!({ "graph": graph_path.display().to_string() }));
    m.record_input(graph_path)?;
    let g = load_graph(graph_path)?;
    let fit = classic::two_block_partition(&g)?;
    write_text(
        &mut m,
        &common.out.join("twoblock.csv"),
        &partition_csv(&g, &fit.partition),
    )?;
    let summary = json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "core_size": fit.core_size,
        "periphery_size": g.node_count() - fit.core_size,
        "z": fit.z,
    });
    write_json(&mut m, &common.out.join("twoblock.json"), &summary)?;
    m.write(&common.out)?;
    Ok(())
}

#[derive(Serialize)]
struct FitReport {
    model: ModelKind,
    nodes: usize,
    edges: usize,
    bits: f64,
    bits_per_edge: f64,
    estimator: Estimator,
    samples: u64,
    ess: f64,
    ess_low: bool,
    acceptance_rate: f64,
    mean_densities: Vec<f64>,
    block_sizes: Vec<usize>,
}

/// Shared body of `coreness` (coreness only) and `infer` (full fit).
fn cmd_fit(
    graph_path: &Path,
    model: &ModelOpts,
    fit: &FitOpts,
    common: &CommonOpts,
    name: &str,
    full: bool,
) -> Result<()> {
    setup(common)?;
    let kind = model.kind()?;
    let fp = fit.params(kind);
    let seed = common.seed.unwrap_or(0);
    let mut m = begin_manifest(
        name,
        seed,
        json!({
            "graph": graph_path.display().to_string(),
            "model": kind,
            "fit": fp,
        }),
    );
    m.record_input(graph_path)?;
    let g = load_graph(graph_path)?;
    let (ev, chain) = fit_best(&g, kind, &fp, seed)?;
    write_text(
        &mut m,
        &common.out.join("coreness.csv"),
        &per_node_csv(&g, "node,coreness", chain.coreness.iter()),
    )?;
    let partition = scoring_partition(&chain)?;
    let report = FitReport {
        model: kind,
        nodes: g.node_count(),
        edges: g.edge_count(),
        bits: ev.estimate.bits,
        bits_per_edge: ev.estimate.bits_per_edge,
        estimator: ev.estimate.estimator,
        samples: ev.estimate.samples,
        ess: ev.estimate.ess,
        ess_low: ev.estimate.ess_is_low(),
        acceptance_rate: chain.acceptance_rate,
        mean_densities: chain.mean_densities.clone(),
        block_sizes: partition.sizes(),
    };
    if full {
        write_text(
            &mut m,
            &common.out.join("partition.csv"),
            &partition_csv(&g, &partition),
        )?;
    }
    write_json(&mut m, &common.out.join(format!("{name}.json")), &report)?;
    if report.ess_low {
        eprintln!(
            "warning: effective sample size {:.1} is low; bits are a lower-bound-biased estimate",
            report.ess
        );
    }
    m.write(&common.out)?;
    Ok(())
}

fn cmd_mdl(
    graph_path: &Path,
    partition_path: &Path,
    model: &ModelOpts,
    samples: u64,
    estimator: EstimatorArg,
    common: &CommonOpts,
) -> Result<()> {
    setup(common)?;
    let kind = model.kind()?;
    let est = estimator.resolve(kind);
    let seed = common.seed.unwrap_or(0);
    let mut m = begin_manifest(
        "mdl",
        seed,
        json!({
            "graph": graph_path.display().to_string(),
            "partition": partition_path.display().to_string(),
            "model": kind,
            "estimator": est,
            "samples": samples,
        }),
    );
    m.record_input(graph_path)?;
    m.record_input(partition_path)?;
    let g = load_graph(graph_path)?;
    let part = graph::read_partition_csv(partition_path, &g)?;
    let ev = mdl::estimate_evidence(&g, &part, kind, est, samples, seed)?;
    let result = json!({
        "model": kind,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "block_sizes": part.sizes(),
        "estimate": ev.estimate,
        "ess_low": ev.estimate.ess_is_low(),
    });
    write_json(&mut m, &common.out.join("mdl.json"), &result)?;
    m.write(&common.out)?;
    Ok(())
}

fn cmd_compare(
    graph_path: &Path,
    min_layers: usize,
    max_layers: usize,
    bootstrap: usize,
    fit: &FitOpts,
    common: &CommonOpts,
) -> Result<()> {
    setup(common)?;
    if max_layers < min_layers {
        return Err(Error::invalid("max-layers must be ≥ min-layers"));
    }
    // the sweep spans several density dimensions; auto resolves to the
    // importance estimator so every fit carries the same bias direction
    let mut fp = fit.params(ModelKind::HubSpoke);
    if matches!(fit.estimator, EstimatorArg::Auto) {
        fp.estimator = Estimator::Importance;
    }
    let seed = common.seed.unwrap_or(0);
    let cfg = PipelineConfig {
        fit: fp,
        layer_range: (min_layers..=max_layers).collect(),
        bootstrap_reps: bootstrap,
        seed,
    };
    let mut m = begin_manifest(
        "compare",
        seed,
        json!({
            "graph": graph_path.display().to_string(),
            "pipeline": cfg,
        }),
    );
    m.record_input(graph_path)?;
    let g = load_graph(graph_path)?;
    let report = full_pipeline(&g, &cfg)?;
    write_text(
        &mut m,
        &common.out.join("coreness.csv"),
        &per_node_csv(&g, "node,coreness", report.coreness.iter()),
    )?;
    write_text(
        &mut m,
        &common.out.join("partition_hub.csv"),
        &partition_csv(&g, &report.hub.partition),
    )?;
    write_text(
        &mut m,
        &common.out.join("partition_layered.csv"),
        &partition_csv(&g, &report.layered.partition),
    )?;
    write_json(&mut m, &common.out.join("report.json"), &report)?;
    println!(
        "verdict: {:?} (hub {} bits vs layered {} bits over layers {:?})",
        report.comparison.verdict,
        report.hub.bits,
        report.layered.bits,
        cfg.layer_range,
    );
    m.write(&common.out)?;
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

/// Seed precedence: `--seed` flag, then the config's `seed`, then `fallback`.
fn resolve_seed(common: &CommonOpts, cfg: &ConfigFile, fallback: u64) -> Result<u64> {
    Ok(match common.seed {
        Some(s) => s,
        None => cfg.scalar::<u64>("seed")?.unwrap_or(fallback),
    })
}

fn cmd_generate(config_path: &Path, common: &CommonOpts) -> Result<()> {
    setup(common)?;
    let cfg = ConfigFile::load(config_path)?;
    cfg.check_keys(&["sizes", "densities", "matrix", "seed"])?;
    let sizes: Vec<usize> = cfg
        .list("sizes")?
        .ok_or_else(|| Error::invalid("missing required config key \"sizes\""))?;
    let planted = match (cfg.list::<f64>("densities")?, cfg.matrix("matrix")?) {
        (Some(densities), None) => PlantedConfig::layered(sizes, &densities)?,
        (None, Some(matrix)) => PlantedConfig::new(sizes, matrix)?,
        _ => {
            return Err(Error::invalid(
                "config needs exactly one of `densities` (layered) or `matrix`",
            ))
        }
    };
    let seed = resolve_seed(common, &cfg, 0)?;
    let mut m = begin_manifest("synth-generate", seed, serde_json::to_value(&planted).unwrap());
    m.record_input(config_path)?;

    let mut rng = rng::stream_rng(seed, 0);
    let (g, partition) = synth::sbm_generate(&planted, &mut rng)?;
    let mut edges_text = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(edges_text, "{} {}", g.label_of(u), g.label_of(v));
    }
    write_text(&mut m, &common.out.join("network.txt"), &edges_text)?;
    write_text(
        &mut m,
        &common.out.join("planted.csv"),
        &partition_csv(&g, &partition),
    )?;
    let summary = json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "expected_edges": planted.expected_edges(),
        "mean_degree": g.mean_degree(),
        "expected_mean_degree": planted.expected_mean_degree(),
    });
    write_json(&mut m, &common.out.join("generate.json"), &summary)?;
    m.write(&common.out)?;
    Ok(())
}

/// Applies the shared fit keys (`restarts`, `gibbs`, `mcmc_per_node`,
/// `samples`) onto desk defaults.
fn apply_fit_keys(cfg: &ConfigFile, fit: &mut FitParams) -> Result<()> {
    fit.restarts = cfg.scalar_or("restarts", fit.restarts)?;
    fit.sweeps = cfg.scalar_or("gibbs", fit.sweeps)?;
    fit.mcmc_per_node = cfg.scalar_or("mcmc_per_node", fit.mcmc_per_node)?;
    fit.dl_samples = cfg.scalar_or("samples", fit.dl_samples)?;
    Ok(())
}

fn cmd_discernment(config_path: Option<&Path>, common: &CommonOpts) -> Result<()> {
    setup(common)?;
    let cfg = load_config(config_path)?;
    cfg.check_keys(&[
        "n", "p", "gammas", "deltas", "reps", "restarts", "gibbs", "mcmc_per_node", "samples",
        "seed",
    ])?;
    let mut dc = DiscernmentConfig::desk();
    dc.n = cfg.scalar_or("n", dc.n)?;
    dc.p = cfg.scalar_or("p", dc.p)?;
    dc.gammas = cfg.list_or("gammas", dc.gammas)?;
    dc.deltas = cfg.list_or("deltas", dc.deltas)?;
    dc.reps = cfg.scalar_or("reps", dc.reps)?;
    apply_fit_keys(&cfg, &mut dc.fit)?;
    dc.seed = resolve_seed(common, &cfg, dc.seed)?;

    let mut m = begin_manifest("discernment", dc.seed, serde_json::to_value(&dc).unwrap());
    if let Some(p) = config_path {
        m.record_input(p)?;
    }
    let cells = run_discernment_experiment(&dc)?;
    let mut csv = String::from(
        "gamma,delta,rep,seed,edges,hub_bits,layered_bits,dl_hub_minus_layered_per_edge,hub_ess,layered_ess\n",
    );
    for c in &cells {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            c.gamma,
            c.delta,
            c.rep,
            c.seed,
            c.edges,
            c.hub_bits,
            c.layered_bits,
            c.dl_hub_minus_layered_per_edge,
            c.hub_ess,
            c.layered_ess
        );
    }
    write_text(&mut m, &common.out.join("discernment.csv"), &csv)?;
    // the manifest's params carry the resolved grid; the per-cell seeds are
    // recorded here as well so the grid can be replayed cell by cell
    m.params["cell_seeds"] = json!(cells.iter().map(|c| c.seed).collect::<Vec<u64>>());
    m.write(&common.out)?;
    Ok(())
}

fn cmd_layers(config_path: Option<&Path>, common: &CommonOpts) -> Result<()> {
    setup(common)?;
    let cfg = load_config(config_path)?;
    cfg.check_keys(&[
        "n",
        "layers",
        "p_inner",
        "p_outer",
        "planted",
        "fit_layers",
        "networks_per_l",
        "restarts",
        "gibbs",
        "mcmc_per_node",
        "samples",
        "seed",
    ])?;
    let mut lc = LayersConfig::desk();
    lc.n = cfg.scalar_or("n", lc.n)?;
    lc.layers = cfg.scalar_or("layers", lc.layers)?;
    lc.p_inner = cfg.scalar_or("p_inner", lc.p_inner)?;
    lc.p_outer = cfg.scalar_or("p_outer", lc.p_outer)?;
    lc.planted = cfg.list_or("planted", lc.planted)?;
    lc.fit_layers = cfg.list_or("fit_layers", lc.fit_layers)?;
    lc.networks_per_l = cfg.scalar_or("networks_per_l", lc.networks_per_l)?;
    apply_fit_keys(&cfg, &mut lc.fit)?;
    lc.seed = resolve_seed(common, &cfg, lc.seed)?;

    let mut m = begin_manifest("layers", lc.seed, serde_json::to_value(&lc).unwrap());
    if let Some(p) = config_path {
        m.record_input(p)?;
    }
    let (cells, summaries) = run_layers_experiment(&lc)?;
    let mut csv = String::from("planted_l,fitted_l,network,seed,edges,bits,bits_per_edge,ess\n");
    for c in &cells {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            c.planted_l, c.fitted_l, c.network, c.seed, c.edges, c.bits, c.bits_per_edge, c.ess
        );
    }
    write_text(&mut m, &common.out.join("layers.csv"), &csv)?;
    write_json(&mut m, &common.out.join("layers_summary.json"), &summaries)?;
    m.params["cell_seeds"] = json!(cells.iter().map(|c| c.seed).collect::<Vec<u64>>());
    m.write(&common.out)?;
    Ok(())
}
