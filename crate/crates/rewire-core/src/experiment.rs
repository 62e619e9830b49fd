//! Experiment orchestration: configuration, seed derivation, dataset
//! management, command implementations and plot-ready CSV/JSON emission.

use crate::attack::{self, AttackError, EntryRule};
use crate::baselines::{self, BaselineError, Strategy};
use crate::dqn::{self, DqnError, TrainConfig};
use crate::env::EnvConfig;
use crate::generate::{self, GenerateError, GeneratorSpec, GraphModel};
use crate::gnn::{self, GnnError, ModelParams};
use crate::graph::{self, Graph, GraphError};
use crate::ingest::{self, IngestError, LeafFilter};
use crate::objectives::{ObjectiveConfig, ObjectiveKind};
use crate::stats;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Dqn(#[from] DqnError),
    #[error(transparent)]
    Gnn(#[from] GnnError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("command deadline exceeded")]
    Timeout,
    #[error("{0}")]
    Usage(String),
}

impl ExperimentError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io { path: path.to_path_buf(), source }
    }

    /// CLI exit code: 1 usage, 2 runtime, 3 timeout.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Usage(_) => 1,
            ExperimentError::Timeout => 3,
            ExperimentError::Baseline(BaselineError::Timeout(_)) => 3,
            _ => 2,
        }
    }
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Graph families from the experimental setup, with their fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Ba2,
    Ba1,
    Er,
    Ws,
}

impl ModelName {
    pub fn graph_model(self) -> GraphModel {
        match self {
            ModelName::Ba2 => GraphModel::Ba { m: 2 },
            ModelName::Ba1 => GraphModel::Ba { m: 1 },
            ModelName::Er => GraphModel::Er { p: 0.15 },
            ModelName::Ws => GraphModel::Ws { k: 4, p: 0.1 },
        }
    }

    pub fn all() -> [ModelName; 4] {
        [ModelName::Ba2, ModelName::Ba1, ModelName::Er, ModelName::Ws]
    }
}

impl std::fmt::Display for ModelName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ModelName::Ba2 => "ba2",
            ModelName::Ba1 => "ba1",
            ModelName::Er => "er",
            ModelName::Ws => "ws",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for ModelName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ba2" | "ba-2" => Ok(ModelName::Ba2),
            "ba1" | "ba-1" => Ok(ModelName::Ba1),
            "er" => Ok(ModelName::Er),
            "ws" => Ok(ModelName::Ws),
            other => Err(format!("unknown graph model {other:?} (expected ba2, ba1, er, ws)")),
        }
    }
}

/// Tuned learning rate, message-passing rounds and embedding width for each
/// objective/model pair.
pub fn tuned_hyperparams(objective: ObjectiveKind, model: ModelName) -> (f64, usize, usize) {
    match (objective, model) {
        (ObjectiveKind::Merw, ModelName::Ba2) => (5e-4, 3, 128),
        (ObjectiveKind::Merw, ModelName::Ba1) => (5e-4, 6, 128),
        (ObjectiveKind::Merw, ModelName::Er) => (5e-4, 4, 128),
        (ObjectiveKind::Merw, ModelName::Ws) => (10e-4, 6, 128),
        (ObjectiveKind::Shannon, ModelName::Ba2) => (10e-4, 3, 64),
        (ObjectiveKind::Shannon, ModelName::Ba1) => (5e-4, 6, 64),
        (ObjectiveKind::Shannon, ModelName::Er) => (1e-4, 4, 64),
        (ObjectiveKind::Shannon, ModelName::Ws) => (10e-4, 6, 64),
    }
}

/// `[train]` section: unset values fall back to the full-scale defaults and
/// the tuned per-pair hyperparameters.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSection {
    pub total_steps: Option<usize>,
    pub eps_decay_steps: Option<usize>,
    pub batch_size: Option<usize>,
    pub target_sync_every: Option<usize>,
    pub learning_rate: Option<f64>,
    pub validation_every: Option<usize>,
    pub buffer_capacity: Option<usize>,
    pub embedding_dim: Option<usize>,
    pub rounds: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSection {
    pub sizes: Vec<usize>,
    /// Budgets as percentages of the initial edge count.
    pub budgets_percent: Vec<usize>,
    pub per_cell: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { sizes: vec![10, 30, 100, 200, 300], budgets_percent: vec![5, 10, 15, 20, 25], per_cell: 20 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub objective: ObjectiveKind,
    pub model: ModelName,
    pub n: usize,
    pub n_train: usize,
    pub n_validation: usize,
    pub n_test: usize,
    pub budget_fraction: f64,
    /// Number of independent training seeds.
    pub seeds: usize,
    pub master_seed: u64,
    /// Local-map radius for attack evaluation.
    pub hops: usize,
    pub train: TrainSection,
    pub sweep: SweepSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            objective: ObjectiveKind::Merw,
            model: ModelName::Ba2,
            n: 30,
            n_train: 600,
            n_validation: 200,
            n_test: 100,
            budget_fraction: 0.15,
            seeds: 10,
            master_seed: 0,
            hops: attack::DEFAULT_HOPS,
            train: TrainSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn env_config(&self) -> EnvConfig {
        EnvConfig::new(ObjectiveConfig::new(self.objective), self.budget_fraction)
    }

    /// Concrete training configuration for one training seed.
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        let (lr, rounds, dim) = tuned_hyperparams(self.objective, self.model);
        let base = TrainConfig::default();
        TrainConfig {
            total_steps: self.train.total_steps.unwrap_or(base.total_steps),
            eps_decay_steps: self.train.eps_decay_steps.unwrap_or(base.eps_decay_steps),
            batch_size: self.train.batch_size.unwrap_or(base.batch_size),
            target_sync_every: self.train.target_sync_every.unwrap_or(base.target_sync_every),
            learning_rate: self.train.learning_rate.unwrap_or(lr),
            validation_every: self.train.validation_every.unwrap_or(base.validation_every),
            buffer_capacity: self.train.buffer_capacity.unwrap_or(base.buffer_capacity),
            embedding_dim: self.train.embedding_dim.unwrap_or(dim),
            rounds: self.train.rounds.unwrap_or(rounds),
            hidden_dim: base.hidden_dim,
            seed,
            ..base
        }
    }
}

// ---------------------------------------------------------------------------
// seeding and datasets
// ---------------------------------------------------------------------------

// salts keeping the train/validation/test/eval seed spaces disjoint
pub const SALT_TRAIN: u64 = 1;
pub const SALT_VALIDATION: u64 = 2;
pub const SALT_TEST: u64 = 3;
pub const SALT_RANDOM_BASELINE: u64 = 4;
pub const SALT_SWEEP: u64 = 5;
pub const SALT_ATTACK: u64 = 6;
pub const SALT_TRAIN_SEEDS: u64 = 7;
pub const SALT_TIMING: u64 = 8;

/// SplitMix64 mix of a master seed and a salt; stable across runs.
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    let mut z = master ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generate `count` connected graphs with seeds derived from
/// `(master_seed, salt)`; element `i` is reproducible in isolation.
pub fn generate_set(
    model: ModelName,
    n: usize,
    count: usize,
    master_seed: u64,
    salt: u64,
) -> Result<Vec<Graph>, GenerateError> {
    let base = derive_seed(master_seed, salt);
    (0..count)
        .map(|i| {
            generate::generate(&GeneratorSpec {
                model: model.graph_model(),
                n,
                seed: derive_seed(base, i as u64),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// result rows
// ---------------------------------------------------------------------------

/// One emitted measurement with full provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub objective: String,
    pub graph_model: String,
    pub n: usize,
    pub budget_fraction: f64,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

pub fn write_result_rows(path: &Path, rows: &[ResultRow]) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => ExperimentError::io(path, io),
        other => ExperimentError::Config(format!("csv: {other:?}")),
    })?;
    for row in rows {
        writer.serialize(row).map_err(|e| ExperimentError::Config(format!("csv: {e}")))?;
    }
    writer.flush().map_err(|e| ExperimentError::io(path, e))?;
    Ok(())
}

fn create_dir(path: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(path).map_err(|e| ExperimentError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, text).map_err(|e| ExperimentError::io(path, e))
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct GraphSetManifest {
    pub model: ModelName,
    pub n: usize,
    pub count: usize,
    pub master_seed: u64,
    pub salt: u64,
    pub files: Vec<ManifestEntry>,
    /// Informational only; excluded from determinism comparisons.
    pub created_unix: Option<u64>,
}

#[derive(Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
}

/// Write `count` edge-list files plus a manifest recording per-file seeds.
pub fn cmd_generate(
    model: ModelName,
    n: usize,
    count: usize,
    master_seed: u64,
    out_dir: &Path,
) -> Result<GraphSetManifest, ExperimentError> {
    create_dir(out_dir)?;
    let salt = SALT_TEST;
    let base = derive_seed(master_seed, salt);
    let mut files = Vec::with_capacity(count);
    for i in 0..count {
        let seed = derive_seed(base, i as u64);
        let g = generate::generate(&GeneratorSpec { model: model.graph_model(), n, seed })?;
        let file = format!("graph_{i:04}.edges");
        write_text(&out_dir.join(&file), &graph::serialize_edge_list(&g))?;
        files.push(ManifestEntry { file, seed });
    }
    let manifest = GraphSetManifest {
        model,
        n,
        count,
        master_seed,
        salt,
        files,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs()),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    write_text(&out_dir.join("manifest.json"), &json)?;
    Ok(manifest)
}

/// Load every `*.edges` file in a directory, sorted by file name.
pub fn load_graph_dir(dir: &Path) -> Result<Vec<Graph>, ExperimentError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| ExperimentError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "edges"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).map_err(|e| ExperimentError::io(&p, e))?;
            Ok(graph::parse_edge_list(&text)?)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

pub struct TrainArtifacts {
    pub checkpoints: Vec<PathBuf>,
    pub curves: Vec<PathBuf>,
}

/// Train one model per training seed; writes a checkpoint and a learning
/// curve per seed and returns the written paths.
pub fn cmd_train(cfg: &ExperimentConfig, out_dir: &Path) -> Result<TrainArtifacts, ExperimentError> {
    create_dir(out_dir)?;
    let env_cfg = cfg.env_config();
    let train_graphs = generate_set(cfg.model, cfg.n, cfg.n_train, cfg.master_seed, SALT_TRAIN)?;
    let validation_graphs =
        generate_set(cfg.model, cfg.n, cfg.n_validation, cfg.master_seed, SALT_VALIDATION)?;

    let mut checkpoints = Vec::new();
    let mut curves = Vec::new();
    for seed_idx in 0..cfg.seeds {
        let train_seed = derive_seed(cfg.master_seed, SALT_TRAIN_SEEDS + seed_idx as u64);
        let tc = cfg.train_config(train_seed);
        let outcome = dqn::train(&train_graphs, &validation_graphs, &env_cfg, &tc)?;

        let stem = format!("{}_{}_seed{}", cfg.objective, cfg.model, seed_idx);
        let ckpt_path = out_dir.join(format!("ckpt_{stem}.json"));
        gnn::save_checkpoint(&outcome.best_params, &ckpt_path)?;
        checkpoints.push(ckpt_path);

        let curve_path = out_dir.join(format!("curve_{stem}.csv"));
        let mut text = String::from("step,validation_mean,validation_ci,best_so_far\n");
        for point in &outcome.curve {
            text.push_str(&format!(
                "{},{},{},{}\n",
                point.step, point.validation_mean, point.validation_ci, point.best_so_far
            ));
        }
        write_text(&curve_path, &text)?;
        curves.push(curve_path);
    }
    Ok(TrainArtifacts { checkpoints, curves })
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

/// Rewiring method selectable from the CLI.
pub enum Method {
    Random,
    Greedy,
    Dqn(ModelParams),
    NoOp,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Greedy => "greedy",
            Method::Dqn(_) => "dqn",
            Method::NoOp => "noop",
        }
    }

    fn strategy<'a>(&'a self, episode_seed: u64) -> Strategy<'a> {
        match self {
            Method::Random => Strategy::Random { seed: episode_seed },
            Method::Greedy => Strategy::Greedy,
            Method::Dqn(params) => Strategy::Policy(params),
            Method::NoOp => Strategy::NoOp,
        }
    }
}

pub struct EvalSummary {
    pub rows: Vec<ResultRow>,
    pub mean: f64,
    pub ci95: f64,
    pub evaluated: usize,
    pub disconnected: usize,
}

/// Evaluate a method on a graph set: per-graph delta-F rows plus mean/CI
/// summary rows; disconnected finals are excluded from the mean and counted.
pub fn cmd_eval(
    method: &Method,
    cfg: &ExperimentConfig,
    graphs: &[Graph],
    deadline: Option<Instant>,
) -> Result<EvalSummary, ExperimentError> {
    let env_cfg = cfg.env_config();
    let outcomes: Result<Vec<_>, BaselineError> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let episode_seed = derive_seed(cfg.master_seed, SALT_RANDOM_BASELINE + i as u64);
            baselines::run_strategy(&method.strategy(episode_seed), g, &env_cfg, deadline)
        })
        .collect();
    let outcomes = outcomes?;

    let mut rows = Vec::new();
    let mut deltas = Vec::new();
    let mut disconnected = 0;
    let base_row = |metric: &str, seed: u64, value: f64| ResultRow {
        method: method.name().to_string(),
        objective: cfg.objective.to_string(),
        graph_model: cfg.model.to_string(),
        n: cfg.n,
        budget_fraction: cfg.budget_fraction,
        seed,
        metric: metric.to_string(),
        value,
    };
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome.delta_f {
            Some(delta) => {
                deltas.push(delta);
                rows.push(base_row("delta_f", i as u64, delta));
            }
            None => {
                disconnected += 1;
                rows.push(base_row("disconnected", i as u64, 1.0));
            }
        }
    }
    let (mean, ci95) = stats::mean_ci95(&deltas);
    rows.push(base_row("mean_delta_f", 0, mean));
    rows.push(base_row("ci95_delta_f", 0, ci95));
    rows.push(base_row("disconnected_count", 0, disconnected as f64));
    Ok(EvalSummary { rows, mean, ci95, evaluated: deltas.len(), disconnected })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Out-of-distribution sweep over graph sizes and budgets. Greedy is
/// rejected here; its cost is prohibitive beyond small graphs.
pub fn cmd_sweep(
    method: &Method,
    cfg: &ExperimentConfig,
    deadline: Option<Instant>,
) -> Result<Vec<ResultRow>, ExperimentError> {
    if matches!(method, Method::Greedy) {
        return Err(ExperimentError::Usage("greedy is excluded from sweeps".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.sweep.sizes {
        for &budget_percent in &cfg.sweep.budgets_percent {
            if let Some(d) = deadline {
                if Instant::now() > d {
                    return Err(ExperimentError::Timeout);
                }
            }
            let budget_fraction = budget_percent as f64 / 100.0;
            let cell_salt = SALT_SWEEP + (n * 1000 + budget_percent) as u64;
            let graphs = generate_set(cfg.model, n, cfg.sweep.per_cell, cfg.master_seed, cell_salt)?;
            let env_cfg =
                EnvConfig::new(ObjectiveConfig::new(cfg.objective), budget_fraction);
            let outcomes: Result<Vec<_>, BaselineError> = graphs
                .par_iter()
                .enumerate()
                .map(|(i, g)| {
                    let episode_seed = derive_seed(cfg.master_seed, cell_salt + 7919 * (i as u64 + 1));
                    baselines::run_strategy(&method.strategy(episode_seed), g, &env_cfg, deadline)
                })
                .collect();
            for (i, outcome) in outcomes?.iter().enumerate() {
                let (metric, value) = match outcome.delta_f {
                    Some(delta) => ("delta_f", delta),
                    None => ("disconnected", 1.0),
                };
                rows.push(ResultRow {
                    method: method.name().to_string(),
                    objective: cfg.objective.to_string(),
                    graph_model: cfg.model.to_string(),
                    n,
                    budget_fraction,
                    seed: i as u64,
                    metric: metric.to_string(),
                    value,
                });
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct AttackSummary {
    pub method: String,
    pub objective: String,
    pub graph_model: String,
    pub graphs: usize,
    /// Graphs skipped because the rewiring disconnected them.
    pub disconnected_rewirings: usize,
    /// Graphs where the strategy hit its deadline (greedy at scale).
    pub infeasible: usize,
    pub mean_normalized_cost: f64,
    pub ci95_normalized_cost: f64,
}

pub struct AttackArtifacts {
    pub rows: Vec<ResultRow>,
    /// (graph index, entry, target, cost) walk records.
    pub walk_rows: Vec<(usize, usize, usize, u64)>,
    pub summary: AttackSummary,
}

/// Rewire each graph with the method, then measure attacker random-walk
/// costs on the result. A greedy run that exceeds `per_graph_timeout` is
/// recorded as infeasible rather than failing the command.
pub fn cmd_attack(
    method: &Method,
    cfg: &ExperimentConfig,
    graphs: &[Graph],
    entry_rule: EntryRule,
    per_graph_timeout: Option<Duration>,
) -> Result<AttackArtifacts, ExperimentError> {
    use rand::SeedableRng;
    let env_cfg = cfg.env_config();
    let mut rows = Vec::new();
    let mut walk_rows = Vec::new();
    let mut normalized = Vec::new();
    let mut disconnected_rewirings = 0;
    let mut infeasible = 0;
    for (i, g0) in graphs.iter().enumerate() {
        let episode_seed = derive_seed(cfg.master_seed, SALT_ATTACK + 31 * (i as u64 + 1));
        let deadline = per_graph_timeout.map(|t| Instant::now() + t);
        let outcome = match baselines::run_strategy(&method.strategy(episode_seed), g0, &env_cfg, deadline)
        {
            Ok(outcome) => outcome,
            Err(BaselineError::Timeout(_)) => {
                infeasible += 1;
                rows.push(ResultRow {
                    method: method.name().to_string(),
                    objective: cfg.objective.to_string(),
                    graph_model: cfg.model.to_string(),
                    n: g0.n(),
                    budget_fraction: cfg.budget_fraction,
                    seed: i as u64,
                    metric: "infeasible".to_string(),
                    value: 1.0,
                });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if !outcome.connected {
            disconnected_rewirings += 1;
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, SALT_ATTACK + i as u64));
        let report = attack::evaluate_rewiring(g0, &outcome.final_graph, entry_rule, cfg.hops, &mut rng)?;
        for entry_report in &report.per_entry {
            for (&target, &cost) in &entry_report.per_target {
                walk_rows.push((i, entry_report.entry, target, cost));
            }
        }
        normalized.push(report.mean_normalized);
        rows.push(ResultRow {
            method: method.name().to_string(),
            objective: cfg.objective.to_string(),
            graph_model: cfg.model.to_string(),
            n: g0.n(),
            budget_fraction: cfg.budget_fraction,
            seed: i as u64,
            metric: "normalized_cost".to_string(),
            value: report.mean_normalized,
        });
    }
    let (mean, ci) = stats::mean_ci95(&normalized);
    let summary = AttackSummary {
        method: method.name().to_string(),
        objective: cfg.objective.to_string(),
        graph_model: cfg.model.to_string(),
        graphs: graphs.len(),
        disconnected_rewirings,
        infeasible,
        mean_normalized_cost: mean,
        ci95_normalized_cost: ci,
    };
    Ok(AttackArtifacts { rows, walk_rows, summary })
}

pub fn write_walk_rows(
    path: &Path,
    walk_rows: &[(usize, usize, usize, u64)],
) -> Result<(), ExperimentError> {
    let mut text = String::from("graph,entry,target,cost\n");
    for &(g, entry, target, cost) in walk_rows {
        text.push_str(&format!("{g},{entry},{target},{cost}\n"));
    }
    write_text(path, &text)
}

// ---------------------------------------------------------------------------
// timing
// ---------------------------------------------------------------------------

/// Wall-clock episode times per method and graph size.
pub fn cmd_timing(
    methods: &[Method],
    sizes: &[usize],
    cfg: &ExperimentConfig,
    repeats: usize,
    deadline: Option<Instant>,
) -> Result<Vec<ResultRow>, ExperimentError> {
    let env_cfg = cfg.env_config();
    let mut rows = Vec::new();
    for method in methods {
        for &n in sizes {
            for rep in 0..repeats {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return Err(ExperimentError::Timeout);
                    }
                }
                let g = generate::generate(&GeneratorSpec {
                    model: cfg.model.graph_model(),
                    n,
                    seed: derive_seed(cfg.master_seed, SALT_TIMING + n as u64),
                })?;
                let episode_seed = derive_seed(cfg.master_seed, 97 * (rep as u64 + 1));
                let (elapsed, _) =
                    baselines::time_episode(&method.strategy(episode_seed), &g, &env_cfg)?;
                rows.push(ResultRow {
                    method: method.name().to_string(),
                    objective: cfg.objective.to_string(),
                    graph_model: cfg.model.to_string(),
                    n,
                    budget_fraction: cfg.budget_fraction,
                    seed: rep as u64,
                    metric: "seconds".to_string(),
                    value: elapsed.as_secs_f64(),
                });
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct IngestSummary {
    pub n: usize,
    pub m: usize,
    pub diameter: usize,
}

/// Parse a comma-separated event log into (source, destination) host pairs.
/// Columns are located by header names when present, otherwise the first
/// two columns are used.
pub fn parse_event_csv(text: &str) -> Result<Vec<(String, String)>, ExperimentError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut records: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        records.push(record.map_err(|e| ExperimentError::Config(format!("event csv: {e}")))?);
    }
    if records.is_empty() {
        return Ok(Vec::new());
    }
    let src_names = ["src", "source", "from", "src_host", "source_host"];
    let dst_names = ["dst", "dest", "destination", "to", "dst_host", "destination_host"];
    let header = &records[0];
    let find = |names: &[&str]| {
        header.iter().position(|field| names.contains(&field.trim().to_ascii_lowercase().as_str()))
    };
    let (src_col, dst_col, skip_header) = match (find(&src_names), find(&dst_names)) {
        (Some(s), Some(d)) => (s, d, true),
        _ => (0, 1, false),
    };
    let mut pairs = Vec::new();
    for record in records.iter().skip(if skip_header { 1 } else { 0 }) {
        let (Some(src), Some(dst)) = (record.get(src_col), record.get(dst_col)) else {
            return Err(ExperimentError::Config(format!(
                "event csv row with {} fields, need source/destination columns",
                record.len()
            )));
        };
        let (src, dst) = (src.trim(), dst.trim());
        if src.is_empty() || dst.is_empty() {
            continue;
        }
        pairs.push((src.to_string(), dst.to_string()));
    }
    Ok(pairs)
}

/// Full ingestion command: events CSV to edge-list file plus a summary with
/// the resulting n, m and diameter.
pub fn cmd_ingest(
    events_path: &Path,
    degree_cap: usize,
    filter: &LeafFilter,
    out_dir: &Path,
    name: &str,
) -> Result<IngestSummary, ExperimentError> {
    let text =
        std::fs::read_to_string(events_path).map_err(|e| ExperimentError::io(events_path, e))?;
    let pairs = parse_event_csv(&text)?;
    let report = ingest::ingest_host_events(pairs, degree_cap, filter)?;
    create_dir(out_dir)?;
    write_text(&out_dir.join(format!("{name}.edges")), &graph::serialize_edge_list(&report.graph))?;
    let mut hosts = String::new();
    for (id, host) in report.hosts.iter().enumerate() {
        hosts.push_str(&format!("{id},{host}\n"));
    }
    write_text(&out_dir.join(format!("{name}_hosts.csv")), &hosts)?;
    let summary =
        IngestSummary { n: report.graph.n(), m: report.graph.m(), diameter: report.diameter };
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| ExperimentError::Config(e.to_string()))?;
    write_text(&out_dir.join(format!("{name}_report.json")), &json)?;
    Ok(summary)
}

/// Write a JSON summary next to CSV outputs.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let json = serde_json::to_string_pretty(value).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut file = std::fs::File::create(path).map_err(|e| ExperimentError::io(path, e))?;
    file.write_all(json.as_bytes()).map_err(|e| ExperimentError::io(path, e))?;
    Ok(())
}
