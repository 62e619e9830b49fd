//! Command-line front end for the rewiring engine.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error, 3 timeout.

use clap::{Args, Parser, Subcommand};
use rewire_core::attack::EntryRule;
use rewire_core::experiment::{
    self, cmd_attack, cmd_eval, cmd_generate, cmd_ingest, cmd_sweep, cmd_timing, cmd_train,
    generate_set, load_graph_dir, write_result_rows, write_walk_rows, ExperimentConfig,
    ExperimentError, Method, ModelName, SALT_TEST,
};
use rewire_core::gnn;
use rewire_core::graph::Graph;
use rewire_core::ingest::{LeafFilter, DEFAULT_DEGREE_CAP};
use std::path::PathBuf;
use std::time::{Duration, Instant};

#[derive(Parser)]
#[command(
    name = "rewire",
    about = "Graph rewiring for entropy maximization: training, baselines, sweeps, attack simulation",
    version
)]
struct Cli {
    /// Master seed; fixes graph generation, training and evaluation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for per-graph fan-out (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Time budget in seconds. Most commands abort with exit code 3 when it
    /// expires; `attack` instead records each over-budget greedy rewiring
    /// as infeasible and continues.
    #[arg(long, global = true)]
    timeout: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a set of generated graphs as edge-list files with a manifest.
    Generate {
        #[arg(long)]
        model: ModelName,
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Train DQN models (one per training seed) and write checkpoints plus
    /// learning-curve CSVs.
    Train,
    /// Evaluate a rewiring method on a test set; writes a per-graph and
    /// summary CSV.
    Eval(MethodArgs),
    /// Evaluate a checkpoint (or random) across graph sizes and budgets.
    Sweep(MethodArgs),
    /// Rewire graphs and measure attacker random-walk costs.
    Attack(AttackArgs),
    /// Wall-clock episode times per method and graph size.
    Timing {
        /// Comma-separated methods: random, greedy, dqn.
        #[arg(long, value_delimiter = ',', default_value = "greedy,dqn")]
        methods: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "20,40,60,80")]
        sizes: Vec<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
    /// Build a graph from a comma-separated host event log.
    Ingest {
        /// CSV with source/destination host columns.
        #[arg(long)]
        events: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
        /// Minimum neighbor count before the leaf filter applies.
        #[arg(long, default_value_t = 10)]
        leaf_min_neighbors: usize,
        /// Fraction of degree-1 neighbors that marks a node for removal.
        #[arg(long, default_value_t = 0.8)]
        leaf_fraction: f64,
        /// Base name for the emitted files.
        #[arg(long, default_value = "ingested")]
        name: String,
    },
}

#[derive(Args)]
struct MethodArgs {
    /// random, greedy, dqn or noop.
    #[arg(long)]
    method: String,
    /// Checkpoint path; required for the dqn method.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Evaluate graphs from this directory instead of generating them.
    #[arg(long)]
    graphs: Option<PathBuf>,
    /// Number of graphs to generate when --graphs is not given.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// Entry sampling: "synthetic" (min(n,30)), "all", or a number.
    #[arg(long, default_value = "synthetic")]
    entries: String,
}

fn resolve_method(args: &MethodArgs) -> Result<Method, ExperimentError> {
    match args.method.to_ascii_lowercase().as_str() {
        "random" => Ok(Method::Random),
        "greedy" => Ok(Method::Greedy),
        "noop" => Ok(Method::NoOp),
        "dqn" => {
            let path = args.checkpoint.as_ref().ok_or_else(|| {
                ExperimentError::Usage("--checkpoint is required for the dqn method".into())
            })?;
            Ok(Method::Dqn(gnn::load_checkpoint(path)?))
        }
        other => Err(ExperimentError::Usage(format!(
            "unknown method {other:?} (expected random, greedy, dqn, noop)"
        ))),
    }
}

fn resolve_graphs(
    args: &MethodArgs,
    cfg: &ExperimentConfig,
) -> Result<Vec<Graph>, ExperimentError> {
    match &args.graphs {
        Some(dir) => load_graph_dir(dir),
        None => {
            let count = args.count.unwrap_or(cfg.n_test);
            Ok(generate_set(cfg.model, cfg.n, count, cfg.master_seed, SALT_TEST)?)
        }
    }
}

fn parse_entries(spec: &str) -> Result<EntryRule, ExperimentError> {
    match spec.to_ascii_lowercase().as_str() {
        "synthetic" => Ok(EntryRule::Synthetic),
        "all" => Ok(EntryRule::AllNodes),
        number => number
            .parse::<usize>()
            .map(EntryRule::Fixed)
            .map_err(|_| ExperimentError::Usage(format!("bad --entries value {spec:?}"))),
    }
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    let deadline = cli.timeout.map(|secs| Instant::now() + Duration::from_secs(secs));
    let out = &cli.out;
    std::fs::create_dir_all(out)
        .map_err(|e| ExperimentError::Usage(format!("cannot create {}: {e}", out.display())))?;

    match cli.command {
        Command::Generate { model, n, count } => {
            let manifest = cmd_generate(model, n, count, cfg.master_seed, out)?;
            println!("wrote {} graphs to {}", manifest.count, out.display());
        }
        Command::Train => {
            let artifacts = cmd_train(&cfg, out)?;
            for path in &artifacts.checkpoints {
                println!("checkpoint {}", path.display());
            }
        }
        Command::Eval(args) => {
            let method = resolve_method(&args)?;
            let graphs = resolve_graphs(&args, &cfg)?;
            let summary = cmd_eval(&method, &cfg, &graphs, deadline)?;
            let path =
                out.join(format!("eval_{}_{}_{}.csv", method.name(), cfg.objective, cfg.model));
            write_result_rows(&path, &summary.rows)?;
            println!(
                "{}: mean delta_f {:.4} +- {:.4} over {} graphs ({} disconnected) -> {}",
                method.name(),
                summary.mean,
                summary.ci95,
                summary.evaluated,
                summary.disconnected,
                path.display()
            );
        }
        Command::Sweep(args) => {
            let method = resolve_method(&args)?;
            let rows = cmd_sweep(&method, &cfg, deadline)?;
            let path =
                out.join(format!("sweep_{}_{}_{}.csv", method.name(), cfg.objective, cfg.model));
            write_result_rows(&path, &rows)?;
            println!("{} sweep rows -> {}", rows.len(), path.display());
        }
        Command::Attack(args) => {
            let method = resolve_method(&args.method)?;
            let graphs = resolve_graphs(&args.method, &cfg)?;
            let entry_rule = parse_entries(&args.entries)?;
            let per_graph_timeout = cli.timeout.map(Duration::from_secs);
            let artifacts = cmd_attack(&method, &cfg, &graphs, entry_rule, per_graph_timeout)?;
            let stem = format!("attack_{}_{}_{}", method.name(), cfg.objective, cfg.model);
            write_result_rows(&out.join(format!("{stem}.csv")), &artifacts.rows)?;
            write_walk_rows(&out.join(format!("{stem}_walks.csv")), &artifacts.walk_rows)?;
            experiment::write_json(&out.join(format!("{stem}_summary.json")), &artifacts.summary)?;
            println!(
                "{}: mean normalized cost {:.4} +- {:.4} ({} infeasible, {} disconnected)",
                method.name(),
                artifacts.summary.mean_normalized_cost,
                artifacts.summary.ci95_normalized_cost,
                artifacts.summary.infeasible,
                artifacts.summary.disconnected_rewirings
            );
        }
        Command::Timing { methods, sizes, checkpoint, repeats } => {
            let mut resolved = Vec::new();
            for name in &methods {
                resolved.push(resolve_method(&MethodArgs {
                    method: name.clone(),
                    checkpoint: checkpoint.clone(),
                    graphs: None,
                    count: None,
                })?);
            }
            let rows = cmd_timing(&resolved, &sizes, &cfg, repeats, deadline)?;
            let path = out.join("timing.csv");
            write_result_rows(&path, &rows)?;
            println!("{} timing rows -> {}", rows.len(), path.display());
        }
        Command::Ingest { events, degree_cap, leaf_min_neighbors, leaf_fraction, name } => {
            let filter =
                LeafFilter { min_neighbors: leaf_min_neighbors, degree_one_fraction: leaf_fraction };
            let summary = cmd_ingest(&events, degree_cap, &filter, out, &name)?;
            println!(
                "ingested graph: n={} m={} diameter={}",
                summary.n, summary.m, summary.diameter
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are success, everything else is usage
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
