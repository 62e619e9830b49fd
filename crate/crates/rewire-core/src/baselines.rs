//! Random and Greedy rewiring strategies.
//!
//! Random acts in the same MDP as the learned policy but picks uniformly
//! among legal actions. Greedy is a one-step search: for each budgeted
//! operation it enumerates every legal rewiring triple, discards the ones
//! that would disconnect the graph, and applies the one with the best
//! objective value.

use crate::dqn::{self, DqnError};
use crate::env::{self, EnvConfig, EnvError, EpisodeResult};
use crate::gnn::ModelParams;
use crate::graph::{Graph, NodeId};
use crate::objectives::{self, ObjectiveError};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Dqn(#[from] DqnError),
    #[error("deadline exceeded after {0:?}")]
    Timeout(Duration),
}

/// Uniform-random episode in the rewiring MDP.
pub fn random_episode(
    g0: &Graph,
    cfg: &EnvConfig,
    rng: &mut ChaCha8Rng,
) -> Result<EpisodeResult, EnvError> {
    env::run_episode(g0, cfg, |_, actions| actions[rng.random_range(0..actions.len())])
}

/// Greedy-policy episode using a trained model.
pub fn policy_episode(
    g0: &Graph,
    cfg: &EnvConfig,
    params: &ModelParams,
) -> Result<EpisodeResult, BaselineError> {
    Ok(env::run_episode(g0, cfg, |state, actions| {
        dqn::greedy_action(state, actions, params).expect("non-empty action set")
    })?)
}

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    pub final_graph: Graph,
    pub delta_f: f64,
    /// Rewirings applied, in order.
    pub applied: Vec<(NodeId, NodeId, NodeId)>,
    /// Operations where every candidate would have disconnected the graph.
    pub skipped_ops: usize,
}

/// Greedy search over the same budget as the MDP. Candidates that
/// disconnect the graph are filtered, so the final graph is always
/// connected; ties break toward the lexicographically smallest triple.
pub fn greedy_episode(g0: &Graph, cfg: &EnvConfig) -> Result<GreedyOutcome, BaselineError> {
    greedy_episode_with_deadline(g0, cfg, None)
}

/// As `greedy_episode`, aborting with `BaselineError::Timeout` once the
/// deadline passes. The check runs between candidate evaluations.
pub fn greedy_episode_with_deadline(
    g0: &Graph,
    cfg: &EnvConfig,
    deadline: Option<Instant>,
) -> Result<GreedyOutcome, BaselineError> {
    if !g0.is_connected() {
        return Err(BaselineError::Env(EnvError::DisconnectedStart));
    }
    let start = Instant::now();
    let kind = cfg.objective.kind;
    let f0 = objectives::evaluate(kind, g0)?;
    let budget = env::budget(g0.m(), cfg.budget_fraction);

    let mut graph = g0.clone();
    let mut applied = Vec::with_capacity(budget);
    let mut skipped_ops = 0;
    for _ in 0..budget {
        let mut best: Option<((NodeId, NodeId, NodeId), f64)> = None;
        let mut scratch = graph.clone();
        for (idx, &(v1, v2, v3)) in env::enumerate_rewirings(&graph).iter().enumerate() {
            if idx % 64 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return Err(BaselineError::Timeout(start.elapsed()));
                    }
                }
            }
            scratch.add_edge(v1, v2).expect("legal triple");
            scratch.remove_edge(v1, v3).expect("legal triple");
            if scratch.is_connected() {
                let f = objectives::evaluate(kind, &scratch)?;
                if best.map_or(true, |(_, best_f)| f > best_f) {
                    best = Some(((v1, v2, v3), f));
                }
            }
            // undo
            scratch.add_edge(v1, v3).expect("undo removal");
            scratch.remove_edge(v1, v2).expect("undo addition");
        }
        match best {
            Some(((v1, v2, v3), _)) => {
                graph.add_edge(v1, v2).expect("legal triple");
                graph.remove_edge(v1, v3).expect("legal triple");
                applied.push((v1, v2, v3));
            }
            None => skipped_ops += 1,
        }
    }
    let delta_f = objectives::evaluate(kind, &graph)? - f0;
    Ok(GreedyOutcome { final_graph: graph, delta_f, applied, skipped_ops })
}

/// A rewiring strategy for timing and downstream evaluation.
pub enum Strategy<'a> {
    Random { seed: u64 },
    Greedy,
    Policy(&'a ModelParams),
    /// Leaves the graph untouched; reference point for attack metrics.
    NoOp,
}

impl Strategy<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Random { .. } => "random",
            Strategy::Greedy => "greedy",
            Strategy::Policy(_) => "dqn",
            Strategy::NoOp => "noop",
        }
    }
}

#[derive(Clone, Debug)]
pub struct StrategyOutcome {
    pub final_graph: Graph,
    /// F(G_T) - F(G_0); None when the final graph is disconnected.
    pub delta_f: Option<f64>,
    pub connected: bool,
    pub skipped_ops: usize,
}

/// Run one rewiring episode under the given strategy.
pub fn run_strategy(
    strategy: &Strategy,
    g0: &Graph,
    cfg: &EnvConfig,
    deadline: Option<Instant>,
) -> Result<StrategyOutcome, BaselineError> {
    match strategy {
        Strategy::Random { seed } => {
            use rand::SeedableRng;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let r = random_episode(g0, cfg, &mut rng)?;
            Ok(StrategyOutcome {
                final_graph: r.final_graph,
                delta_f: r.delta_f,
                connected: r.connected,
                skipped_ops: 0,
            })
        }
        Strategy::Greedy => {
            let r = greedy_episode_with_deadline(g0, cfg, deadline)?;
            Ok(StrategyOutcome {
                final_graph: r.final_graph,
                delta_f: Some(r.delta_f),
                connected: true,
                skipped_ops: r.skipped_ops,
            })
        }
        Strategy::Policy(params) => {
            let r = policy_episode(g0, cfg, params)?;
            Ok(StrategyOutcome {
                final_graph: r.final_graph,
                delta_f: r.delta_f,
                connected: r.connected,
                skipped_ops: 0,
            })
        }
        Strategy::NoOp => Ok(StrategyOutcome {
            final_graph: g0.clone(),
            delta_f: Some(0.0),
            connected: true,
            skipped_ops: 0,
        }),
    }
}

/// Wall-clock time of one full episode under the strategy.
pub fn time_episode(
    strategy: &Strategy,
    g0: &Graph,
    cfg: &EnvConfig,
) -> Result<(Duration, StrategyOutcome), BaselineError> {
    let start = Instant::now();
    let outcome = run_strategy(strategy, g0, cfg, None)?;
    Ok((start.elapsed(), outcome))
}
