//! Sequential rewiring environment.
//!
//! One rewiring operation spans three sub-steps: pick a base node, pick a
//! node to connect it to (the edge is added immediately), then pick one of
//! the base node's other edges to remove. Rewards are terminal-only: the
//! scaled objective gain when the final graph is connected, a fixed penalty
//! when it is not. Connectivity is never checked mid-episode.

use crate::graph::{Graph, NodeId};
use crate::objectives::{self, ObjectiveConfig, ObjectiveError};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

pub const DISCONNECT_PENALTY: f64 = -10.0;

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("initial graph must be connected")]
    DisconnectedStart,
    #[error("budget fraction must be in (0, 1], got {0}")]
    BadBudgetFraction(f64),
    #[error("illegal action {action} at phase {phase}")]
    IllegalAction { phase: usize, action: NodeId },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvConfig {
    pub objective: ObjectiveConfig,
    pub budget_fraction: f64,
    pub disconnect_penalty: f64,
}

impl EnvConfig {
    pub fn new(objective: ObjectiveConfig, budget_fraction: f64) -> Self {
        EnvConfig { objective, budget_fraction, disconnect_penalty: DISCONNECT_PENALTY }
    }
}

/// MDP state: current graph plus the marked base/addition nodes.
#[derive(Clone, Debug)]
pub struct RewireState {
    pub graph: Graph,
    pub base: Option<NodeId>,
    pub addition: Option<NodeId>,
    pub t: usize,
    pub budget: usize,
    pub f0: f64,
    /// Edge set of G_0, shared across the episode's states.
    pub g0_edges: Arc<Vec<(NodeId, NodeId)>>,
}

impl RewireState {
    /// Sub-step within the current rewiring operation: t mod 3.
    pub fn phase(&self) -> usize {
        self.t % 3
    }

    /// Episode horizon T = 3b.
    pub fn horizon(&self) -> usize {
        3 * self.budget
    }

    pub fn ops_remaining(&self) -> usize {
        self.budget - self.t / 3
    }

    pub fn is_terminal(&self) -> bool {
        self.t >= self.horizon()
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub next_state: RewireState,
    pub reward: f64,
    pub terminal: bool,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Episode budget rule: `max(1, round-half-up(fraction * m))`.
pub fn budget(m: usize, fraction: f64) -> usize {
    round_half_up(fraction * m as f64).max(1)
}

/// Fresh episode state on `g0` with budget `max(1, round(fraction * m))`.
pub fn reset(g0: &Graph, cfg: &EnvConfig) -> Result<RewireState, EnvError> {
    if !(cfg.budget_fraction > 0.0 && cfg.budget_fraction <= 1.0) {
        return Err(EnvError::BadBudgetFraction(cfg.budget_fraction));
    }
    if !g0.is_connected() {
        return Err(EnvError::DisconnectedStart);
    }
    let budget = budget(g0.m(), cfg.budget_fraction);
    let f0 = objectives::evaluate(cfg.objective.kind, g0)?;
    Ok(RewireState {
        graph: g0.clone(),
        base: None,
        addition: None,
        t: 0,
        budget,
        f0,
        g0_edges: Arc::new(g0.edges()),
    })
}

/// Legal actions for the state's phase, ascending by node id.
///
/// Phase 0 admits nodes that have at least one edge to move and at least one
/// non-neighbor to move it to. Phase 1 admits non-neighbors of the base
/// (the base itself excluded). Phase 2 admits the base's neighbors other
/// than the just-added one.
pub fn valid_actions(s: &RewireState) -> Vec<NodeId> {
    let g = &s.graph;
    let n = g.n();
    match s.phase() {
        0 => (0..n).filter(|&v| g.degree(v) > 0 && g.degree(v) < n - 1).collect(),
        1 => {
            let a1 = s.base.expect("phase 1 has a base node");
            (0..n).filter(|&v| v != a1 && !g.has_edge(a1, v)).collect()
        }
        2 => {
            let a1 = s.base.expect("phase 2 has a base node");
            let a2 = s.addition.expect("phase 2 has an addition node");
            g.neighbors(a1).iter().copied().filter(|&v| v != a2).collect()
        }
        _ => unreachable!(),
    }
}

fn check_legal(s: &RewireState, action: NodeId) -> Result<(), EnvError> {
    let g = &s.graph;
    let illegal = EnvError::IllegalAction { phase: s.phase(), action };
    if action >= g.n() {
        return Err(illegal);
    }
    let ok = match s.phase() {
        0 => g.degree(action) > 0 && g.degree(action) < g.n() - 1,
        1 => {
            let a1 = s.base.expect("phase 1 has a base node");
            action != a1 && !g.has_edge(a1, action)
        }
        2 => {
            let a1 = s.base.expect("phase 2 has a base node");
            g.has_edge(a1, action) && Some(action) != s.addition
        }
        _ => unreachable!(),
    };
    if ok {
        Ok(())
    } else {
        Err(illegal)
    }
}

/// Deterministic transition. The terminal reward is the scaled objective
/// gain over f0 when the final graph is connected, the disconnection
/// penalty otherwise; every non-terminal reward is zero.
pub fn step(s: &RewireState, action: NodeId, cfg: &EnvConfig) -> Result<StepOutcome, EnvError> {
    check_legal(s, action)?;
    let mut next = s.clone();
    match s.phase() {
        0 => next.base = Some(action),
        1 => {
            let a1 = next.base.expect("phase 1 has a base node");
            next.addition = Some(action);
            next.graph.add_edge(a1, action).expect("checked non-edge");
        }
        2 => {
            let a1 = next.base.expect("phase 2 has a base node");
            next.graph.remove_edge(a1, action).expect("checked edge");
            next.base = None;
            next.addition = None;
        }
        _ => unreachable!(),
    }
    next.t += 1;
    let terminal = next.t == next.horizon();
    let reward = if terminal { terminal_reward(&next, cfg)? } else { 0.0 };
    Ok(StepOutcome { next_state: next, reward, terminal })
}

fn terminal_reward(final_state: &RewireState, cfg: &EnvConfig) -> Result<f64, EnvError> {
    if final_state.graph.is_connected() {
        let f = objectives::evaluate(cfg.objective.kind, &final_state.graph)?;
        Ok(cfg.objective.reward_scale * (f - final_state.f0))
    } else {
        Ok(cfg.disconnect_penalty)
    }
}

/// All rewiring triples (base, addition, removal) legal under the three
/// action spaces applied in sequence on `g`.
pub fn enumerate_rewirings(g: &Graph) -> Vec<(NodeId, NodeId, NodeId)> {
    let n = g.n();
    let mut out = Vec::new();
    for v1 in 0..n {
        let k = g.degree(v1);
        if k == 0 || k >= n - 1 {
            continue;
        }
        for v2 in 0..n {
            if v2 == v1 || g.has_edge(v1, v2) {
                continue;
            }
            for &v3 in g.neighbors(v1) {
                // v3 != v2 holds because v2 is a non-neighbor of v1
                out.push((v1, v2, v3));
            }
        }
    }
    out
}

/// Per-step record of an episode, exportable for debugging and replay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: usize,
    pub phase: usize,
    pub action: NodeId,
    pub reward: f64,
}

#[derive(Clone, Debug)]
pub struct EpisodeResult {
    pub final_graph: Graph,
    /// F(G_T) - F(G_0) when the final graph is connected.
    pub delta_f: Option<f64>,
    pub connected: bool,
    pub total_reward: f64,
    pub trace: Vec<TraceRecord>,
    /// True when the episode ended early because phase 0 had no legal action.
    pub stuck: bool,
}

/// Run one full episode, delegating action choice to `policy`. The policy
/// receives the state and its non-empty legal action set. An empty phase-0
/// action set ends the episode immediately with reward 0.
pub fn run_episode<F>(g0: &Graph, cfg: &EnvConfig, mut policy: F) -> Result<EpisodeResult, EnvError>
where
    F: FnMut(&RewireState, &[NodeId]) -> NodeId,
{
    let mut state = reset(g0, cfg)?;
    let mut trace = Vec::with_capacity(state.horizon());
    let mut total_reward = 0.0;
    while !state.is_terminal() {
        let actions = valid_actions(&state);
        if actions.is_empty() {
            debug_assert_eq!(state.phase(), 0, "only phase 0 can lack legal actions");
            return Ok(EpisodeResult {
                final_graph: state.graph,
                delta_f: Some(0.0),
                connected: true,
                total_reward: 0.0,
                trace,
                stuck: true,
            });
        }
        let action = policy(&state, &actions);
        let outcome = step(&state, action, cfg)?;
        trace.push(TraceRecord { t: state.t, phase: state.phase(), action, reward: outcome.reward });
        total_reward += outcome.reward;
        state = outcome.next_state;
    }
    let connected = state.graph.is_connected();
    let delta_f = connected.then(|| total_reward / cfg.objective.reward_scale);
    Ok(EpisodeResult { final_graph: state.graph, delta_f, connected, total_reward, trace, stuck: false })
}
