//! Value-based training: replay buffer, target network, epsilon-greedy
//! behavior, TD targets, Adam updates and validation-based model selection.

use crate::env::{self, EnvConfig, EnvError, RewireState};
use crate::gnn::{self, BatchSample, GnnError, Gradients, Mode, ModelParams};
use crate::graph::{Graph, NodeId};
use crate::stats;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DqnError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Gnn(#[from] GnnError),
    #[error("replay buffer holds {have} transitions, need {need}")]
    InsufficientBuffer { have: usize, need: usize },
    #[error("no legal actions available")]
    NoActions,
    #[error("graph set must not be empty")]
    EmptyGraphSet,
}

/// One observed MDP transition.
#[derive(Clone, Debug)]
pub struct Transition {
    pub state: RewireState,
    pub action: NodeId,
    pub reward: f64,
    pub next_state: RewireState,
    pub terminal: bool,
}

/// Fixed-capacity ring buffer; inserting into a full buffer replaces the
/// oldest transition.
pub struct ReplayBuffer {
    capacity: usize,
    ring: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        ReplayBuffer { capacity, ring: VecDeque::with_capacity(capacity) }
    }

    pub fn push(&mut self, tr: Transition) {
        debug_assert!(tr.reward == 0.0 || tr.terminal, "rewards are terminal-only");
        if self.ring.len() == self.capacity {
            self.ring.pop_front();
        }
        self.ring.push_back(tr);
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.ring[idx]
    }
}

/// Training hyperparameters. Defaults follow the full-scale recipe; the
/// learning rate, embedding size and round count vary per objective and
/// graph model.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub total_steps: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    pub eps_decay_steps: usize,
    pub batch_size: usize,
    pub target_sync_every: usize,
    pub learning_rate: f64,
    pub discount: f64,
    pub validation_every: usize,
    pub buffer_capacity: usize,
    pub embedding_dim: usize,
    pub rounds: usize,
    pub hidden_dim: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            total_steps: 120_000,
            eps_start: 1.0,
            eps_end: 0.1,
            eps_decay_steps: 40_000,
            batch_size: 50,
            target_sync_every: 50,
            learning_rate: 5e-4,
            discount: 1.0,
            validation_every: 500,
            buffer_capacity: 12_000,
            embedding_dim: 128,
            rounds: 3,
            hidden_dim: gnn::DEFAULT_HIDDEN_DIM,
            seed: 0,
        }
    }
}

/// Linear decay from `eps_start` to `eps_end` over the first
/// `eps_decay_steps` steps, constant afterwards.
pub fn epsilon(step: usize, cfg: &TrainConfig) -> f64 {
    let frac = (step.min(cfg.eps_decay_steps)) as f64 / cfg.eps_decay_steps as f64;
    cfg.eps_start - (cfg.eps_start - cfg.eps_end) * frac
}

/// Argmax of eval-mode Q over `actions`; ties broken by the lowest node id
/// (actions are ascending, strict comparison keeps the first maximum).
pub fn greedy_action(
    state: &RewireState,
    actions: &[NodeId],
    params: &ModelParams,
) -> Result<NodeId, GnnError> {
    let q = gnn::q_values(state, actions, params, Mode::Eval)?;
    let mut best = 0;
    for i in 1..q.len() {
        if q[i] > q[best] {
            best = i;
        }
    }
    Ok(actions[best])
}

/// Epsilon-greedy behavior policy.
pub fn behave(
    state: &RewireState,
    params: &ModelParams,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<NodeId, DqnError> {
    let actions = env::valid_actions(state);
    if actions.is_empty() {
        return Err(DqnError::NoActions);
    }
    if rng.random::<f64>() < eps {
        Ok(actions[rng.random_range(0..actions.len())])
    } else {
        Ok(greedy_action(state, &actions, params)?)
    }
}

/// TD target: the raw reward for terminal transitions, otherwise
/// `r + discount * max_a' Q_target(s', a')` with the head picked by the next
/// state's phase. A next state without legal actions contributes no
/// bootstrap value.
pub fn td_target(tr: &Transition, target_params: &ModelParams, discount: f64) -> Result<f64, GnnError> {
    if tr.terminal {
        return Ok(tr.reward);
    }
    let actions = env::valid_actions(&tr.next_state);
    if actions.is_empty() {
        return Ok(tr.reward);
    }
    let q = gnn::q_values(&tr.next_state, &actions, target_params, Mode::Eval)?;
    let max_q = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(tr.reward + discount * max_q)
}

/// Adam optimizer over the flat weight vector.
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, weight_count: usize) -> Self {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: vec![0.0; weight_count], v: vec![0.0; weight_count] }
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &Gradients) {
        let g = grads.flatten();
        let mut w = params.flatten_weights();
        assert_eq!(g.len(), w.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..w.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g[i] * g[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            w[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        *params = params.with_weights(&w);
    }
}

/// One optimization step: sample a batch uniformly, regress train-mode
/// online Q-values onto TD targets from the target network, apply one Adam
/// update, and fold the batch statistics into the online batch-norm state.
/// Returns the pre-update loss.
pub fn train_step(
    buffer: &ReplayBuffer,
    online: &mut ModelParams,
    target: &ModelParams,
    optimizer: &mut Adam,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64, DqnError> {
    if buffer.len() < cfg.batch_size {
        return Err(DqnError::InsufficientBuffer { have: buffer.len(), need: cfg.batch_size });
    }
    let indices: Vec<usize> =
        (0..cfg.batch_size).map(|_| rng.random_range(0..buffer.len())).collect();
    let mut targets = Vec::with_capacity(indices.len());
    for &i in &indices {
        targets.push(td_target(buffer.get(i), target, cfg.discount)?);
    }
    let samples: Vec<BatchSample> = indices
        .iter()
        .map(|&i| {
            let tr = buffer.get(i);
            BatchSample { state: &tr.state, action: tr.action }
        })
        .collect();
    let (q, tape) = gnn::forward_batch_train(&samples, online);
    let b = q.len() as f64;
    let loss = q.iter().zip(&targets).map(|(qi, yi)| (qi - yi) * (qi - yi)).sum::<f64>() / b;
    let dq: Vec<f64> = q.iter().zip(&targets).map(|(qi, yi)| 2.0 * (qi - yi) / b).collect();
    let grads = gnn::backward_batch(&tape, &dq, online);
    gnn::update_running_stats(online, &tape);
    optimizer.step(online, &grads);
    Ok(loss)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub step: usize,
    pub validation_mean: f64,
    pub validation_ci: f64,
    pub best_so_far: f64,
}

pub struct TrainOutcome {
    /// Parameters of the checkpoint with the best validation mean delta-F.
    pub best_params: ModelParams,
    pub final_params: ModelParams,
    pub curve: Vec<CurvePoint>,
}

#[derive(Clone, Debug)]
pub struct EpisodeEval {
    pub delta_f: Option<f64>,
    pub connected: bool,
    pub stuck: bool,
}

#[derive(Clone, Debug)]
pub struct PolicyEval {
    pub per_graph: Vec<EpisodeEval>,
    /// Mean delta-F over connected episodes.
    pub mean: f64,
    pub ci95: f64,
    pub evaluated: usize,
    pub disconnected: usize,
}

/// Greedy-policy evaluation: one episode per graph, delta-F recorded for
/// connected finals, disconnections flagged and excluded from the mean.
pub fn evaluate_policy(
    params: &ModelParams,
    graphs: &[Graph],
    env_cfg: &EnvConfig,
) -> Result<PolicyEval, DqnError> {
    let mut per_graph = Vec::with_capacity(graphs.len());
    for g in graphs {
        let result = env::run_episode(g, env_cfg, |state, actions| {
            greedy_action(state, actions, params).expect("non-empty action set")
        })?;
        per_graph.push(EpisodeEval {
            delta_f: result.delta_f,
            connected: result.connected,
            stuck: result.stuck,
        });
    }
    let deltas: Vec<f64> = per_graph.iter().filter_map(|e| e.delta_f).collect();
    let disconnected = per_graph.len() - deltas.len();
    let (mean, ci95) = if deltas.is_empty() {
        (f64::NEG_INFINITY, 0.0)
    } else {
        stats::mean_ci95(&deltas)
    };
    Ok(PolicyEval { per_graph, mean, ci95, evaluated: deltas.len(), disconnected })
}

/// Full training loop.
///
/// Each of `total_steps` iterations performs one environment sub-step on an
/// episode drawn round-robin from the training graphs, pushes the
/// transition, and runs one gradient update once the buffer holds a full
/// batch. The target network syncs every `target_sync_every` steps, and
/// every `validation_every` steps the greedy policy is scored on the
/// validation set, checkpointing on improvement.
pub fn train(
    train_graphs: &[Graph],
    validation_graphs: &[Graph],
    env_cfg: &EnvConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, DqnError> {
    if train_graphs.is_empty() || validation_graphs.is_empty() {
        return Err(DqnError::EmptyGraphSet);
    }
    let mut behavior_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    behavior_rng.set_stream(1);
    let mut sample_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    sample_rng.set_stream(2);

    let mut online = gnn::init_params_with(
        cfg.embedding_dim,
        cfg.rounds,
        gnn::FEATURE_DIM,
        cfg.hidden_dim,
        cfg.seed,
    );
    let mut target = online.clone();
    let mut optimizer = Adam::new(cfg.learning_rate, online.weight_count());
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);

    let mut curve = Vec::new();
    let mut best_mean = f64::NEG_INFINITY;
    let mut best_params: Option<ModelParams> = None;
    let mut cursor = 0usize;
    let mut state: Option<RewireState> = None;

    for step in 0..cfg.total_steps {
        if state.is_none() {
            // fresh episode, round-robin over training graphs; graphs whose
            // phase-0 action set is empty cannot produce transitions
            let mut attempts = 0;
            loop {
                let candidate = env::reset(&train_graphs[cursor % train_graphs.len()], env_cfg)?;
                cursor += 1;
                if !env::valid_actions(&candidate).is_empty() {
                    state = Some(candidate);
                    break;
                }
                attempts += 1;
                if attempts > train_graphs.len() {
                    return Err(DqnError::NoActions);
                }
            }
        }
        let current = state.take().expect("episode state present");
        let action = behave(&current, &online, epsilon(step, cfg), &mut behavior_rng)?;
        let outcome = env::step(&current, action, env_cfg)?;
        let terminal = outcome.terminal;
        buffer.push(Transition {
            state: current,
            action,
            reward: outcome.reward,
            next_state: outcome.next_state.clone(),
            terminal,
        });
        state = if terminal { None } else { Some(outcome.next_state) };

        if buffer.len() >= cfg.batch_size {
            train_step(&buffer, &mut online, &target, &mut optimizer, cfg, &mut sample_rng)?;
        }
        if (step + 1) % cfg.target_sync_every == 0 {
            target = online.clone();
        }
        if cfg.validation_every > 0 && (step + 1) % cfg.validation_every == 0 {
            let eval = evaluate_policy(&online, validation_graphs, env_cfg)?;
            if eval.mean > best_mean {
                best_mean = eval.mean;
                best_params = Some(online.clone());
            }
            curve.push(CurvePoint {
                step: step + 1,
                validation_mean: eval.mean,
                validation_ci: eval.ci95,
                best_so_far: best_mean,
            });
        }
    }
    Ok(TrainOutcome {
        best_params: best_params.unwrap_or_else(|| online.clone()),
        final_params: online,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::objectives::{ObjectiveConfig, ObjectiveKind};

    fn merw_cfg(fraction: f64) -> EnvConfig {
        EnvConfig::new(ObjectiveConfig::new(ObjectiveKind::Merw), fraction)
    }

    fn shannon_cfg(fraction: f64) -> EnvConfig {
        EnvConfig::new(ObjectiveConfig::new(ObjectiveKind::Shannon), fraction)
    }

    #[test]
    fn epsilon_schedule() {
        let cfg = TrainConfig::default();
        assert_eq!(epsilon(0, &cfg), 1.0);
        assert!((epsilon(20_000, &cfg) - 0.55).abs() < 1e-12);
        assert!((epsilon(40_000, &cfg) - 0.1).abs() < 1e-12);
        assert!((epsilon(90_000, &cfg) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn replay_buffer_evicts_oldest() {
        let cfg = merw_cfg(0.25);
        let g = Graph::cycle(4).unwrap();
        let s = env::reset(&g, &cfg).unwrap();
        let mut buffer = ReplayBuffer::new(5);
        for i in 0..8 {
            buffer.push(Transition {
                state: s.clone(),
                action: i, // marker, not a legal action
                reward: 0.0,
                next_state: s.clone(),
                terminal: false,
            });
        }
        assert_eq!(buffer.len(), 5);
        let actions: Vec<usize> = (0..5).map(|i| buffer.get(i).action).collect();
        assert_eq!(actions, vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn behave_uniform_at_full_epsilon() {
        let cfg = merw_cfg(0.2);
        let g = Graph::cycle(6).unwrap();
        let s = env::reset(&g, &cfg).unwrap();
        let params = gnn::init_params_with(4, 1, gnn::FEATURE_DIM, 8, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut counts = vec![0usize; 6];
        let draws = 10_000;
        for _ in 0..draws {
            counts[behave(&s, &params, 1.0, &mut rng).unwrap()] += 1;
        }
        let p = 1.0 / 6.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sigma, "counts {counts:?}");
        }
    }

    #[test]
    fn behave_greedy_is_deterministic_and_breaks_ties_low() {
        let cfg = merw_cfg(0.2);
        let g = Graph::cycle(6).unwrap();
        let s = env::reset(&g, &cfg).unwrap();
        // all-zero weights give exactly equal Q-values
        let params = gnn::init_params_with(4, 1, gnn::FEATURE_DIM, 8, 0);
        let zeroed = params.with_weights(&vec![0.0; params.weight_count()]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = behave(&s, &zeroed, 0.0, &mut rng).unwrap();
        assert_eq!(a, 0);
        for _ in 0..5 {
            assert_eq!(behave(&s, &zeroed, 0.0, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn td_target_terminal_is_raw_reward() {
        let cfg = merw_cfg(0.25);
        let g = Graph::cycle(4).unwrap();
        let s = env::reset(&g, &cfg).unwrap();
        let params = gnn::init_params_with(4, 1, gnn::FEATURE_DIM, 8, 0);
        let tr = Transition {
            state: s.clone(),
            action: 0,
            reward: -10.0,
            next_state: s,
            terminal: true,
        };
        assert_eq!(td_target(&tr, &params, 1.0).unwrap(), -10.0);
    }

    #[test]
    fn td_target_zero_network_is_zero() {
        let cfg = merw_cfg(0.5);
        let g = Graph::cycle(5).unwrap();
        let s = env::reset(&g, &cfg).unwrap();
        let next = env::step(&s, 0, &cfg).unwrap().next_state;
        let params = gnn::init_params_with(4, 1, gnn::FEATURE_DIM, 8, 0);
        let zeroed = params.with_weights(&vec![0.0; params.weight_count()]);
        let tr = Transition { state: s, action: 0, reward: 0.0, next_state: next, terminal: false };
        assert_eq!(td_target(&tr, &zeroed, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn td_target_matches_manual_forward() {
        // embedding_dim = hidden_dim = 1 and one message-passing round keep
        // the full pipeline hand-computable
        let cfg = shannon_cfg(0.25);
        let g = Graph::cycle(4).unwrap();
        let s0 = env::reset(&g, &cfg).unwrap();
        let s1 = env::step(&s0, 0, &cfg).unwrap().next_state; // base 0
        let s2 = env::step(&s1, 2, &cfg).unwrap().next_state; // add (0, 2), phase 2

        let mut p = gnn::init_params_with(1, 1, gnn::FEATURE_DIM, 1, 0);
        p.theta1 = ndarray::arr2(&[[0.5, 0.2, -0.3]]);
        p.theta2 = ndarray::arr2(&[[0.1]]);
        p.heads[2].hidden = ndarray::arr2(&[[0.3, -0.2, 0.5, 0.1]]);
        p.heads[2].output = ndarray::arr1(&[0.9]);
        p.heads[2].bn.gamma = ndarray::arr1(&[1.2]);
        p.heads[2].bn.beta = ndarray::arr1(&[-0.05]);

        let tr = Transition {
            state: s1.clone(),
            action: 2,
            reward: 0.0,
            next_state: s2.clone(),
            terminal: false,
        };
        let got = td_target(&tr, &p, 1.0).unwrap();

        // manual forward on s2: graph = C4 + (0,2); a1 = 0, a2 = 2
        // one round from zero embeddings: mu_v = relu(0.5 + 0.2*[v=0] - 0.3*[v=2])
        let mu = [0.7f64, 0.5, 0.2, 0.5];
        let mu_g: f64 = mu.iter().sum();
        // candidates: neighbors of 0 except 2 -> {1, 3}
        let q_of = |cand: usize| {
            let u = [mu[0], mu[2], mu[cand], mu_g];
            let h = 0.3 * u[0] - 0.2 * u[1] + 0.5 * u[2] + 0.1 * u[3];
            let a = h.max(0.0);
            let xhat = a / (1.0 + 1e-5f64).sqrt();
            0.9 * (1.2 * xhat - 0.05)
        };
        let expected = q_of(1).max(q_of(3));
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn zero_residual_batch_leaves_params_unchanged() {
        let cfg = merw_cfg(0.25);
        let g = Graph::cycle(4).unwrap();
        let s = env::reset(&g, &cfg).unwrap();
        let mut online = gnn::init_params_with(4, 2, gnn::FEATURE_DIM, 8, 3);
        let target = online.clone();
        // train-mode Q of the exact batch train_step will assemble
        let probe: Vec<BatchSample> =
            (0..10).map(|_| BatchSample { state: &s, action: 0 }).collect();
        let q_now = gnn::forward_batch_train(&probe, &online).0[0];
        let mut buffer = ReplayBuffer::new(64);
        for _ in 0..10 {
            buffer.push(Transition {
                state: s.clone(),
                action: 0,
                reward: q_now,
                next_state: s.clone(),
                terminal: true,
            });
        }
        let tc = TrainConfig { batch_size: 10, ..TrainConfig::default() };
        let mut optimizer = Adam::new(tc.learning_rate, online.weight_count());
        let before = online.flatten_weights();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let loss =
            train_step(&buffer, &mut online, &target, &mut optimizer, &tc, &mut rng).unwrap();
        assert_eq!(loss, 0.0);
        let after = online.flatten_weights();
        assert_eq!(before, after);
    }

    #[test]
    fn train_step_requires_full_batch() {
        let mut online = gnn::init_params_with(4, 1, gnn::FEATURE_DIM, 8, 0);
        let target = online.clone();
        let buffer = ReplayBuffer::new(16);
        let tc = TrainConfig::default();
        let mut optimizer = Adam::new(tc.learning_rate, online.weight_count());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = train_step(&buffer, &mut online, &target, &mut optimizer, &tc, &mut rng);
        assert!(matches!(err, Err(DqnError::InsufficientBuffer { have: 0, need: 50 })));
    }

    fn toy_train_config(total_steps: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            total_steps,
            eps_decay_steps: total_steps.max(3) / 3,
            batch_size: 16,
            target_sync_every: 20,
            learning_rate: 1e-3,
            validation_every: 50,
            buffer_capacity: 500,
            embedding_dim: 8,
            rounds: 2,
            hidden_dim: 16,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn loss_decreases_on_frozen_toy_task() {
        // target network never syncs, so this is regression onto fixed targets
        let cfg = merw_cfg(0.15);
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Er { p: 0.3 },
            n: 8,
            seed: 2,
        })
        .unwrap();
        let tc = TrainConfig {
            learning_rate: 3e-3,
            batch_size: 16,
            buffer_capacity: 500,
            embedding_dim: 8,
            rounds: 2,
            hidden_dim: 16,
            seed: 7,
            ..TrainConfig::default()
        };
        let mut online =
            gnn::init_params_with(tc.embedding_dim, tc.rounds, gnn::FEATURE_DIM, tc.hidden_dim, tc.seed);
        let target = online.clone();
        let mut optimizer = Adam::new(tc.learning_rate, online.weight_count());
        let mut buffer = ReplayBuffer::new(tc.buffer_capacity);
        let mut behavior_rng = ChaCha8Rng::seed_from_u64(tc.seed);
        let mut sample_rng = ChaCha8Rng::seed_from_u64(tc.seed + 1);

        let mut state = env::reset(&g, &cfg).unwrap();
        let mut losses = Vec::new();
        for _ in 0..400 {
            let action = behave(&state, &online, 0.8, &mut behavior_rng).unwrap();
            let outcome = env::step(&state, action, &cfg).unwrap();
            buffer.push(Transition {
                state: state.clone(),
                action,
                reward: outcome.reward,
                next_state: outcome.next_state.clone(),
                terminal: outcome.terminal,
            });
            state = if outcome.terminal { env::reset(&g, &cfg).unwrap() } else { outcome.next_state };
            if buffer.len() >= tc.batch_size {
                losses.push(
                    train_step(&buffer, &mut online, &target, &mut optimizer, &tc, &mut sample_rng)
                        .unwrap(),
                );
            }
        }
        let head: f64 = losses[..10].iter().sum::<f64>() / 10.0;
        let tail: f64 = losses[losses.len() - 10..].iter().sum::<f64>() / 10.0;
        assert!(tail < head, "loss did not decrease: first {head}, last {tail}");
    }

    #[test]
    fn train_with_zero_steps_returns_init() {
        let cfg = shannon_cfg(0.15);
        let graphs = vec![Graph::cycle(8).unwrap()];
        let tc = toy_train_config(0, 5);
        let out = train(&graphs, &graphs, &cfg, &tc).unwrap();
        assert!(out.curve.is_empty());
        let init =
            gnn::init_params_with(tc.embedding_dim, tc.rounds, gnn::FEATURE_DIM, tc.hidden_dim, tc.seed);
        assert_eq!(out.best_params.flatten_weights(), init.flatten_weights());
    }

    #[test]
    fn training_is_deterministic() {
        let cfg = shannon_cfg(0.15);
        let spec = |seed| crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Er { p: 0.3 },
            n: 8,
            seed,
        };
        let graphs: Vec<Graph> =
            (0..3).map(|s| crate::generate::generate(&spec(s)).unwrap()).collect();
        let val: Vec<Graph> =
            (10..12).map(|s| crate::generate::generate(&spec(s)).unwrap()).collect();
        let tc = toy_train_config(150, 21);
        let a = train(&graphs, &val, &cfg, &tc).unwrap();
        let b = train(&graphs, &val, &cfg, &tc).unwrap();
        assert_eq!(a.curve, b.curve);
        assert_eq!(a.final_params.flatten_weights(), b.final_params.flatten_weights());
        assert_eq!(a.curve.len(), 150 / tc.validation_every);
    }

    #[test]
    fn evaluate_policy_runs_full_horizon_episodes() {
        let cfg = merw_cfg(0.15);
        let graphs: Vec<Graph> = (0..5)
            .map(|s| {
                crate::generate::generate(&crate::generate::GeneratorSpec {
                    model: crate::generate::GraphModel::Ba { m: 2 },
                    n: 20,
                    seed: s,
                })
                .unwrap()
            })
            .collect();
        let params = gnn::init_params_with(6, 2, gnn::FEATURE_DIM, 12, 17);
        let eval = evaluate_policy(&params, &graphs, &cfg).unwrap();
        assert_eq!(eval.per_graph.len(), 5);
        assert_eq!(eval.evaluated + eval.disconnected, 5);
        for e in &eval.per_graph {
            assert!(!e.stuck);
            assert_eq!(e.connected, e.delta_f.is_some());
        }
    }
}
