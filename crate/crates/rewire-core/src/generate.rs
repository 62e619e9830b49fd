//! Seeded synthetic graph generators: Barabási–Albert preferential
//! attachment, Watts–Strogatz small-world, and Erdős–Rényi G(n, p).
//!
//! Every generator returns a connected simple graph of exactly `n` nodes.
//! Models that can produce disconnected samples are retried on fresh RNG
//! substreams of the same seed, so output is a pure function of the spec.

use crate::graph::{Graph, NodeId};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const CONNECTIVITY_RETRIES: u64 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("no connected sample drawn after {0} attempts")]
    NoConnectedSample(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    /// Preferential attachment; every new node brings `m` edges.
    Ba { m: usize },
    /// Ring lattice of even degree `k`, each edge rewired with probability `p`.
    Ws { k: usize, p: f64 },
    /// Independent edges with probability `p`.
    Er { p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub model: GraphModel,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    fn validate(&self) -> Result<(), GenerateError> {
        let n = self.n;
        if n == 0 {
            return Err(GenerateError::InvalidParams("n must be >= 1".into()));
        }
        match self.model {
            GraphModel::Ba { m } => {
                if !(m == 1 || m == 2) {
                    return Err(GenerateError::InvalidParams(format!("BA m must be 1 or 2, got {m}")));
                }
                if n <= m {
                    return Err(GenerateError::InvalidParams(format!("BA needs n > m, got n={n}, m={m}")));
                }
            }
            GraphModel::Ws { k, p } => {
                if k % 2 != 0 || k == 0 {
                    return Err(GenerateError::InvalidParams(format!("WS k must be even and > 0, got {k}")));
                }
                if k >= n {
                    return Err(GenerateError::InvalidParams(format!("WS needs k < n, got k={k}, n={n}")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(GenerateError::InvalidParams(format!("WS p must be in [0, 1], got {p}")));
                }
            }
            GraphModel::Er { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(GenerateError::InvalidParams(format!("ER p must be in [0, 1], got {p}")));
                }
            }
        }
        Ok(())
    }
}

/// Draw a connected sample from the spec. Deterministic given the seed.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph, GenerateError> {
    spec.validate()?;
    for attempt in 0..CONNECTIVITY_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(attempt);
        let g = match spec.model {
            GraphModel::Ba { m } => barabasi_albert(spec.n, m, &mut rng),
            GraphModel::Ws { k, p } => watts_strogatz(spec.n, k, p, &mut rng),
            GraphModel::Er { p } => erdos_renyi(spec.n, p, &mut rng),
        };
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GenerateError::NoConnectedSample(CONNECTIVITY_RETRIES))
}

/// Classic preferential attachment: start from `m` isolated nodes, attach
/// each new node to `m` distinct existing nodes sampled proportionally to
/// degree (uniform draws from the repeated-endpoints multiset).
fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(n).expect("n >= 1");
    let mut targets: Vec<NodeId> = (0..m).collect();
    let mut repeated: Vec<NodeId> = Vec::with_capacity(2 * m * n);
    for source in m..n {
        for &t in &targets {
            g.add_edge(source, t).expect("targets are distinct non-sources");
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat(source).take(m));
        targets = random_subset(&repeated, m, rng);
    }
    g
}

/// `count` distinct values drawn uniformly from `pool` by rejection.
fn random_subset(pool: &[NodeId], count: usize, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let mut picked = Vec::with_capacity(count);
    while picked.len() < count {
        let x = pool[rng.random_range(0..pool.len())];
        if !picked.contains(&x) {
            picked.push(x);
        }
    }
    picked
}

/// Ring lattice with `k/2` neighbors on each side, then one rewiring pass:
/// each lattice edge `(u, u+j)` moves to `(u, w)` with probability `p`, `w`
/// resampled uniformly until it is neither `u` nor an existing neighbor.
fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(n).expect("n >= 1");
    for j in 1..=(k / 2) {
        for u in 0..n {
            g.add_edge(u, (u + j) % n).expect("lattice edges are distinct");
        }
    }
    for j in 1..=(k / 2) {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= p {
                continue;
            }
            let mut w = rng.random_range(0..n);
            let mut skip = false;
            while w == u || g.has_edge(u, w) {
                w = rng.random_range(0..n);
                if g.degree(u) >= n - 1 {
                    skip = true;
                    break;
                }
            }
            if !skip {
                g.remove_edge(u, v).expect("lattice edge still present");
                g.add_edge(u, w).expect("w checked as non-neighbor");
            }
        }
    }
    g
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(n).expect("n >= 1");
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.add_edge(i, j).expect("each pair visited once");
            }
        }
    }
    g
}
