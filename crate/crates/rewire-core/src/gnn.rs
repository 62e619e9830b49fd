//! Permutation-invariant graph embeddings and phase-specific Q-value heads.
//!
//! Node embeddings follow the mean-field message-passing update
//! `mu_i <- ReLU(theta1 x_i + theta2 * sum_{j in N(i)} mu_j)` iterated for a
//! fixed number of rounds from a zero initialization; the graph embedding is
//! the sum of node embeddings. Three MLP heads (one per rewiring sub-step)
//! map concatenated node/graph embeddings to scalar action values, with
//! batch normalization on the input of each head's output layer.
//!
//! Training support is hand-rolled: `forward_batch_train` records a tape and
//! `backward_batch` produces exact gradients for every learnable array,
//! including through the shared embedding and train-mode batch norm.

use crate::env::RewireState;
use crate::graph::{Graph, NodeId};
use ndarray::{Array1, Array2, Axis};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Node feature layout: constant bias channel plus base/addition mark flags.
pub const FEATURE_DIM: usize = 3;
pub const DEFAULT_HIDDEN_DIM: usize = 128;

const BN_EPSILON: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum GnnError {
    #[error("candidate set must not be empty")]
    NoCandidates,
    #[error("checkpoint i/o: {0}")]
    Io(String),
    #[error("checkpoint format: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Per-feature batch normalization state for one head.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
}

impl BatchNorm {
    fn identity(dim: usize) -> Self {
        BatchNorm {
            gamma: Array1::ones(dim),
            beta: Array1::zeros(dim),
            running_mean: Array1::zeros(dim),
            running_var: Array1::ones(dim),
        }
    }
}

/// One Q head: hidden layer, batch norm, linear output. No bias terms; the
/// batch-norm shift plays that role.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadParams {
    /// (hidden_dim x input width); input width is 2d, 3d or 4d.
    pub hidden: Array2<f64>,
    /// Output weights (hidden_dim).
    pub output: Array1<f64>,
    pub bn: BatchNorm,
}

/// Full learnable parameter set. The embedding matrices are shared by all
/// three heads.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Feature lift (embedding_dim x FEATURE_DIM).
    pub theta1: Array2<f64>,
    /// Neighbor aggregation (embedding_dim x embedding_dim).
    pub theta2: Array2<f64>,
    /// Heads for the base / addition / removal sub-steps.
    pub heads: [HeadParams; 3],
    pub rounds: usize,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub feature_dim: usize,
}

/// Width of the concatenated head input for a phase.
pub fn head_input_dim(phase: usize, embedding_dim: usize) -> usize {
    (phase + 2) * embedding_dim
}

/// Glorot-uniform initialized parameters; batch-norm statistics start at the
/// identity transform. Deterministic given the seed.
pub fn init_params(embedding_dim: usize, rounds: usize, feature_dim: usize, seed: u64) -> ModelParams {
    init_params_with(embedding_dim, rounds, feature_dim, DEFAULT_HIDDEN_DIM, seed)
}

pub fn init_params_with(
    embedding_dim: usize,
    rounds: usize,
    feature_dim: usize,
    hidden_dim: usize,
    seed: u64,
) -> ModelParams {
    assert!(embedding_dim > 0 && feature_dim > 0 && hidden_dim > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut glorot = |rows: usize, cols: usize| -> Array2<f64> {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        Array2::from_shape_fn((rows, cols), |_| rng.random_range(-limit..limit))
    };
    let theta1 = glorot(embedding_dim, feature_dim);
    let theta2 = glorot(embedding_dim, embedding_dim);
    let heads = std::array::from_fn(|phase| {
        let in_dim = head_input_dim(phase, embedding_dim);
        let hidden = glorot(hidden_dim, in_dim);
        let output = glorot(1, hidden_dim).row(0).to_owned();
        HeadParams { hidden, output, bn: BatchNorm::identity(hidden_dim) }
    });
    ModelParams { theta1, theta2, heads, rounds, embedding_dim, hidden_dim, feature_dim }
}

/// Per-node input features for a state: `[1, 1{v = a1}, 1{v = a2}]`.
pub fn node_features(state: &RewireState) -> Array2<f64> {
    let n = state.graph.n();
    let mut x = Array2::zeros((n, FEATURE_DIM));
    for v in 0..n {
        x[[v, 0]] = 1.0;
    }
    if let Some(a1) = state.base {
        x[[a1, 1]] = 1.0;
    }
    if let Some(a2) = state.addition {
        x[[a2, 2]] = 1.0;
    }
    x
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    /// One row per node.
    pub node_embeddings: Array2<f64>,
    pub graph_embedding: Array1<f64>,
}

/// Row-wise neighbor sums: `out[v] = sum_{w in N(v)} m[w]`.
fn neighbor_sums(g: &Graph, m: &Array2<f64>) -> Array2<f64> {
    let (n, d) = m.dim();
    let mut out = Array2::zeros((n, d));
    for v in 0..n {
        let mut row = out.row_mut(v);
        let row = row.as_slice_mut().expect("standard layout");
        for &w in g.neighbors(v) {
            let src = m.row(w);
            let src = src.as_slice().expect("standard layout");
            for (acc, val) in row.iter_mut().zip(src) {
                *acc += val;
            }
        }
    }
    out
}

fn relu_inplace(a: &mut Array2<f64>) {
    for v in a.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Stored intermediates of one embedding forward pass.
struct EmbedTrace {
    /// Per round: (neighbor sums S_l, pre-activations P_l).
    layers: Vec<(Array2<f64>, Array2<f64>)>,
    node_embeddings: Array2<f64>,
}

fn embed_forward(g: &Graph, x: &Array2<f64>, p: &ModelParams) -> EmbedTrace {
    let n = g.n();
    let lifted = x.dot(&p.theta1.t()); // (n x d), reused every round
    let mut m = Array2::zeros((n, p.embedding_dim));
    let mut layers = Vec::with_capacity(p.rounds);
    for _ in 0..p.rounds {
        let s = neighbor_sums(g, &m);
        let mut pre = s.dot(&p.theta2.t());
        pre += &lifted;
        m = pre.clone();
        relu_inplace(&mut m);
        layers.push((s, pre));
    }
    EmbedTrace { layers, node_embeddings: m }
}

/// Node and graph embeddings after the configured number of rounds.
pub fn embed(g: &Graph, x: &Array2<f64>, p: &ModelParams) -> EmbeddingResult {
    let trace = embed_forward(g, x, p);
    let graph_embedding = trace.node_embeddings.sum_axis(Axis(0));
    EmbeddingResult { node_embeddings: trace.node_embeddings, graph_embedding }
}

/// Head input row for one candidate action: the phase-dependent
/// concatenation of mark, candidate and graph embeddings.
fn head_input(
    phase: usize,
    emb: &Array2<f64>,
    graph_emb: &Array1<f64>,
    a1: Option<NodeId>,
    a2: Option<NodeId>,
    action: NodeId,
    d: usize,
) -> Array1<f64> {
    let mut u = Array1::zeros(head_input_dim(phase, d));
    let mut offset = 0;
    if phase >= 1 {
        let a1 = a1.expect("phase >= 1 has a base mark");
        u.slice_mut(ndarray::s![offset..offset + d]).assign(&emb.row(a1));
        offset += d;
    }
    if phase >= 2 {
        let a2 = a2.expect("phase 2 has an addition mark");
        u.slice_mut(ndarray::s![offset..offset + d]).assign(&emb.row(a2));
        offset += d;
    }
    u.slice_mut(ndarray::s![offset..offset + d]).assign(&emb.row(action));
    offset += d;
    u.slice_mut(ndarray::s![offset..offset + d]).assign(graph_emb);
    u
}

/// Q-values for each candidate action of `state`, in candidate order.
///
/// Eval mode normalizes with running statistics; train mode treats the
/// candidate set itself as the normalization batch.
pub fn q_values(
    state: &RewireState,
    candidates: &[NodeId],
    p: &ModelParams,
    mode: Mode,
) -> Result<Vec<f64>, GnnError> {
    if candidates.is_empty() {
        return Err(GnnError::NoCandidates);
    }
    let phase = state.phase();
    let head = &p.heads[phase];
    let d = p.embedding_dim;
    let x = node_features(state);
    let emb = embed(&state.graph, &x, p);

    let mut u = Array2::zeros((candidates.len(), head_input_dim(phase, d)));
    for (row, &action) in candidates.iter().enumerate() {
        u.row_mut(row).assign(&head_input(
            phase,
            &emb.node_embeddings,
            &emb.graph_embedding,
            state.base,
            state.addition,
            action,
            d,
        ));
    }
    let mut a = u.dot(&head.hidden.t());
    relu_inplace(&mut a);
    let z = match mode {
        Mode::Eval => normalize_rows(&a, &head.bn.running_mean, &head.bn.running_var, &head.bn),
        Mode::Train => {
            let (mean, var) = batch_stats(&a);
            normalize_rows(&a, &mean, &var, &head.bn)
        }
    };
    Ok(z.dot(&head.output).to_vec())
}

fn batch_stats(a: &Array2<f64>) -> (Array1<f64>, Array1<f64>) {
    let b = a.nrows() as f64;
    let mean = a.sum_axis(Axis(0)) / b;
    let mut var = Array1::zeros(a.ncols());
    for row in a.rows() {
        let centered = &row.to_owned() - &mean;
        var += &(&centered * &centered);
    }
    var /= b;
    (mean, var)
}

fn normalize_rows(a: &Array2<f64>, mean: &Array1<f64>, var: &Array1<f64>, bn: &BatchNorm) -> Array2<f64> {
    let inv_std = var.mapv(|v| 1.0 / (v + BN_EPSILON).sqrt());
    let mut z = Array2::zeros(a.dim());
    for (mut zr, ar) in z.rows_mut().into_iter().zip(a.rows()) {
        for i in 0..a.ncols() {
            let xhat = (ar[i] - mean[i]) * inv_std[i];
            zr[i] = bn.gamma[i] * xhat + bn.beta[i];
        }
    }
    z
}

/// One training example: a state and the action whose Q-value enters the loss.
pub struct BatchSample<'a> {
    pub state: &'a RewireState,
    pub action: NodeId,
}

struct SampleTape {
    graph: Graph,
    x: Array2<f64>,
    layers: Vec<(Array2<f64>, Array2<f64>)>,
    u: Array1<f64>,
    h: Array1<f64>,
    phase: usize,
    a1: Option<NodeId>,
    a2: Option<NodeId>,
    action: NodeId,
}

struct HeadBatchTape {
    sample_indices: Vec<usize>,
    mean: Array1<f64>,
    var: Array1<f64>,
    xhat: Array2<f64>,
    z: Array2<f64>,
}

/// Tape recorded by `forward_batch_train`; consumed by `backward_batch` and
/// `update_running_stats`.
pub struct BatchTape {
    samples: Vec<SampleTape>,
    heads: [Option<HeadBatchTape>; 3],
}

/// Train-mode batched forward: one Q-value per sample, normalizing each
/// head's sub-batch with its own batch statistics.
pub fn forward_batch_train(samples: &[BatchSample], p: &ModelParams) -> (Vec<f64>, BatchTape) {
    let d = p.embedding_dim;
    let mut tapes = Vec::with_capacity(samples.len());
    for sample in samples {
        let state = sample.state;
        let phase = state.phase();
        let x = node_features(state);
        let trace = embed_forward(&state.graph, &x, p);
        let graph_emb = trace.node_embeddings.sum_axis(Axis(0));
        let u = head_input(
            phase,
            &trace.node_embeddings,
            &graph_emb,
            state.base,
            state.addition,
            sample.action,
            d,
        );
        let h = p.heads[phase].hidden.dot(&u);
        tapes.push(SampleTape {
            graph: state.graph.clone(),
            x,
            layers: trace.layers,
            u,
            h,
            phase,
            a1: state.base,
            a2: state.addition,
            action: sample.action,
        });
    }

    let mut q = vec![0.0; samples.len()];
    let mut heads: [Option<HeadBatchTape>; 3] = [None, None, None];
    for phase in 0..3 {
        let sample_indices: Vec<usize> =
            (0..tapes.len()).filter(|&i| tapes[i].phase == phase).collect();
        if sample_indices.is_empty() {
            continue;
        }
        let mut activations = Array2::zeros((sample_indices.len(), p.hidden_dim));
        for (row, &i) in sample_indices.iter().enumerate() {
            activations.row_mut(row).assign(&tapes[i].h.mapv(|v| v.max(0.0)));
        }
        let (mean, var) = batch_stats(&activations);
        let bn = &p.heads[phase].bn;
        let inv_std = var.mapv(|v| 1.0 / (v + BN_EPSILON).sqrt());
        let mut xhat = Array2::zeros(activations.dim());
        let mut z = Array2::zeros(activations.dim());
        for r in 0..activations.nrows() {
            for c in 0..activations.ncols() {
                let centered = (activations[[r, c]] - mean[c]) * inv_std[c];
                xhat[[r, c]] = centered;
                z[[r, c]] = bn.gamma[c] * centered + bn.beta[c];
            }
        }
        let qs = z.dot(&p.heads[phase].output);
        for (row, &i) in sample_indices.iter().enumerate() {
            q[i] = qs[row];
        }
        heads[phase] = Some(HeadBatchTape { sample_indices, mean, var, xhat, z });
    }
    (q, BatchTape { samples: tapes, heads })
}

/// Gradients mirroring every learnable array in `ModelParams`.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub theta1: Array2<f64>,
    pub theta2: Array2<f64>,
    pub heads: [HeadGradients; 3],
}

#[derive(Clone, Debug)]
pub struct HeadGradients {
    pub hidden: Array2<f64>,
    pub output: Array1<f64>,
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
}

impl Gradients {
    fn zeros_like(p: &ModelParams) -> Self {
        Gradients {
            theta1: Array2::zeros(p.theta1.dim()),
            theta2: Array2::zeros(p.theta2.dim()),
            heads: std::array::from_fn(|i| HeadGradients {
                hidden: Array2::zeros(p.heads[i].hidden.dim()),
                output: Array1::zeros(p.heads[i].output.len()),
                gamma: Array1::zeros(p.heads[i].bn.gamma.len()),
                beta: Array1::zeros(p.heads[i].bn.beta.len()),
            }),
        }
    }
}

/// Exact gradients of `sum_i dq[i] * q_i` with respect to every learnable
/// array, back through the heads, train-mode batch norm, and all
/// message-passing rounds. ReLU uses subgradient 0 at 0.
pub fn backward_batch(tape: &BatchTape, dq: &[f64], p: &ModelParams) -> Gradients {
    assert_eq!(dq.len(), tape.samples.len());
    let mut grads = Gradients::zeros_like(p);

    // dU[i] = gradient flowing into sample i's head-input row
    let mut du_per_sample: Vec<Option<Array1<f64>>> = vec![None; tape.samples.len()];

    for phase in 0..3 {
        let Some(head_tape) = &tape.heads[phase] else { continue };
        let head = &p.heads[phase];
        let b = head_tape.sample_indices.len();
        let dq_head = Array1::from_iter(head_tape.sample_indices.iter().map(|&i| dq[i]));

        // output layer: q = z . w
        grads.heads[phase].output += &head_tape.z.t().dot(&dq_head);
        // dz rows = dq * w
        let mut dz = Array2::zeros(head_tape.z.dim());
        for (row, &dqv) in dq_head.iter().enumerate() {
            dz.row_mut(row).assign(&(&head.output * dqv));
        }

        // batch-norm backward
        let mut dgamma = Array1::zeros(p.hidden_dim);
        let mut dbeta = Array1::zeros(p.hidden_dim);
        for r in 0..b {
            for c in 0..p.hidden_dim {
                dgamma[c] += dz[[r, c]] * head_tape.xhat[[r, c]];
                dbeta[c] += dz[[r, c]];
            }
        }
        grads.heads[phase].gamma += &dgamma;
        grads.heads[phase].beta += &dbeta;

        let inv_std = head_tape.var.mapv(|v| 1.0 / (v + BN_EPSILON).sqrt());
        let mut dxhat = Array2::zeros(dz.dim());
        for r in 0..b {
            for c in 0..p.hidden_dim {
                dxhat[[r, c]] = dz[[r, c]] * head.bn.gamma[c];
            }
        }
        let sum_dxhat = dxhat.sum_axis(Axis(0));
        let mut sum_dxhat_xhat: Array1<f64> = Array1::zeros(p.hidden_dim);
        for r in 0..b {
            for c in 0..p.hidden_dim {
                sum_dxhat_xhat[c] += dxhat[[r, c]] * head_tape.xhat[[r, c]];
            }
        }
        // da = inv_std / B * (B * dxhat - sum(dxhat) - xhat * sum(dxhat * xhat))
        let bf = b as f64;
        let mut da = Array2::zeros(dz.dim());
        for r in 0..b {
            for c in 0..p.hidden_dim {
                da[[r, c]] = inv_std[c] / bf
                    * (bf * dxhat[[r, c]] - sum_dxhat[c] - head_tape.xhat[[r, c]] * sum_dxhat_xhat[c]);
            }
        }

        // hidden layer: a = relu(h), h = W u
        let mut dh = da;
        let mut u_rows = Array2::zeros((b, head_input_dim(phase, p.embedding_dim)));
        for (row, &i) in head_tape.sample_indices.iter().enumerate() {
            let sample = &tape.samples[i];
            for c in 0..p.hidden_dim {
                if sample.h[c] <= 0.0 {
                    dh[[row, c]] = 0.0;
                }
            }
            u_rows.row_mut(row).assign(&sample.u);
        }
        grads.heads[phase].hidden += &dh.t().dot(&u_rows);
        let du = dh.dot(&head.hidden); // (b x in_dim)
        for (row, &i) in head_tape.sample_indices.iter().enumerate() {
            du_per_sample[i] = Some(du.row(row).to_owned());
        }
    }

    // embedding backward per sample
    let d = p.embedding_dim;
    for (i, sample) in tape.samples.iter().enumerate() {
        let du = du_per_sample[i].as_ref().expect("every sample passed through a head");
        let n = sample.graph.n();

        let mut dm = Array2::zeros((n, d));
        let mut offset = 0;
        if sample.phase >= 1 {
            let a1 = sample.a1.expect("phase >= 1 has a base mark");
            let seg = du.slice(ndarray::s![offset..offset + d]);
            dm.row_mut(a1).zip_mut_with(&seg, |acc, &v| *acc += v);
            offset += d;
        }
        if sample.phase >= 2 {
            let a2 = sample.a2.expect("phase 2 has an addition mark");
            let seg = du.slice(ndarray::s![offset..offset + d]);
            dm.row_mut(a2).zip_mut_with(&seg, |acc, &v| *acc += v);
            offset += d;
        }
        let seg = du.slice(ndarray::s![offset..offset + d]);
        dm.row_mut(sample.action).zip_mut_with(&seg, |acc, &v| *acc += v);
        offset += d;
        let dgraph = du.slice(ndarray::s![offset..offset + d]);
        for mut row in dm.rows_mut() {
            row.zip_mut_with(&dgraph, |acc, &v| *acc += v);
        }

        for (s, pre) in sample.layers.iter().rev() {
            let mut dpre = dm;
            for (dp, &pv) in dpre.iter_mut().zip(pre.iter()) {
                if pv <= 0.0 {
                    *dp = 0.0;
                }
            }
            grads.theta1 += &dpre.t().dot(&sample.x);
            grads.theta2 += &dpre.t().dot(s);
            let ds = dpre.dot(&p.theta2);
            dm = neighbor_sums(&sample.graph, &ds);
        }
    }
    grads
}

/// Fold this batch's statistics into the running estimates of every head
/// that appeared in the batch. Uses the unbiased batch variance for the
/// running update when the sub-batch has more than one sample.
pub fn update_running_stats(p: &mut ModelParams, tape: &BatchTape) {
    for phase in 0..3 {
        let Some(head_tape) = &tape.heads[phase] else { continue };
        let bn = &mut p.heads[phase].bn;
        let b = head_tape.sample_indices.len() as f64;
        let var_update = if b > 1.0 { &head_tape.var * (b / (b - 1.0)) } else { head_tape.var.clone() };
        bn.running_mean = &bn.running_mean * (1.0 - BN_MOMENTUM) + &(&head_tape.mean * BN_MOMENTUM);
        bn.running_var = &bn.running_var * (1.0 - BN_MOMENTUM) + &(&var_update * BN_MOMENTUM);
    }
}

// ---------------------------------------------------------------------------
// flat views over the learnable weights, for the optimizer and for
// finite-difference checks
// ---------------------------------------------------------------------------

impl ModelParams {
    /// All learnable weights in a fixed order. Running statistics are
    /// buffers, not weights, and are excluded.
    pub fn flatten_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.weight_count());
        out.extend(self.theta1.iter());
        out.extend(self.theta2.iter());
        for head in &self.heads {
            out.extend(head.hidden.iter());
            out.extend(head.output.iter());
            out.extend(head.bn.gamma.iter());
            out.extend(head.bn.beta.iter());
        }
        out
    }

    /// Copy of `self` with weights replaced from a flat vector produced by
    /// `flatten_weights` (running statistics and dims preserved).
    pub fn with_weights(&self, flat: &[f64]) -> ModelParams {
        assert_eq!(flat.len(), self.weight_count());
        let mut params = self.clone();
        let mut cursor = flat.iter().copied();
        for dst in params.theta1.iter_mut() {
            *dst = cursor.next().unwrap();
        }
        for dst in params.theta2.iter_mut() {
            *dst = cursor.next().unwrap();
        }
        for head in &mut params.heads {
            for dst in head.hidden.iter_mut() {
                *dst = cursor.next().unwrap();
            }
            for dst in head.output.iter_mut() {
                *dst = cursor.next().unwrap();
            }
            for dst in head.bn.gamma.iter_mut() {
                *dst = cursor.next().unwrap();
            }
            for dst in head.bn.beta.iter_mut() {
                *dst = cursor.next().unwrap();
            }
        }
        params
    }

    pub fn weight_count(&self) -> usize {
        self.theta1.len()
            + self.theta2.len()
            + self
                .heads
                .iter()
                .map(|h| h.hidden.len() + h.output.len() + h.bn.gamma.len() + h.bn.beta.len())
                .sum::<usize>()
    }
}

impl Gradients {
    /// Same order as `ModelParams::flatten_weights`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend(self.theta1.iter());
        out.extend(self.theta2.iter());
        for head in &self.heads {
            out.extend(head.hidden.iter());
            out.extend(head.output.iter());
            out.extend(head.gamma.iter());
            out.extend(head.beta.iter());
        }
        out
    }
}

// ---------------------------------------------------------------------------
// checkpoint container
// ---------------------------------------------------------------------------

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ArrayData {
    dims: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    embedding_dim: usize,
    hidden_dim: usize,
    feature_dim: usize,
    rounds: usize,
    arrays: BTreeMap<String, ArrayData>,
}

fn array2_data(a: &Array2<f64>) -> ArrayData {
    ArrayData { dims: vec![a.nrows(), a.ncols()], data: a.iter().copied().collect() }
}

fn array1_data(a: &Array1<f64>) -> ArrayData {
    ArrayData { dims: vec![a.len()], data: a.to_vec() }
}

fn take_array2(map: &mut BTreeMap<String, ArrayData>, key: &str) -> Result<Array2<f64>, GnnError> {
    let entry = map.remove(key).ok_or_else(|| GnnError::Format(format!("missing array {key}")))?;
    if entry.dims.len() != 2 {
        return Err(GnnError::Format(format!("array {key} is not 2-dimensional")));
    }
    Array2::from_shape_vec((entry.dims[0], entry.dims[1]), entry.data)
        .map_err(|e| GnnError::Format(format!("array {key}: {e}")))
}

fn take_array1(map: &mut BTreeMap<String, ArrayData>, key: &str) -> Result<Array1<f64>, GnnError> {
    let entry = map.remove(key).ok_or_else(|| GnnError::Format(format!("missing array {key}")))?;
    if entry.dims.len() != 1 || entry.dims[0] != entry.data.len() {
        return Err(GnnError::Format(format!("array {key} has inconsistent dims")));
    }
    Ok(Array1::from_vec(entry.data))
}

/// Write a checkpoint as a versioned JSON container with named arrays.
/// Round-tripping reproduces eval-mode Q-values bit for bit.
pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<(), GnnError> {
    let mut arrays = BTreeMap::new();
    arrays.insert("embed_lift".to_string(), array2_data(&params.theta1));
    arrays.insert("embed_aggregate".to_string(), array2_data(&params.theta2));
    for (i, head) in params.heads.iter().enumerate() {
        let q = i + 1;
        arrays.insert(format!("q{q}_hidden"), array2_data(&head.hidden));
        arrays.insert(format!("q{q}_output"), array1_data(&head.output));
        arrays.insert(format!("q{q}_bn_gamma"), array1_data(&head.bn.gamma));
        arrays.insert(format!("q{q}_bn_beta"), array1_data(&head.bn.beta));
        arrays.insert(format!("q{q}_bn_mean"), array1_data(&head.bn.running_mean));
        arrays.insert(format!("q{q}_bn_var"), array1_data(&head.bn.running_var));
    }
    for (key, arr) in &arrays {
        if arr.data.iter().any(|v| !v.is_finite()) {
            return Err(GnnError::Format(format!("array {key} contains non-finite values")));
        }
    }
    let file = CheckpointFile {
        version: CHECKPOINT_VERSION,
        embedding_dim: params.embedding_dim,
        hidden_dim: params.hidden_dim,
        feature_dim: params.feature_dim,
        rounds: params.rounds,
        arrays,
    };
    let text = serde_json::to_string(&file).map_err(|e| GnnError::Io(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| GnnError::Io(e.to_string()))
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams, GnnError> {
    let text = std::fs::read_to_string(path).map_err(|e| GnnError::Io(e.to_string()))?;
    let mut file: CheckpointFile =
        serde_json::from_str(&text).map_err(|e| GnnError::Format(e.to_string()))?;
    if file.version != CHECKPOINT_VERSION {
        return Err(GnnError::Format(format!("unsupported checkpoint version {}", file.version)));
    }
    let theta1 = take_array2(&mut file.arrays, "embed_lift")?;
    let theta2 = take_array2(&mut file.arrays, "embed_aggregate")?;
    let mut heads = Vec::with_capacity(3);
    for q in 1..=3 {
        heads.push(HeadParams {
            hidden: take_array2(&mut file.arrays, &format!("q{q}_hidden"))?,
            output: take_array1(&mut file.arrays, &format!("q{q}_output"))?,
            bn: BatchNorm {
                gamma: take_array1(&mut file.arrays, &format!("q{q}_bn_gamma"))?,
                beta: take_array1(&mut file.arrays, &format!("q{q}_bn_beta"))?,
                running_mean: take_array1(&mut file.arrays, &format!("q{q}_bn_mean"))?,
                running_var: take_array1(&mut file.arrays, &format!("q{q}_bn_var"))?,
            },
        });
    }
    let heads: [HeadParams; 3] = heads.try_into().expect("exactly three heads");
    let params = ModelParams {
        theta1,
        theta2,
        heads,
        rounds: file.rounds,
        embedding_dim: file.embedding_dim,
        hidden_dim: file.hidden_dim,
        feature_dim: file.feature_dim,
    };
    if params.theta1.dim() != (params.embedding_dim, params.feature_dim)
        || params.theta2.dim() != (params.embedding_dim, params.embedding_dim)
    {
        return Err(GnnError::Format("embedding matrix dims do not match header".into()));
    }
    for (phase, head) in params.heads.iter().enumerate() {
        let expect = (params.hidden_dim, head_input_dim(phase, params.embedding_dim));
        if head.hidden.dim() != expect {
            return Err(GnnError::Format(format!("q{} hidden dims do not match header", phase + 1)));
        }
    }
    Ok(params)
}
