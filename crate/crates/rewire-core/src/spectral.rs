//! Spectral radius of the adjacency matrix by power iteration.

use crate::graph::Graph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("graph is disconnected; spectral radius of the whole graph is not well-defined here")]
    Disconnected,
}

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;

/// Largest eigenvalue of the adjacency matrix of a connected graph.
///
/// Iterates on `A + I` rather than `A`: bipartite graphs (trees in
/// particular) have `-λ_max` in their spectrum, which stalls the plain
/// iteration on an oscillating mixture. The unit shift makes the Perron
/// eigenvalue strictly dominant for every connected graph while leaving the
/// eigenvectors unchanged; the shift is subtracted from the converged
/// Rayleigh quotient. The start vector is the normalized all-ones vector,
/// which is never orthogonal to the (strictly positive) Perron vector.
pub fn largest_eigenvalue(g: &Graph) -> Result<f64, SpectralError> {
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let n = g.n();
    if g.m() == 0 {
        // single node
        return Ok(0.0);
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut rayleigh_prev = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for _ in 0..MAX_ITERATIONS {
        // y = (A + I) x
        for v in 0..n {
            let mut sum = x[v];
            for &w in g.neighbors(v) {
                sum += x[w];
            }
            y[v] = sum;
        }
        // x is unit, so the Rayleigh quotient of A + I is x . y
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        residual = (rayleigh - rayleigh_prev).abs();
        if residual < TOLERANCE {
            return Ok(rayleigh - 1.0);
        }
        rayleigh_prev = rayleigh;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(SpectralError::NonConvergence { iterations: MAX_ITERATIONS, residual })
}
