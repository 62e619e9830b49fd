//! Global graph objectives: Shannon entropy of the degree distribution and
//! the maximal-entropy random walk rate ln λ.

use crate::graph::Graph;
use crate::spectral::{self, SpectralError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("MERW requires a connected graph")]
    Disconnected,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Shannon,
    Merw,
}

impl ObjectiveKind {
    /// Reward scale c_F used when turning objective gains into rewards.
    pub fn default_reward_scale(self) -> f64 {
        match self {
            ObjectiveKind::Shannon => 100.0,
            ObjectiveKind::Merw => 10.0,
        }
    }
}

impl std::fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveKind::Shannon => write!(f, "shannon"),
            ObjectiveKind::Merw => write!(f, "merw"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub kind: ObjectiveKind,
    pub reward_scale: f64,
}

impl ObjectiveConfig {
    pub fn new(kind: ObjectiveKind) -> Self {
        ObjectiveConfig { kind, reward_scale: kind.default_reward_scale() }
    }
}

/// Shannon entropy (base 2) of the degree distribution, summed over degree
/// bins 1..n-1; empty bins and the k = 0 bin contribute nothing.
pub fn shannon_entropy(g: &Graph) -> f64 {
    let q = g.degree_distribution();
    let mut h = 0.0;
    for &qk in q.iter().skip(1) {
        if qk > 0.0 {
            h -= qk * qk.log2();
        }
    }
    h
}

/// MERW entropy rate: natural log of the largest adjacency eigenvalue.
pub fn merw_entropy(g: &Graph) -> Result<f64, ObjectiveError> {
    if !g.is_connected() {
        return Err(ObjectiveError::Disconnected);
    }
    Ok(spectral::largest_eigenvalue(g)?.ln())
}

/// Unscaled objective value; reward scaling is applied only where rewards
/// are computed.
pub fn evaluate(kind: ObjectiveKind, g: &Graph) -> Result<f64, ObjectiveError> {
    match kind {
        ObjectiveKind::Shannon => Ok(shannon_entropy(g)),
        ObjectiveKind::Merw => merw_entropy(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn regular_graphs_have_zero_shannon_entropy() {
        assert_eq!(shannon_entropy(&Graph::cycle(8).unwrap()), 0.0);
        assert_eq!(shannon_entropy(&Graph::complete(6).unwrap()), 0.0);
    }

    #[test]
    fn star_shannon_entropy() {
        // -(3/4) log2(3/4) - (1/4) log2(1/4)
        let h = shannon_entropy(&Graph::star(4).unwrap());
        assert!((h - 0.8112781244591328).abs() < 1e-12, "{h}");
    }

    #[test]
    fn path3_shannon_entropy() {
        let h = shannon_entropy(&Graph::path(3).unwrap());
        assert!((h - 0.9182958340544896).abs() < 1e-12, "{h}");
    }

    #[test]
    fn merw_of_cycle_is_ln_two() {
        let f = merw_entropy(&Graph::cycle(8).unwrap()).unwrap();
        assert!((f - 2.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn merw_of_complete_graph() {
        let f = merw_entropy(&Graph::complete(31).unwrap()).unwrap();
        assert!((f - 30.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn merw_rejects_disconnected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(merw_entropy(&g), Err(ObjectiveError::Disconnected));
        assert_eq!(evaluate(ObjectiveKind::Merw, &g), Err(ObjectiveError::Disconnected));
    }

    #[test]
    fn evaluate_dispatches() {
        let c8 = Graph::cycle(8).unwrap();
        assert_eq!(evaluate(ObjectiveKind::Shannon, &c8).unwrap(), 0.0);
        let merw = evaluate(ObjectiveKind::Merw, &c8).unwrap();
        assert!((merw - 2.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn merw_bounds_by_mean_and_max_degree() {
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Ba { m: 2 },
            n: 40,
            seed: 5,
        })
        .unwrap();
        let f = merw_entropy(&g).unwrap();
        let mean_degree = 2.0 * g.m() as f64 / g.n() as f64;
        assert!(f >= mean_degree.ln() - 1e-8);
        assert!(f <= (g.max_degree() as f64).ln() + 1e-8);
    }

    #[test]
    fn default_scales() {
        assert_eq!(ObjectiveConfig::new(ObjectiveKind::Merw).reward_scale, 10.0);
        assert_eq!(ObjectiveConfig::new(ObjectiveKind::Shannon).reward_scale, 100.0);
    }
}
