//! Graph rewiring engine.
//!
//! Learns sequences of edge rewirings that maximize a global entropy
//! objective, with Random and Greedy baselines, and evaluates how much a
//! rewiring disrupts an attacker navigating the network with stale topology
//! knowledge.

pub mod attack;
pub mod baselines;
pub mod dqn;
pub mod env;
pub mod experiment;
pub mod generate;
pub mod gnn;
pub mod graph;
pub mod ingest;
pub mod objectives;
pub mod spectral;
pub mod stats;
