//! Attacker model: stale local maps, newly-unreachable target detection,
//! and the forward-random-walk exploration cost.
//!
//! The attacker enters at a node `u` knowing the subgraph within a fixed hop
//! radius of `u` in the pre-rewiring graph. After rewiring, targets in that
//! map that can no longer be reached from `u` over surviving original map
//! edges must be rediscovered by a forward random walk on the new graph; the
//! walk pays one unit for the first traversal of every edge the attacker has
//! never seen.

use crate::graph::{Graph, NodeId};
use crate::stats;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

pub const DEFAULT_HOPS: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("entry node {0} out of range")]
    EntryOutOfRange(NodeId),
    #[error("target must differ from the entry node")]
    TargetIsEntry,
    #[error("rewired graph must be connected")]
    DisconnectedRewiring,
    #[error("walk exceeded {max_steps} steps (partial cost {partial_cost})")]
    WalkBudget { max_steps: u64, partial_cost: u64 },
}

/// The attacker's prior knowledge: entry node plus the induced subgraph of
/// everything within the hop radius, frozen before rewiring.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMap {
    pub entry: NodeId,
    /// Map nodes, ascending.
    pub nodes: Vec<NodeId>,
    /// Original edges with both endpoints in the map, canonical order.
    pub edges: Vec<(NodeId, NodeId)>,
}

/// Subgraph induced by all nodes within `hops` of `entry` in `g0`.
pub fn build_local_map(g0: &Graph, entry: NodeId, hops: usize) -> Result<LocalMap, AttackError> {
    if entry >= g0.n() {
        return Err(AttackError::EntryOutOfRange(entry));
    }
    let dist = g0.bfs_distances(entry);
    let nodes: Vec<NodeId> =
        (0..g0.n()).filter(|&v| dist[v].is_some_and(|d| d <= hops)).collect();
    let in_map: HashSet<NodeId> = nodes.iter().copied().collect();
    let edges: Vec<(NodeId, NodeId)> = g0
        .edges()
        .into_iter()
        .filter(|&(i, j)| in_map.contains(&i) && in_map.contains(&j))
        .collect();
    Ok(LocalMap { entry, nodes, edges })
}

/// Map nodes with no entry-rooted path over original map edges that
/// survived the rewiring. Ascending order; the entry itself is excluded.
pub fn newly_unreachable(g_star: &Graph, map: &LocalMap) -> Vec<NodeId> {
    let surviving: Vec<(NodeId, NodeId)> =
        map.edges.iter().copied().filter(|&(i, j)| g_star.has_edge(i, j)).collect();
    let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &(i, j) in &surviving {
        adjacency.entry(i).or_default().push(j);
        adjacency.entry(j).or_default().push(i);
    }
    let mut reached: HashSet<NodeId> = HashSet::new();
    reached.insert(map.entry);
    let mut queue = std::collections::VecDeque::from([map.entry]);
    while let Some(v) = queue.pop_front() {
        if let Some(next) = adjacency.get(&v) {
            for &w in next {
                if reached.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    map.nodes.iter().copied().filter(|&v| v != map.entry && !reached.contains(&v)).collect()
}

fn edge_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

/// Forward random walk from `entry` until `target` is drawn as the next
/// node, counting first traversals of edges outside the attacker's
/// knowledge.
///
/// At each step the next node is uniform over the current node's neighbors
/// excluding the previous node. A drawn dead end (degree 1) is not entered:
/// it becomes the excluded previous node while the walker stays put, its
/// incident edge having been cost-checked. When the current node's only
/// neighbor is the previous node, the walker steps back. The edge on which
/// the target is finally drawn is cost-checked after the loop.
pub fn forward_random_walk_cost(
    g_star: &Graph,
    entry: NodeId,
    target: NodeId,
    known_edges: &[(NodeId, NodeId)],
    rng: &mut ChaCha8Rng,
    max_steps: u64,
) -> Result<u64, AttackError> {
    if entry >= g_star.n() {
        return Err(AttackError::EntryOutOfRange(entry));
    }
    if entry == target {
        return Err(AttackError::TargetIsEntry);
    }
    let mut visited: HashSet<(NodeId, NodeId)> =
        known_edges.iter().map(|&(i, j)| edge_key(i, j)).collect();
    let mut cost = 0u64;
    // previous and current position both start at the entry; the first
    // draw below is over all entry neighbors
    let mut prev;
    let mut cur = entry;
    let entry_neighbors = g_star.neighbors(entry);
    debug_assert!(!entry_neighbors.is_empty(), "connected graph with n >= 2");
    let mut next = entry_neighbors[rng.random_range(0..entry_neighbors.len())];
    let mut steps = 0u64;
    while next != target {
        steps += 1;
        if steps > max_steps {
            return Err(AttackError::WalkBudget { max_steps, partial_cost: cost });
        }
        let e = edge_key(cur, next);
        if visited.insert(e) {
            cost += 1;
        }
        if g_star.degree(next) == 1 {
            // dead end: reverse without advancing
            prev = next;
        } else {
            prev = cur;
            cur = next;
        }
        let neighbors = g_star.neighbors(cur);
        let choices: Vec<NodeId> = neighbors.iter().copied().filter(|&v| v != prev).collect();
        next = if choices.is_empty() {
            prev
        } else {
            choices[rng.random_range(0..choices.len())]
        };
    }
    let e = edge_key(cur, next);
    if !visited.contains(&e) {
        cost += 1;
    }
    Ok(cost)
}

/// Walk costs for every newly unreachable target of one entry node.
#[derive(Clone, Debug, Serialize)]
pub struct WalkCostReport {
    pub entry: NodeId,
    pub per_target: BTreeMap<NodeId, u64>,
    pub unreachable_targets: Vec<NodeId>,
    pub total: u64,
    /// total / n
    pub normalized: f64,
}

/// How many entry nodes to sample (without replacement).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryRule {
    /// min(n, 30), the synthetic-graph convention.
    Synthetic,
    /// All n nodes, the real-network convention.
    AllNodes,
    /// min(n, k).
    Fixed(usize),
}

impl EntryRule {
    fn count(self, n: usize) -> usize {
        match self {
            EntryRule::Synthetic => n.min(30),
            EntryRule::AllNodes => n,
            EntryRule::Fixed(k) => n.min(k),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub per_entry: Vec<WalkCostReport>,
    pub mean_total: f64,
    /// Mean of per-entry normalized costs, with a 95% CI over entries.
    pub mean_normalized: f64,
    pub ci95_normalized: f64,
}

/// Evaluate how much the rewiring `g0 -> g_star` disrupts attacker
/// navigation: sample entry nodes, find each entry's newly unreachable
/// targets, and pay one forward random walk per target.
pub fn evaluate_rewiring(
    g0: &Graph,
    g_star: &Graph,
    rule: EntryRule,
    hops: usize,
    rng: &mut ChaCha8Rng,
) -> Result<AttackReport, AttackError> {
    if !g_star.is_connected() {
        return Err(AttackError::DisconnectedRewiring);
    }
    let n = g0.n();
    let entries = sample_without_replacement(n, rule.count(n), rng);
    let max_steps = 1_000_000u64.saturating_mul(n as u64);
    let mut per_entry = Vec::with_capacity(entries.len());
    for &entry in &entries {
        let map = build_local_map(g0, entry, hops)?;
        let targets = newly_unreachable(g_star, &map);
        let mut per_target = BTreeMap::new();
        let mut total = 0u64;
        for &target in &targets {
            let mut walk_rng = ChaCha8Rng::seed_from_u64(rng.random::<u64>());
            let cost =
                forward_random_walk_cost(g_star, entry, target, &map.edges, &mut walk_rng, max_steps)?;
            per_target.insert(target, cost);
            total += cost;
        }
        per_entry.push(WalkCostReport {
            entry,
            per_target,
            unreachable_targets: targets,
            total,
            normalized: total as f64 / n as f64,
        });
    }
    let totals: Vec<f64> = per_entry.iter().map(|r| r.total as f64).collect();
    let normalized: Vec<f64> = per_entry.iter().map(|r| r.normalized).collect();
    let (mean_total, _) = stats::mean_ci95(&totals);
    let (mean_normalized, ci95_normalized) = stats::mean_ci95(&normalized);
    Ok(AttackReport { per_entry, mean_total, mean_normalized, ci95_normalized })
}

/// First `k` entries of a seeded partial Fisher-Yates shuffle of `0..n`.
fn sample_without_replacement(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let mut pool: Vec<NodeId> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.random_range(0..n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn local_map_of_star_center_is_whole_star() {
        let g = Graph::star(7).unwrap();
        let map = build_local_map(&g, 0, 2).unwrap();
        assert_eq!(map.nodes, (0..7).collect::<Vec<_>>());
        assert_eq!(map.edges.len(), 6);
    }

    #[test]
    fn local_map_bfs_depth() {
        let g = Graph::path(5).unwrap();
        let map = build_local_map(&g, 0, 2).unwrap();
        assert_eq!(map.nodes, vec![0, 1, 2]);
        assert_eq!(map.edges, vec![(0, 1), (1, 2)]);

        let c6 = Graph::cycle(6).unwrap();
        let map = build_local_map(&c6, 0, 2).unwrap();
        assert_eq!(map.nodes.len(), 5);
        assert!(!map.nodes.contains(&3));
    }

    #[test]
    fn no_rewiring_means_nothing_unreachable() {
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Ba { m: 2 },
            n: 25,
            seed: 3,
        })
        .unwrap();
        for entry in [0, 5, 12] {
            let map = build_local_map(&g, entry, 2).unwrap();
            assert!(newly_unreachable(&g, &map).is_empty());
        }
    }

    #[test]
    fn severed_leaf_is_unreachable() {
        // map over a star; rewiring removes the only edge into leaf 3
        let g0 = Graph::star(5).unwrap();
        let mut g_star = g0.clone();
        g_star.remove_edge(0, 3).unwrap();
        g_star.add_edge(1, 3).unwrap(); // reattached elsewhere, still connected
        let map = build_local_map(&g0, 0, 1).unwrap();
        assert_eq!(newly_unreachable(&g_star, &map), vec![3]);
    }

    #[test]
    fn all_edges_known_costs_nothing() {
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Ws { k: 4, p: 0.1 },
            n: 20,
            seed: 5,
        })
        .unwrap();
        let known = g.edges();
        for seed in 0..5 {
            let cost =
                forward_random_walk_cost(&g, 0, 13, &known, &mut rng(seed), 1_000_000).unwrap();
            assert_eq!(cost, 0);
        }
    }

    #[test]
    fn degree_one_entry_with_known_edge_costs_zero() {
        // path 0-1: entry 0 has degree 1, target 1 adjacent via a known edge
        let g = Graph::path(3).unwrap();
        let cost = forward_random_walk_cost(&g, 0, 1, &[(0, 1)], &mut rng(0), 1_000).unwrap();
        assert_eq!(cost, 0);
    }

    #[test]
    fn path_walk_cost_is_number_of_unknown_edges() {
        // on 0-1-2 with entry 0 and target 2 the walk is forced: cost equals
        // the number of unknown edges among (0,1) and (1,2)
        let g = Graph::path(3).unwrap();
        let cases: [(&[(NodeId, NodeId)], u64); 4] =
            [(&[], 2), (&[(0, 1)], 1), (&[(1, 2)], 1), (&[(0, 1), (1, 2)], 0)];
        for (known, expected) in cases {
            for seed in 0..4 {
                let cost =
                    forward_random_walk_cost(&g, 0, 2, known, &mut rng(seed), 1_000).unwrap();
                assert_eq!(cost, expected, "known {known:?}");
            }
        }
    }

    /// Rewiring scenario with two nodes cut off from the attacker's map and
    /// rediscovery costs of 1 and 2: the new graph is 0-1-2 (triangle)
    /// with 2-5, 5-3, 3-4 hanging off it, while the attacker knows the old
    /// edges (1,3) and (1,4) instead of (3,5) and (3,4).
    fn figure_scenario() -> (Graph, Graph) {
        let g0 =
            Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 5)]).unwrap();
        // two rewirings: (3, 5, 1) and (4, 3, 1)
        let mut g_star = g0.clone();
        g_star.add_edge(3, 5).unwrap();
        g_star.remove_edge(3, 1).unwrap();
        g_star.add_edge(4, 3).unwrap();
        g_star.remove_edge(4, 1).unwrap();
        (g0, g_star)
    }

    #[test]
    fn figure_scenario_costs_one_and_two() {
        let (g0, g_star) = figure_scenario();
        assert!(g_star.is_connected());
        assert_eq!(g_star.m(), g0.m());
        let map = build_local_map(&g0, 0, 2).unwrap();
        assert_eq!(map.nodes, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(newly_unreachable(&g_star, &map), vec![3, 4]);

        // the topology forces these costs for every seed: target 3 is only
        // entered via the unknown (3,5); target 4 additionally requires the
        // unknown (3,4) after passing through 3
        for seed in 0..8 {
            let c3 =
                forward_random_walk_cost(&g_star, 0, 3, &map.edges, &mut rng(seed), 10_000).unwrap();
            let c4 = forward_random_walk_cost(&g_star, 0, 4, &map.edges, &mut rng(seed + 100), 10_000)
                .unwrap();
            assert_eq!(c3, 1);
            assert_eq!(c4, 2);
            assert_eq!(c3 + c4, 3);
        }
    }

    #[test]
    fn walk_cost_bounded_by_unknown_edge_count() {
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Er { p: 0.2 },
            n: 15,
            seed: 9,
        })
        .unwrap();
        let known: Vec<(NodeId, NodeId)> = g.edges().into_iter().take(5).collect();
        let unknown = (g.m() - known.len()) as u64;
        for seed in 0..10 {
            let cost =
                forward_random_walk_cost(&g, 0, g.n() - 1, &known, &mut rng(seed), 10_000_000)
                    .unwrap();
            assert!(cost <= unknown);
        }
    }

    #[test]
    fn knowledge_monotonicity_along_identical_trajectories() {
        // walk choices never depend on the knowledge set, so the same seed
        // yields the same trajectory and more knowledge can only cost less
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Ba { m: 2 },
            n: 20,
            seed: 1,
        })
        .unwrap();
        let all = g.edges();
        for seed in 0..10 {
            let small = &all[..3];
            let large = &all[..10];
            let c_small =
                forward_random_walk_cost(&g, 2, 17, small, &mut rng(seed), 10_000_000).unwrap();
            let c_large =
                forward_random_walk_cost(&g, 2, 17, large, &mut rng(seed), 10_000_000).unwrap();
            assert!(c_large <= c_small);
        }
    }

    #[test]
    fn dead_end_walks_terminate() {
        // star forces repeated dead-end reversals before hitting the target
        let g = Graph::star(6).unwrap();
        for seed in 0..20 {
            let cost = forward_random_walk_cost(&g, 1, 5, &[], &mut rng(seed), 100_000).unwrap();
            assert!(cost >= 1);
        }
    }

    #[test]
    fn walk_budget_guard_reports_partial_cost() {
        let g = Graph::cycle(8).unwrap();
        let err = forward_random_walk_cost(&g, 0, 4, &[], &mut rng(0), 1).unwrap_err();
        assert!(matches!(err, AttackError::WalkBudget { max_steps: 1, .. }));
    }

    #[test]
    fn evaluate_identity_rewiring_is_free() {
        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Ba { m: 2 },
            n: 40,
            seed: 6,
        })
        .unwrap();
        let report = evaluate_rewiring(&g, &g, EntryRule::Synthetic, 2, &mut rng(0)).unwrap();
        assert_eq!(report.per_entry.len(), 30);
        assert!(report.per_entry.iter().all(|r| r.total == 0));
        assert_eq!(report.mean_normalized, 0.0);
    }

    #[test]
    fn evaluate_rejects_disconnected_rewiring() {
        let g0 = Graph::cycle(6).unwrap();
        let g_star = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let err = evaluate_rewiring(&g0, &g_star, EntryRule::Synthetic, 2, &mut rng(0));
        assert_eq!(err.unwrap_err(), AttackError::DisconnectedRewiring);
    }

    #[test]
    fn entry_rules_sample_without_replacement() {
        let mut r = rng(4);
        let sample = sample_without_replacement(50, 30, &mut r);
        assert_eq!(sample.len(), 30);
        let unique: HashSet<_> = sample.iter().collect();
        assert_eq!(unique.len(), 30);
        assert_eq!(EntryRule::Synthetic.count(461), 30);
        assert_eq!(EntryRule::AllNodes.count(461), 461);
        assert_eq!(EntryRule::Fixed(10).count(5), 5);
    }
}
