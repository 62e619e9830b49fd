//! Undirected simple graph over dense integer node ids.
//!
//! Node ids run from `0` to `n - 1`. Edges are unordered pairs without
//! self-loops or duplicates. Neighbor lists are kept sorted so that every
//! traversal order is deterministic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("node {node} out of range for graph of size {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(NodeId, NodeId),
    #[error("invalid permutation")]
    InvalidPermutation,
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Undirected simple graph. Immutable from the viewpoint of shared users;
/// the `add_edge` / `remove_edge` mutators are single-owner operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<NodeId>>,
}

/// Connected-component labeling: `label[v]` is the component id of `v`,
/// ids are contiguous in `0..count` in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub count: usize,
    pub label: Vec<usize>,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        Ok(Graph { n, m: 0, adj: vec![Vec::new(); n] })
    }

    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Cycle graph C_n (requires n >= 3).
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        if n < 3 {
            return Err(GraphError::Parse { line: 0, msg: format!("cycle needs n >= 3, got {n}") });
        }
        for i in 0..n {
            g.add_edge(i, (i + 1) % n)?;
        }
        Ok(g)
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j)?;
            }
        }
        Ok(g)
    }

    /// Path graph 0–1–…–(n-1).
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for i in 1..n {
            g.add_edge(i - 1, i)?;
        }
        Ok(g)
    }

    /// Star with node 0 at the center and n-1 leaves.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for i in 1..n {
            g.add_edge(0, i)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        i < self.n && j < self.n && self.adj[i].binary_search(&j).is_ok()
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::NodeOutOfRange { node: v, n: self.n });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, i: NodeId, j: NodeId) -> Result<(), GraphError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        match self.adj[i].binary_search(&j) {
            Ok(_) => return Err(GraphError::DuplicateEdge(i.min(j), i.max(j))),
            Err(pos) => self.adj[i].insert(pos, j),
        }
        let pos = self.adj[j].binary_search(&i).unwrap_err();
        self.adj[j].insert(pos, i);
        self.m += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) -> Result<(), GraphError> {
        self.check_node(i)?;
        self.check_node(j)?;
        let pos_i = self.adj[i]
            .binary_search(&j)
            .map_err(|_| GraphError::MissingEdge(i.min(j), i.max(j)))?;
        self.adj[i].remove(pos_i);
        let pos_j = self.adj[j].binary_search(&i).expect("adjacency symmetry");
        self.adj[j].remove(pos_j);
        self.m -= 1;
        Ok(())
    }

    /// All edges as canonical `(i, j)` pairs with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.m);
        for i in 0..self.n {
            for &j in &self.adj[i] {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn connected_components(&self) -> ComponentLabeling {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        ComponentLabeling { count, label }
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().count == 1
    }

    /// BFS shortest-path distances from `src`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, src: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Longest shortest path; `None` if the graph is disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in 0..self.n {
            for d in self.bfs_distances(v) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Normalized degree histogram q(k) for k in 0..n; sums to 1.
    pub fn degree_distribution(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.n];
        for v in 0..self.n {
            q[self.degree(v)] += 1.0;
        }
        let n = self.n as f64;
        for entry in &mut q {
            *entry /= n;
        }
        q
    }

    /// Graph with node ids relabeled by `perm` (`perm[old] = new`).
    pub fn relabel(&self, perm: &[NodeId]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::InvalidPermutation);
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(GraphError::InvalidPermutation);
            }
            seen[p] = true;
        }
        let mut g = Graph::empty(self.n)?;
        for (i, j) in self.edges() {
            g.add_edge(perm[i], perm[j])?;
        }
        Ok(g)
    }
}

/// Canonical text form: `n <count>` header followed by one `i j` line per
/// edge with `i < j`, lexicographically sorted.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (line_no, header) = lines.next().ok_or(GraphError::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    let n: usize = match header.trim().strip_prefix("n ") {
        Some(rest) => rest.trim().parse().map_err(|_| GraphError::Parse {
            line: line_no + 1,
            msg: format!("bad node count {rest:?}"),
        })?,
        None => {
            return Err(GraphError::Parse {
                line: line_no + 1,
                msg: "expected `n <count>` header".into(),
            })
        }
    };
    let mut g = Graph::empty(n).map_err(|_| GraphError::Parse {
        line: line_no + 1,
        msg: "node count must be >= 1".into(),
    })?;
    for (idx, line) in lines {
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GraphError::Parse {
                    line: idx + 1,
                    msg: format!("expected `i j`, got {line:?}"),
                })
            }
        };
        let parse = |s: &str| -> Result<usize, GraphError> {
            s.parse().map_err(|_| GraphError::Parse {
                line: idx + 1,
                msg: format!("bad node id {s:?}"),
            })
        };
        let (i, j) = (parse(a)?, parse(b)?);
        g.add_edge(i, j).map_err(|e| GraphError::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_edge_basics() {
        let mut g = Graph::empty(3).unwrap();
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 1);

        let mut p = Graph::path(3).unwrap();
        p.add_edge(0, 2).unwrap();
        assert!((0..3).all(|v| p.degree(v) == 2));
    }

    #[test]
    fn add_edge_rejects_reverse_duplicate() {
        let mut g = Graph::empty(2).unwrap();
        g.add_edge(1, 0).unwrap();
        assert_eq!(g.add_edge(0, 1), Err(GraphError::DuplicateEdge(0, 1)));
    }

    #[test]
    fn add_edge_rejects_self_loop() {
        let mut g = Graph::empty(2).unwrap();
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
    }

    #[test]
    fn remove_edge_basics() {
        let mut t = Graph::cycle(3).unwrap();
        t.remove_edge(0, 1).unwrap();
        let mut degs: Vec<_> = (0..3).map(|v| t.degree(v)).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 2]);

        let mut p = Graph::path(3).unwrap();
        p.remove_edge(0, 1).unwrap();
        assert_eq!(p.connected_components().count, 2);
        assert_eq!(p.remove_edge(0, 2), Err(GraphError::MissingEdge(0, 2)));
    }

    #[test]
    fn component_labeling() {
        assert_eq!(Graph::cycle(5).unwrap().connected_components().count, 1);

        let two_triangles =
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let labeling = two_triangles.connected_components();
        assert_eq!(labeling.count, 2);
        assert_eq!(labeling.label, vec![0, 0, 0, 1, 1, 1]);

        assert_eq!(Graph::empty(1).unwrap().connected_components().count, 1);
    }

    #[test]
    fn degree_distribution_examples() {
        let q = Graph::cycle(6).unwrap().degree_distribution();
        assert_eq!(q[2], 1.0);
        assert!(q.iter().enumerate().all(|(k, &v)| k == 2 || v == 0.0));

        let q = Graph::star(4).unwrap().degree_distribution();
        assert!((q[1] - 0.75).abs() < 1e-15);
        assert!((q[3] - 0.25).abs() < 1e-15);

        let g = crate::generate::generate(&crate::generate::GeneratorSpec {
            model: crate::generate::GraphModel::Ba { m: 2 },
            n: 30,
            seed: 11,
        })
        .unwrap();
        let total: f64 = g.degree_distribution().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::cycle(3).unwrap();
        assert_eq!(serialize_edge_list(&g), "n 3\n0 1\n0 2\n1 2\n");
        let back = parse_edge_list(&serialize_edge_list(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn parse_rejects_self_loop_and_junk() {
        assert!(matches!(parse_edge_list("n 2\n0 0\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_edge_list("n 2\n0 5\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_edge_list("2\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_edge_list("n 2\n0 1 2\n"), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn relabel_preserves_degree_distribution() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let perm = vec![3, 0, 4, 1, 2];
        let h = g.relabel(&perm).unwrap();
        assert_eq!(g.degree_distribution(), h.degree_distribution());
        assert_eq!(g.m(), h.m());
    }
}
