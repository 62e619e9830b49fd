//! Host-event ingestion: turn a stream of (source, destination) host pairs
//! into a connected undirected graph.
//!
//! Pipeline: build the directed host graph, keep only reciprocated links as
//! undirected edges, take the largest connected component, drop hub nodes
//! whose neighborhoods are dominated by degree-1 neighbors (mail-server
//! shaped), drop nodes above the degree cap, and take the largest component
//! once more.

use crate::graph::{Graph, NodeId};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

pub const DEFAULT_DEGREE_CAP: usize = 80;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("no edges survive the ingestion pipeline")]
    EmptyResult,
}

/// Drop a node when at least `min_neighbors` of its neighbors exist and the
/// fraction of them with degree 1 reaches `degree_one_fraction`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafFilter {
    pub min_neighbors: usize,
    pub degree_one_fraction: f64,
}

impl Default for LeafFilter {
    fn default() -> Self {
        LeafFilter { min_neighbors: 10, degree_one_fraction: 0.8 }
    }
}

#[derive(Clone, Debug)]
pub struct IngestReport {
    pub graph: Graph,
    /// Node id to host name.
    pub hosts: Vec<String>,
    pub diameter: usize,
}

struct WorkGraph {
    alive: Vec<bool>,
    adjacency: Vec<HashSet<usize>>,
}

impl WorkGraph {
    fn degree(&self, v: usize) -> usize {
        self.adjacency[v].iter().filter(|&&w| self.alive[w]).count()
    }

    fn kill(&mut self, v: usize) {
        self.alive[v] = false;
    }

    /// Keep only the largest connected component among alive nodes with at
    /// least one edge (ties broken toward the component seen first).
    fn retain_largest_component(&mut self) {
        let n = self.alive.len();
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if !self.alive[start] || component[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            component[start] = id;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in &self.adjacency[v] {
                    if self.alive[w] && component[w] == usize::MAX {
                        component[w] = id;
                        queue.push_back(w);
                    }
                }
            }
            sizes.push(size);
        }
        let Some(best) = (0..sizes.len()).max_by_key(|&i| (sizes[i], usize::MAX - i)) else {
            return;
        };
        for v in 0..n {
            if self.alive[v] && component[v] != best {
                self.alive[v] = false;
            }
        }
    }
}

/// Run the full ingestion pipeline. Host names are interned in order of
/// first appearance, and the returned graph's ids are compact in that
/// order.
pub fn ingest_host_events<I>(
    records: I,
    degree_cap: usize,
    filter: &LeafFilter,
) -> Result<IngestReport, IngestError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut host_ids: HashMap<String, usize> = HashMap::new();
    let mut hosts: Vec<String> = Vec::new();
    let mut directed: HashSet<(usize, usize)> = HashSet::new();
    let intern = |name: String, hosts: &mut Vec<String>, ids: &mut HashMap<String, usize>| {
        *ids.entry(name.clone()).or_insert_with(|| {
            hosts.push(name);
            hosts.len() - 1
        })
    };
    for (src, dst) in records {
        if src == dst {
            continue;
        }
        let a = intern(src, &mut hosts, &mut host_ids);
        let b = intern(dst, &mut hosts, &mut host_ids);
        directed.insert((a, b));
    }

    // reciprocated links become undirected edges
    let n = hosts.len();
    let mut work = WorkGraph { alive: vec![true; n], adjacency: vec![HashSet::new(); n] };
    for &(a, b) in &directed {
        if a < b && directed.contains(&(b, a)) {
            work.adjacency[a].insert(b);
            work.adjacency[b].insert(a);
        }
    }
    for v in 0..n {
        if work.adjacency[v].is_empty() {
            work.kill(v);
        }
    }

    work.retain_largest_component();

    // leaf filter on a degree snapshot
    let alive_nodes: Vec<usize> = (0..n).filter(|&v| work.alive[v]).collect();
    let degree_snapshot: HashMap<usize, usize> =
        alive_nodes.iter().map(|&v| (v, work.degree(v))).collect();
    let mut to_kill = Vec::new();
    for &v in &alive_nodes {
        let neighbors: Vec<usize> =
            work.adjacency[v].iter().copied().filter(|&w| work.alive[w]).collect();
        if neighbors.len() < filter.min_neighbors {
            continue;
        }
        let leafy = neighbors.iter().filter(|&&w| degree_snapshot[&w] == 1).count();
        if leafy as f64 / neighbors.len() as f64 >= filter.degree_one_fraction {
            to_kill.push(v);
        }
    }
    for v in to_kill {
        work.kill(v);
    }

    // degree cap on the filtered graph
    let over_cap: Vec<usize> =
        (0..n).filter(|&v| work.alive[v] && work.degree(v) > degree_cap).collect();
    for v in over_cap {
        work.kill(v);
    }

    work.retain_largest_component();

    // materialize with compact ids
    let kept: Vec<usize> = (0..n).filter(|&v| work.alive[v]).collect();
    if kept.is_empty() {
        return Err(IngestError::EmptyResult);
    }
    let index: HashMap<usize, NodeId> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut graph = Graph::empty(kept.len()).expect("non-empty");
    for &v in &kept {
        for &w in &work.adjacency[v] {
            if work.alive[w] && v < w {
                graph.add_edge(index[&v], index[&w]).expect("deduplicated edges");
            }
        }
    }
    if graph.m() == 0 {
        return Err(IngestError::EmptyResult);
    }
    let diameter = graph.diameter().expect("largest component is connected");
    let hosts: Vec<String> = kept.iter().map(|&v| hosts[v].clone()).collect();
    Ok(IngestReport { graph, hosts, diameter })
}
