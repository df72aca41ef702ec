//! Network model: a directed graph with per-edge capacities, candidate path
//! sets and link-failure injection.

mod failures;
pub mod fixtures;
pub mod io;
mod paths;
mod yen;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TeError};

pub use failures::{apply_failures, reachable, sample_failures, FailureScenario};
pub use paths::{CandidateSet, Path, PathSet};
pub use yen::{brute_force_paths, yen_k_shortest_paths};

/// Dense node index in `0..node_count`.
pub type NodeId = usize;

/// Ordered source-destination pair.
pub type Sd = (NodeId, NodeId);

/// Capacity of a directed edge. Serialized as a number or the string
/// `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Unbounded,
}

impl Serialize for Capacity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(c) => s.serialize_f64(*c),
            Capacity::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(c) => Ok(Capacity::Finite(c)),
            Raw::Str(s) if s == "unbounded" => Ok(Capacity::Unbounded),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "capacity must be a number or \"unbounded\", got {s:?}"
            ))),
        }
    }
}

impl Capacity {
    /// Whether the edge can carry traffic at all.
    pub fn is_usable(self) -> bool {
        match self {
            Capacity::Finite(c) => c > 0.0,
            Capacity::Unbounded => true,
        }
    }

    /// `1/c` for finite edges and 0 for unbounded ones, so that
    /// `load * inverse()` is the edge utilization.
    pub fn inverse(self) -> f64 {
        match self {
            Capacity::Finite(c) if c > 0.0 => 1.0 / c,
            _ => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Unbounded => None,
        }
    }

    fn add(self, other: Capacity) -> Capacity {
        match (self, other) {
            (Capacity::Finite(a), Capacity::Finite(b)) => Capacity::Finite(a + b),
            _ => Capacity::Unbounded,
        }
    }
}

/// Directed network with dense node indices.
///
/// Parallel links between the same ordered pair are merged into one edge
/// carrying the summed capacity. Edges with zero capacity are kept in the
/// matrix but never routed over.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    names: Vec<String>,
    capacity: Vec<Option<Capacity>>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
}

impl Topology {
    pub fn new<I>(names: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, Capacity)>,
    {
        let n = names.len();
        if n == 0 {
            return Err(TeError::InvalidTopology("topology has no nodes".into()));
        }
        let mut seen = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if let Some(prev) = seen.insert(name.as_str(), i) {
                return Err(TeError::InvalidTopology(format!(
                    "duplicate node name {name:?} (indices {prev} and {i})"
                )));
            }
        }
        let mut capacity: Vec<Option<Capacity>> = vec![None; n * n];
        for (src, dst, cap) in edges {
            if src >= n || dst >= n {
                return Err(TeError::InvalidTopology(format!(
                    "edge ({src}, {dst}) references a node outside 0..{n}"
                )));
            }
            if src == dst {
                return Err(TeError::InvalidTopology(format!("self-loop on node {src}")));
            }
            if let Capacity::Finite(c) = cap {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(TeError::InvalidTopology(format!(
                        "edge ({src}, {dst}) has invalid capacity {c}"
                    )));
                }
            }
            let slot = &mut capacity[src * n + dst];
            *slot = Some(match *slot {
                Some(prev) => prev.add(cap),
                None => cap,
            });
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if capacity[i * n + j].is_some_and(Capacity::is_usable) {
                    out_adj[i].push(j);
                    in_adj[j].push(i);
                }
            }
        }
        Ok(Topology {
            names,
            capacity,
            out_adj,
            in_adj,
        })
    }

    /// Nodes named `0..n` as strings.
    pub fn with_numbered_nodes<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, Capacity)>,
    {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, node: NodeId) -> &str {
        &self.names[node]
    }

    pub fn node_index(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    /// Raw capacity entry, including zero-capacity edges.
    pub fn capacity(&self, src: NodeId, dst: NodeId) -> Option<Capacity> {
        self.capacity[src * self.node_count() + dst]
    }

    /// Whether `src -> dst` can carry traffic.
    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.capacity(src, dst).is_some_and(Capacity::is_usable)
    }

    /// Usable successors of `node`, ascending.
    pub fn out_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.out_adj[node]
    }

    /// Usable predecessors of `node`, ascending.
    pub fn in_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.in_adj[node]
    }

    /// Usable edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Capacity)> + '_ {
        self.out_adj.iter().enumerate().flat_map(move |(i, succ)| {
            succ.iter()
                .map(move |&j| (i, j, self.capacity(i, j).expect("adjacent edge has capacity")))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    /// Every entry of the capacity matrix, zero-capacity edges included.
    pub fn raw_edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Capacity)> + '_ {
        let n = self.node_count();
        self.capacity
            .iter()
            .enumerate()
            .filter_map(move |(idx, c)| c.map(|c| (idx / n, idx % n, c)))
    }

    /// Copy of this topology without the listed edges.
    pub fn without_edges(&self, removed: &[(NodeId, NodeId)]) -> Result<Topology> {
        for &(s, d) in removed {
            if s >= self.node_count() || d >= self.node_count() || self.capacity(s, d).is_none() {
                return Err(TeError::UnknownEdge { src: s, dst: d });
            }
        }
        let kept = self
            .raw_edges()
            .filter(|(s, d, _)| !removed.contains(&(*s, *d)))
            .collect::<Vec<_>>();
        Topology::new(self.names.clone(), kept)
    }
}

/// Directed complete graph on `n` nodes with uniform capacity.
pub fn complete_dcn_topology(n: usize, uniform_capacity: f64) -> Result<Topology> {
    if n < 2 {
        return Err(TeError::InvalidTopology(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    if !(uniform_capacity.is_finite() && uniform_capacity > 0.0) {
        return Err(TeError::InvalidTopology(format!(
            "capacity must be positive, got {uniform_capacity}"
        )));
    }
    let edges = (0..n).flat_map(|i| {
        (0..n)
            .filter(move |&j| j != i)
            .map(move |j| (i, j, Capacity::Finite(uniform_capacity)))
    });
    Topology::new(default_names(n), edges)
}

/// `A..Z` for small graphs, then `n0, n1, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    } else {
        (0..n).map(|i| format!("n{i}")).collect()
    }
}
