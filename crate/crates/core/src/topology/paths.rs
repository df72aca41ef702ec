use rayon::prelude::*;

use super::{yen_k_shortest_paths, NodeId, Sd, Topology};
use crate::error::{Result, TeError};

/// Node sequence from source to destination.
pub type Path = Vec<NodeId>;

/// Candidate paths for every ordered pair, in the order they were computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    n: usize,
    sets: Vec<Vec<Path>>,
}

impl PathSet {
    pub fn empty(n: usize) -> Self {
        PathSet {
            n,
            sets: vec![Vec::new(); n * n],
        }
    }

    /// `k` shortest paths for every reachable ordered pair; unreachable pairs
    /// get an empty set.
    pub fn k_shortest(topology: &Topology, k: usize) -> Result<Self> {
        let n = topology.node_count();
        let rows: Vec<Vec<Vec<Path>>> = (0..n)
            .into_par_iter()
            .map(|s| {
                (0..n)
                    .map(|d| {
                        if s == d {
                            return Ok(Vec::new());
                        }
                        match yen_k_shortest_paths(topology, s, d, k) {
                            Ok(p) => Ok(p),
                            Err(TeError::NoPath { .. }) => Ok(Vec::new()),
                            Err(e) => Err(e),
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(PathSet {
            n,
            sets: rows.into_iter().flatten().collect(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: NodeId, d: NodeId) -> &[Path] {
        &self.sets[s * self.n + d]
    }

    pub fn set(&mut self, s: NodeId, d: NodeId, paths: Vec<Path>) {
        self.sets[s * self.n + d] = paths;
    }

    /// Pairs with at least one path, in `(s, d)` order.
    pub fn pairs(&self) -> impl Iterator<Item = (Sd, &[Path])> + '_ {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(idx, p)| ((idx / self.n, idx % self.n), p.as_slice()))
    }

    /// Longest path in hops, 0 for an empty set.
    pub fn max_hops(&self) -> usize {
        self.sets
            .iter()
            .flatten()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn total_paths(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Checks every path against the topology: correct endpoints, existing
    /// edges, no repeated node, no duplicate path within a pair.
    pub fn validate(&self, topology: &Topology) -> Result<()> {
        if topology.node_count() != self.n {
            return Err(TeError::InvalidPathSet(format!(
                "path set has {} nodes, topology has {}",
                self.n,
                topology.node_count()
            )));
        }
        for ((s, d), paths) in self.pairs() {
            for (i, p) in paths.iter().enumerate() {
                if p.len() < 2 || p[0] != s || p[p.len() - 1] != d {
                    return Err(TeError::InvalidPathSet(format!("path {p:?} does not join {s} to {d}")));
                }
                let mut seen = vec![false; self.n];
                for &v in p {
                    if v >= self.n || seen[v] {
                        return Err(TeError::InvalidPathSet(format!("path {p:?} is not loopless")));
                    }
                    seen[v] = true;
                }
                if let Some(w) = p.windows(2).find(|w| !topology.has_edge(w[0], w[1])) {
                    return Err(TeError::InvalidPathSet(format!(
                        "path {p:?} uses missing edge ({}, {})",
                        w[0], w[1]
                    )));
                }
                if paths[..i].contains(p) {
                    return Err(TeError::InvalidPathSet(format!("duplicate path {p:?} for ({s}, {d})")));
                }
            }
        }
        Ok(())
    }

    /// Dense intermediate-node view; fails if any path has more than two hops.
    pub fn candidate_set(&self) -> Result<CandidateSet> {
        let mut mids = vec![Vec::new(); self.n * self.n];
        for ((s, d), paths) in self.pairs() {
            let slot = &mut mids[s * self.n + d];
            for p in paths {
                match p.as_slice() {
                    [_, _] => slot.push(d),
                    [_, k, _] => slot.push(*k),
                    _ => {
                        return Err(TeError::InvalidPathSet(format!(
                            "path {p:?} has more than two hops; use the path form"
                        )))
                    }
                }
            }
        }
        Ok(CandidateSet { n: self.n, mids })
    }
}

/// Per-pair intermediate nodes `K_sd` of a one/two-hop path set. The entry
/// `k == d` stands for the direct edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    n: usize,
    mids: Vec<Vec<NodeId>>,
}

impl CandidateSet {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: NodeId, d: NodeId) -> &[NodeId] {
        &self.mids[s * self.n + d]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Sd, &[NodeId])> + '_ {
        self.mids
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(idx, m)| ((idx / self.n, idx % self.n), m.as_slice()))
    }

    /// Node sequence of the path `s -> k -> d`.
    pub fn path(s: NodeId, k: NodeId, d: NodeId) -> Path {
        if k == d {
            vec![s, d]
        } else {
            vec![s, k, d]
        }
    }

    pub fn to_path_set(&self) -> PathSet {
        let mut out = PathSet::empty(self.n);
        for ((s, d), mids) in self.pairs() {
            out.set(s, d, mids.iter().map(|&k| Self::path(s, k, d)).collect());
        }
        out
    }
}
