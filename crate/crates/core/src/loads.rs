//! Per-edge load bookkeeping shared by the dense and path formulations.
//!
//! Loads live in an `n x n` matrix. Utilizations are mirrored into a
//! tournament tree so the maximum link utilization and the set of edges
//! near it can be read without scanning every edge.

use crate::error::{Result, TeError};
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone)]
pub struct LinkLoads {
    n: usize,
    load: Vec<f64>,
    inv_cap: Vec<f64>,
    usable: Vec<bool>,
    tree: MaxTree,
}

impl LinkLoads {
    /// All-zero loads on `topology`.
    pub fn new(topology: &Topology) -> Self {
        let n = topology.node_count();
        let mut inv_cap = vec![0.0; n * n];
        let mut usable = vec![false; n * n];
        for (s, d, cap) in topology.edges() {
            inv_cap[s * n + d] = cap.inverse();
            usable[s * n + d] = true;
        }
        let mut tree = MaxTree::new(n * n);
        for (idx, &ok) in usable.iter().enumerate() {
            if ok {
                tree.set(idx, 0.0);
            }
        }
        LinkLoads {
            n,
            load: vec![0.0; n * n],
            inv_cap,
            usable,
            tree,
        }
    }

    /// Builds loads from a full matrix, rejecting load on unusable edges.
    pub fn from_matrix(topology: &Topology, load: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(topology);
        assert_eq!(load.len(), out.load.len());
        for (idx, &l) in load.iter().enumerate() {
            if l > 0.0 && !out.usable[idx] {
                return Err(TeError::CapacityZeroWithLoad {
                    src: idx / out.n,
                    dst: idx % out.n,
                });
            }
        }
        out.load = load;
        for idx in 0..out.load.len() {
            if out.usable[idx] {
                out.tree.set(idx, out.load[idx] * out.inv_cap[idx]);
            }
        }
        Ok(out)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn load(&self, s: NodeId, d: NodeId) -> f64 {
        self.load[s * self.n + d]
    }

    /// `load / c`, 0 for unbounded or absent edges.
    #[inline]
    pub fn util(&self, s: NodeId, d: NodeId) -> f64 {
        let idx = s * self.n + d;
        self.load[idx] * self.inv_cap[idx]
    }

    #[inline]
    pub fn inv_capacity(&self, s: NodeId, d: NodeId) -> f64 {
        self.inv_cap[s * self.n + d]
    }

    pub fn is_usable(&self, s: NodeId, d: NodeId) -> bool {
        self.usable[s * self.n + d]
    }

    /// Maximum link utilization; 0 on a graph without edges.
    pub fn mlu(&self) -> f64 {
        self.tree.max().max(0.0)
    }

    /// Adds `delta` to the load of a usable edge.
    #[inline]
    pub fn add(&mut self, s: NodeId, d: NodeId, delta: f64) {
        let idx = s * self.n + d;
        debug_assert!(self.usable[idx], "load added to unusable edge ({s}, {d})");
        self.load[idx] += delta;
        self.tree.set(idx, self.load[idx] * self.inv_cap[idx]);
    }

    /// Overwrites the load of a usable edge.
    #[inline]
    pub fn set(&mut self, s: NodeId, d: NodeId, value: f64) {
        let idx = s * self.n + d;
        debug_assert!(self.usable[idx]);
        self.load[idx] = value;
        self.tree.set(idx, value * self.inv_cap[idx]);
    }

    /// Usable edges with utilization at least `threshold`, row-major.
    pub fn edges_at_least(&self, threshold: f64) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        self.tree.collect_at_least(threshold, &mut out);
        out.into_iter().map(|idx| (idx / self.n, idx % self.n)).collect()
    }

    /// Runs `f` with the given edge loads temporarily replaced, then restores
    /// the original values bit for bit.
    pub fn with_overrides<R>(&mut self, overrides: &[(NodeId, NodeId, f64)], f: impl FnOnce(&Self) -> R) -> R {
        let saved: Vec<f64> = overrides.iter().map(|&(s, d, _)| self.load(s, d)).collect();
        for &(s, d, v) in overrides {
            self.set(s, d, v);
        }
        let out = f(self);
        for (&(s, d, _), v) in overrides.iter().zip(saved).rev() {
            self.set(s, d, v);
        }
        out
    }

    pub fn load_matrix(&self) -> &[f64] {
        &self.load
    }

    /// Usable edges as `(src, dst, load, util)`.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, f64, f64)> + '_ {
        (0..self.load.len())
            .filter(move |&i| self.usable[i])
            .map(move |i| (i / self.n, i % self.n, self.load[i], self.load[i] * self.inv_cap[i]))
    }
}

/// Array-backed tournament tree over `f64` leaves; unset leaves are `-inf`.
#[derive(Debug, Clone)]
struct MaxTree {
    leaves: usize,
    nodes: Vec<f64>,
}

impl MaxTree {
    fn new(len: usize) -> Self {
        let leaves = len.next_power_of_two().max(1);
        MaxTree {
            leaves,
            nodes: vec![f64::NEG_INFINITY; 2 * leaves],
        }
    }

    fn max(&self) -> f64 {
        self.nodes[1]
    }

    fn set(&mut self, idx: usize, value: f64) {
        let mut i = idx + self.leaves;
        self.nodes[i] = value;
        while i > 1 {
            i /= 2;
            let m = self.nodes[2 * i].max(self.nodes[2 * i + 1]);
            if self.nodes[i] == m {
                break;
            }
            self.nodes[i] = m;
        }
    }

    fn collect_at_least(&self, threshold: f64, out: &mut Vec<usize>) {
        let mut stack = vec![1usize];
        while let Some(i) = stack.pop() {
            if self.nodes[i] < threshold {
                continue;
            }
            if i >= self.leaves {
                out.push(i - self.leaves);
            } else {
                stack.push(2 * i + 1);
                stack.push(2 * i);
            }
        }
    }
}
